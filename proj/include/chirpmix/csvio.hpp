#pragma once

#include <iosfwd>
#include <string>

namespace chirpmix {

// Shortest round-trip-ish formatting used by every CSV writer; fixed format
// keeps outputs byte-identical across runs.
std::string fmt_g(double v);

// "# chirpmix <version> config=<hash>" provenance comment, first line of
// every emitted data file.
void write_provenance(std::ostream& os, const std::string& hash,
                      const std::string& extra = "");

}  // namespace chirpmix
