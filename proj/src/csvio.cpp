#include "chirpmix/csvio.hpp"

#include <cstdio>
#include <ostream>

#include "chirpmix/version.hpp"

namespace chirpmix {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_provenance(std::ostream& os, const std::string& hash,
                      const std::string& extra) {
  os << "# chirpmix " << kVersion << " config=" << hash;
  if (!extra.empty()) os << ' ' << extra;
  os << '\n';
}

}  // namespace chirpmix
