#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "chirpmix/propagate.hpp"
#include "chirpmix/waveform.hpp"

namespace chirpmix {

struct ScanConfig {
  double nu_min = -25e3;    // Hz
  double nu_max = 25e3;     // Hz
  int grid_points = 41;     // per axis
  double J = 0.0;           // Hz
  double time_budget = 0.0; // seconds
  PulseWaveform sequence;   // one mixing cycle (supercycle or composite)
};

struct TransferMap {
  std::vector<double> nu_I;          // Hz
  std::vector<double> nu_S;          // Hz
  std::vector<double> best_efficiency;  // row-major [i * nu_S.size() + s]
  std::vector<double> best_time;        // seconds, <= budget
  double cycle_duration = 0.0;
  double time_budget = 0.0;

  double eff(std::size_t i, std::size_t s) const {
    return best_efficiency[i * nu_S.size() + s];
  }
};

// For every offset pair, build the cycle propagator once, walk its powers
// up to the time budget, and keep the best efficiency and the time it was
// reached. Grid points are independent slots, so the result is identical
// for any worker count. Throws if the sequence is longer than the budget
// or the grid is degenerate. The progress callback (done, total) fires
// occasionally from worker threads; it must not touch the map.
TransferMap offset_scan(const ScanConfig& cfg, int jobs = 1,
                        const std::function<void(long, long)>& progress = {});

struct BandwidthSummary {
  double W = 0.0;             // Hz: largest usable symmetric band [-W, W]
  double area_fraction = 0.0; // fraction of all grid pairs >= threshold
  long pairs_in_band = 0;
  long pairs_total = 0;
};

// Largest W such that every pair with both offsets in [-W, W] and
// |nu_I - nu_S| <= separation_cap reaches the threshold, plus the fraction
// of the whole grid above it. Throws on an empty map or a threshold
// outside (0, 1).
BandwidthSummary bandwidth_summary(const TransferMap& map, double threshold,
                                   double separation_cap = 15e3);

// CSV rows "nu_I_hz,nu_S_hz,best_efficiency,best_time_s".
void write_map_csv(std::ostream& os, const TransferMap& map);

// Metadata sidecar, one "key = value" per line.
void write_map_metadata(std::ostream& os, const TransferMap& map,
                        const std::string& sequence_desc, double J,
                        const std::string& version, const std::string& hash);

}  // namespace chirpmix
