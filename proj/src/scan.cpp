#include "chirpmix/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace chirpmix {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

TransferMap offset_scan(const ScanConfig& cfg, int jobs,
                        const std::function<void(long, long)>& progress) {
  if (cfg.grid_points < 2)
    throw std::invalid_argument("offset_scan: grid_points must be >= 2");
  if (cfg.time_budget <= 0.0)
    throw std::invalid_argument("offset_scan: time_budget must be positive");
  if (cfg.sequence.size() == 0)
    throw std::invalid_argument("offset_scan: empty sequence");
  if (cfg.sequence.duration() > cfg.time_budget)
    throw std::invalid_argument(
        "offset_scan: sequence duration " + fmt(cfg.sequence.duration()) +
        " s exceeds time budget " + fmt(cfg.time_budget) + " s");
  if (jobs < 1) jobs = 1;

  TransferMap map;
  map.cycle_duration = cfg.sequence.duration();
  map.time_budget = cfg.time_budget;
  const int n = cfg.grid_points;
  map.nu_I.resize(n);
  for (int k = 0; k < n; ++k)
    map.nu_I[k] =
        cfg.nu_min + (cfg.nu_max - cfg.nu_min) * k / static_cast<double>(n - 1);
  map.nu_S = map.nu_I;
  map.best_efficiency.assign(static_cast<std::size_t>(n) * n, 0.0);
  map.best_time.assign(static_cast<std::size_t>(n) * n, 0.0);

  const auto n_cycles =
      static_cast<long>(std::floor(cfg.time_budget / map.cycle_duration *
                                   (1.0 + 1e-12)));

  // One slot per grid pair; workers pull indices from a shared counter and
  // write only their own slot, so output is schedule-independent.
  std::atomic<long> next{0};
  std::atomic<long> done{0};
  const long total = static_cast<long>(n) * n;
  const long report_every = std::max(1L, total / 20);
  auto worker = [&]() {
    for (long idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
      const long i = idx / n;
      const long s = idx % n;
      const SpinSystem sys{2.0 * kPi * map.nu_I[i], 2.0 * kPi * map.nu_S[s],
                           cfg.J};
      UnitaryPropagator uc = two_spin_propagate(cfg.sequence, sys);
      uc.matrix = nearest_unitary(uc.matrix);
      Mat4c P = Mat4c::Identity();
      double best = 0.0;
      double best_t = 0.0;
      for (long c = 1; c <= n_cycles; ++c) {
        P = uc.matrix * P;
        const double e = transfer_efficiency(P);
        if (e > best) {
          best = e;
          best_t = static_cast<double>(c) * uc.duration;
        }
      }
      map.best_efficiency[idx] = best;
      map.best_time[idx] = best_t;
      const long finished = done.fetch_add(1) + 1;
      if (progress && (finished % report_every == 0 || finished == total))
        progress(finished, total);
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return map;
}

BandwidthSummary bandwidth_summary(const TransferMap& map, double threshold,
                                   double separation_cap) {
  if (map.nu_I.empty() || map.best_efficiency.empty())
    throw std::invalid_argument("bandwidth_summary: empty map");
  if (threshold <= 0.0 || threshold >= 1.0)
    throw std::invalid_argument("bandwidth_summary: threshold must be in (0,1)");

  BandwidthSummary out;
  out.pairs_total = static_cast<long>(map.best_efficiency.size());
  for (const double e : map.best_efficiency)
    if (e >= threshold) ++out.pairs_in_band;
  out.area_fraction =
      static_cast<double>(out.pairs_in_band) / static_cast<double>(out.pairs_total);

  // Candidate half-widths are the axis magnitudes; a band passes when every
  // pair inside it (and within the separation cap) reaches the threshold.
  std::vector<double> cand;
  for (const double nu : map.nu_I) cand.push_back(std::abs(nu));
  std::sort(cand.begin(), cand.end(), std::greater<>());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  const double tol = 1e-9;
  for (const double W : cand) {
    bool ok = true;
    for (std::size_t i = 0; i < map.nu_I.size() && ok; ++i) {
      if (std::abs(map.nu_I[i]) > W + tol) continue;
      for (std::size_t s = 0; s < map.nu_S.size(); ++s) {
        if (std::abs(map.nu_S[s]) > W + tol) continue;
        if (std::abs(map.nu_I[i] - map.nu_S[s]) > separation_cap + tol)
          continue;
        if (map.eff(i, s) < threshold) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      out.W = W;
      return out;
    }
  }
  out.W = 0.0;
  return out;
}

void write_map_csv(std::ostream& os, const TransferMap& map) {
  os << "nu_I_hz,nu_S_hz,best_efficiency,best_time_s\n";
  for (std::size_t i = 0; i < map.nu_I.size(); ++i)
    for (std::size_t s = 0; s < map.nu_S.size(); ++s)
      os << fmt(map.nu_I[i]) << ',' << fmt(map.nu_S[s]) << ','
         << fmt(map.best_efficiency[i * map.nu_S.size() + s]) << ','
         << fmt(map.best_time[i * map.nu_S.size() + s]) << '\n';
}

void write_map_metadata(std::ostream& os, const TransferMap& map,
                        const std::string& sequence_desc, double J,
                        const std::string& version, const std::string& hash) {
  os << "sequence = " << sequence_desc << '\n'
     << "J_hz = " << fmt(J) << '\n'
     << "time_budget_s = " << fmt(map.time_budget) << '\n'
     << "cycle_duration_s = " << fmt(map.cycle_duration) << '\n'
     << "grid_points = " << map.nu_I.size() << '\n'
     << "nu_min_hz = " << fmt(map.nu_I.front()) << '\n'
     << "nu_max_hz = " << fmt(map.nu_I.back()) << '\n'
     << "version = " << version << '\n'
     << "config_hash = " << hash << '\n';
}

}  // namespace chirpmix
