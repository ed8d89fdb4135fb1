#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "chirpmix/config.hpp"
#include "chirpmix/csvio.hpp"
#include "chirpmix/effham.hpp"
#include "chirpmix/propagate.hpp"
#include "chirpmix/scan.hpp"
#include "chirpmix/spinops.hpp"
#include "chirpmix/version.hpp"
#include "chirpmix/waveform.hpp"

namespace fs = std::filesystem;
using namespace chirpmix;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kExitOk = 0;
constexpr int kExitPhysics = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  bool force = false;
};

// A relative sequence.table that is not found from the working directory is
// looked up beside the config file, so shipped configs run from anywhere.
std::string resolve_table(const std::string& config_path,
                          const std::string& table) {
  if (table.empty()) return table;
  const fs::path t(table);
  if (t.is_absolute() || fs::exists(t)) return table;
  const fs::path beside = fs::path(config_path).parent_path() / t;
  if (fs::exists(beside)) return beside.string();
  return table;
}

ExperimentConfig load(const Options& o) {
  ParsedConfig pc = parse_config_file(o.config);
  for (const std::string& s : o.sets) apply_override(pc, s);
  ExperimentConfig e = load_experiment(pc);
  if (!o.out.empty()) e.dir = o.out;
  e.table = resolve_table(o.config, e.table);
  return e;
}

std::ofstream open_out(const ExperimentConfig& e, const std::string& name) {
  fs::create_directories(e.dir);
  const fs::path path = fs::path(e.dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

// Shared adiabaticity gate for the chirp-driven commands: warn past 1/5,
// refuse past 1 unless --force.
bool adiabaticity_gate(const ChirpParams& p, bool force) {
  const double ratio = p.adiabaticity_ratio();
  if (ratio > 1.0 && !force) {
    std::cerr << "refusing: adiabaticity ratio a/omega1^2 = " << fmt_g(ratio)
              << " exceeds 1 (pass --force to run anyway)\n";
    return false;
  }
  if (ratio > 0.2)
    std::cerr << "warning: adiabaticity ratio a/omega1^2 = " << fmt_g(ratio)
              << " exceeds 1/5; the sweep is only marginally adiabatic\n";
  return true;
}

PulseWaveform mixing_cycle(const ExperimentConfig& e) {
  if (e.type == "composite") {
    if (e.table.empty())
      throw ConfigError("sequence.type = composite needs sequence.table");
    return build_composite_cycle(load_composite_table(e.table),
                                 e.chirp_params().omega1);
  }
  return supercycle(chirp(e.chirp_params(), e.dwell_us * 1e-6));
}

int cmd_waveform(const ExperimentConfig& e, bool force) {
  const ChirpParams p = e.chirp_params();
  if (e.type == "chirp" && !adiabaticity_gate(p, force)) return kExitPhysics;
  const PulseWaveform cycle = mixing_cycle(e);
  auto f = open_out(e, "waveform.csv");
  write_provenance(f, e.hash);
  write_waveform_csv(f, cycle);
  std::cout << "sequence = " << e.type << '\n';
  if (e.type == "chirp") {
    std::cout << "T_ms = " << fmt_g(p.T() * 1e3) << '\n'
              << "supercycle_ms = " << fmt_g(cycle.duration() * 1e3) << '\n'
              << "adiabaticity_ratio = " << fmt_g(p.adiabaticity_ratio())
              << '\n';
  } else {
    std::cout << "cycle_ms = " << fmt_g(cycle.duration() * 1e3) << '\n';
  }
  std::cout << "n_supercycles = " << e.n_supercycles << '\n'
            << "total_mixing_ms = "
            << fmt_g(e.n_supercycles * cycle.duration() * 1e3) << '\n'
            << "samples = " << cycle.size() << '\n';
  return kExitOk;
}

int cmd_eta(const ExperimentConfig& e, bool force) {
  const ChirpParams p = e.chirp_params();
  if (!adiabaticity_gate(p, force)) return kExitPhysics;
  const SpinSystem sys = e.spin_system();
  const CouplingIntegrals ci =
      coupling_integrals(p, sys, e.dwell_us * 1e-6);
  auto f = open_out(e, "eta.csv");
  write_provenance(f, e.hash,
                   "pair_khz=" + fmt_g(e.nu_I_khz) + "," + fmt_g(e.nu_S_khz) +
                       " J_hz=" + fmt_g(e.J_hz));
  write_integrals_csv(f, ci);
  const double eta_T = ci.eta.back();
  std::cout << "eta_T = " << fmt_g(eta_T) << '\n';
  if (eta_T > 0.0) {
    const TransferSchedule sched = periods_to_pi(eta_T, p.T());
    std::cout << "periods_to_pi = " << sched.periods << '\n'
              << "predicted_total_s = " << fmt_g(sched.total_time) << '\n';
  } else {
    std::cout << "periods_to_pi = unreachable\n"
              << "predicted_total_s = inf\n";
  }
  return kExitOk;
}

int cmd_buildup(const ExperimentConfig& e, bool force) {
  const ChirpParams p = e.chirp_params();
  if (e.type == "chirp" && !adiabaticity_gate(p, force)) return kExitPhysics;
  const PulseWaveform cycle = mixing_cycle(e);
  std::vector<std::pair<double, double>> pairs = e.pairs_khz;
  if (pairs.empty()) pairs.emplace_back(e.nu_I_khz, e.nu_S_khz);
  std::cout << "n_supercycles = " << e.n_supercycles << '\n'
            << "total_mixing_ms = "
            << fmt_g(e.n_supercycles * cycle.duration() * 1e3) << '\n';
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const SpinSystem sys{2.0 * kPi * pairs[i].first * 1e3,
                         2.0 * kPi * pairs[i].second * 1e3, e.J_hz};
    const MixingCurve curve = mixing_buildup(cycle, sys, e.n_supercycles);
    auto f = open_out(e, "buildup_" + std::to_string(i + 1) + ".csv");
    write_provenance(f, e.hash,
                     "pair_khz=" + fmt_g(pairs[i].first) + "," +
                         fmt_g(pairs[i].second) + " J_hz=" + fmt_g(e.J_hz));
    write_curve_csv(f, curve, e.J_hz);
    double crossing = -1.0;
    for (std::size_t k = 0; k < curve.times.size(); ++k)
      if (curve.efficiency[k] > 0.95) {
        crossing = curve.times[k];
        break;
      }
    std::cout << "pair_khz = " << fmt_g(pairs[i].first) << ","
              << fmt_g(pairs[i].second);
    if (crossing >= 0.0)
      std::cout << " crosses_0.95_at_s = " << fmt_g(crossing)
                << " (" << fmt_g(crossing * e.J_hz) << "/J)\n";
    else
      std::cout << " crosses_0.95_at_s = never\n";
  }
  return kExitOk;
}

int cmd_scan(const ExperimentConfig& e, bool force, int jobs) {
  const ChirpParams p = e.chirp_params();
  if (!adiabaticity_gate(p, force)) return kExitPhysics;
  if (e.J_hz <= 0.0)
    throw ConfigError("cmd_scan needs spins.J_hz > 0 for the time budget");
  if (e.table.empty())
    throw ConfigError("cmd_scan needs sequence.table for the composite map");
  if (jobs < 1) jobs = 1;

  ScanConfig sc;
  sc.nu_min = e.nu_min_khz * 1e3;
  sc.nu_max = e.nu_max_khz * 1e3;
  sc.grid_points = e.grid;
  sc.J = e.J_hz;
  sc.time_budget = e.budget_over_J / e.J_hz;

  const auto progress = [](const char* label) {
    return [label](long done, long total) {
      std::cerr << label << " scan: " << done << "/" << total << '\n';
    };
  };

  sc.sequence = supercycle(chirp(p, e.dwell_us * 1e-6));
  const TransferMap chirp_map = offset_scan(sc, jobs, progress("chirp"));

  const CompositeTable tab = load_composite_table(e.table);
  sc.sequence = build_composite_cycle(tab, p.omega1);
  const TransferMap comp_map = offset_scan(sc, jobs, progress("composite"));

  const double cap = e.separation_cap_khz * 1e3;
  const BandwidthSummary bw_chirp =
      bandwidth_summary(chirp_map, e.threshold, cap);
  const BandwidthSummary bw_comp =
      bandwidth_summary(comp_map, e.threshold, cap);

  {
    auto f = open_out(e, "transfer_chirp.csv");
    write_provenance(f, e.hash, "sequence=chirp");
    write_map_csv(f, chirp_map);
    auto m = open_out(e, "transfer_chirp.meta.txt");
    write_map_metadata(m, chirp_map, "chirp supercycle", e.J_hz, kVersion,
                       e.hash);
  }
  {
    auto f = open_out(e, "transfer_composite.csv");
    write_provenance(f, e.hash, "sequence=" + tab.name);
    write_map_csv(f, comp_map);
    auto m = open_out(e, "transfer_composite.meta.txt");
    write_map_metadata(m, comp_map, tab.name, e.J_hz, kVersion, e.hash);
  }

  std::string summary;
  summary += "threshold = " + fmt_g(e.threshold) + "\n";
  summary += "separation_cap_hz = " + fmt_g(cap) + "\n";
  summary += "W_chirp_hz = " + fmt_g(bw_chirp.W) + "\n";
  summary += "W_composite_hz = " + fmt_g(bw_comp.W) + "\n";
  summary += "area_fraction_chirp = " + fmt_g(bw_chirp.area_fraction) + "\n";
  summary +=
      "area_fraction_composite = " + fmt_g(bw_comp.area_fraction) + "\n";
  summary += std::string("chirp_wider = ") +
             (bw_chirp.W > bw_comp.W ? "true" : "false") + "\n";
  {
    auto f = open_out(e, "summary.txt");
    write_provenance(f, e.hash);
    f << summary;
  }
  std::cout << summary;
  return kExitOk;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

int cmd_verify(const ExperimentConfig& e) {
  const ChirpParams p = e.chirp_params();
  const SpinSystem sys = e.spin_system();
  const double dwell = e.dwell_us * 1e-6;
  std::vector<Check> checks;

  const auto run = [&checks](const std::string& name,
                             const std::function<std::pair<bool, std::string>()>& body) {
    Check c;
    c.name = name;
    try {
      const auto [pass, detail] = body();
      c.pass = pass;
      c.detail = detail;
    } catch (const std::exception& ex) {
      c.pass = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    checks.push_back(c);
  };

  // Every propagator we hand out must be unitary.
  run("unitarity", [&]() -> std::pair<bool, std::string> {
    const UnitaryPropagator u =
        two_spin_propagate(supercycle(chirp(p, dwell)), sys);
    const double defect = unitarity_defect(u.matrix);
    return {defect < 1e-9, "defect=" + fmt_g(defect) + " bound=1e-9"};
  });

  // With J=0 the pair factorizes into a tensor product of one-spin flows.
  run("j0_factorization", [&]() -> std::pair<bool, std::string> {
    const PulseWaveform w = chirp(p, dwell);
    const SpinSystem j0{sys.omega_I, sys.omega_S, 0.0};
    const Mat4c U = two_spin_propagate(w, j0).matrix;
    const Mat2c UI = single_spin_propagate(w, sys.omega_I);
    const Mat2c US = single_spin_propagate(w, sys.omega_S);
    Mat4c K;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        K.block<2, 2>(2 * i, 2 * j) = UI(i, j) * US;
    const double diff = (U - K).norm();
    return {diff < 1e-8, "diff=" + fmt_g(diff) + " bound=1e-8"};
  });

  // When the sweep sits midway between the spins, the zero-quantum weight
  // equals omega1^2 / (omega1^2 + Delta^2/4) exactly.
  run("attenuation_identity", [&]() -> std::pair<bool, std::string> {
    const double mid = 0.5 * (sys.omega_I + sys.omega_S);
    const double t_mid = (p.A + mid - p.carrier) / p.a;
    const PairFieldState st = effective_field(p, sys, t_mid);
    const double half = 0.5 * (st.theta_I - st.theta_S);
    const double lhs = std::cos(half) * std::cos(half);
    const double rhs = attenuation_factor(p.omega1, sys.omega_I - sys.omega_S);
    const double diff = std::abs(lhs - rhs);
    return {diff < 1e-12, "diff=" + fmt_g(diff) + " bound=1e-12"};
  });

  // Frame-factorized rotation vs exact Bloch propagation, z image.
  run("adiabatic_factorization", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    const PulseWaveform w = chirp(p, dwell);
    for (const double omega0 : {sys.omega_I, 0.0, sys.omega_S}) {
      const BlochTrajectory traj =
          bloch_propagate(w, omega0, Vec3d(0, 0, 1));
      for (const double frac : {0.25, 0.5, 0.75, 1.0}) {
        const auto idx = static_cast<std::size_t>(
            std::llround(frac * static_cast<double>(w.size())));
        const double t = traj.times[idx];
        const Vec3d exact = traj.points[idx];
        const Vec3d model =
            adiabatic_factorization(p, omega0, t) * Vec3d(0, 0, 1);
        const double ang = std::acos(std::clamp(exact.dot(model), -1.0, 1.0));
        worst = std::max(worst, ang);
      }
    }
    // mid-crossing wobble of an adiabatic sweep is ~a/omega1^2 (0.0625 at
    // the default rate), so the pass bound sits well above it
    return {worst < 0.15, "worst_angle=" + fmt_g(worst) + " bound=0.15"};
  });

  // eta(T) must be insensitive to halving the integration step, and the
  // configured dwell must satisfy the waveform sampling limit.
  run("dwell_convergence", [&]() -> std::pair<bool, std::string> {
    chirp(p, dwell);  // throws if the dwell undersamples the sweep
    const double a = coupling_integrals(p, sys, dwell).eta.back();
    const double b = coupling_integrals(p, sys, 0.5 * dwell).eta.back();
    const double diff = std::abs(a - b);
    return {diff < 1e-4, "diff=" + fmt_g(diff) + " bound=1e-4"};
  });

  // Two-period residual linear in eps, four-period residual cubic.
  run("supercycle_scaling", [&]() -> std::pair<bool, std::string> {
    const ErrorScalingFit fit = supercycle_error_scaling(
        0.4, 1.1, {0.01, 0.02, 0.04, 0.08, 0.16});
    const bool ok = std::abs(fit.slope_two - 1.0) < 0.2 && fit.slope_four > 2.5;
    return {ok, "slope_two=" + fmt_g(fit.slope_two) +
                    " slope_four=" + fmt_g(fit.slope_four) +
                    " bounds: |s2-1|<0.2, s4>2.5"};
  });

  bool all = true;
  for (const Check& c : checks) {
    all = all && c.pass;
    std::cout << "check=" << c.name << " status=" << (c.pass ? "PASS" : "FAIL")
              << ' ' << c.detail << '\n';
  }
  std::cout << "verify = " << (all ? "PASS" : "FAIL") << '\n';
  return all ? kExitOk : kExitPhysics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chirp-driven homonuclear mixing toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config, "experiment config file")
      ->required();
  app.add_option("--set", opt.sets,
                 "override a config value (table.key=value), repeatable");
  app.add_option("--out", opt.out, "output directory (overrides config)");
  app.add_option("--jobs", opt.jobs, "worker threads for scans");
  app.add_flag("--force", opt.force, "run even when the sweep is non-adiabatic");

  auto* c_wave = app.add_subcommand("waveform", "emit the sampled mixing cycle");
  auto* c_eta = app.add_subcommand("eta", "coupling integrals over one sweep");
  auto* c_buildup =
      app.add_subcommand("buildup", "transfer efficiency vs mixing time");
  auto* c_scan =
      app.add_subcommand("scan", "offset-grid transfer maps and bandwidths");
  auto* c_verify = app.add_subcommand("verify", "run the physics property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const ExperimentConfig e = load(opt);
    if (c_wave->parsed()) return cmd_waveform(e, opt.force);
    if (c_eta->parsed()) return cmd_eta(e, opt.force);
    if (c_buildup->parsed()) return cmd_buildup(e, opt.force);
    if (c_scan->parsed()) return cmd_scan(e, opt.force, opt.jobs);
    if (c_verify->parsed()) return cmd_verify(e);
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitPhysics;
  }
  return kExitConfig;
}
