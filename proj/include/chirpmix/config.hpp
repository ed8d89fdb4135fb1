#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chirpmix/propagate.hpp"
#include "chirpmix/waveform.hpp"

namespace chirpmix {

// Config-file problem with a "file:line: what" message.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigValue {
  enum class Kind { str, number, boolean, str_list };
  Kind kind = Kind::str;
  std::string str;
  double number = 0.0;
  bool boolean = false;
  std::vector<std::string> list;
  int line = 0;
};

using ConfigTable = std::map<std::string, ConfigValue>;

// Minimal structured key-value file: [table] and [[table]] headers,
// key = value pairs (strings, numbers, booleans, string arrays),
// '#' comments. Line numbers are kept for error messages.
struct ParsedConfig {
  std::string source;
  ConfigTable root;
  std::map<std::string, ConfigTable> tables;
  std::map<std::string, std::vector<ConfigTable>> table_arrays;
};

ParsedConfig parse_config_text(std::string_view text, std::string source);
ParsedConfig parse_config_file(const std::string& path);

// Apply "table.key=value" (or "key=value" for root keys) on top of a
// parsed config; the value grammar matches the file format.
void apply_override(ParsedConfig& cfg, std::string_view keyval);

// FNV-1a over a canonical serialization; stable across runs and key order.
std::string config_hash_hex(const ParsedConfig& cfg);

// Experiment description in the units people type (kHz, us); converted to
// angular units only at the physics boundary.
struct ExperimentConfig {
  // [chirp]
  double A_khz = 30.0;
  double omega1_khz = 10.0;
  double omega1_sq_over = 16.0;  // sweep rate a = omega1^2 / omega1_sq_over
  double dwell_us = 0.5;
  double carrier_khz = 0.0;
  // [spins]
  double nu_I_khz = -5.0;
  double nu_S_khz = 20.0;
  double J_hz = 0.0;  // required
  // [schedule]
  int n_supercycles = 20;
  // [scan]
  int grid = 41;
  double budget_over_J = 10.0;
  double nu_min_khz = -25.0;
  double nu_max_khz = 25.0;
  double threshold = 0.5;
  double separation_cap_khz = 15.0;
  // [sequence]
  std::string type = "chirp";  // "chirp" | "composite"
  std::string table;           // composite table path
  // [buildup]
  std::vector<std::pair<double, double>> pairs_khz;
  // [output]
  std::string dir = "out";

  std::string hash;  // of the parsed config it came from

  ChirpParams chirp_params() const;
  SpinSystem spin_system() const;
};

// Validates table/key names (unknown keys rejected with line numbers),
// requires spins.J_hz, and converts types.
ExperimentConfig load_experiment(const ParsedConfig& cfg);

// Composite pulse table file: a [composite] block (name, dwell_us, cycle
// token list) plus one [[element]] per hard pulse of the base sequence R.
// Token "R" plays the base sequence, "Rbar" the same with all phases + 180.
struct CompositeTable {
  std::string name;
  double dwell_us = 0.25;
  std::vector<CompositeElement> base;
  std::vector<std::string> cycle;
};

CompositeTable load_composite_table(const std::string& path);
PulseWaveform build_composite_cycle(const CompositeTable& tab, double omega1);

}  // namespace chirpmix
