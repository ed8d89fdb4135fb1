#include "chirpmix/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace chirpmix {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string loc(const std::string& source, int line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// Strip a trailing comment, respecting double quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool parse_number(std::string_view s, double* out) {
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || tmp.empty()) return false;
  *out = v;
  return true;
}

ConfigValue parse_value(std::string_view raw, const std::string& source,
                        int line) {
  ConfigValue v;
  v.line = line;
  raw = trim(raw);
  if (raw.empty()) throw ConfigError(loc(source, line) + "missing value");
  if (raw == "true" || raw == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.boolean = (raw == "true");
    return v;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw ConfigError(loc(source, line) + "unterminated array");
    v.kind = ConfigValue::Kind::str_list;
    std::string_view body = trim(raw.substr(1, raw.size() - 2));
    while (!body.empty()) {
      // split on the next comma outside quotes
      bool quoted = false;
      std::size_t comma = std::string_view::npos;
      for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '"') quoted = !quoted;
        if (body[i] == ',' && !quoted) {
          comma = i;
          break;
        }
      }
      std::string_view item = trim(body.substr(0, comma));
      if (item.size() < 2 || item.front() != '"' || item.back() != '"')
        throw ConfigError(loc(source, line) +
                          "array elements must be quoted strings");
      v.list.emplace_back(item.substr(1, item.size() - 2));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
      if (body.empty())
        throw ConfigError(loc(source, line) + "trailing comma in array");
    }
    return v;
  }
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw ConfigError(loc(source, line) + "unterminated string");
    v.kind = ConfigValue::Kind::str;
    v.str = std::string(raw.substr(1, raw.size() - 2));
    return v;
  }
  if (parse_number(raw, &v.number)) {
    v.kind = ConfigValue::Kind::number;
    return v;
  }
  // bare token (e.g. a path); keep it as a string
  v.kind = ConfigValue::Kind::str;
  v.str = std::string(raw);
  return v;
}

void parse_assignment(std::string_view s, ConfigTable* table,
                      const std::string& source, int line) {
  const std::size_t eq = s.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(loc(source, line) + "expected key = value");
  const std::string key(trim(s.substr(0, eq)));
  if (key.empty() ||
      !std::all_of(key.begin(), key.end(), is_key_char))
    throw ConfigError(loc(source, line) + "bad key '" + key + "'");
  if (table->count(key))
    throw ConfigError(loc(source, line) + "duplicate key '" + key + "'");
  (*table)[key] = parse_value(s.substr(eq + 1), source, line);
}

}  // namespace

ParsedConfig parse_config_text(std::string_view text, std::string source) {
  ParsedConfig cfg;
  cfg.source = std::move(source);
  ConfigTable* current = &cfg.root;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      const bool is_array = line.size() > 1 && line[1] == '[';
      const std::string_view close = is_array ? "]]" : "]";
      if (line.substr(line.size() - close.size()) != close)
        throw ConfigError(loc(cfg.source, line_no) + "unterminated table header");
      const std::string name(
          trim(line.substr(is_array ? 2 : 1,
                           line.size() - 2 * (is_array ? 2 : 1))));
      if (name.empty() ||
          !std::all_of(name.begin(), name.end(), is_key_char))
        throw ConfigError(loc(cfg.source, line_no) + "bad table name '" +
                          name + "'");
      if (is_array) {
        cfg.table_arrays[name].emplace_back();
        current = &cfg.table_arrays[name].back();
      } else {
        if (cfg.tables.count(name))
          throw ConfigError(loc(cfg.source, line_no) + "duplicate table '" +
                            name + "'");
        current = &cfg.tables[name];
      }
      continue;
    }
    parse_assignment(line, current, cfg.source, line_no);
  }
  return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_override(ParsedConfig& cfg, std::string_view keyval) {
  const std::size_t eq = keyval.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(keyval) +
                      "' must look like table.key=value");
  const std::string path(trim(keyval.substr(0, eq)));
  const std::size_t dot = path.find('.');
  ConfigTable* table = &cfg.root;
  std::string key = path;
  if (dot != std::string::npos) {
    const std::string tname = path.substr(0, dot);
    key = path.substr(dot + 1);
    if (key.find('.') != std::string::npos || tname.empty())
      throw ConfigError("override key '" + path + "' is not table.key");
    table = &cfg.tables[tname];
  }
  if (key.empty() || !std::all_of(key.begin(), key.end(), is_key_char))
    throw ConfigError("override key '" + path + "' is malformed");
  (*table)[key] = parse_value(keyval.substr(eq + 1), "<override>", 0);
}

namespace {

void hash_bytes(std::uint64_t* h, std::string_view s) {
  for (const char c : s) {
    *h ^= static_cast<unsigned char>(c);
    *h *= 1099511628211ULL;
  }
}

std::string serialize_value(const ConfigValue& v) {
  switch (v.kind) {
    case ConfigValue::Kind::str:
      return "s:" + v.str;
    case ConfigValue::Kind::boolean:
      return v.boolean ? "b:1" : "b:0";
    case ConfigValue::Kind::number: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "n:%.17g", v.number);
      return buf;
    }
    case ConfigValue::Kind::str_list: {
      std::string out = "l:";
      for (const auto& s : v.list) out += s + "\x1f";
      return out;
    }
  }
  return {};
}

void hash_table(std::uint64_t* h, const std::string& name,
                const ConfigTable& t) {
  for (const auto& [k, v] : t) {
    hash_bytes(h, name);
    hash_bytes(h, ".");
    hash_bytes(h, k);
    hash_bytes(h, "=");
    hash_bytes(h, serialize_value(v));
    hash_bytes(h, "\n");
  }
}

}  // namespace

std::string config_hash_hex(const ParsedConfig& cfg) {
  std::uint64_t h = 14695981039346656037ULL;
  hash_table(&h, "", cfg.root);
  for (const auto& [name, t] : cfg.tables) hash_table(&h, name, t);
  for (const auto& [name, arr] : cfg.table_arrays)
    for (std::size_t i = 0; i < arr.size(); ++i)
      hash_table(&h, name + "[" + std::to_string(i) + "]", arr[i]);
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Reader {
  const ParsedConfig& cfg;

  void check_known(
      const std::map<std::string, std::vector<std::string>>& schema) const {
    for (const auto& [k, v] : cfg.root)
      throw ConfigError(loc(cfg.source, v.line) + "unknown key '" + k +
                        "' (keys live in [table] blocks)");
    for (const auto& [tname, table] : cfg.tables) {
      const auto it = schema.find(tname);
      if (it == schema.end()) {
        const int line = table.empty() ? 0 : table.begin()->second.line;
        throw ConfigError(loc(cfg.source, line) + "unknown table '" + tname +
                          "'");
      }
      for (const auto& [k, v] : table)
        if (std::find(it->second.begin(), it->second.end(), k) ==
            it->second.end())
          throw ConfigError(loc(cfg.source, v.line) + "unknown key '" + tname +
                            "." + k + "'");
    }
    if (!cfg.table_arrays.empty())
      throw ConfigError(cfg.source + ": unexpected [[" +
                        cfg.table_arrays.begin()->first + "]] block");
  }

  const ConfigValue* find(const std::string& t, const std::string& k) const {
    const auto it = cfg.tables.find(t);
    if (it == cfg.tables.end()) return nullptr;
    const auto kit = it->second.find(k);
    return kit == it->second.end() ? nullptr : &kit->second;
  }

  void num(const std::string& t, const std::string& k, double* out) const {
    if (const ConfigValue* v = find(t, k)) {
      if (v->kind != ConfigValue::Kind::number)
        throw ConfigError(loc(cfg.source, v->line) + t + "." + k +
                          " must be a number");
      *out = v->number;
    }
  }

  void integer(const std::string& t, const std::string& k, int* out) const {
    double d = *out;
    num(t, k, &d);
    if (const ConfigValue* v = find(t, k)) {
      if (d != static_cast<int>(d))
        throw ConfigError(loc(cfg.source, v->line) + t + "." + k +
                          " must be an integer");
    }
    *out = static_cast<int>(d);
  }

  void str(const std::string& t, const std::string& k,
           std::string* out) const {
    if (const ConfigValue* v = find(t, k)) {
      if (v->kind != ConfigValue::Kind::str)
        throw ConfigError(loc(cfg.source, v->line) + t + "." + k +
                          " must be a string");
      *out = v->str;
    }
  }
};

}  // namespace

ExperimentConfig load_experiment(const ParsedConfig& cfg) {
  const Reader r{cfg};
  r.check_known({
      {"chirp", {"A_khz", "omega1_khz", "omega1_sq_over", "dwell_us",
                 "carrier_khz"}},
      {"spins", {"nu_I_khz", "nu_S_khz", "J_hz"}},
      {"schedule", {"n_supercycles"}},
      {"scan", {"grid", "budget_over_J", "nu_min_khz", "nu_max_khz",
                "threshold", "separation_cap_khz"}},
      {"sequence", {"type", "table"}},
      {"buildup", {"pairs_khz"}},
      {"output", {"dir"}},
  });
  ExperimentConfig e;
  r.num("chirp", "A_khz", &e.A_khz);
  r.num("chirp", "omega1_khz", &e.omega1_khz);
  r.num("chirp", "omega1_sq_over", &e.omega1_sq_over);
  r.num("chirp", "dwell_us", &e.dwell_us);
  r.num("chirp", "carrier_khz", &e.carrier_khz);
  r.num("spins", "nu_I_khz", &e.nu_I_khz);
  r.num("spins", "nu_S_khz", &e.nu_S_khz);
  const ConfigValue* jv = r.find("spins", "J_hz");
  if (!jv)
    throw ConfigError(cfg.source + ": missing required key spins.J_hz");
  r.num("spins", "J_hz", &e.J_hz);
  r.integer("schedule", "n_supercycles", &e.n_supercycles);
  r.integer("scan", "grid", &e.grid);
  r.num("scan", "budget_over_J", &e.budget_over_J);
  r.num("scan", "nu_min_khz", &e.nu_min_khz);
  r.num("scan", "nu_max_khz", &e.nu_max_khz);
  r.num("scan", "threshold", &e.threshold);
  r.num("scan", "separation_cap_khz", &e.separation_cap_khz);
  r.str("sequence", "type", &e.type);
  r.str("sequence", "table", &e.table);
  r.str("output", "dir", &e.dir);
  if (const ConfigValue* v = r.find("buildup", "pairs_khz")) {
    if (v->kind != ConfigValue::Kind::str_list)
      throw ConfigError(loc(cfg.source, v->line) +
                        "buildup.pairs_khz must be an array of \"nuI,nuS\"");
    for (const std::string& s : v->list) {
      const std::size_t comma = s.find(',');
      double a = 0.0, b = 0.0;
      if (comma == std::string::npos ||
          !parse_number(trim(std::string_view(s).substr(0, comma)), &a) ||
          !parse_number(trim(std::string_view(s).substr(comma + 1)), &b))
        throw ConfigError(loc(cfg.source, v->line) + "bad offset pair '" + s +
                          "' (want \"nuI,nuS\" in kHz)");
      e.pairs_khz.emplace_back(a, b);
    }
  }
  if (e.type != "chirp" && e.type != "composite")
    throw ConfigError(cfg.source +
                      ": sequence.type must be \"chirp\" or \"composite\"");
  if (e.omega1_sq_over <= 0.0 || e.dwell_us <= 0.0 || e.omega1_khz <= 0.0 ||
      e.A_khz <= 0.0)
    throw ConfigError(cfg.source +
                      ": chirp parameters must be positive");
  if (e.n_supercycles < 0)
    throw ConfigError(cfg.source + ": schedule.n_supercycles must be >= 0");
  e.hash = config_hash_hex(cfg);
  return e;
}

ChirpParams ExperimentConfig::chirp_params() const {
  ChirpParams p;
  p.A = 2.0 * kPi * A_khz * 1e3;
  p.omega1 = 2.0 * kPi * omega1_khz * 1e3;
  p.a = p.omega1 * p.omega1 / omega1_sq_over;
  p.carrier = 2.0 * kPi * carrier_khz * 1e3;
  return p;
}

SpinSystem ExperimentConfig::spin_system() const {
  return {2.0 * kPi * nu_I_khz * 1e3, 2.0 * kPi * nu_S_khz * 1e3, J_hz};
}

CompositeTable load_composite_table(const std::string& path) {
  const ParsedConfig cfg = parse_config_file(path);
  for (const auto& [k, v] : cfg.root)
    throw ConfigError(loc(cfg.source, v.line) + "unknown key '" + k + "'");
  for (const auto& [tname, table] : cfg.tables)
    if (tname != "composite") {
      const int line = table.empty() ? 0 : table.begin()->second.line;
      throw ConfigError(loc(cfg.source, line) + "unknown table '" + tname +
                        "'");
    }
  for (const auto& [aname, arr] : cfg.table_arrays)
    if (aname != "element")
      throw ConfigError(cfg.source + ": unexpected [[" + aname + "]] block");

  CompositeTable tab;
  tab.cycle = {"R"};
  const auto cit = cfg.tables.find("composite");
  if (cit != cfg.tables.end()) {
    for (const auto& [k, v] : cit->second) {
      if (k == "name") {
        tab.name = v.str;
      } else if (k == "dwell_us") {
        if (v.kind != ConfigValue::Kind::number)
          throw ConfigError(loc(cfg.source, v.line) +
                            "composite.dwell_us must be a number");
        tab.dwell_us = v.number;
      } else if (k == "cycle") {
        if (v.kind != ConfigValue::Kind::str_list)
          throw ConfigError(loc(cfg.source, v.line) +
                            "composite.cycle must be an array of tokens");
        tab.cycle = v.list;
      } else {
        throw ConfigError(loc(cfg.source, v.line) + "unknown key 'composite." +
                          k + "'");
      }
    }
  }
  const auto ait = cfg.table_arrays.find("element");
  if (ait == cfg.table_arrays.end() || ait->second.empty())
    throw ConfigError(cfg.source + ": no [[element]] blocks");
  for (const ConfigTable& el : ait->second) {
    CompositeElement ce;
    bool have_flip = false;
    for (const auto& [k, v] : el) {
      if (v.kind != ConfigValue::Kind::number)
        throw ConfigError(loc(cfg.source, v.line) + "element." + k +
                          " must be a number");
      if (k == "flip_deg") {
        ce.flip_deg = v.number;
        have_flip = true;
      } else if (k == "phase_deg") {
        ce.phase_deg = v.number;
      } else {
        throw ConfigError(loc(cfg.source, v.line) + "unknown key 'element." +
                          k + "'");
      }
    }
    if (!have_flip) {
      const int line = el.empty() ? 0 : el.begin()->second.line;
      throw ConfigError(loc(cfg.source, line) +
                        "element needs a flip_deg key");
    }
    tab.base.push_back(ce);
  }
  if (tab.dwell_us <= 0.0)
    throw ConfigError(cfg.source + ": composite.dwell_us must be positive");
  return tab;
}

PulseWaveform build_composite_cycle(const CompositeTable& tab, double omega1) {
  const PulseWaveform base =
      composite_sequence(tab.base, omega1, tab.dwell_us * 1e-6);
  const PulseWaveform bar = phase_advance(base, kPi);
  PulseWaveform out;
  for (const std::string& tok : tab.cycle) {
    if (tok == "R")
      out = concat(out, base);
    else if (tok == "Rbar")
      out = concat(out, bar);
    else
      throw ConfigError("composite cycle token '" + tok +
                        "' is not R or Rbar");
  }
  return out;
}

}  // namespace chirpmix
