#pragma once

#include <cctype>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kaontime/errors.hpp"
#include "kaontime/format.hpp"
#include "kaontime/joint.hpp"
#include "kaontime/params.hpp"
#include "kaontime/single.hpp"
#include "kaontime/states.hpp"

namespace kaontime {

// Flat key = value configuration ('#' starts a comment). Every key can be
// overridden by a CLI flag of the same name. Times and rates are read in
// units of tau_S by default; with unit = si_seconds the lifetimes are given
// in seconds, delta_m in rad/s and grid bounds in seconds.

enum class UnitTag { tau_s_units, si_seconds };
enum class OutputFormat { csv, json };

class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig from_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty key");
      cfg.set(key, value);
    }
    return cfg;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
  }

  void set(const std::string& key, const std::string& value) {
    kv_[key] = value;
  }
  void merge(const RunConfig& overrides) {
    for (const auto& [k, v] : overrides.kv_) kv_[k] = v;
  }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
    return out;
  }

  bool operator==(const RunConfig&) const = default;

  // -- typed accessors ----------------------------------------------------

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return parse_double(key, it->second);
  }

  std::uint64_t seed() const {
    const auto it = kv_.find("seed");
    if (it == kv_.end()) return 0;
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw ConfigError("field seed: not an unsigned integer: " + it->second);
    }
  }

  UnitTag unit() const {
    const std::string u = get("unit", "tau_s_units");
    if (u == "tau_s_units") return UnitTag::tau_s_units;
    if (u == "si_seconds") return UnitTag::si_seconds;
    throw ConfigError("field unit: expected tau_s_units or si_seconds, got " + u);
  }

  // Seconds per internal time unit: tau_s in SI mode, 1 otherwise.
  double time_scale() const {
    return unit() == UnitTag::si_seconds ? get_double("tau_s", kTauSSeconds)
                                         : 1.0;
  }

  // Physical parameters converted to internal units (tau_S = 1).
  KaonParams params() const {
    KaonParams p;
    if (unit() == UnitTag::si_seconds) {
      const double tau_s = get_double("tau_s", kTauSSeconds);
      const double tau_l = get_double("tau_l", kTauLSeconds);
      if (!(tau_s > 0.0) || !(tau_l > 0.0))
        throw ConfigError("lifetimes must be positive");
      p.gamma_s = 1.0;
      p.gamma_l = tau_s / tau_l;
      p.delta_m = get_double("delta_m", 0.5 / tau_s) * tau_s;
    } else {
      p.gamma_s = get_double("gamma_s", 1.0);
      p.gamma_l = get_double("gamma_l", kTauSSeconds / kTauLSeconds);
      p.delta_m = get_double("delta_m", 0.5);
    }
    p.epsilon = std::polar(get_double("epsilon_abs", kEpsilonAbs),
                           deg_to_rad(get_double("epsilon_arg_deg", kEpsilonArgDeg)));
    if (has("gamma_cp1")) p.gamma_cp1 = get_double("gamma_cp1", 0.0);
    if (has("gamma_cp2")) p.gamma_cp2 = get_double("gamma_cp2", 0.0);
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid physical parameters: ") + e.what());
    }
    return p;
  }

  // Entangled state: alpha:<rad>, beta:<rad>, singlet, or
  // general:<8 comma-separated reals> (re/im pairs of C_SS, C_SL, C_LS, C_LL).
  EntangledState state() const {
    const std::string s = get("state", "alpha:0");
    try {
      if (s == "singlet") return EntangledState::singlet();
      if (s.rfind("alpha:", 0) == 0)
        return EntangledState::alpha_state(parse_double("state", s.substr(6)));
      if (s.rfind("beta:", 0) == 0)
        return EntangledState::beta_state(parse_double("state", s.substr(5)));
      if (s.rfind("general:", 0) == 0) {
        const auto parts = split(s.substr(8), ',');
        if (parts.size() != 8)
          throw ConfigError("field state: general takes 8 comma-separated reals");
        std::array<std::complex<double>, 4> c;
        for (int i = 0; i < 4; ++i)
          c[i] = {parse_double("state", parts[2 * i]),
                  parse_double("state", parts[2 * i + 1])};
        return EntangledState::general(c);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("field state: ") + e.what());
    }
    throw ConfigError("field state: expected alpha:<rad>, beta:<rad>, singlet "
                      "or general:<8 reals>, got " + s);
  }

  // Single-particle superposition (mode = single).
  SuperpositionSpec superposition() const {
    SuperpositionSpec s;
    s.gamma1 = get_double("gamma1", 1.0);
    s.gamma2 = get_double("gamma2", 1.0);
    s.delta_e = get_double("delta_e", 0.0);
    s.amp1 = parse_amp("a1", get("a1", "0.7071067811865476"));
    s.amp2 = parse_amp("a2", get("a2", "0.7071067811865476"));
    if (unit() == UnitTag::si_seconds) {
      const double tau_s = get_double("tau_s", kTauSSeconds);
      s.gamma1 = get_double("gamma1", 1.0 / tau_s) * tau_s;
      s.gamma2 = get_double("gamma2", 1.0 / tau_s) * tau_s;
      s.delta_e = get_double("delta_e", 0.0) * tau_s;
    }
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid superposition: ") + e.what());
    }
    return s;
  }

  std::vector<Approach> approaches() const {
    const std::string a = get("approach", "all");
    std::vector<Approach> out;
    if (a == "all") {
      for (Approach ap : all_approaches()) out.push_back(ap);
      return out;
    }
    for (const std::string& tok : split(a, ',')) {
      try {
        out.push_back(approach_from_string(trim(tok)));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field approach: ") + e.what());
      }
    }
    if (out.empty()) throw ConfigError("field approach: empty list");
    return out;
  }

  std::vector<Channel> channels() const {
    const std::string c = get("channel", "all");
    if (c == "all")
      return {Channel{1, 1}, Channel{1, 2}, Channel{2, 1}, Channel{2, 2}};
    std::vector<Channel> out;
    for (const std::string& tok : split(c, ',')) {
      const std::string t = trim(tok);
      if (t.size() != 2 || (t[0] != '1' && t[0] != '2') ||
          (t[1] != '1' && t[1] != '2'))
        throw ConfigError("field channel: expected 11, 12, 21, 22 or all, got " + t);
      out.push_back(Channel{t[0] - '0', t[1] - '0'});
    }
    return out;
  }

  // Grid "a:b:n" with a = 0 for uniform spacing (a > 0 selects the log
  // ladder start); bounds in seconds when unit = si_seconds.
  GridSpec grid() const {
    const std::string g = get("grid", "0:10:50");
    const auto parts = split(g, ':');
    if (parts.size() != 3)
      throw ConfigError("field grid: expected <min>:<max>:<n>, got " + g);
    GridSpec spec;
    const double scale = time_scale();
    const double lo = parse_double("grid", parts[0]) / scale;
    spec.t_max = parse_double("grid", parts[1]) / scale;
    try {
      spec.n = std::stoi(parts[2]);
    } catch (const std::exception&) {
      throw ConfigError("field grid: point count not an integer: " + parts[2]);
    }
    const std::string spacing = get("grid_spacing", "uniform");
    if (spacing == "uniform") {
      spec.spacing = GridSpec::Spacing::uniform;
      if (lo != 0.0)
        throw ConfigError("field grid: uniform spacing starts at 0");
    } else if (spacing == "log") {
      spec.spacing = GridSpec::Spacing::log_spaced;
      spec.t_min = lo;
    } else {
      throw ConfigError("field grid_spacing: expected uniform or log");
    }
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("field grid: ") + e.what());
    }
    return spec;
  }

  NormPolicy normalization() const {
    const std::string n = get("normalization", "global");
    if (n == "global") return NormPolicy::global;
    if (n == "per_channel" || n == "per-channel") return NormPolicy::per_channel;
    throw ConfigError("field normalization: expected global or per_channel");
  }

  OutputFormat output() const {
    const std::string o = get("output", "csv");
    if (o == "csv") return OutputFormat::csv;
    if (o == "json") return OutputFormat::json;
    throw ConfigError("field output: expected csv or json");
  }

  double z_score() const {
    const double z = get_double("z", 5.0);
    if (!(z > 0.0)) throw ConfigError("field z: must be > 0");
    return z;
  }

  std::uint64_t sample_count() const {
    const auto it = kv_.find("n");
    if (it == kv_.end()) throw ConfigError("field n: required for sampling");
    std::uint64_t n = 0;
    try {
      n = std::stoull(it->second);
    } catch (const std::exception&) {
      throw ConfigError("field n: not an unsigned integer: " + it->second);
    }
    if (n == 0) throw ConfigError("field n: must be at least 1");
    return n;
  }

 private:
  std::map<std::string, std::string> kv_;

  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == sep) {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    out.push_back(cur);
    return out;
  }

  static double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != trim(v).size() && pos != v.size())
        throw std::invalid_argument("trailing characters");
      return d;
    } catch (const std::exception&) {
      throw ConfigError("field " + key + ": not a number: " + v);
    }
  }

  // amplitude "re" or "re,im"
  static std::complex<double> parse_amp(const std::string& key,
                                        const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() == 1) return {parse_double(key, parts[0]), 0.0};
    if (parts.size() == 2)
      return {parse_double(key, parts[0]), parse_double(key, parts[1])};
    throw ConfigError("field " + key + ": expected re or re,im");
  }
};

}  // namespace kaontime
