#pragma once

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kaontime/closed_forms.hpp"
#include "kaontime/config.hpp"
#include "kaontime/discrimination.hpp"
#include "kaontime/errors.hpp"
#include "kaontime/format.hpp"
#include "kaontime/sampling.hpp"

// Command implementations behind the CLI front end. Every command is a
// deterministic function of (config, seed): identical invocations produce
// byte-identical output.

namespace kaontime::cli {

inline constexpr char kConfigEnvVar[] = "KAONTIME_CONFIG";

// defaults < file named by KAONTIME_CONFIG < --config file < flags
inline RunConfig load_layered_config(
    const std::optional<std::string>& config_path,
    const RunConfig& flag_overrides) {
  RunConfig cfg;
  if (const char* env = std::getenv(kConfigEnvVar)) {
    if (env[0] != '\0') cfg.merge(RunConfig::from_file(env));
  }
  if (config_path) cfg.merge(RunConfig::from_file(*config_path));
  cfg.merge(flag_overrides);
  return cfg;
}

inline void run_constants(const RunConfig& cfg, std::ostream& out) {
  const double tau_s = cfg.get_double("tau_s", kTauSSeconds);
  const double tau_l = cfg.get_double("tau_l", kTauLSeconds);
  const double eps_abs = cfg.get_double("epsilon_abs", kEpsilonAbs);
  const double eps_arg = cfg.get_double("epsilon_arg_deg", kEpsilonArgDeg);
  const KaonParams p = cfg.params();
  out << "constant,value,unit,source\n";
  out << "tau_s," << format_double(tau_s) << ",s,measured input\n";
  out << "tau_l," << format_double(tau_l) << ",s,measured input\n";
  out << "epsilon_abs," << format_double(eps_abs) << ",,measured input\n";
  out << "epsilon_arg," << format_double(eps_arg) << ",deg,measured input\n";
  out << "gamma_s," << format_double(p.gamma_s)
      << ",1/tau_s,unit definition\n";
  out << "gamma_l," << format_double(p.gamma_l)
      << ",1/tau_s,derived: tau_s/tau_l = " << format_double(tau_s / tau_l)
      << "\n";
  out << "delta_m," << format_double(p.delta_m)
      << ",1/tau_s,approximation: delta_m = gamma_s/2\n";
}

namespace detail_cli {

inline nlohmann::ordered_json rows_to_json(
    const std::vector<nlohmann::ordered_json>& rows) {
  nlohmann::ordered_json j;
  j["rows"] = rows;
  return j;
}

}  // namespace detail_cli

inline void run_density(const RunConfig& cfg, std::ostream& out) {
  const std::string mode = cfg.get("mode", "joint");
  const double scale = cfg.time_scale();
  const auto grid_pts = cfg.grid().points();
  const auto approaches = cfg.approaches();
  const bool json = cfg.output() == OutputFormat::json;
  std::vector<nlohmann::ordered_json> jrows;

  if (mode == "single") {
    const SuperpositionSpec spec = cfg.superposition();
    if (!json) out << "t,approach,density\n";
    for (double t : grid_pts) {
      for (Approach a : approaches) {
        const double d = density_single(a, spec, t) / scale;
        if (json) {
          jrows.push_back({{"t", t * scale},
                           {"approach", to_string(a)},
                           {"density", d}});
        } else {
          out << format_double(t * scale) << "," << to_string(a) << ","
              << format_double(d) << "\n";
        }
      }
    }
  } else if (mode == "joint") {
    const EntangledState state = cfg.state();
    const KaonParams params = cfg.params();
    const NormPolicy policy = cfg.normalization();
    const double scale2 = scale * scale;
    if (!json) out << "t_l,t_r,approach,channel,density,normalized\n";
    for (const Channel ch : cfg.channels()) {
      std::vector<JointDensity> densities;
      for (Approach a : approaches)
        densities.push_back(joint_density(a, state, params, ch, policy));
      for (double t_l : grid_pts) {
        for (double t_r : grid_pts) {
          for (std::size_t ai = 0; ai < approaches.size(); ++ai) {
            const Approach a = approaches[ai];
            const JointDensity& d = densities[ai];
            const double raw = d.unnormalized(t_l, t_r) / scale2;
            const double norm = d.value(t_l, t_r) / scale2;
            if (json) {
              jrows.push_back({{"t_l", t_l * scale},
                               {"t_r", t_r * scale},
                               {"approach", to_string(a)},
                               {"channel", to_string(ch)},
                               {"density", raw},
                               {"normalized", norm}});
            } else {
              out << format_double(t_l * scale) << ","
                  << format_double(t_r * scale) << "," << to_string(a) << ","
                  << to_string(ch) << "," << format_double(raw) << ","
                  << format_double(norm) << "\n";
            }
          }
        }
      }
    }
  } else {
    throw ConfigError("field mode: expected single or joint, got " + mode);
  }
  if (json) out << detail_cli::rows_to_json(jrows).dump(2) << "\n";
}

inline void run_compare(const RunConfig& cfg, std::ostream& out) {
  const EntangledState state = cfg.state();
  const KaonParams params = cfg.params();
  const auto channels = cfg.channels();
  const bool table = cfg.get("table", "false") == "true";
  const bool json = cfg.output() == OutputFormat::json;
  const double scale = cfg.time_scale();
  std::vector<nlohmann::ordered_json> jrows;

  if (!json) {
    out << (table ? "channel,t_l,t_r,standard-new,hybrid,time-operator,standard-old\n"
                  : "channel,approach_a,approach_b,max_deviation,verdict\n");
  }
  for (const Channel ch : channels) {
    const ComparisonTable cmp =
        approach_comparison(state, params, ch, cfg.grid());
    if (table) {
      for (const auto& row : cmp.rows) {
        if (json) {
          jrows.push_back({{"channel", to_string(ch)},
                           {"t_l", row.t_l * scale},
                           {"t_r", row.t_r * scale},
                           {"standard-new", row.normalized[0]},
                           {"hybrid", row.normalized[1]},
                           {"time-operator", row.normalized[2]},
                           {"standard-old", row.normalized[3]}});
        } else {
          out << to_string(ch) << "," << format_double(row.t_l * scale) << ","
              << format_double(row.t_r * scale);
          for (double v : row.normalized) out << "," << format_double(v);
          out << "\n";
        }
      }
    } else {
      for (const auto& v : cmp.verdicts) {
        const std::string verdict =
            v.proportional ? "proportional" : "not-proportional";
        if (json) {
          jrows.push_back({{"channel", to_string(ch)},
                           {"approach_a", to_string(v.a)},
                           {"approach_b", to_string(v.b)},
                           {"max_deviation", v.max_deviation},
                           {"verdict", verdict}});
        } else {
          out << to_string(ch) << "," << to_string(v.a) << "," << to_string(v.b)
              << "," << format_double(v.max_deviation) << "," << verdict
              << "\n";
        }
      }
    }
  }
  if (json) out << detail_cli::rows_to_json(jrows).dump(2) << "\n";
}

inline nlohmann::ordered_json batch_sidecar(const EventBatch& batch,
                                            std::size_t n,
                                            const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["seed"] = batch.seed;
  j["model"] = batch.model;
  j["rng_algorithm"] = batch.rng_algorithm;
  j["acceptance_rate"] = batch.acceptance_rate;
  j["unit"] = cfg.unit() == UnitTag::si_seconds ? "si_seconds" : "tau_s_units";
  return j;
}

inline void run_sample(const RunConfig& cfg, const std::string& out_path,
                       std::ostream& info) {
  const auto approaches = cfg.approaches();
  if (approaches.size() != 1)
    throw ConfigError("sample takes exactly one approach");
  const auto channels = cfg.channels();
  if (channels.size() != 1)
    throw ConfigError("sample takes exactly one channel");
  const std::uint64_t n = cfg.sample_count();
  const JointDensity density =
      joint_density(approaches[0], cfg.state(), cfg.params(), channels[0],
                    cfg.normalization());
  if (density.negativity().present)
    throw NegativeDensityError("density of " + to_string(approaches[0]) +
                               " is negative near t_l=" +
                               format_double(density.negativity().at_t_l) +
                               ", t_r=" + format_double(density.negativity().at_t_r) +
                               "; sampling refused");
  const EventBatch batch = sample_events(density, n, cfg.seed());
  const double scale = cfg.time_scale();

  std::ofstream csv(out_path);
  if (!csv) throw ConfigError("cannot write event file: " + out_path);
  csv << "t_l,t_r,channel\n";
  for (const Event& e : batch.events)
    csv << format_double(e.t_l * scale) << "," << format_double(e.t_r * scale)
        << "," << to_string(e.channel) << "\n";

  const nlohmann::ordered_json sidecar = batch_sidecar(batch, n, cfg);
  std::ofstream js(out_path + ".json");
  if (!js) throw ConfigError("cannot write sidecar: " + out_path + ".json");
  js << sidecar.dump(2) << "\n";
  info << sidecar.dump(2) << "\n";
}

inline EventBatch read_events(const std::string& path, double scale,
                              Channel expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open event file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t_l,t_r,channel")
    throw ConfigError("event file " + path + ": bad header");
  EventBatch batch;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ConfigError("event file line " + std::to_string(lineno) +
                        ": expected t_l,t_r,channel");
    try {
      const double t_l = std::stod(line.substr(0, c1)) / scale;
      const double t_r = std::stod(line.substr(c1 + 1, c2 - c1 - 1)) / scale;
      const std::string ch = line.substr(c2 + 1);
      if (ch.size() != 2) throw std::invalid_argument("bad channel");
      batch.events.push_back(
          {t_l, t_r, Channel{ch[0] - '0', ch[1] - '0'}});
    } catch (const std::exception&) {
      throw ConfigError("event file line " + std::to_string(lineno) +
                        ": parse failure");
    }
  }
  for (const Event& e : batch.events)
    if (!(e.channel == expected))
      throw ConfigError("event file mixes channels; expected " +
                        to_string(expected));
  return batch;
}

inline void run_discriminate(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.has("approach_p") || !cfg.has("approach_q"))
    throw ConfigError("discriminate needs approach_p and approach_q");
  const Approach ap = approach_from_string(cfg.get("approach_p", ""));
  const Approach aq = approach_from_string(cfg.get("approach_q", ""));
  const auto channels = cfg.channels();
  if (channels.size() != 1)
    throw ConfigError("discriminate takes exactly one channel");
  const EntangledState state = cfg.state();
  const KaonParams params = cfg.params();
  const NormPolicy policy = cfg.normalization();
  const JointDensity p = joint_density(ap, state, params, channels[0], policy);
  const JointDensity q = joint_density(aq, state, params, channels[0], policy);

  std::optional<EventBatch> events;
  std::optional<GridSpec> bins;
  if (cfg.has("events")) {
    events = read_events(cfg.get("events", ""), cfg.time_scale(), channels[0]);
    bins = cfg.grid();
  }
  const DiscriminationReport rep =
      discriminate(p, q, cfg.z_score(), events ? &*events : nullptr,
                   bins ? &*bins : nullptr);

  nlohmann::ordered_json j;
  j["kl_pq"] = rep.kl_pq;
  j["kl_qp"] = rep.kl_qp;
  j["chi2"] = rep.chi2 ? nlohmann::ordered_json(*rep.chi2)
                       : nlohmann::ordered_json(nullptr);
  j["dof"] = rep.dof ? nlohmann::ordered_json(*rep.dof)
                     : nlohmann::ordered_json(nullptr);
  j["p_value"] = rep.p_value ? nlohmann::ordered_json(*rep.p_value)
                             : nlohmann::ordered_json(nullptr);
  j["n_required"] = rep.n_required
                        ? nlohmann::ordered_json(*rep.n_required)
                        : nlohmann::ordered_json("infinite");
  j["model_p"] = rep.model_p;
  j["model_q"] = rep.model_q;
  out << j.dump(2) << "\n";
}

// Exit codes: 0 success, 2 config/validation, 3 numerical failure,
// 4 support mismatch.
inline int run_catching(const std::function<void()>& action,
                        std::ostream& err) {
  try {
    action();
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SupportMismatchError& e) {
    err << "support mismatch: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace kaontime::cli
