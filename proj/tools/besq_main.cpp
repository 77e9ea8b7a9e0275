#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "besq/analysis.hpp"
#include "besq/constructions.hpp"
#include "besq/domain.hpp"
#include "besq/io.hpp"
#include "besq/sde.hpp"
#include "besq/verify.hpp"

namespace {

using namespace besq;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
  int p = 0;
  double alpha = 0.0;
  std::vector<double> x0;
  std::vector<double> y0;  // row-major p*p, wishart only
  double dt = 1e-3;
  double horizon = 1.0;
  double tol_coll = 1e-12;
  double tol_zero = 1e-2;
  int substep_cap = 1048576;
  std::uint64_t seed = 0;
  bool zero_noise = false;
};

constexpr auto kTakeLast = CLI::MultiOptionPolicy::TakeLast;

void add_system_flags(CLI::App* cmd, CommonOpts& o, bool need_x0) {
  cmd->add_option("--p", o.p, "particle count")->required()->multi_option_policy(kTakeLast);
  cmd->add_option("--alpha", o.alpha, "drift dimension")->required()->multi_option_policy(kTakeLast);
  auto* x0 = cmd->add_option("--x0", o.x0, "initial configuration, comma separated")
                 ->delimiter(',')
                 ->multi_option_policy(kTakeLast);
  if (need_x0) x0->required();
}

void add_grid_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--dt", o.dt, "base time step")->multi_option_policy(kTakeLast);
  cmd->add_option("--horizon", o.horizon, "time horizon")->multi_option_policy(kTakeLast);
  cmd->add_option("--tol-coll", o.tol_coll, "collision proximity tolerance")
      ->multi_option_policy(kTakeLast);
  cmd->add_option("--tol-zero", o.tol_zero, "zero-hit tolerance")->multi_option_policy(kTakeLast);
  cmd->add_option("--substep-cap", o.substep_cap, "max substeps per base step")
      ->multi_option_policy(kTakeLast);
  cmd->add_option("--seed", o.seed, "RNG seed")->multi_option_policy(kTakeLast);
  cmd->add_flag("--zero-noise", o.zero_noise, "replace the noise source by zeros (diagnostic)");
}

// Flat `key = value` configuration file with # comments. Unknown keys
// are rejected by name; keys also given on the command line are skipped
// (explicit flags take precedence).
struct ConfigInjection {
  std::vector<std::string> tokens;
  std::string error;
};

ConfigInjection load_config_file(const CLI::App& cmd, const std::string& path) {
  ConfigInjection out;
  std::ifstream file(path);
  if (!file) {
    out.error = "cannot open config file '" + path + "'";
    return out;
  }
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      out.error = path + ":" + std::to_string(lineno) + ": expected key = value";
      return out;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      out.error = path + ":" + std::to_string(lineno) + ": expected key = value";
      return out;
    }
    const std::string flag = "--" + key;
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    if (opt == nullptr || key == "config") {
      out.error = "unknown config key '" + key + "' in " + path;
      return out;
    }
    if (opt->get_expected_max() == 0) {
      out.tokens.push_back(flag + "=" + value);  // flag with explicit value
    } else {
      out.tokens.push_back(flag);
      out.tokens.push_back(value);
    }
  }
  return out;
}

SimulationGrid make_grid(const CommonOpts& o) {
  SimulationGrid g;
  g.dt = o.dt;
  g.t_end = o.horizon;
  g.tol_coll = o.tol_coll;
  g.tol_zero = o.tol_zero;
  g.substep_cap = o.substep_cap;
  g.validate();
  return g;
}

ParticleConfig make_x0(const CommonOpts& o) {
  if (static_cast<int>(o.x0.size()) != o.p)
    throw CLI::ValidationError("--x0", "x0 length " + std::to_string(o.x0.size()) + " != p " +
                                           std::to_string(o.p));
  return ParticleConfig(o.x0);
}

SymMatrix make_y0(const CommonOpts& o) {
  if (!o.y0.empty()) {
    if (static_cast<int>(o.y0.size()) != o.p * o.p)
      throw CLI::ValidationError("--y0", "y0 needs p*p row-major entries");
    Matrix m(o.p, o.p);
    for (int i = 0; i < o.p; ++i)
      for (int j = 0; j < o.p; ++j) m(i, j) = o.y0[static_cast<std::size_t>(i * o.p + j)];
    return SymMatrix::from_rows(m);
  }
  // Default: diag(x0).
  const ParticleConfig x0 = make_x0(o);
  return SymMatrix::diagonal(x0.values());
}

PathRecord run_model(const std::string& model, const CommonOpts& o, const SimulationGrid& grid,
                     const RngSpec& rng) {
  const SystemParams params(o.p, o.alpha);
  if (model == "particles") return simulate_particles(params, make_x0(o), grid, rng);
  if (model == "wishart") return simulate_wishart(params, make_y0(o), grid, rng);
  if (model == "polys") return simulate_polys(params, elementary_all(make_x0(o).values()), grid, rng);
  if (model == "glued") return simulate_glued(plan_glue(params, make_x0(o)), grid, rng);
  if (model == "non-unique") return build_non_unique(params, make_x0(o), grid, rng);
  if (model == "pinned") return build_pinned_nonnegative(params, make_x0(o), grid, rng);
  throw CLI::ValidationError("--model", "unknown model '" + model + "'");
}

// Statistic specs: eN@t, xI@t, min_xI, hit_zero:I, went_negative:I.
PathStatistic parse_statistic(const std::string& spec) {
  const auto at = spec.find('@');
  if (spec.rfind("e", 0) == 0 && at != std::string::npos) {
    const int n = std::stoi(spec.substr(1, at - 1));
    const double t = std::stod(spec.substr(at + 1));
    return [n, t](const PathRecord& path) { return sympoly_value_at(path, n, t); };
  }
  if (spec.rfind("x", 0) == 0 && at != std::string::npos) {
    const int i = std::stoi(spec.substr(1, at - 1));
    const double t = std::stod(spec.substr(at + 1));
    return [i, t](const PathRecord& path) { return particle_value_at(path, i, t); };
  }
  if (spec.rfind("min_x", 0) == 0) {
    const int i = std::stoi(spec.substr(5));
    return [i](const PathRecord& path) { return min_particle_over(path, i); };
  }
  if (spec.rfind("hit_zero:", 0) == 0) {
    const int i = std::stoi(spec.substr(9));
    return [i](const PathRecord& path) {
      return path.has_event(EventKind::hit_zero, i) ? 1.0 : 0.0;
    };
  }
  if (spec.rfind("went_negative:", 0) == 0) {
    const int i = std::stoi(spec.substr(14));
    return [i](const PathRecord& path) {
      return path.has_event(EventKind::went_negative, i) ? 1.0 : 0.0;
    };
  }
  throw CLI::ValidationError("--stat", "unknown statistic '" + spec + "'");
}

int cmd_classify(const CommonOpts& o) {
  const SystemParams params(o.p, o.alpha);
  const ClassificationReport rep = classify(params, make_x0(o));
  std::cout << report_json(rep).dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const std::string& model, const CommonOpts& o, const std::string& out,
                 const std::string& format) {
  const SimulationGrid grid = make_grid(o);
  RngSpec rng;
  rng.seed = o.seed;
  rng.zero_noise = o.zero_noise;
  const PathRecord path = run_model(model, o, grid, rng);
  if (path.aborted) {
    std::cerr << "simulation aborted: " << path.abort_reason << '\n';
    return kExitNumerical;
  }

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw CLI::ValidationError("--out", "cannot open '" + out + "'");
    os = &file;
  }
  if (format == "json") {
    *os << path_json(path).dump(2) << '\n';
  } else {
    write_path_csv(*os, path);
    if (!out.empty()) {
      std::ofstream ev(out + ".events.json");
      ev << events_json(path).dump(2) << '\n';
    }
  }
  return kExitOk;
}

int cmd_mc(const std::string& model, const CommonOpts& o, const std::string& stat, int reps,
           int threads, const std::string& out) {
  const SimulationGrid grid = make_grid(o);
  RngSpec base;
  base.seed = o.seed;
  base.zero_noise = o.zero_noise;
  const PathStatistic statistic = parse_statistic(stat);
  const PathRunner runner = [&](const RngSpec& spec) { return run_model(model, o, grid, spec); };
  const McSummary summary = mc_estimate(runner, statistic, reps, base, threads);
  if (summary.completion_rate == 0.0) {
    std::cerr << "all replicates aborted\n";
    return kExitNumerical;
  }
  const nlohmann::json j = summary_json(summary);
  if (!out.empty()) {
    std::ofstream file(out);
    if (!file) throw CLI::ValidationError("--out", "cannot open '" + out + "'");
    file << j.dump(2) << '\n';
  } else {
    std::cout << j.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, int p_max, int cases, std::uint64_t seed) {
  const std::vector<CheckRow> rows = run_verify_suite(suite, p_max, cases, seed);
  bool all_pass = true;
  std::printf("%-40s %-6s %-12s %s\n", "check", "status", "worst", "detail");
  for (const CheckRow& row : rows) {
    all_pass = all_pass && row.pass;
    std::printf("%-40s %-6s %-12.3e %s\n", row.name.c_str(), row.pass ? "PASS" : "FAIL", row.worst,
                row.detail.c_str());
  }
  return all_pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squared Bessel particle system toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string model = "particles";
  std::string out;
  std::string format = "csv";
  std::string stat = "e1@0.5";
  int reps = 1000;
  int threads = 1;
  std::string suite = "identities";
  int p_max = 8;
  int cases = 100;
  std::uint64_t vseed = 0;

  std::string config_path;
  auto add_config_flag = [&config_path](CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "flat key = value file; explicit flags take precedence")
        ->multi_option_policy(kTakeLast);
  };

  CLI::App* classify_cmd = app.add_subcommand("classify", "classification report as JSON");
  add_system_flags(classify_cmd, opts, true);
  add_config_flag(classify_cmd);

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "one path as CSV (events as sidecar JSON)");
  simulate_cmd->add_option("--model", model, "particles|wishart|polys|glued|non-unique|pinned")
      ->multi_option_policy(kTakeLast);
  add_system_flags(simulate_cmd, opts, false);
  simulate_cmd->add_option("--y0", opts.y0, "wishart start matrix, row-major p*p")
      ->delimiter(',')
      ->multi_option_policy(kTakeLast);
  add_grid_flags(simulate_cmd, opts);
  simulate_cmd->add_option("--out", out, "output file (default stdout)")
      ->multi_option_policy(kTakeLast);
  simulate_cmd->add_option("--format", format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->multi_option_policy(kTakeLast);
  add_config_flag(simulate_cmd);

  CLI::App* mc_cmd = app.add_subcommand("mc", "Monte Carlo summary of a path statistic");
  mc_cmd->add_option("--model", model, "particles|wishart|polys|glued|non-unique|pinned")
      ->multi_option_policy(kTakeLast);
  add_system_flags(mc_cmd, opts, false);
  mc_cmd->add_option("--y0", opts.y0, "wishart start matrix, row-major p*p")
      ->delimiter(',')
      ->multi_option_policy(kTakeLast);
  add_grid_flags(mc_cmd, opts);
  mc_cmd->add_option("--stat", stat, "eN@t | xI@t | min_xI | hit_zero:I | went_negative:I")
      ->multi_option_policy(kTakeLast);
  mc_cmd->add_option("--reps", reps, "replicate count")->multi_option_policy(kTakeLast);
  mc_cmd->add_option("--threads", threads, "worker threads (output independent of this)")
      ->multi_option_policy(kTakeLast);
  mc_cmd->add_option("--out", out, "output file (default stdout)")
      ->multi_option_policy(kTakeLast);
  add_config_flag(mc_cmd);

  CLI::App* verify_cmd = app.add_subcommand("verify", "randomized identity/property suites");
  verify_cmd->add_option("--suite", suite, "identities|coefficients|brackets|roundtrip")
      ->multi_option_policy(kTakeLast);
  verify_cmd->add_option("--p-max", p_max, "largest particle count")
      ->multi_option_policy(kTakeLast);
  verify_cmd->add_option("--cases", cases, "random cases per particle count")
      ->multi_option_policy(kTakeLast);
  verify_cmd->add_option("--seed", vseed, "RNG seed")->multi_option_policy(kTakeLast);
  add_config_flag(verify_cmd);

  // Pull the subcommand and any --config out of the raw arguments so file
  // values can be injected ahead of the explicit flags.
  std::vector<std::string> args;
  std::string file_arg;
  std::size_t sub_index = std::string::npos;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) {
      file_arg = argv[++i];
      continue;
    }
    if (a.rfind("--config=", 0) == 0) {
      file_arg = a.substr(9);
      continue;
    }
    if (sub_index == std::string::npos && !a.empty() && a[0] != '-') sub_index = args.size();
    args.push_back(a);
  }
  if (!file_arg.empty()) {
    if (sub_index == std::string::npos) {
      std::cerr << "--config requires a subcommand\n";
      return kExitConfig;
    }
    const CLI::App* sub = nullptr;
    for (const CLI::App* cand : {classify_cmd, simulate_cmd, mc_cmd, verify_cmd})
      if (cand->get_name() == args[sub_index]) sub = cand;
    if (sub == nullptr) {
      std::cerr << "unknown subcommand '" << args[sub_index] << "'\n";
      return kExitConfig;
    }
    ConfigInjection inj = load_config_file(*sub, file_arg);
    if (!inj.error.empty()) {
      std::cerr << inj.error << '\n';
      return kExitConfig;
    }
    // A key given explicitly on the command line wins outright; its file
    // value is not injected at all (vector options cannot be merged).
    std::vector<std::string> given;
    for (const std::string& a : args) {
      if (a.rfind("--", 0) != 0) continue;
      const auto eq = a.find('=');
      given.push_back(eq == std::string::npos ? a : a.substr(0, eq));
    }
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < inj.tokens.size(); ++i) {
      const std::string& tok = inj.tokens[i];
      const auto eq = tok.find('=');
      const std::string name = eq == std::string::npos ? tok : tok.substr(0, eq);
      const bool overridden = std::find(given.begin(), given.end(), name) != given.end();
      const bool has_value_arg = eq == std::string::npos;
      if (!overridden) {
        kept.push_back(tok);
        if (has_value_arg) kept.push_back(inj.tokens[i + 1]);
      }
      if (has_value_arg) ++i;
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_index) + 1, kept.begin(),
                kept.end());
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (classify_cmd->parsed()) return cmd_classify(opts);
    if (simulate_cmd->parsed()) return cmd_simulate(model, opts, out, format);
    if (mc_cmd->parsed()) return cmd_mc(model, opts, stat, reps, threads, out);
    if (verify_cmd->parsed()) return cmd_verify(suite, p_max, cases, vseed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
