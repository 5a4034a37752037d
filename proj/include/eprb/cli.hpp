#pragma once

// Command-line front end. run() never calls exit(): it returns
//   0  success
//   1  argument or validation error (one-line diagnostic on the error stream)
//   2  numerical contract violation raised by a model

#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eprb/analyticity.hpp"
#include "eprb/correlation.hpp"
#include "eprb/errors.hpp"
#include "eprb/inequalities.hpp"
#include "eprb/io.hpp"
#include "eprb/zoo.hpp"

namespace eprb::cli {

using nlohmann::json;

inline constexpr std::size_t kDefaultSamples = 100000;
inline constexpr std::size_t kDefaultBudget = 1000000;
inline constexpr unsigned kMaxWorkers = 256;

namespace detail {

/// String-valued options plus a JSON config; explicit flags take precedence.
class Options {
public:
  void add(CLI::App* app, const std::string& key, const std::string& help) {
    std::string flag = "--" + key;
    for (char& c : flag)
      if (c == '_') c = '-';
    options_[key] = app->add_option(flag, values_[key], help);
  }
  void add_flag(CLI::App* app, const std::string& key, const std::string& help) {
    std::string flag = "--" + key;
    for (char& c : flag)
      if (c == '_') c = '-';
    options_[key] = app->add_flag(flag, flags_[key], help);
  }

  void load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    try {
      config_ = json::parse(in);
    } catch (const json::exception& e) {
      throw std::invalid_argument("config file '" + path + "' is not valid JSON");
    }
    if (!config_.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  }

  bool given(const std::string& key) const {
    const auto it = options_.find(key);
    return it != options_.end() && it->second->count() > 0;
  }
  const json& config() const { return config_; }
  const json* config_value(const std::string& key) const {
    return config_.contains(key) ? &config_.at(key) : nullptr;
  }

  std::optional<std::string> text(const std::string& key) const {
    if (given(key)) return values_.at(key);
    if (const json* v = config_value(key)) {
      if (v->is_string()) return v->get<std::string>();
      return v->dump();
    }
    return std::nullopt;
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    return text(key).value_or(fallback);
  }

  std::string required(const std::string& key) const {
    auto v = text(key);
    if (!v) throw std::invalid_argument("missing --" + key);
    return *v;
  }

  double number(const std::string& key, double fallback) const {
    const auto v = text(key);
    return v ? io::parse_double(*v) : fallback;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    const auto v = text(key);
    if (!v) return fallback;
    // Accept integral values written as 1e6 or 1000000.0.
    if (v->find_first_of(".eE") != std::string::npos) {
      const double d = io::parse_double(*v);
      if (d < 0 || d != std::floor(d) || d > 9.007199254740992e15) {
        throw std::invalid_argument("--" + key + " must be a non-negative integer");
      }
      return static_cast<std::uint64_t>(d);
    }
    return io::parse_u64(*v);
  }

  bool flag(const std::string& key) const {
    if (given(key)) return flags_.at(key);
    if (const json* v = config_value(key)) return v->get<bool>();
    return false;
  }

  UnitVector3 vector(const std::string& key) const {
    if (given(key)) return io::parse_vector(values_.at(key));
    if (const json* v = config_value(key)) return io::vector_from_json(*v);
    throw std::invalid_argument("missing --" + key);
  }

private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> flags_;
  std::map<std::string, CLI::Option*> options_;
  json config_ = json::object();
};

struct Command {
  CLI::App* app = nullptr;
  Options opts;
  std::vector<std::string> params;
  CLI::Option* params_opt = nullptr;
  std::string config_path;
};

inline void add_common(Command& cmd, bool with_model) {
  cmd.app->add_option("--config", cmd.config_path, "JSON config; explicit flags override it");
  cmd.opts.add(cmd.app, "format", "json (default) or csv");
  cmd.opts.add(cmd.app, "output", "write to this file instead of standard output");
  if (!with_model) return;
  cmd.opts.add(cmd.app, "model", "registered model name (see `models`)");
  cmd.params_opt =
      cmd.app->add_option("--param", cmd.params, "model parameter key=value (repeatable)");
  cmd.opts.add(cmd.app, "n", "Monte Carlo samples (default 100000)");
  cmd.opts.add(cmd.app, "seed", "sampler seed (default 0)");
  cmd.opts.add(cmd.app, "sampler", "uniform_sphere (default) or uniform_cube");
  cmd.opts.add(cmd.app, "dim", "hidden-variable dimension for uniform_cube");
  cmd.opts.add(cmd.app, "workers", "worker threads; results do not depend on it (default 1)");
  cmd.opts.add_flag(cmd.app, "closed_form", "use the model's closed-form correlation");
}

struct Experiment {
  ModelSpec spec;
  Model model;
  LambdaSampler sampler = LambdaSampler::uniform_sphere(0);
  OracleOptions oracle;
  CorrelationOracle P;
};

inline Experiment build_experiment(const Command& cmd) {
  const Options& o = cmd.opts;
  json model_json = json::object();
  model_json["model"] = o.required("model");
  if (const json* p = o.config_value("params")) model_json["params"] = *p;
  Experiment ex;
  ex.spec = io::model_spec_from_json(model_json);
  if (cmd.params_opt && cmd.params_opt->count() > 0) {
    for (const std::string& kv : cmd.params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--param expects key=value, got '" + kv + "'");
      io::apply_param(ex.spec, kv.substr(0, eq), json(kv.substr(eq + 1)));
    }
  }
  ex.model = make_model(ex.spec);

  json sampler = o.config().contains("sampler") ? o.config().at("sampler") : json::object();
  if (o.text("sampler")) sampler["kind"] = o.str("sampler", "uniform_sphere");
  if (o.text("dim")) sampler["dim"] = o.count("dim", 3);
  if (o.given("seed") || o.config_value("seed")) sampler["seed"] = o.count("seed", 0);
  ex.sampler = io::sampler_from_json(sampler);
  if (needs_sphere(ex.spec) && ex.sampler.kind() != SamplerKind::UniformSphere) {
    throw std::invalid_argument("model '" + ex.spec.name + "' needs the uniform_sphere sampler");
  }

  ex.oracle.n = o.count("n", kDefaultSamples);
  if (ex.oracle.n < 2) throw std::invalid_argument("--n must be at least 2");
  const std::uint64_t workers = o.count("workers", 1);
  if (workers < 1 || workers > kMaxWorkers) {
    throw std::invalid_argument("--workers must be in [1, " + std::to_string(kMaxWorkers) + "]");
  }
  ex.oracle.par.workers = static_cast<unsigned>(workers);
  ex.oracle.closed_form = o.flag("closed_form");
  ex.P = make_oracle(ex.model, ex.sampler, ex.oracle);
  return ex;
}

inline std::string format_of(const Options& o) {
  const std::string f = o.str("format", "json");
  if (f != "json" && f != "csv") throw std::invalid_argument("--format must be json or csv");
  return f;
}

inline void describe(json& j, const Experiment& ex) {
  j["model"] = ex.spec.name;
  if (!std::holds_alternative<QuantumModel>(ex.model) && !ex.oracle.closed_form) {
    j["sampler"] = io::to_json(ex.sampler);
  }
  if (std::holds_alternative<SeriesPair>(ex.model)) j["raw_series"] = true;
}

inline std::string csv_bool(bool b) { return b ? "true" : "false"; }

inline std::string cmd_correlate(const Command& cmd) {
  const Experiment ex = build_experiment(cmd);
  const UnitVector3 a = cmd.opts.vector("a");
  const UnitVector3 b = cmd.opts.vector("b");
  const CorrelationEstimate e = ex.P(a, b);
  if (format_of(cmd.opts) == "csv") {
    return "value,stderr,n,model,exact\n" + io::format_number(e.value) + "," +
           io::format_number(e.std_error) + "," + std::to_string(e.n) + "," + ex.spec.name + "," +
           csv_bool(e.exact) + "\n";
  }
  json j = io::to_json(e);
  j["command"] = "correlate";
  j["a"] = io::to_json(a);
  j["b"] = io::to_json(b);
  describe(j, ex);
  if (const auto* pair = std::get_if<SeriesPair>(&ex.model)) {
    const NegativityContrast c =
        negativity_contrast(*pair, a, ex.sampler, ex.oracle.n, ex.oracle.par);
    j["quantum_contrast"] = json{{"a", io::to_json(c.a)},
                                 {"series_value_at_a_minus_a", c.series.value},
                                 {"series_stderr", c.series.std_error},
                                 {"quantum_value_at_a_minus_a", c.quantum.value},
                                 {"contradicts_quantum", c.contradicts}};
  }
  return j.dump(2) + "\n";
}

inline std::string cmd_sweep(const Command& cmd) {
  const Experiment ex = build_experiment(cmd);
  const std::uint64_t steps = cmd.opts.count("steps", 19);
  if (steps < 2 || steps > 100000) throw std::invalid_argument("--steps must be in [2, 100000]");
  const UnitVector3 a(0.0, 0.0, 1.0);
  const bool csv = format_of(cmd.opts) == "csv";
  std::string text = "theta_rad,value,stderr,n,model,exact\n";
  json points = json::array();
  for (std::uint64_t i = 0; i < steps; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(steps - 1);
    const CorrelationEstimate e = ex.P(a, unit_from_plane_angle(theta));
    if (csv) {
      text += io::format_number(theta) + "," + io::format_number(e.value) + "," +
              io::format_number(e.std_error) + "," + std::to_string(e.n) + "," + ex.spec.name +
              "," + csv_bool(e.exact) + "\n";
    } else {
      points.push_back(json{{"theta_rad", theta},
                            {"value", e.value},
                            {"stderr", e.std_error},
                            {"n", e.n},
                            {"model", ex.spec.name},
                            {"exact", e.exact}});
    }
  }
  if (csv) return text;
  json j{{"command", "sweep"}, {"steps", steps}, {"points", std::move(points)}};
  describe(j, ex);
  return j.dump(2) + "\n";
}

inline SettingsQuad parse_quad(const Options& o) {
  if (!o.given("quad")) {
    if (const json* q = o.config_value("quad"); q && q->is_object()) {
      return {io::vector_from_json(q->at("a")), io::vector_from_json(q->at("b")),
              io::vector_from_json(q->at("a_prime")), io::vector_from_json(q->at("b_prime"))};
    }
  }
  const std::string text = o.required("quad");
  const auto parts = io::split(text, '|');
  if (parts.size() != 4) throw std::invalid_argument("--quad expects a|b|a'|b' with x,y,z vectors");
  return {io::parse_vector(parts[0]), io::parse_vector(parts[1]), io::parse_vector(parts[2]),
          io::parse_vector(parts[3])};
}

inline std::string chsh_csv(const ChshReport& r) {
  return "s_value,term1,term2,combined_stderr,violated,evaluations\n" +
         io::format_number(r.s_value) + "," + io::format_number(r.term1) + "," +
         io::format_number(r.term2) + "," + io::format_number(r.combined_std_error) + "," +
         csv_bool(r.violated) + "," + std::to_string(r.evaluations) + "\n";
}

inline std::string cmd_chsh(const Command& cmd) {
  const Experiment ex = build_experiment(cmd);
  const bool csv = format_of(cmd.opts) == "csv";
  json j;
  if (cmd.opts.flag("maximize")) {
    const std::uint64_t budget = cmd.opts.count("budget", kDefaultBudget);
    const std::string mode = cmd.opts.str("mode", "coplanar");
    if (mode != "coplanar" && mode != "full") throw std::invalid_argument("--mode must be coplanar or full");
    const MaximizeResult m =
        maximize_chsh(ex.P, budget, mode == "full" ? SearchMode::Full : SearchMode::Coplanar);
    if (csv) return chsh_csv(m.report);
    j = io::to_json(m.report);
    j["mode"] = mode;
    j["budget"] = budget;
    j["grid_best"] = m.grid_best;
    j["angles"] = m.angles;
  } else {
    const ChshReport r = chsh_statistic(ex.P, parse_quad(cmd.opts));
    if (csv) return chsh_csv(r);
    j = io::to_json(r);
  }
  j["command"] = "chsh";
  describe(j, ex);
  return j.dump(2) + "\n";
}

inline std::string cmd_bell(const Command& cmd) {
  const Experiment ex = build_experiment(cmd);
  const UnitVector3 a = cmd.opts.vector("a");
  const UnitVector3 b = cmd.opts.vector("b");
  const UnitVector3 c = cmd.opts.vector("c");
  const BellReport r = bell_statistic(ex.P, a, b, c);
  if (format_of(cmd.opts) == "csv") {
    return "excess,p_ab,p_ac,p_bc,combined_stderr,violated\n" + io::format_number(r.excess) + "," +
           io::format_number(r.p_ab.value) + "," + io::format_number(r.p_ac.value) + "," +
           io::format_number(r.p_bc.value) + "," + io::format_number(r.combined_std_error) + "," +
           csv_bool(r.violated) + "\n";
  }
  json j = io::to_json(r);
  j["command"] = "bell";
  j["a"] = io::to_json(a);
  j["b"] = io::to_json(b);
  j["c"] = io::to_json(c);
  describe(j, ex);
  return j.dump(2) + "\n";
}

/// Test functions for the analyticity report besides P_Q.
inline ComplexFunction analyticity_target(const std::string& name, const RiemannPoint& w) {
  using C = std::complex<double>;
  if (name == "pq") return pq_slice(w);
  if (name == "z") return [](C z) { return z; };
  if (name == "z2") return [](C z) { return z * z; };
  if (name == "zbar") return [](C z) { return std::conj(z); };
  if (name == "re") return [](C z) { return C(z.real(), 0.0); };
  if (name == "abs2") return [](C z) { return C(std::norm(z), 0.0); };
  throw std::invalid_argument("unknown analyticity target '" + name + "' (pq, z, z2, zbar, re, abs2)");
}

inline std::string cmd_analyticity(const Command& cmd) {
  const Options& o = cmd.opts;
  const std::string target = o.str("target", "pq");
  const RiemannPoint w = [&] {
    if (!o.given("w")) {
      if (const json* v = o.config_value("w")) return io::riemann_point_from_json(*v);
    }
    return io::parse_riemann_point(o.str("w", "inf"));
  }();
  const double radius = o.number("radius", 1.0);
  const std::uint64_t k = o.count("grid", 21);
  const double h = o.number("h", kDefaultStep);
  const double tol = o.number("tol", kDefaultResidualTolerance);
  if (!(radius > 0.0) || radius > kDefaultRadius) throw std::invalid_argument("--radius must be in (0, 10]");
  if (k < 2 || k > 1001) throw std::invalid_argument("--grid must be in [2, 1001]");
  if (!(h > 0.0) || h >= 1.0) throw std::invalid_argument("--h must be in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("--tol must be positive");

  const std::vector<RiemannPoint> grid = disc_grid(radius, static_cast<std::size_t>(k));
  const ResidualReport r = residual_report(analyticity_target(target, w), grid, h, tol);
  if (format_of(o) == "csv") {
    std::string text = "re,im,residual\n";
    for (const auto& p : r.points) {
      text += io::format_number(p.z.value().real()) + "," + io::format_number(p.z.value().imag()) +
              "," + io::format_number(p.residual) + "\n";
    }
    return text;
  }
  json j = io::to_json(r);
  j["command"] = "analyticity";
  j["function"] = target;
  j["w"] = target == "pq" ? io::to_json(w) : json(nullptr);
  j["grid"] = json{{"R", radius}, {"k", k}};
  return j.dump(2) + "\n";
}

inline std::string cmd_models(const Command& cmd) {
  if (format_of(cmd.opts) == "csv") {
    std::string text = "name,kind,locality_class\n";
    for (const auto& e : zoo()) text += e.name + "," + e.kind + "," + e.locality + "\n";
    return text;
  }
  json list = json::array();
  for (const auto& e : zoo()) {
    list.push_back(json{{"name", e.name},
                        {"kind", e.kind},
                        {"locality_class", e.locality},
                        {"description", e.description}});
  }
  return json{{"command", "models"}, {"models", std::move(list)}}.dump(2) + "\n";
}

}  // namespace detail

/// Runs one command line. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using detail::Command;
  CLI::App app{"EPRB correlation experiments under hidden-variable models", "eprb"};
  app.require_subcommand(1);

  Command correlate, sweep, chsh, bell, analyticity, models;
  correlate.app = app.add_subcommand("correlate", "estimate P(a, b) for one setting pair");
  sweep.app = app.add_subcommand("sweep", "correlation curve for coplanar angles 0..pi");
  chsh.app = app.add_subcommand("chsh", "CHSH statistic for a quad, or maximize it");
  bell.app = app.add_subcommand("bell", "Bell's original inequality at settings a, b, c");
  analyticity.app = app.add_subcommand("analyticity", "Cauchy-Riemann residual report");
  models.app = app.add_subcommand("models", "list the registered models");

  for (Command* c : {&correlate, &sweep, &chsh, &bell}) detail::add_common(*c, true);
  for (Command* c : {&analyticity, &models}) detail::add_common(*c, false);

  correlate.opts.add(correlate.app, "a", "setting a as x,y,z");
  correlate.opts.add(correlate.app, "b", "setting b as x,y,z");
  sweep.opts.add(sweep.app, "steps", "number of angles from 0 to pi inclusive (default 19)");
  chsh.opts.add(chsh.app, "quad", "settings a|b|a'|b' as x,y,z vectors");
  chsh.opts.add_flag(chsh.app, "maximize", "search settings maximizing S");
  chsh.opts.add(chsh.app, "budget", "statistic evaluations for --maximize (default 1000000)");
  chsh.opts.add(chsh.app, "mode", "coplanar (default) or full");
  bell.opts.add(bell.app, "a", "setting a as x,y,z");
  bell.opts.add(bell.app, "b", "setting b as x,y,z");
  bell.opts.add(bell.app, "c", "setting c as x,y,z");
  analyticity.opts.add(analyticity.app, "target", "pq (default), z, z2, zbar, re, abs2");
  analyticity.opts.add(analyticity.app, "w", "second argument of P_Q: inf (default) or re,im");
  analyticity.opts.add(analyticity.app, "radius", "grid disc radius R (default 1, at most 10)");
  analyticity.opts.add(analyticity.app, "grid", "grid resolution k per axis (default 21)");
  // --h is the step size here, so help is long-form only.
  analyticity.app->set_help_flag("--help", "Print this help message and exit");
  analyticity.opts.add(analyticity.app, "h", "finite-difference step (default 1e-4)");
  analyticity.opts.add(analyticity.app, "tol", "residual tolerance (default 1e-5)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("eprb");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    std::string text;
    Command* active = nullptr;
    for (Command* c : {&correlate, &sweep, &chsh, &bell, &analyticity, &models}) {
      if (c->app->parsed()) active = c;
    }
    if (!active->config_path.empty()) active->opts.load_config(active->config_path);

    if (active == &correlate) text = detail::cmd_correlate(correlate);
    else if (active == &sweep) text = detail::cmd_sweep(sweep);
    else if (active == &chsh) text = detail::cmd_chsh(chsh);
    else if (active == &bell) text = detail::cmd_bell(bell);
    else if (active == &analyticity) text = detail::cmd_analyticity(analyticity);
    else text = detail::cmd_models(models);

    const std::string path = active->opts.str("output", "");
    if (path.empty()) {
      out << text;
    } else {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::invalid_argument("cannot write '" + path + "'");
      f << text;
    }
    return 0;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace eprb::cli
