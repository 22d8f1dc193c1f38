#include "semienv/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "semienv/calculus.hpp"
#include "semienv/error.hpp"
#include "semienv/initial_data.hpp"
#include "semienv/reference.hpp"
#include "semienv/verify.hpp"

namespace semienv {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json* find(const json& obj, const char* name) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(name);
  return it == obj.end() ? nullptr : &*it;
}

const json& section(const json& root, const char* name, bool required) {
  static const json empty = json::object();
  const json* s = find(root, name);
  if (!s) {
    if (required) throw ConfigError(std::string("missing required section `") + name + "`", name);
    return empty;
  }
  if (!s->is_object()) {
    throw ConfigError(std::string("`") + name + "` must be an object", name);
  }
  return *s;
}

double number(const json& obj, const char* name, const std::string& key, std::optional<double> fallback = {}) {
  const json* v = find(obj, name);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError("missing required key `" + key + "`", key);
  }
  if (!v->is_number()) {
    throw ConfigError("`" + key + "` must be a number", key);
  }
  const double d = v->get<double>();
  if (!std::isfinite(d)) {
    throw ConfigError("`" + key + "` must be finite", key);
  }
  return d;
}

std::int64_t integer(const json& obj, const char* name, const std::string& key, std::optional<std::int64_t> fallback = {}) {
  const json* v = find(obj, name);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError("missing required key `" + key + "`", key);
  }
  if (!v->is_number_integer()) {
    throw ConfigError("`" + key + "` must be an integer", key);
  }
  return v->get<std::int64_t>();
}

void require(bool ok, const std::string& message, const std::string& key) {
  if (!ok) throw ConfigError(message, key);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& prefix) {
  std::set<std::string> names(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!names.count(it.key())) {
      const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      throw ConfigError("unknown configuration key `" + key + "`", key);
    }
  }
}

std::vector<double> number_list(const json& v, const std::string& key) {
  require(v.is_array(), "`" + key + "` must be an array of numbers", key);
  std::vector<double> out;
  for (const auto& e : v) {
    require(e.is_number() && std::isfinite(e.get<double>()), "`" + key + "` must be an array of numbers", key);
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

KernelFamily parse_family(const json& j) {
  require(j.is_object(), "`family` must be an object", "family");
  reject_unknown(j, {"family", "lambda_interval", "lambda_list", "jump_atoms", "lambda_interior_samples"}, "family");
  const json* kind = find(j, "family");
  require(kind && kind->is_string(), "`family.family` must be one of gaussian_drift, compound_poisson, pure_shift",
          "family.family");
  const std::string name = kind->get<std::string>();

  const json* interval = find(j, "lambda_interval");
  const json* list = find(j, "lambda_list");
  require(!(interval && list), "give either lambda_interval or lambda_list, not both", "family.lambda_list");
  require(interval || list, "missing `family.lambda_interval` or `family.lambda_list`", "family.lambda_interval");
  std::optional<LambdaSet> lambdas;
  if (interval) {
    const auto v = number_list(*interval, "family.lambda_interval");
    require(v.size() == 2, "`family.lambda_interval` must be [lo, hi]", "family.lambda_interval");
    lambdas = LambdaSet::interval(v[0], v[1]);
  } else {
    lambdas = LambdaSet::finite(number_list(*list, "family.lambda_list"));
  }

  std::optional<KernelFamily> family;
  if (name == "gaussian_drift") {
    family = KernelFamily::gaussian_drift(*lambdas);
  } else if (name == "pure_shift") {
    family = KernelFamily::pure_shift(*lambdas);
  } else if (name == "compound_poisson") {
    const json* atoms = find(j, "jump_atoms");
    require(atoms && atoms->is_array(), "compound_poisson needs `family.jump_atoms` = [[offset, weight], ...]",
            "family.jump_atoms");
    std::vector<JumpAtom> parsed;
    for (const auto& a : *atoms) {
      const auto pair = number_list(a, "family.jump_atoms");
      require(pair.size() == 2, "each jump atom is [offset, weight]", "family.jump_atoms");
      parsed.push_back({pair[0], pair[1]});
    }
    family = KernelFamily::compound_poisson(*lambdas, JumpDistribution::make(std::move(parsed)));
  } else {
    throw ConfigError("unknown family `" + name + "`; expected gaussian_drift, compound_poisson or pure_shift",
                      "family.family");
  }
  if (find(j, "jump_atoms") && family->kind() != FamilyKind::compound_poisson) {
    throw ConfigError("`family.jump_atoms` only applies to compound_poisson", "family.jump_atoms");
  }
  if (find(j, "lambda_interior_samples")) {
    const auto n = integer(j, "lambda_interior_samples", "family.lambda_interior_samples");
    require(n >= 0 && n <= 1000, "`family.lambda_interior_samples` must lie in [0, 1000]",
            "family.lambda_interior_samples");
    family = family->with_interior_samples(static_cast<int>(n));
  }
  return *family;
}

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  require(j.is_object(), "configuration must be a JSON object", "");
  reject_unknown(j,
                 {"grid", "norm", "family", "initial", "time", "seeds", "output_dir", "envelope", "generator",
                  "derivative", "hjb", "ode", "counterexample"},
                 "");
  ExperimentConfig cfg;
  cfg.echo = j;

  const json& grid = section(j, "grid", true);
  reject_unknown(grid, {"lower", "upper", "n_nodes"}, "grid");
  const auto n_nodes = integer(grid, "n_nodes", "grid.n_nodes");
  require(n_nodes <= 100'000'000, "`grid.n_nodes` is limited to 1e8", "grid.n_nodes");
  cfg.grid = make_grid(number(grid, "lower", "grid.lower"), number(grid, "upper", "grid.upper"), n_nodes);

  const json& norm = section(j, "norm", false);
  reject_unknown(norm, {"p"}, "norm");
  cfg.norm = PNorm::make(number(norm, "p", "norm.p", 2.0));

  cfg.family = parse_family(section(j, "family", true));

  const json& initial = section(j, "initial", true);
  reject_unknown(initial, {"kind", "params"}, "initial");
  const json* kind = find(initial, "kind");
  require(kind && kind->is_string(), "`initial.kind` must be one of bump, gaussian, ramp, custom_csv", "initial.kind");
  cfg.initial.kind = kind->get<std::string>();
  const json& params = section(initial, "params", false);
  if (cfg.initial.kind == "bump") {
    reject_unknown(params, {"radius", "center", "amplitude"}, "initial.params");
    cfg.initial.radius = number(params, "radius", "initial.params.radius", 1.0);
    cfg.initial.center = number(params, "center", "initial.params.center", 0.0);
    cfg.initial.amplitude = number(params, "amplitude", "initial.params.amplitude", 1.0);
    require(cfg.initial.radius > 0.0, "`initial.params.radius` must be > 0", "initial.params.radius");
  } else if (cfg.initial.kind == "gaussian") {
    reject_unknown(params, {"sigma", "center", "amplitude"}, "initial.params");
    cfg.initial.sigma = number(params, "sigma", "initial.params.sigma", 1.0);
    cfg.initial.center = number(params, "center", "initial.params.center", 0.0);
    cfg.initial.amplitude = number(params, "amplitude", "initial.params.amplitude", 1.0);
    require(cfg.initial.sigma > 0.0, "`initial.params.sigma` must be > 0", "initial.params.sigma");
  } else if (cfg.initial.kind == "ramp") {
    reject_unknown(params, {"slope", "offset"}, "initial.params");
    cfg.initial.slope = number(params, "slope", "initial.params.slope", 1.0);
    cfg.initial.offset = number(params, "offset", "initial.params.offset", 0.0);
  } else if (cfg.initial.kind == "custom_csv") {
    reject_unknown(params, {"path"}, "initial.params");
    const json* path = find(params, "path");
    require(path && path->is_string(), "custom_csv needs `initial.params.path`", "initial.params.path");
    fs::path p = path->get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    require(fs::is_regular_file(p), "initial data file not found: " + p.string(), "initial.params.path");
    cfg.initial.csv_path = p;
  } else {
    throw ConfigError("unknown initial kind `" + cfg.initial.kind + "`", "initial.kind");
  }

  const json& time = section(j, "time", true);
  reject_unknown(time, {"t", "tol_rel", "n_max"}, "time");
  cfg.t = number(time, "t", "time.t");
  require(cfg.t > 0.0, "`time.t` must be > 0", "time.t");
  cfg.tol_rel = number(time, "tol_rel", "time.tol_rel", 1e-4);
  require(cfg.tol_rel > 0.0, "`time.tol_rel` must be > 0", "time.tol_rel");
  const auto n_max = integer(time, "n_max", "time.n_max", 12);
  require(n_max >= 0 && n_max <= 24, "`time.n_max` must lie in [0, 24]", "time.n_max");
  cfg.n_max = static_cast<int>(n_max);

  if (const json* s = find(j, "seeds")) {
    require(s->is_number_unsigned() || (s->is_number_integer() && s->get<std::int64_t>() >= 0),
            "`seeds` must be a nonnegative integer", "seeds");
    cfg.seed = s->get<std::uint64_t>();
  }
  if (const json* o = find(j, "output_dir")) {
    require(o->is_string() && !o->get<std::string>().empty(), "`output_dir` must be a nonempty string",
            "output_dir");
    cfg.output_dir = o->get<std::string>();
  }

  const json& env = section(j, "envelope", false);
  reject_unknown(env, {"probe_level", "boundary_margin", "series_tol"}, "envelope");
  const auto level = integer(env, "probe_level", "envelope.probe_level", 8);
  require(level >= 0 && level <= 20, "`envelope.probe_level` must lie in [0, 20]", "envelope.probe_level");
  cfg.envelope.probe_level = static_cast<int>(level);
  cfg.envelope.boundary_margin = number(env, "boundary_margin", "envelope.boundary_margin", 0.05);
  require(cfg.envelope.boundary_margin >= 0.0 && cfg.envelope.boundary_margin < 0.5,
          "`envelope.boundary_margin` must lie in [0, 0.5)", "envelope.boundary_margin");
  cfg.envelope.series.series_tol = number(env, "series_tol", "envelope.series_tol", 1e-12);
  require(cfg.envelope.series.series_tol > 0.0 && cfg.envelope.series.series_tol < 1.0,
          "`envelope.series_tol` must lie in (0, 1)", "envelope.series_tol");
  cfg.envelope.tol_rel = cfg.tol_rel;
  cfg.envelope.n_max = cfg.n_max;

  const json& gen = section(j, "generator", false);
  reject_unknown(gen, {"h0", "halvings", "max_ratio"}, "generator");
  cfg.generator.h0 = number(gen, "h0", "generator.h0", 0.1);
  require(cfg.generator.h0 > 0.0, "`generator.h0` must be > 0", "generator.h0");
  const auto gh = integer(gen, "halvings", "generator.halvings", 6);
  require(gh >= 1 && gh <= 30, "`generator.halvings` must lie in [1, 30]", "generator.halvings");
  cfg.generator.halvings = static_cast<int>(gh);
  cfg.generator.max_ratio = number(gen, "max_ratio", "generator.max_ratio", 0.1);

  const json& der = section(j, "derivative", false);
  reject_unknown(der, {"t", "h0", "halvings", "quad_nodes", "identity_tol", "integral_tol"}, "derivative");
  cfg.derivative.t = number(der, "t", "derivative.t", cfg.t);
  require(cfg.derivative.t >= 0.0, "`derivative.t` must be >= 0", "derivative.t");
  cfg.derivative.h0 = number(der, "h0", "derivative.h0", 0.1);
  require(cfg.derivative.h0 > 0.0, "`derivative.h0` must be > 0", "derivative.h0");
  const auto dh = integer(der, "halvings", "derivative.halvings", 8);
  require(dh >= 0 && dh <= 30, "`derivative.halvings` must lie in [0, 30]", "derivative.halvings");
  cfg.derivative.halvings = static_cast<int>(dh);
  const auto qn = integer(der, "quad_nodes", "derivative.quad_nodes", 33);
  require(qn >= 3 && qn % 2 == 1 && qn <= 1001, "`derivative.quad_nodes` must be odd and in [3, 1001]",
          "derivative.quad_nodes");
  cfg.derivative.quad_nodes = static_cast<int>(qn);
  cfg.derivative.identity_tol = number(der, "identity_tol", "derivative.identity_tol", 5e-2);
  cfg.derivative.integral_tol = number(der, "integral_tol", "derivative.integral_tol", 2e-2);

  const json& hjb = section(j, "hjb", false);
  reject_unknown(hjb, {"cfl", "tolerance"}, "hjb");
  cfg.hjb.cfl = number(hjb, "cfl", "hjb.cfl", 0.9);
  require(cfg.hjb.cfl > 0.0 && cfg.hjb.cfl <= 1.0, "`hjb.cfl` must lie in (0, 1]", "hjb.cfl");
  cfg.hjb.tolerance = number(hjb, "tolerance", "hjb.tolerance", 5e-2);

  const json& ode = section(j, "ode", false);
  reject_unknown(ode, {"dt", "level", "tolerance"}, "ode");
  cfg.ode.dt = number(ode, "dt", "ode.dt", 1e-3);
  require(cfg.ode.dt > 0.0, "`ode.dt` must be > 0", "ode.dt");
  const auto ol = integer(ode, "level", "ode.level", 8);
  require(ol >= 0 && ol <= 20, "`ode.level` must lie in [0, 20]", "ode.level");
  cfg.ode.level = static_cast<int>(ol);
  cfg.ode.tolerance = number(ode, "tolerance", "ode.tolerance", 1e-2);

  const json& ce = section(j, "counterexample", false);
  reject_unknown(ce, {"t", "epsilons", "min_ratio", "control_tol"}, "counterexample");
  cfg.counterexample.t = number(ce, "t", "counterexample.t", 0.5);
  if (const json* e = find(ce, "epsilons")) {
    cfg.counterexample.epsilons = number_list(*e, "counterexample.epsilons");
  }
  cfg.counterexample.min_ratio = number(ce, "min_ratio", "counterexample.min_ratio", 1.5);
  cfg.counterexample.control_tol = number(ce, "control_tol", "counterexample.control_tol", 0.05);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open configuration file " + path.string(), "config");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what(), "config");
  }
  return parse_config(j, path.parent_path());
}

GridFunction make_initial(const ExperimentConfig& cfg) {
  const InitialSpec& s = cfg.initial;
  if (s.kind == "bump") return bump(cfg.grid, s.radius, s.center, s.amplitude);
  if (s.kind == "gaussian") return gaussian(cfg.grid, s.sigma, s.center, s.amplitude);
  if (s.kind == "ramp") return ramp(cfg.grid, s.slope, s.offset);
  std::ifstream in(s.csv_path);
  GridFunction f = read_csv(in);
  if (!(f.grid().n_nodes == cfg.grid.n_nodes) || std::abs(f.grid().lower - cfg.grid.lower) > 1e-9 * cfg.grid.length() ||
      std::abs(f.grid().upper - cfg.grid.upper) > 1e-9 * cfg.grid.length()) {
    throw ConfigError("initial data CSV grid does not match `grid`", "initial.params.path");
  }
  return GridFunction(cfg.grid, std::vector<double>(f.values().begin(), f.values().end()));
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

/// Files and timings produced by one subcommand, held back until the end.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::pair<std::string, double>> timings_ms;

  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }

  template <class F>
  auto timed(const std::string& stage, F&& fn) {
    const auto t0 = Clock::now();
    auto r = fn();
    timings_ms.emplace_back(stage, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    return r;
  }
};

std::string csv_of(const GridFunction& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

json envelope_json(const EnvelopeResult& r) {
  json inc = json::array();
  for (const auto& l : r.levels) {
    inc.push_back({{"level", l.level},
                   {"steps", l.steps},
                   {"h", l.h},
                   {"norm_lp", l.norm_lp},
                   {"increment_lp", l.increment_lp ? json(*l.increment_lp) : json(nullptr)},
                   {"min_pointwise_increment",
                    l.min_pointwise_increment ? json(*l.min_pointwise_increment) : json(nullptr)}});
  }
  return {{"levels_used", r.levels_used},
          {"converged", r.converged},
          {"upper_bound_margin", r.upper_bound_margin ? json(*r.upper_bound_margin) : json(nullptr)},
          {"boundary_leakage", r.boundary_leakage},
          {"increments", inc}};
}

std::string convergence_csv(const EnvelopeResult& r) {
  std::string s = "level,steps,h,increment_lp,norm_lp\n";
  for (const auto& l : r.levels) {
    s += std::to_string(l.level) + "," + std::to_string(l.steps) + "," + fmt(l.h) + "," +
         (l.increment_lp ? fmt(*l.increment_lp) : std::string("nan")) + "," + fmt(l.norm_lp) + "\n";
  }
  return s;
}

void run_envelope(const ExperimentConfig& cfg, Report& rep, Outputs& out) {
  if (!cfg.family.has_upper_bound()) {
    throw ConfigError("no envelope bound available (uncertain-shift regime); use `counterexample`", "family.family");
  }
  if (cfg.family.kind() == FamilyKind::gaussian_drift && cfg.norm.q_infinite) {
    throw ConfigError("the Gaussian family has no finite upper bound C(t) at p = 1", "norm.p");
  }
  const GridFunction f = make_initial(cfg);
  const EnvelopeResult r =
      out.timed("nisio_dyadic", [&] { return nisio_dyadic(cfg.family, cfg.t, f, cfg.tol_rel, cfg.n_max, cfg.norm, cfg.envelope); });
  const UpperBoundCertificate cert =
      out.timed("check_upper_bound", [&] { return check_upper_bound(cfg.family, cfg.t, r, f, cfg.norm); });
  rep.checks.push_back(make_check("upper_bound", cert.pass, cert.margin, cert.threshold,
                                  "max(final - C(t) f) <= 1e-6 (1 + ||f||_inf)"));
  rep.checks.push_back(make_check("monotone_iterates", r.worst_monotonicity >= -1e-9, r.worst_monotonicity, -1e-9,
                                  "min over levels of min(T_n f - T_{n-1} f) >= -1e-9"));
  rep.metrics = envelope_json(r);
  out.add("envelope.json", envelope_json(r).dump(2) + "\n");
  out.add("envelope_final.csv", csv_of(r.final));
  out.add("convergence.csv", convergence_csv(r));
}

void run_generator(const ExperimentConfig& cfg, Report& rep, Outputs& out) {
  const GridFunction f = make_initial(cfg);
  const GeneratorEstimate est = out.timed("generator_fd", [&] {
    return generator_fd(cfg.family, f, cfg.generator.h0, cfg.generator.halvings, cfg.envelope, cfg.norm);
  });
  std::string table = "h,error_lp\n";
  for (std::size_t k = 0; k < est.h_schedule.size(); ++k) {
    table += fmt(est.h_schedule[k]) + "," + fmt(est.errors_vs_B[k]) + "\n";
  }
  const double ratio = est.errors_vs_B.front() > 0.0 ? est.errors_vs_B.back() / est.errors_vs_B.front() : 0.0;
  rep.checks.push_back(make_check("errors_decreasing", est.strictly_decreasing || est.errors_vs_B.front() < 1e-12,
                                  ratio, 1.0, "errors_vs_B strictly decreasing in h"));
  rep.checks.push_back(make_check("final_over_initial", ratio <= cfg.generator.max_ratio, ratio,
                                  cfg.generator.max_ratio, "final error / initial error"));
  rep.metrics = {{"h_schedule", est.h_schedule},
                 {"errors_vs_B", est.errors_vs_B},
                 {"extrapolated_error", est.extrapolated_error}};
  out.add("generator.csv", table);
  out.add("generator_extrapolated.csv", csv_of(est.extrapolated));
}

void run_derivative(const ExperimentConfig& cfg, Report& rep, Outputs& out) {
  const GridFunction f = make_initial(cfg);
  const auto hs = halving_schedule(cfg.derivative.h0, cfg.derivative.halvings);
  const DerivativeIdentityReport d = out.timed("derivative_identity_check", [&] {
    return derivative_identity_check(cfg.family, cfg.derivative.t, f, hs, cfg.envelope, cfg.norm,
                                     cfg.derivative.identity_tol);
  });
  const double dev = out.timed("integral_identity_check", [&] {
    return integral_identity_check(cfg.family, cfg.derivative.t, f, cfg.derivative.quad_nodes, hs.back(),
                                   cfg.envelope, cfg.norm);
  });
  const double tol = cfg.derivative.identity_tol;
  rep.checks.push_back(make_check("gap_forward_plus", d.gap_forward_plus <= tol, d.gap_forward_plus, tol));
  rep.checks.push_back(make_check("gap_forward_minus", d.gap_forward_minus <= tol, d.gap_forward_minus, tol));
  rep.checks.push_back(make_check("gap_plus_minus", d.gap_plus_minus <= tol, d.gap_plus_minus, tol));
  rep.checks.push_back(make_check("integral_identity", dev <= cfg.derivative.integral_tol, dev,
                                  cfg.derivative.integral_tol));
  const json probe = {{"t", d.t},
                      {"gap", d.gap_plus_minus},
                      {"gap_forward_plus", d.gap_forward_plus},
                      {"gap_forward_minus", d.gap_forward_minus},
                      {"integral_deviation", dev},
                      {"pass", d.pass && dev <= cfg.derivative.integral_tol}};
  rep.metrics = probe;
  out.add("derivative.json", probe.dump(2) + "\n");
  out.add("derivative_plus.csv", csv_of(d.plus));
}

json comparison_json(const Comparison& c) {
  return {{"abs_err", c.abs_err}, {"rel_err", c.rel_err}, {"max_err", c.max_err}, {"margin", c.margin}};
}

void run_compare_hjb(const ExperimentConfig& cfg, Report& rep, Outputs& out) {
  const LambdaSet& set = cfg.family.lambdas();
  if (cfg.family.kind() != FamilyKind::gaussian_drift || !set.is_interval() || set.lo() != -set.hi()) {
    throw ConfigError("compare-hjb needs family gaussian_drift with a symmetric lambda_interval [-a, a]",
                      "family.lambda_interval");
  }
  const GridFunction f = make_initial(cfg);
  const EnvelopeResult r = out.timed(
      "nisio_dyadic", [&] { return nisio_dyadic(cfg.family, cfg.t, f, cfg.tol_rel, cfg.n_max, cfg.norm, cfg.envelope); });
  const GridFunction u = out.timed("hjb_upwind", [&] { return hjb_upwind(f, cfg.t, set.hi(), cfg.hjb.cfl); });
  const Comparison c = compare(u, r.final, cfg.norm, cfg.envelope.boundary_margin);
  rep.checks.push_back(make_check("envelope_vs_hjb", c.rel_err <= cfg.hjb.tolerance, c.rel_err, cfg.hjb.tolerance,
                                  "relative interior L^p distance"));
  rep.metrics = {{"comparison", comparison_json(c)}, {"envelope", envelope_json(r)}};
  out.add("comparison.json", comparison_json(c).dump(2) + "\n");
  out.add("hjb_final.csv", csv_of(u));
  out.add("envelope_final.csv", csv_of(r.final));
}

void run_compare_ode(const ExperimentConfig& cfg, Report& rep, Outputs& out) {
  if (cfg.family.kind() != FamilyKind::compound_poisson) {
    throw ConfigError("compare-ode needs family compound_poisson", "family.family");
  }
  const GridFunction f = make_initial(cfg);
  const GridFunction env = out.timed(
      "dyadic_iterate", [&] { return dyadic_iterate(cfg.family, cfg.t, cfg.ode.level, f, cfg.envelope.series); });
  const GridFunction u = out.timed("ode_reference", [&] { return ode_reference(cfg.family, f, cfg.t, cfg.ode.dt); });
  const Comparison c = compare(u, env, cfg.norm, cfg.envelope.boundary_margin);
  rep.checks.push_back(make_check("envelope_vs_ode", c.rel_err <= cfg.ode.tolerance, c.rel_err, cfg.ode.tolerance,
                                  "relative interior L^p distance"));
  rep.metrics = {{"comparison", comparison_json(c)}, {"level", cfg.ode.level}, {"dt", cfg.ode.dt}};
  out.add("comparison.json", comparison_json(c).dump(2) + "\n");
  out.add("ode_final.csv", csv_of(u));
  out.add("envelope_final.csv", csv_of(env));
}

void run_counterexample(const ExperimentConfig& cfg, Report& rep, Outputs& out) {
  const LambdaSet lambdas = cfg.family.kind() == FamilyKind::pure_shift ? cfg.family.lambdas()
                                                                        : LambdaSet::interval(-1.0, 1.0);
  const auto rows = out.timed("counterexample_scan", [&] {
    return counterexample_scan(cfg.grid, cfg.norm.p, cfg.counterexample.t, cfg.counterexample.epsilons, lambdas);
  });
  std::string table = "epsilon,norm_lp\n";
  json rows_json = json::array();
  bool nondecreasing = true;
  double worst_ratio = std::numeric_limits<double>::infinity();
  double control_lo = rows.front().control_norm_lp, control_hi = control_lo;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    table += fmt(rows[k].epsilon) + "," + fmt(rows[k].norm_lp) + "\n";
    rows_json.push_back({{"epsilon", rows[k].epsilon},
                         {"norm_lp", rows[k].norm_lp},
                         {"control_norm_lp", rows[k].control_norm_lp}});
    control_lo = std::min(control_lo, rows[k].control_norm_lp);
    control_hi = std::max(control_hi, rows[k].control_norm_lp);
    if (k > 0) {
      nondecreasing = nondecreasing && rows[k].norm_lp >= rows[k - 1].norm_lp;
      worst_ratio = std::min(worst_ratio, rows[k].norm_lp / rows[k - 1].norm_lp);
    }
  }
  const double spread = control_hi / control_lo - 1.0;
  rep.checks.push_back(make_check("norms_nondecreasing", nondecreasing, rows.back().norm_lp, 0.0));
  if (rows.size() > 1) {
    rep.checks.push_back(make_check("consecutive_ratio", worst_ratio >= cfg.counterexample.min_ratio, worst_ratio,
                                    cfg.counterexample.min_ratio, "min over consecutive epsilons"));
  }
  rep.checks.push_back(make_check("control_bounded", spread <= cfg.counterexample.control_tol, spread,
                                  cfg.counterexample.control_tol, "relative spread of the bounded control"));
  rep.metrics = {{"rows", rows_json}};
  out.add("scan.csv", table);
}

void write_outputs(const fs::path& dir, const Report& rep, const Outputs& out) {
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream os(dir / name, std::ios::binary);
    os << content;
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  };
  for (const auto& [name, content] : out.files) write(name, content);
  write("report.json", rep.to_json().dump(2) + "\n");
  json timings = json::object();
  for (const auto& [stage, ms] : out.timings_ms) timings[stage] = ms;
  write("timings.json", timings.dump(2) + "\n");
}

std::string summarize(const Report& rep) {
  std::size_t passed = 0;
  for (const auto& c : rep.checks) passed += c.passed() ? 1 : 0;
  std::string s = rep.subcommand + ": " + (rep.all_passed() ? "PASS" : "FAIL") + " (" + std::to_string(passed) + "/" +
                  std::to_string(rep.checks.size()) + " checks)";
  for (const auto& c : rep.checks) {
    if (!c.passed()) s += " " + c.name + "=" + short_fmt(c.value) + "[tol " + short_fmt(c.tolerance) + "]";
  }
  return s;
}

}  // namespace

RunResult run(const std::string& subcommand, const fs::path& config_path, const RunOptions& options) {
  using Handler = void (*)(const ExperimentConfig&, Report&, Outputs&);
  static const std::map<std::string, Handler> handlers = {
      {"envelope", run_envelope},       {"generator", run_generator},     {"derivative", run_derivative},
      {"compare-hjb", run_compare_hjb}, {"compare-ode", run_compare_ode}, {"counterexample", run_counterexample},
  };
  try {
    if (subcommand != "verify" && !handlers.count(subcommand)) {
      throw ConfigError("unknown subcommand `" + subcommand + "`", "subcommand");
    }
    if (options.scale != "small" && options.scale != "full") {
      throw ConfigError("--scale must be small or full", "scale");
    }
    ExperimentConfig cfg = load_config(config_path);
    if (options.seed) {
      cfg.seed = *options.seed;
      cfg.echo["seeds"] = *options.seed;
    }
    if (options.out) {
      cfg.output_dir = *options.out;
      cfg.echo["output_dir"] = options.out->string();
    }

    Report rep;
    Outputs out;
    if (subcommand == "verify") {
      VerifyOptions vo;
      vo.scale = options.scale;
      vo.seed = cfg.seed;
      rep = out.timed("verify_suite", [&] { return verify_suite(vo); });
    } else {
      handlers.at(subcommand)(cfg, rep, out);
    }
    rep.subcommand = subcommand;
    rep.config = cfg.echo;
    rep.version = library_version();
    rep.seed = cfg.seed;
    write_outputs(cfg.output_dir, rep, out);
    return {rep.all_passed() ? 0 : 1, summarize(rep)};
  } catch (const ConfigError& e) {
    std::string s = "configuration error";
    if (!e.key().empty()) s += " [" + e.key() + "]";
    return {2, s + ": " + e.what()};
  } catch (const UsageError& e) {
    return {2, std::string("configuration error: ") + e.what()};
  }
}

}  // namespace semienv
