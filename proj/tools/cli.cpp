// Copyright 2026 The kpinsker Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpinsker/error.hpp"
#include "kpinsker/harmonics.hpp"
#include "kpinsker/io.hpp"
#include "kpinsker/random.hpp"

namespace kpinsker::cli {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

Rational to_rational(const json& v, const std::string& where) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number_float()) return Rational::parse(v.dump());
  throw ConfigError(where + " must be a number or a rational string such as \"3/2\"");
}

template <typename T>
T get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned()) throw ConfigError(where + " must be a nonnegative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
  }
  return v.get<T>();
}

std::vector<Rational> parse_grid(const json& v, const std::string& where) {
  if (v.is_array()) {
    std::vector<Rational> out;
    for (const auto& e : v) out.push_back(to_rational(e, where));
    return out;
  }
  check_keys(v, {"begin", "end", "step"}, where);
  if (!v.contains("begin") || !v.contains("end") || !v.contains("step")) {
    throw ConfigError(where + " needs begin, end and step");
  }
  return rational_grid(to_rational(v["begin"], where + ".begin"), to_rational(v["end"], where + ".end"),
                       to_rational(v["step"], where + ".step"));
}

std::vector<int> parse_d_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int d = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(d);
    } catch (const std::exception&) {
      throw ConfigError("bad --d-grid entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--d-grid is empty");
  return out;
}

struct Context {
  RunConfig config;
  std::optional<std::vector<int>> d_grid;
  bool quiet = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

Format effective_format(const Context& ctx, Format natural) { return ctx.config.output.format.value_or(natural); }

// Writes to --out when given, otherwise to the command's stream.
void emit(const Context& ctx, const std::string& text) {
  const std::string& path = ctx.config.output.path;
  if (path.empty()) {
    *ctx.out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output path '" + path + "'");
  f << text;
  if (!ctx.quiet) *ctx.err << "wrote " << path << '\n';
}

SpectrumTable build_table(const RunConfig& cfg, int d) {
  SpectrumTable table;
  if (cfg.kernel.is_synthetic()) {
    table = SpectrumTable::synthetic(cfg.kernel.synthetic);
  } else {
    const KernelSpec kernel = cfg.kernel.spec();
    unsigned k_max = 0;
    if (cfg.kernel.k_max) {
      k_max = *cfg.kernel.k_max;
    } else if (kernel.truncation_tail == 0.0 && kernel.polynomial_degree() <= kernel.truncation_degree()) {
      k_max = kernel.polynomial_degree();
    } else {
      k_max = cfg.problem.config_at(d).default_k_max();
    }
    table = build_spectrum(kernel, d, k_max);
  }
  if (cfg.verify.corrupt_eigenvalue) {
    const auto [degree, value] = *cfg.verify.corrupt_eigenvalue;
    if (degree >= table.size()) throw ConfigError("corrupted degree is outside the spectrum");
    table.override_eigenvalue(degree, value);
  }
  return table;
}

int cmd_spectrum(Context& ctx) {
  const SpectrumTable table = build_table(ctx.config, ctx.config.problem.d);
  switch (effective_format(ctx, Format::csv)) {
    case Format::csv: {
      std::ostringstream o;
      table.write_csv(o);
      emit(ctx, o.str());
      break;
    }
    case Format::json:
      emit(ctx, spectrum_json(table) + "\n");
      break;
    case Format::svg:
      throw ConfigError("spectrum output supports csv and json only");
  }
  return kOk;
}

int cmd_pinsker(Context& ctx) {
  const ProblemConfig problem = ctx.config.problem.config();
  const SpectrumTable table = build_table(ctx.config, problem.dimension);
  const PinskerSolution sol = solve_kappa(table, problem);
  switch (effective_format(ctx, Format::json)) {
    case Format::json: {
      json j = json::parse(solution_json(sol));
      j["max_ell_ratio"] = max_ell_ratio(sol);
      if (!ctx.config.kernel.is_synthetic()) {
        try {
          const auto b = asymptotic(problem.gamma, problem.smoothness, problem.alpha, problem.radius,
                                    problem.noise_sigma, ctx.config.kernel.spec());
          json a;
          a["p"] = b.p;
          a["zeta"] = b.zeta.str();
          a["cstar"] = b.cstar;
          a["regime"] = to_string(b.regime);
          a["ratio"] = sol.dstar / (b.cstar * std::pow(problem.dimension, -b.zeta.to_double()));
          j["asymptotic"] = a;
        } catch (const ConfigError&) {
          j["asymptotic"] = nullptr;
        }
      }
      j["config_hash"] = ctx.config.hash();
      emit(ctx, j.dump(2) + "\n");
      break;
    }
    case Format::csv: {
      std::ostringstream o;
      o << "degree,eigenvalue,multiplicity,weight\n";
      char buf[96];
      for (const auto& b : sol.blocks) {
        if (!b.retained) continue;
        std::snprintf(buf, sizeof(buf), "%u,%.17g,%.17g,%.17g\n", b.degree, b.eigenvalue, b.multiplicity, b.weight);
        o << buf;
      }
      emit(ctx, o.str());
      break;
    }
    case Format::svg:
      throw ConfigError("pinsker output supports csv and json only");
  }
  return kOk;
}

int cmd_curves(Context& ctx) {
  const auto& cc = ctx.config.curves;
  if (cc.gamma.empty()) throw ConfigError("gamma grid is empty");
  if (cc.s.empty()) throw ConfigError("curves need at least one s");
  const auto& pr = ctx.config.problem;
  if (ctx.config.kernel.is_synthetic()) throw ConfigError("constant curves need a kernel, not a synthetic spectrum");
  const KernelSpec kernel = ctx.config.kernel.spec();

  std::vector<RateCurve> rates;
  std::vector<std::vector<ConstantPoint>> constants;
  for (const Rational& s : cc.s) {
    rates.push_back(rate_curve(s, cc.gamma));
    constants.push_back(constant_curve(s, cc.gamma, pr.alpha, pr.radius, pr.sigma, kernel));
  }

  std::ostringstream rate_csv;
  write_rate_csv(rate_csv, rates);
  std::ostringstream const_csv;
  write_constant_csv(const_csv, cc.s, constants);
  std::ostringstream plateau_csv;
  plateau_csv << "s,gamma_begin,gamma_end,zeta\n";
  for (const auto& c : rates) {
    for (const auto& p : c.plateaus) {
      plateau_csv << c.s.str() << ',' << p.gamma_begin.str() << ',' << p.gamma_end.str() << ',' << p.zeta.str()
                  << '\n';
    }
  }

  std::vector<PlotSeries> rate_series;
  std::vector<PlotSeries> const_series;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    PlotSeries r{"s=" + cc.s[i].str(), {}, {}, {}};
    PlotSeries c{"s=" + cc.s[i].str(), {}, {}, {}};
    for (std::size_t g = 0; g < rates[i].points.size(); ++g) {
      r.x.push_back(rates[i].points[g].gamma.to_double());
      r.y.push_back(rates[i].points[g].zeta.to_double());
      r.marked.push_back(false);
      c.x.push_back(constants[i][g].gamma.to_double());
      c.y.push_back(constants[i][g].cstar);
      c.marked.push_back(constants[i][g].jump);
    }
    rate_series.push_back(std::move(r));
    const_series.push_back(std::move(c));
  }
  const std::string rate_svg = line_plot_svg("Rate of the minimax risk", "gamma", "zeta", rate_series);
  const std::string const_svg = line_plot_svg("Pinsker constant", "gamma", "C*", const_series);

  const std::string& path = ctx.config.output.path;
  if (!path.empty()) {
    std::filesystem::create_directories(path);
    const std::pair<const char*, std::string> files[] = {{"rate.csv", rate_csv.str()},
                                                         {"constant.csv", const_csv.str()},
                                                         {"plateaus.csv", plateau_csv.str()},
                                                         {"rate.svg", rate_svg},
                                                         {"constant.svg", const_svg}};
    for (const auto& [name, text] : files) {
      const auto full = std::filesystem::path(path) / name;
      std::ofstream f(full, std::ios::binary);
      if (!f) throw ConfigError("cannot open output path '" + full.string() + "'");
      f << text;
    }
    if (!ctx.quiet) *ctx.err << "wrote curves to " << path << '\n';
    return kOk;
  }
  switch (effective_format(ctx, Format::csv)) {
    case Format::csv:
      *ctx.out << rate_csv.str() << '\n' << plateau_csv.str() << '\n' << const_csv.str();
      break;
    case Format::svg:
      *ctx.out << rate_svg;
      break;
    case Format::json: {
      json j;
      j["rate"] = json::array();
      for (const auto& c : rates) {
        for (const auto& p : c.points) j["rate"].push_back({{"s", c.s.str()}, {"gamma", p.gamma.str()}, {"zeta", p.zeta.str()}});
      }
      j["plateaus"] = json::array();
      for (const auto& c : rates) {
        for (const auto& p : c.plateaus) {
          j["plateaus"].push_back({{"s", c.s.str()},
                                   {"gamma_begin", p.gamma_begin.str()},
                                   {"gamma_end", p.gamma_end.str()},
                                   {"zeta", p.zeta.str()}});
        }
      }
      j["constant"] = json::array();
      for (std::size_t i = 0; i < constants.size(); ++i) {
        for (const auto& p : constants[i]) {
          j["constant"].push_back({{"s", cc.s[i].str()},
                                   {"gamma", p.gamma.str()},
                                   {"cstar", p.cstar},
                                   {"regime", to_string(p.regime)},
                                   {"jump", p.jump}});
        }
      }
      *ctx.out << j.dump(2) << '\n';
      break;
    }
  }
  return kOk;
}

std::vector<RegressionFunction> build_targets(const RunConfig& cfg, const SpectrumTable& table,
                                              const PinskerSolution& sol) {
  std::vector<TargetSpec> specs;
  std::vector<unsigned> retained;
  for (const auto& b : sol.blocks) {
    if (b.retained && b.eigenvalue > 0.0) retained.push_back(b.degree);
  }
  for (const auto& name : cfg.simulation.targets) {
    if (name == "family") {
      for (auto& s : default_target_family(sol, table)) specs.push_back(std::move(s));
    } else if (name.rfind("single_block:", 0) == 0) {
      try {
        specs.push_back({Allocation::single_block, {static_cast<unsigned>(std::stoul(name.substr(13)))}});
      } catch (const std::logic_error&) {
        throw ConfigError("bad target '" + name + "'");
      }
    } else {
      const Allocation a = parse_allocation(name);
      specs.push_back({a, a == Allocation::zero ? std::vector<unsigned>{} : retained});
    }
  }
  if (specs.empty()) throw ConfigError("simulation needs at least one target");
  std::vector<RegressionFunction> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::uint64_t target_seed = cfg.simulation.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1));
    out.push_back(make_target(table, cfg.problem.s.to_double(), cfg.problem.radius, specs[i], target_seed, &sol));
  }
  return out;
}

int cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.simulation.reps < 2) throw ConfigError("reps must be >= 2");
  const std::vector<int> grid = ctx.d_grid.value_or(std::vector<int>{cfg.problem.d});
  std::vector<SimReport> reports;
  for (int d : grid) {
    const ProblemConfig problem = cfg.problem.config_at(d);
    const SpectrumTable table = build_table(cfg, d);
    const PinskerSolution sol = solve_kappa(table, problem);
    const auto targets = build_targets(cfg, table, sol);
    MonteCarloOptions opts;
    opts.gram_cap = cfg.simulation.gram_cap;
    SimReport r = monte_carlo(problem, sol, table, targets, cfg.simulation.reps, cfg.simulation.seed, opts);
    r.config_hash = cfg.hash();
    reports.push_back(std::move(r));
  }
  switch (effective_format(ctx, Format::json)) {
    case Format::json: {
      if (reports.size() == 1) {
        emit(ctx, report_json(reports[0]) + "\n");
      } else {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(json::parse(report_json(r)));
        emit(ctx, arr.dump(2) + "\n");
      }
      break;
    }
    case Format::csv: {
      std::ostringstream o;
      write_report_csv_header(o);
      for (const auto& r : reports) write_report_csv_row(o, r);
      emit(ctx, o.str());
      break;
    }
    case Format::svg:
      throw ConfigError("simulate output supports csv and json only");
  }
  return kOk;
}

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

int cmd_verify(Context& ctx) {
  const auto& cfg = ctx.config;
  std::vector<Check> checks;
  auto add = [&](std::string name, double value, double threshold) {
    checks.push_back({std::move(name), value <= threshold, value, threshold});
  };

  RunConfig toy = cfg;
  toy.kernel = KernelSection{};
  toy.kernel.preset = cfg.kernel.is_synthetic() ? "poly:3" : cfg.kernel.preset;
  toy.kernel.coefficients = cfg.kernel.coefficients;
  toy.kernel.truncation_degree = cfg.kernel.truncation_degree;
  const KernelSpec toy_kernel = toy.kernel.spec();
  const bool polynomial_kernel = toy_kernel.truncation_tail == 0.0;
  RunConfig poly = toy;
  if (!polynomial_kernel) {
    poly.kernel = KernelSection{};
    poly.kernel.preset = "poly:3";
  }
  poly.kernel.k_max.reset();

  Philox4x32 rng(cfg.simulation.seed, stream_id(7, 0));
  for (int d = 3; d <= 10; ++d) {
    const std::string tag = "[d=" + std::to_string(d) + "]";
    const SpectrumTable ptable = build_table(poly, d);
    const double phi1 = poly.kernel.spec().value_at_one();
    add("trace" + tag, std::fabs(ptable.trace() - phi1) / phi1, 1e-10);

    double addition = 0.0;
    double gram = 0.0;
    for (unsigned k = 0; k <= 2; ++k) {
      const HarmonicBasis basis = harmonic_basis(d, k);
      const auto g = gram_matrix(basis);
      for (std::size_t a = 0; a < basis.size(); ++a) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
          gram = std::max(gram, std::fabs(g[a * basis.size() + b] - (a == b ? 1.0 : 0.0)));
        }
      }
      for (int pair = 0; pair < 20; ++pair) {
        const auto x = random_direction(d, rng);
        const auto y = random_direction(d, rng);
        addition = std::max(addition, addition_check(basis, x, y));
      }
    }
    add("addition_formula" + tag, addition, 1e-8);
    add("basis_orthonormal" + tag, gram, 1e-10);

    const ProblemConfig problem = cfg.problem.config_at(d);
    const SpectrumTable table = build_table(toy, d);
    const PinskerSolution sol = solve_kappa(table, problem);
    add("dstar_identity" + tag, sol.identity_residual, 1e-10);

    double window = 0.0;  // > 0 when the cutoff window is violated
    const double s = problem.s();
    const double kappa = sol.kappa_star;
    for (const auto& b : sol.blocks) {
      const double level = std::pow(b.eigenvalue, s / 2);
      if (b.retained && !(level > kappa)) window = std::max(window, kappa - level + 1e-300);
      if (!b.retained && level > kappa) window = std::max(window, level - kappa);
    }
    add("fixed_point_window" + tag, window, 0.0);

    const auto groups = sequence_groups(sol);
    const auto seq = sequence_model(groups, std::sqrt(problem.noise_level()), problem.radius, s, 0, 0);
    add("sequence_sup_risk" + tag, std::fabs(seq.sup_risk - sol.dstar) / sol.dstar, 1e-10);

    const auto lb = lower_bound_diagnostics(sol, 0.1);
    add("prior_mass" + tag, std::fabs(lb.prior.mass() - 0.9 * problem.radius) / problem.radius, 1e-10);
    add("bayes_value" + tag, std::fabs(lb.bayes_value - 0.9 * sol.dstar) / sol.dstar, 1e-10);
  }

  {
    const unsigned degrees[] = {0, 1};
    const auto dd = delta_diagnostics(3, 100, degrees, {}, cfg.verify.reps, cfg.simulation.seed);
    add("delta_aggregate_z", dd.aggregate.z_score(), 4.0);
    double cross = 0.0;
    for (const auto& c : dd.cross) cross = std::max(cross, c.z_score());
    add("delta_cross_max_z", cross, 4.0);
    double diag = 0.0;
    for (const auto& c : dd.diagonal) diag = std::max(diag, c.z_score());
    add("delta_diagonal_max_z", diag, 4.0);
  }
  {
    const ProblemConfig problem = cfg.problem.config_at(5);
    const SpectrumTable table = build_table(toy, 5);
    const PinskerSolution sol = solve_kappa(table, problem);
    std::vector<TargetSpec> family = default_target_family(sol, table);
    const auto target = make_target(table, problem.s(), problem.radius, family.back(), cfg.simulation.seed, &sol);
    const auto groups = sequence_groups(sol, &target);
    const auto seq = sequence_model(groups, std::sqrt(problem.noise_level()), problem.radius, problem.s(), 10000,
                                    cfg.simulation.seed);
    add("sequence_mc_z", std::fabs(seq.mc_risk - seq.exact_risk) / seq.mc_stderr, 4.0);
  }
  {
    const double designs[] = {1.0, 0.5, 2.0};
    const double offsets[] = {0.3, -0.2, 0.1};
    const auto est = bayes_risk_mc(1.0, designs, offsets, 1.0, 10000, cfg.simulation.seed);
    add("bayes_lemma_z", est.z_score(), 3.0);
  }

  struct ConvergenceRow {
    int d;
    double dstar;
    double bound;
    double ratio;
  };
  std::vector<ConvergenceRow> rows;
  const std::vector<int> grid = ctx.d_grid.value_or(cfg.verify.d_grid);
  if (!cfg.kernel.is_synthetic()) {
    const auto& pr = cfg.problem;
    const auto ab = asymptotic(pr.gamma, pr.s, pr.alpha, pr.radius, pr.sigma, cfg.kernel.spec());
    for (int d : grid) {
      const ProblemConfig problem = pr.config_at(d);
      RunConfig clean = cfg;
      clean.verify.corrupt_eigenvalue.reset();
      const PinskerSolution sol = solve_kappa(build_table(clean, d), problem);
      const double bound = ab.cstar * std::pow(static_cast<double>(d), -ab.zeta.to_double());
      rows.push_back({d, sol.dstar, bound, sol.dstar / bound});
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double step = std::fabs(rows[i].ratio - 1.0) - std::fabs(rows[i - 1].ratio - 1.0);
      worst = std::max(worst, step);
    }
    if (rows.size() >= 2) checks.push_back({"convergence_monotone", worst < 0.0, worst, 0.0});
  }

  const bool all_pass = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  std::ostringstream o;
  char buf[160];
  switch (effective_format(ctx, Format::csv)) {
    case Format::csv:
      o << "check,status,value,threshold\n";
      for (const auto& c : checks) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%.6g\n", c.name.c_str(), c.pass ? "pass" : "FAIL", c.value,
                      c.threshold);
        o << buf;
      }
      o << "\nd,dstar,cstar_rate,ratio\n";
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.8f\n", r.d, r.dstar, r.bound, r.ratio);
        o << buf;
      }
      break;
    case Format::json: {
      json j;
      j["config_hash"] = cfg.hash();
      j["passed"] = all_pass;
      j["checks"] = json::array();
      for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}});
      }
      j["convergence"] = json::array();
      for (const auto& r : rows) {
        j["convergence"].push_back({{"d", r.d}, {"dstar", r.dstar}, {"cstar_rate", r.bound}, {"ratio", r.ratio}});
      }
      o << j.dump(2) << '\n';
      break;
    }
    case Format::svg:
      throw ConfigError("verify output supports csv and json only");
  }
  emit(ctx, o.str());
  if (!all_pass && !ctx.quiet) *ctx.err << "verification failed\n";
  return all_pass ? kOk : kVerifyFailed;
}

json config_to_json(const RunConfig& c) {
  json j;
  json k;
  if (!c.kernel.label.empty()) k["label"] = c.kernel.label;
  if (c.kernel.is_synthetic()) {
    json syn = json::array();
    for (const auto& [v, m] : c.kernel.synthetic) syn.push_back({{"eigenvalue", v}, {"multiplicity", m}});
    k["synthetic"] = syn;
  } else if (!c.kernel.coefficients.empty()) {
    k["coefficients"] = c.kernel.coefficients;
  } else {
    k["preset"] = c.kernel.preset;
  }
  k["truncation_degree"] = c.kernel.truncation_degree;
  if (c.kernel.k_max) k["k_max"] = *c.kernel.k_max;
  j["kernel"] = k;
  json p;
  p["d"] = c.problem.d;
  p["gamma"] = c.problem.gamma.str();
  p["s"] = c.problem.s.str();
  p["alpha"] = c.problem.alpha;
  p["R"] = c.problem.radius;
  p["sigma"] = c.problem.sigma;
  if (c.problem.n) p["n"] = *c.problem.n;
  j["problem"] = p;
  j["simulation"] = {{"reps", c.simulation.reps},
                     {"seed", c.simulation.seed},
                     {"targets", c.simulation.targets},
                     {"gram_cap", c.simulation.gram_cap}};
  json cs = json::array();
  for (const auto& s : c.curves.s) cs.push_back(s.str());
  json cg = json::array();
  for (const auto& g : c.curves.gamma) cg.push_back(g.str());
  j["curves"] = {{"s", cs}, {"gamma", cg}};
  json v;
  v["d_grid"] = c.verify.d_grid;
  v["reps"] = c.verify.reps;
  if (c.verify.corrupt_eigenvalue) {
    v["corrupt_eigenvalue"] = {{"degree", c.verify.corrupt_eigenvalue->first},
                               {"value", c.verify.corrupt_eigenvalue->second}};
  }
  j["verify"] = v;
  return j;
}

}  // namespace

std::vector<Rational> default_gamma_grid() { return rational_grid(Rational(1, 20), Rational(9), Rational(1, 20)); }

KernelSpec KernelSection::spec() const {
  KernelSpec k = coefficients.empty() ? KernelSpec::preset(preset, truncation_degree)
                                      : KernelSpec::from_coefficients(label.empty() ? "custom" : label, coefficients);
  if (!label.empty()) k.label = label;
  return k;
}

ProblemConfig ProblemSection::config() const { return config_at(d); }

ProblemConfig ProblemSection::config_at(int dimension) const {
  return ProblemConfig::make(dimension, gamma, alpha, s, radius, sigma, n);
}

std::string RunConfig::canonical() const { return config_to_json(*this).dump(); }

std::string RunConfig::hash() const { return fnv1a_hex(canonical()); }

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  if (name == "svg") return Format::svg;
  throw ConfigError("unknown format '" + name + "' (expected csv, json or svg)");
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, {"kernel", "problem", "simulation", "output", "curves", "verify"}, "config");
  RunConfig c;
  try {
    if (root.contains("kernel")) {
      const json& k = root["kernel"];
      check_keys(k, {"label", "preset", "coefficients", "truncation_degree", "k_max", "synthetic"}, "kernel");
      if (k.contains("label")) c.kernel.label = k["label"].get<std::string>();
      if (k.contains("preset")) c.kernel.preset = k["preset"].get<std::string>();
      if (k.contains("coefficients")) {
        if (k.contains("preset")) throw ConfigError("kernel takes either preset or coefficients, not both");
        for (const auto& v : k["coefficients"]) c.kernel.coefficients.push_back(get_number<double>(v, "coefficient"));
        if (c.kernel.coefficients.empty()) throw ConfigError("kernel coefficients are empty");
      }
      if (k.contains("truncation_degree")) {
        c.kernel.truncation_degree = get_number<unsigned>(k["truncation_degree"], "kernel.truncation_degree");
      }
      if (k.contains("k_max")) c.kernel.k_max = get_number<unsigned>(k["k_max"], "kernel.k_max");
      if (k.contains("synthetic")) {
        for (const auto& b : k["synthetic"]) {
          if (b.is_array() && b.size() == 2) {
            c.kernel.synthetic.emplace_back(get_number<double>(b[0], "synthetic eigenvalue"),
                                            get_number<std::uint64_t>(b[1], "synthetic multiplicity"));
          } else {
            check_keys(b, {"eigenvalue", "multiplicity"}, "kernel.synthetic entry");
            c.kernel.synthetic.emplace_back(get_number<double>(b.at("eigenvalue"), "synthetic eigenvalue"),
                                            get_number<std::uint64_t>(b.at("multiplicity"), "synthetic multiplicity"));
          }
        }
        if (c.kernel.synthetic.empty()) throw ConfigError("synthetic spectrum is empty");
      }
      c.kernel.spec();  // validates preset and coefficients early
    }
    if (root.contains("problem")) {
      const json& p = root["problem"];
      check_keys(p, {"d", "gamma", "s", "alpha", "R", "sigma", "n"}, "problem");
      if (p.contains("d")) c.problem.d = get_number<int>(p["d"], "problem.d");
      if (p.contains("gamma")) c.problem.gamma = to_rational(p["gamma"], "problem.gamma");
      if (p.contains("s")) c.problem.s = to_rational(p["s"], "problem.s");
      if (p.contains("alpha")) c.problem.alpha = get_number<double>(p["alpha"], "problem.alpha");
      if (p.contains("R")) c.problem.radius = get_number<double>(p["R"], "problem.R");
      if (p.contains("sigma")) c.problem.sigma = get_number<double>(p["sigma"], "problem.sigma");
      if (p.contains("n")) c.problem.n = get_number<std::uint64_t>(p["n"], "problem.n");
      c.problem.config();  // validates ranges
    }
    if (root.contains("simulation")) {
      const json& s = root["simulation"];
      check_keys(s, {"reps", "seed", "targets", "gram_cap"}, "simulation");
      if (s.contains("reps")) c.simulation.reps = get_number<std::size_t>(s["reps"], "simulation.reps");
      if (s.contains("seed")) c.simulation.seed = get_number<std::uint64_t>(s["seed"], "simulation.seed");
      if (s.contains("targets")) c.simulation.targets = s["targets"].get<std::vector<std::string>>();
      if (s.contains("gram_cap")) c.simulation.gram_cap = get_number<std::size_t>(s["gram_cap"], "simulation.gram_cap");
    }
    if (root.contains("output")) {
      const json& o = root["output"];
      check_keys(o, {"format", "path"}, "output");
      if (o.contains("format")) c.output.format = parse_format(o["format"].get<std::string>());
      if (o.contains("path")) c.output.path = o["path"].get<std::string>();
    }
    if (root.contains("curves")) {
      const json& cv = root["curves"];
      check_keys(cv, {"s", "gamma"}, "curves");
      if (cv.contains("s")) {
        c.curves.s.clear();
        for (const auto& v : cv["s"]) c.curves.s.push_back(to_rational(v, "curves.s"));
      }
      if (cv.contains("gamma")) c.curves.gamma = parse_grid(cv["gamma"], "curves.gamma");
    }
    if (root.contains("verify")) {
      const json& v = root["verify"];
      check_keys(v, {"d_grid", "reps", "corrupt_eigenvalue"}, "verify");
      if (v.contains("d_grid")) c.verify.d_grid = v["d_grid"].get<std::vector<int>>();
      if (v.contains("reps")) c.verify.reps = get_number<std::size_t>(v["reps"], "verify.reps");
      if (v.contains("corrupt_eigenvalue")) {
        const json& ce = v["corrupt_eigenvalue"];
        check_keys(ce, {"degree", "value"}, "verify.corrupt_eigenvalue");
        c.verify.corrupt_eigenvalue = std::make_pair(get_number<unsigned>(ce.at("degree"), "degree"),
                                                     get_number<double>(ce.at("value"), "value"));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pinsker bounds for inner-product kernel regression on the sphere", "kpinsker"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<long long> reps;
  std::string d_grid;
  std::string dump_basis;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_path, "output file (directory for curves)");
  app.add_option("--format", format, "csv, json or svg");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--reps", reps, "Monte Carlo replications");
  app.add_option("--d-grid", d_grid, "comma-separated dimensions, e.g. \"100,500,2000\"");
  app.add_option("--dump-basis", dump_basis, "print the harmonic basis \"d,k\" as JSON and exit");
  app.add_flag("--quiet", quiet, "suppress progress messages");

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue blocks of the kernel");
  auto* pinsker = app.add_subcommand("pinsker", "kappa*, N, filter weights and D*");
  auto* curves = app.add_subcommand("curves", "rate and constant curves over a gamma grid");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo excess risk of the filter estimator");
  auto* verify = app.add_subcommand("verify", "identity and invariant suite");

  std::vector<std::string> storage{"kpinsker"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (!dump_basis.empty()) {
      const auto comma = dump_basis.find(',');
      if (comma == std::string::npos) throw ConfigError("--dump-basis expects \"d,k\"");
      int d = 0;
      unsigned k = 0;
      try {
        d = std::stoi(dump_basis.substr(0, comma));
        k = static_cast<unsigned>(std::stoul(dump_basis.substr(comma + 1)));
      } catch (const std::logic_error&) {
        throw ConfigError("--dump-basis expects \"d,k\"");
      }
      out << basis_json(harmonic_basis(d, k)) << '\n';
      return kOk;
    }
    if (app.get_subcommands().empty()) throw ConfigError("a subcommand is required (see --help)");

    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    ctx.quiet = quiet;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (!format.empty()) ctx.config.output.format = parse_format(format);
    if (!out_path.empty()) ctx.config.output.path = out_path;
    if (seed) ctx.config.simulation.seed = *seed;
    if (reps) {
      if (*reps < 0) throw ConfigError("--reps must be >= 0");
      ctx.config.simulation.reps = static_cast<std::size_t>(*reps);
    }
    if (!d_grid.empty()) ctx.d_grid = parse_d_grid(d_grid);

    if (spectrum->parsed()) return cmd_spectrum(ctx);
    if (pinsker->parsed()) return cmd_pinsker(ctx);
    if (curves->parsed()) return cmd_curves(ctx);
    if (simulate->parsed()) return cmd_simulate(ctx);
    if (verify->parsed()) return cmd_verify(ctx);
    throw ConfigError("unknown subcommand");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace kpinsker::cli
