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

#include "kpinsker/pinsker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kpinsker/error.hpp"
#include "kpinsker/numeric.hpp"

namespace kpinsker {

namespace {

// λ^e computed in log space; λ > 0.
double power(double lambda, double e) { return std::exp(e * std::log(lambda)); }

// a^s (k!)^s in log space.
double scaled_coefficient(double a, std::int64_t k, double s) {
  return std::exp(s * (std::log(a) + log_gamma(static_cast<double>(k) + 1.0)));
}

double factorial(std::int64_t k) { return std::exp(log_gamma(static_cast<double>(k) + 1.0)); }

}  // namespace

ProblemConfig ProblemConfig::make(int d, Rational gamma, double alpha, Rational s, double radius, double sigma,
                                  std::optional<std::uint64_t> n) {
  if (d < 2) throw ConfigError("dimension d must be >= 2");
  if (gamma <= Rational(0)) throw ConfigError("gamma must be > 0");
  if (s <= Rational(0)) throw ConfigError("smoothness s must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("radius R must be > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("noise sigma must be > 0");
  if (n && *n == 0) throw ConfigError("sample size n must be >= 1");
  ProblemConfig c;
  c.dimension = d;
  c.gamma = gamma;
  c.alpha = alpha;
  c.smoothness = s;
  c.radius = radius;
  c.noise_sigma = sigma;
  c.sample_size_override = n;
  if (!n && c.sample_size() < 1.0) throw ConfigError("alpha * d^gamma rounds to n = 0");
  return c;
}

double ProblemConfig::sample_size() const {
  if (sample_size_override) return static_cast<double>(*sample_size_override);
  const double n = std::round(alpha * std::exp(gamma.to_double() * std::log(static_cast<double>(dimension))));
  if (!std::isfinite(n)) throw NumericError("alpha * d^gamma overflows");
  return n;
}

double ProblemConfig::noise_level() const { return noise_sigma * noise_sigma / sample_size(); }

std::int64_t ProblemConfig::p() const { return (gamma / (smoothness + Rational(1))).floor(); }

bool ProblemConfig::boundary_ambiguous() const {
  const Rational pp(p());
  return gamma == pp * (smoothness + Rational(1)) + smoothness / Rational(2);
}

unsigned ProblemConfig::default_k_max() const { return static_cast<unsigned>(p() + 5); }

PinskerSolution solve_kappa(const SpectrumTable& spectrum, const ProblemConfig& config) {
  const double s = config.s();
  const double noise = config.noise_level();
  const double radius = config.radius;

  std::size_t positive = 0;
  while (positive < spectrum.size() && spectrum.sorted(positive).eigenvalue > 0.0) ++positive;
  if (positive == 0) throw NumericError("degenerate spectrum: every eigenvalue is zero");

  // Block b is retained iff (σ²/n) Σ_{j<=b} N_j a_j (a_b - a_j) < R with
  // a = λ^{-s/2} ascending. Every term is >= 0, so unlike the closed form
  // κ = σ²Σa/(nR + σ²Σa²) the test never cancels. Ties share one level.
  std::vector<double> level(positive);
  for (std::size_t b = 0; b < positive; ++b) level[b] = power(spectrum.sorted(b).eigenvalue, -s / 2);
  std::size_t retained = 0;
  for (std::size_t b = 0; b < positive; ++b) {
    CompensatedSum gap;
    for (std::size_t j = 0; j < b; ++j) gap += spectrum.sorted(j).multiplicity * level[j] * (level[b] - level[j]);
    if (!(noise * gap.value() < radius)) break;
    retained = b + 1;
  }
  if (retained == 0) throw NumericError("spectrum too shallow: no consistent cutoff inside the table");

  CompensatedSum s1;  // Σ N λ^{-s/2}
  CompensatedSum s2;  // Σ N λ^{-s}
  for (std::size_t b = 0; b < retained; ++b) {
    s1 += spectrum.sorted(b).multiplicity * level[b];
    s2 += spectrum.sorted(b).multiplicity * level[b] * level[b];
  }
  const double kappa = noise * s1.value() / (radius + noise * s2.value());
  if (!std::isfinite(kappa) || !(kappa > 0.0)) throw NumericError("kappa* is not finite and positive");

  PinskerSolution sol;
  sol.kappa_star = kappa;
  sol.retained_blocks = retained;
  sol.smoothness = s;
  sol.radius = radius;
  sol.noise_level = noise;
  sol.sample_size = config.sample_size();
  sol.boundary_ambiguous = config.boundary_ambiguous();

  sol.blocks.resize(spectrum.size());
  for (const auto& blk : spectrum.blocks()) {
    BlockWeight& w = sol.blocks[blk.degree];
    w.degree = blk.degree;
    w.eigenvalue = blk.eigenvalue;
    w.multiplicity = blk.multiplicity;
    w.exact_multiplicity = blk.exact_multiplicity;
  }
  for (std::size_t b = 0; b < sol.retained_blocks; ++b) sol.blocks[spectrum.order()[b]].retained = true;

  if (!spectrum.exhaustive()) {
    // Degrees past the table are bounded by the last two (μ_{k+2} <= μ_k), so
    // the cutoff is certified only if neither of those is retained.
    const std::size_t n = spectrum.size();
    for (std::size_t k = n >= 2 ? n - 2 : 0; k < n; ++k) {
      if (sol.blocks[k].retained) {
        throw NumericError("spectrum too shallow: fixed point reaches degree " + std::to_string(k) +
                           " of a table ending at degree " + std::to_string(n - 1));
      }
    }
  }

  CompensatedSum cutoff;
  std::uint64_t exact = 0;
  bool exact_ok = true;
  unsigned q = 0;
  for (const auto& w : sol.blocks) {
    if (!w.retained) continue;
    cutoff += w.multiplicity;
    q = std::max(q, w.degree);
    if (w.exact_multiplicity == 0 || exact > std::numeric_limits<std::uint64_t>::max() - w.exact_multiplicity) {
      exact_ok = false;
    } else {
      exact += w.exact_multiplicity;
    }
  }
  sol.cutoff = cutoff.value();
  sol.exact_cutoff = exact_ok ? exact : 0;
  sol.top_degree = q;
  sol.block_aligned = true;
  for (unsigned k = 0; k < sol.blocks.size(); ++k) {
    if (sol.blocks[k].retained != (k <= q)) sol.block_aligned = false;
  }

  const std::vector<double> weights = filter_weights(sol, spectrum, s);
  for (std::size_t k = 0; k < weights.size(); ++k) sol.blocks[k].weight = weights[k];
  sol.dstar = dstar(sol, config);
  sol.identity_residual = sol.dstar > 0.0 ? relative_error(dstar_identity_side(sol, config), sol.dstar) : 0.0;
  return sol;
}

std::vector<double> filter_weights(const PinskerSolution& solution, const SpectrumTable& spectrum, double s) {
  // ℓ_i = 1 - κ a_i = (R - ε² Σ_j N_j a_j (a_i - a_j)) / (R + ε² Σ_j N_j a_j²)
  // over retained j, with a = λ^{-s/2}. The sum is split by sign so the only
  // cancellation left is the one inherent to a barely retained block.
  std::vector<double> weights(spectrum.size(), 0.0);
  std::vector<const SpectrumBlock*> kept;
  for (const auto& blk : spectrum.blocks()) {
    const bool retained = blk.degree < solution.blocks.size() && solution.blocks[blk.degree].retained;
    if (retained && blk.eigenvalue > 0.0) kept.push_back(&blk);
  }
  const double eps2 = solution.noise_level;
  const double radius = solution.radius;
  CompensatedSum squares;
  for (const auto* b : kept) squares += b->multiplicity * power(b->eigenvalue, -s);
  const double denom = radius + eps2 * squares.value();
  for (const auto* bi : kept) {
    const double ai = power(bi->eigenvalue, -s / 2);
    CompensatedSum above;  // a_j > a_i
    CompensatedSum below;  // a_j < a_i
    for (const auto* bj : kept) {
      const double aj = power(bj->eigenvalue, -s / 2);
      if (aj > ai) above += bj->multiplicity * aj * (aj - ai);
      if (aj < ai) below += bj->multiplicity * aj * (ai - aj);
    }
    const double num = (radius + eps2 * above.value()) - eps2 * below.value();
    weights[bi->degree] = std::max(0.0, num / denom);
  }
  return weights;
}

double dstar(const PinskerSolution& solution, const ProblemConfig& config) {
  CompensatedSum sum;
  for (const auto& w : solution.blocks) {
    if (w.retained) sum += w.multiplicity * w.weight;
  }
  return config.noise_level() * sum.value();
}

double dstar_identity_side(const PinskerSolution& solution, const ProblemConfig& config) {
  CompensatedSum sum;
  for (const auto& w : solution.blocks) {
    if (w.retained) sum += w.multiplicity * w.weight * w.weight;
  }
  return config.radius * solution.kappa_star * solution.kappa_star + config.noise_level() * sum.value();
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::case_i_interior:
      return "case_i_interior";
    case Regime::case_i_boundary:
      return "case_i_boundary";
    case Regime::case_ii_interior:
      return "case_ii_interior";
    case Regime::case_ii_boundary:
      return "case_ii_boundary";
  }
  return "unknown";
}

Rational rate_exponent(const Rational& gamma, const Rational& s) {
  if (gamma <= Rational(0)) throw ConfigError("gamma must be > 0");
  if (s <= Rational(0)) throw ConfigError("smoothness s must be > 0");
  const Rational p((gamma / (s + Rational(1))).floor());
  if (gamma < p * (s + Rational(1)) + s) return gamma - p;
  return (p + Rational(1)) * s;
}

AsymptoticBound asymptotic(const Rational& gamma, const Rational& s, double alpha, double radius, double sigma,
                           const KernelSpec& kernel) {
  if (gamma <= Rational(0)) throw ConfigError("gamma must be > 0");
  if (s <= Rational(0)) throw ConfigError("smoothness s must be > 0");
  AsymptoticBound out;
  out.p = (gamma / (s + Rational(1))).floor();
  const Rational p(out.p);
  const Rational lower = p * (s + Rational(1));
  const Rational middle = lower + s;

  const std::int64_t needed = gamma.floor() + 3;
  for (std::int64_t k = 0; k <= needed; ++k) {
    if (k >= static_cast<std::int64_t>(kernel.coefficients.size()) || !(kernel.coefficients[k] > 0.0)) {
      throw ConfigError("kernel coefficient a_" + std::to_string(k) + " must be positive for gamma = " + gamma.str());
    }
  }

  const double sd = s.to_double();
  const double sigma2 = sigma * sigma;
  if (gamma < middle) {
    out.zeta = gamma - p;
    const bool boundary = gamma == lower;
    out.regime = boundary ? Regime::case_i_boundary : Regime::case_i_interior;
    double denom = alpha * factorial(out.p);
    if (boundary) denom += sigma2 / (radius * scaled_coefficient(kernel.coefficients[out.p], out.p, sd));
    out.cstar = sigma2 / denom;
  } else {
    out.zeta = (p + Rational(1)) * s;
    const bool boundary = gamma == middle;
    out.regime = boundary ? Regime::case_ii_boundary : Regime::case_ii_interior;
    out.cstar = radius * scaled_coefficient(kernel.coefficients[out.p + 1], out.p + 1, sd);
    if (boundary) out.cstar += sigma2 / (alpha * factorial(out.p));
  }
  return out;
}

std::vector<Rational> rational_grid(const Rational& begin, const Rational& end, const Rational& step) {
  if (step <= Rational(0)) throw ConfigError("grid step must be > 0");
  std::vector<Rational> grid;
  for (Rational g = begin; g <= end; g += step) grid.push_back(g);
  return grid;
}

RateCurve rate_curve(const Rational& s, std::span<const Rational> gamma_grid) {
  RateCurve curve;
  curve.s = s;
  curve.points.reserve(gamma_grid.size());
  for (const Rational& g : gamma_grid) curve.points.push_back({g, rate_exponent(g, s)});
  std::size_t start = 0;
  for (std::size_t i = 1; i <= curve.points.size(); ++i) {
    if (i == curve.points.size() || curve.points[i].zeta != curve.points[start].zeta) {
      if (i - start >= 2) curve.plateaus.push_back({curve.points[start].gamma, curve.points[i - 1].gamma,
                                                    curve.points[start].zeta});
      start = i;
    }
  }
  return curve;
}

std::vector<ConstantPoint> constant_curve(const Rational& s, std::span<const Rational> gamma_grid, double alpha,
                                          double radius, double sigma, const KernelSpec& kernel) {
  std::vector<ConstantPoint> out;
  out.reserve(gamma_grid.size());
  for (const Rational& g : gamma_grid) {
    const AsymptoticBound b = asymptotic(g, s, alpha, radius, sigma, kernel);
    const bool jump = b.regime == Regime::case_i_boundary || b.regime == Regime::case_ii_boundary;
    out.push_back({g, b.cstar, b.regime, jump});
  }
  return out;
}

double max_ell_ratio(const PinskerSolution& solution) {
  double best = 0.0;
  for (const auto& w : solution.blocks) {
    if (!w.retained || w.weight <= 0.0) continue;
    const double r = w.weight / (solution.sample_size * power(w.eigenvalue, solution.smoothness / 2) *
                                 solution.kappa_star);
    best = std::max(best, r);
  }
  return best;
}

double PriorSpec::mass() const {
  CompensatedSum sum;
  for (const auto& b : blocks) sum += b.multiplicity * b.s_sq * power(b.eigenvalue, -smoothness);
  return sum.value();
}

double PriorSpec::max_coordinate_mass() const {
  double best = 0.0;
  for (const auto& b : blocks) best = std::max(best, b.s_sq * power(b.eigenvalue, -smoothness));
  return best;
}

LowerBoundDiagnostics lower_bound_diagnostics(const PinskerSolution& solution, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  const double s = solution.smoothness;
  LowerBoundDiagnostics out;
  out.prior.delta = delta;
  out.prior.smoothness = s;
  CompensatedSum bayes;
  double lambda_max = 0.0;
  for (const auto& w : solution.blocks) {
    lambda_max = std::max(lambda_max, w.eigenvalue);
    if (!w.retained) continue;
    const double inv_half = power(w.eigenvalue, -s / 2);
    PriorBlock pb;
    pb.degree = w.degree;
    pb.eigenvalue = w.eigenvalue;
    pb.multiplicity = w.multiplicity;
    pb.v_sq = solution.noise_level * w.weight / (solution.kappa_star * inv_half);
    pb.s_sq = (1.0 - delta) * pb.v_sq;
    out.prior.blocks.push_back(pb);
    bayes += w.multiplicity * w.weight / (w.weight + solution.kappa_star * inv_half);
  }
  out.bayes_value = (1.0 - delta) * solution.noise_level * bayes.value();
  const double max_mass = out.prior.max_coordinate_mass();
  const double ratio = max_mass > 0.0 ? out.prior.mass() / max_mass : 0.0;
  out.tail_probability = std::exp(-delta * delta / (8.0 * (1.0 - delta) * (1.0 - delta)) * ratio);
  out.residual_bound = 6.0 * power(lambda_max, s) * solution.radius * std::sqrt(out.tail_probability);
  return out;
}

}  // namespace kpinsker
