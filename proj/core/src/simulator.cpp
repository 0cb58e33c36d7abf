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

#include "kpinsker/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "kpinsker/error.hpp"
#include "kpinsker/numeric.hpp"

namespace kpinsker {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

struct Moments {
  double mean = 0.0;
  double stderr_mean = 0.0;
};

Moments summarize(std::span<const double> xs) {
  Moments m;
  if (xs.empty()) return m;
  CompensatedSum sum;
  for (double x : xs) sum += x;
  m.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  CompensatedSum sq;
  for (double x : xs) sq += (x - m.mean) * (x - m.mean);
  const double var = sq.value() / static_cast<double>(xs.size() - 1);
  m.stderr_mean = std::sqrt(var / static_cast<double>(xs.size()));
  return m;
}

MomentEstimate estimate(std::span<const double> xs, double target) {
  const Moments m = summarize(xs);
  return {m.mean, m.stderr_mean, target};
}

// Runs body(i) for i in [0, count) over a pool of workers; results must be
// written by index so the caller's reduction order is fixed.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

PointSet sample_sphere(std::size_t n, int d, Philox4x32& rng) {
  if (d < 2) throw ConfigError("sphere dimension d must be >= 2");
  PointSet pts;
  pts.dimension = d;
  pts.count = n;
  const std::size_t m = pts.ambient();
  pts.coords.resize(n * m);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < n; ++i) {
    double* x = pts.coords.data() + i * m;
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        x[c] = normal(rng);
        norm_sq += x[c] * x[c];
      }
    } while (norm_sq == 0.0);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t c = 0; c < m; ++c) x[c] *= inv;
  }
  return pts;
}

PointSet sample_sphere(std::size_t n, int d, std::uint64_t seed) {
  Philox4x32 rng(seed, 0);
  return sample_sphere(n, d, rng);
}

std::vector<double> random_direction(int d, Philox4x32& rng) {
  PointSet p = sample_sphere(1, d, rng);
  return std::move(p.coords);
}

double RegressionFunction::component(unsigned degree, std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& b : blocks) {
    if (b.degree != degree || b.amplitude == 0.0) continue;
    const double t = std::clamp(dot(x, b.direction), -1.0, 1.0);
    acc += b.amplitude * std::sqrt(b.multiplicity) * gegenbauer(b.degree, dimension, t);
  }
  return acc;
}

double RegressionFunction::evaluate(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& b : blocks) {
    if (b.amplitude == 0.0) continue;
    const double t = std::clamp(dot(x, b.direction), -1.0, 1.0);
    acc += b.amplitude * std::sqrt(b.multiplicity) * gegenbauer(b.degree, dimension, t);
  }
  return acc;
}

double RegressionFunction::amplitude(unsigned degree) const {
  for (const auto& b : blocks) {
    if (b.degree == degree) return b.amplitude;
  }
  return 0.0;
}

double RegressionFunction::ball_norm(const SpectrumTable& spectrum, double s) const {
  CompensatedSum sum;
  for (const auto& b : blocks) {
    if (b.amplitude == 0.0) continue;
    const double mu = spectrum.block(b.degree).eigenvalue;
    if (mu <= 0.0) return std::numeric_limits<double>::infinity();
    sum += b.amplitude * b.amplitude * std::pow(mu, -s);
  }
  return sum.value();
}

double RegressionFunction::l2_norm_sq() const {
  double acc = 0.0;
  for (const auto& b : blocks) acc += b.amplitude * b.amplitude;
  return acc;
}

std::string to_string(Allocation a) {
  switch (a) {
    case Allocation::zero:
      return "zero";
    case Allocation::single_block:
      return "single_block";
    case Allocation::uniform:
      return "uniform";
    case Allocation::prior:
      return "prior";
  }
  return "unknown";
}

Allocation parse_allocation(const std::string& name) {
  if (name == "zero") return Allocation::zero;
  if (name == "single_block") return Allocation::single_block;
  if (name == "uniform") return Allocation::uniform;
  if (name == "prior") return Allocation::prior;
  throw ConfigError("unknown target allocation '" + name + "'");
}

RegressionFunction make_target(const SpectrumTable& spectrum, double s, double radius, const TargetSpec& spec,
                               std::uint64_t seed, const PinskerSolution* solution) {
  RegressionFunction f;
  f.dimension = spectrum.dimension();
  f.name = to_string(spec.allocation);
  if (spec.allocation == Allocation::zero) return f;
  if (spec.degrees.empty()) throw ConfigError("target allocation '" + f.name + "' needs at least one degree");
  if (spec.allocation == Allocation::single_block) {
    if (spec.degrees.size() != 1) throw ConfigError("single_block target takes exactly one degree");
    f.name += "(" + std::to_string(spec.degrees[0]) + ")";
  }
  for (unsigned k : spec.degrees) {
    if (k >= spectrum.size()) throw ConfigError("target degree " + std::to_string(k) + " is outside the spectrum");
  }

  // Block masses m_k = θ_k^2 μ_k^{-s}, later rescaled to Σ m_k = R.
  std::vector<double> mass(spec.degrees.size(), 0.0);
  for (std::size_t i = 0; i < spec.degrees.size(); ++i) {
    const auto& blk = spectrum.block(spec.degrees[i]);
    if (blk.eigenvalue <= 0.0) continue;
    switch (spec.allocation) {
      case Allocation::single_block:
      case Allocation::uniform:
        mass[i] = 1.0;
        break;
      case Allocation::prior: {
        if (solution == nullptr) throw ConfigError("prior target allocation needs a Pinsker solution");
        const auto& w = solution->blocks.at(blk.degree);
        if (!w.retained) break;
        // block-summed v^2 ∝ N ℓ λ^{s/2}; its ball mass divides by λ^s
        const double theta_sq = blk.multiplicity * w.weight * std::pow(blk.eigenvalue, s / 2.0);
        mass[i] = theta_sq * std::pow(blk.eigenvalue, -s);
        break;
      }
      case Allocation::zero:
        break;
    }
  }
  CompensatedSum total;
  for (double m : mass) total += m;
  if (!(total.value() > 0.0)) throw ConfigError("target degrees carry no admissible mass");

  Philox4x32 rng(seed, stream_id(0xFFFFFFFFu, 0));
  for (std::size_t i = 0; i < spec.degrees.size(); ++i) {
    const auto& blk = spectrum.block(spec.degrees[i]);
    TargetBlock b;
    b.degree = blk.degree;
    b.multiplicity = blk.multiplicity;
    if (f.dimension >= 2) b.direction = random_direction(f.dimension, rng);
    if (mass[i] > 0.0) b.amplitude = std::sqrt(radius * mass[i] / total.value() * std::pow(blk.eigenvalue, s));
    f.blocks.push_back(std::move(b));
  }
  return f;
}

std::vector<TargetSpec> default_target_family(const PinskerSolution& solution, const SpectrumTable& spectrum) {
  std::vector<TargetSpec> family;
  std::vector<unsigned> retained;
  for (const auto& b : solution.blocks) {
    if (b.retained && b.eigenvalue > 0.0) retained.push_back(b.degree);
  }
  for (unsigned k : retained) family.push_back({Allocation::single_block, {k}});
  const unsigned next = solution.top_degree + 1;
  if (next < spectrum.size() && spectrum.block(next).eigenvalue > 0.0 &&
      std::find(retained.begin(), retained.end(), next) == retained.end()) {
    family.push_back({Allocation::single_block, {next}});
  }
  if (!retained.empty()) {
    family.push_back({Allocation::uniform, retained});
    family.push_back({Allocation::prior, retained});
  }
  return family;
}

bool EmpiricalStats::covers(unsigned degree) const {
  return std::find(degrees.begin(), degrees.end(), degree) != degrees.end();
}

std::size_t EmpiricalStats::index(unsigned degree) const {
  const auto it = std::find(degrees.begin(), degrees.end(), degree);
  if (it == degrees.end()) throw ConfigError("empirical statistics miss degree " + std::to_string(degree));
  return static_cast<std::size_t>(it - degrees.begin());
}

EmpiricalStats empirical_block_stats(const PointSet& points, std::span<const double> responses,
                                     const RegressionFunction& target, std::span<const unsigned> degrees,
                                     std::size_t gram_cap) {
  const std::size_t n = points.count;
  if (n == 0) throw ConfigError("empirical statistics need n >= 1");
  if (responses.size() != n) throw ConfigError("responses are not aligned with points");
  if (n > gram_cap) {
    throw ConfigError("sample too large for exact risk path (n = " + std::to_string(n) + " > gram cap " +
                      std::to_string(gram_cap) + "); lower d or gamma, or raise gram_cap");
  }
  const int d = points.dimension;
  EmpiricalStats st;
  st.degrees.assign(degrees.begin(), degrees.end());
  st.s2.assign(degrees.size(), 0.0);
  st.s1.assign(degrees.size(), 0.0);

  CompensatedSum mean;
  for (double y : responses) mean += y;
  st.mean_coeff = mean.value() / static_cast<double>(n);
  if (degrees.empty()) return st;

  const unsigned k_top = *std::max_element(degrees.begin(), degrees.end());
  std::vector<double> p(k_top + 1);
  std::vector<double> acc(degrees.size(), 0.0);
  std::vector<double> row(degrees.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = points.point(i);
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t j = 0; j < i; ++j) {
      const double t = std::clamp(dot(xi, points.point(j)), -1.0, 1.0);
      gegenbauer_all(d, t, p);
      for (std::size_t a = 0; a < degrees.size(); ++a) row[a] += responses[j] * p[degrees[a]];
    }
    for (std::size_t a = 0; a < degrees.size(); ++a) acc[a] += responses[i] * (2.0 * row[a] + responses[i]);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t a = 0; a < degrees.size(); ++a) {
    st.s2[a] = std::max(0.0, multiplicity_real(d, degrees[a]) * acc[a] * inv_n * inv_n);
    CompensatedSum s1;
    if (target.amplitude(degrees[a]) != 0.0) {
      for (std::size_t i = 0; i < n; ++i) s1 += responses[i] * target.component(degrees[a], points.point(i));
    }
    st.s1[a] = s1.value() * inv_n;
  }
  return st;
}

double mean_weight(const PinskerSolution& solution, std::int64_t p) {
  if (p > 0) return 1.0;
  return solution.blocks.empty() ? 0.0 : solution.blocks[0].weight;
}

double excess_risk(const PinskerSolution& solution, const EmpiricalStats& stats, const RegressionFunction& target,
                   std::int64_t p) {
  CompensatedSum risk;
  const double r0 = mean_weight(solution, p) * stats.mean_coeff - target.amplitude(0);
  risk += r0 * r0;
  for (const auto& b : solution.blocks) {
    if (b.degree == 0) continue;
    const double theta = target.amplitude(b.degree);
    const double ell = b.retained ? b.weight : 0.0;
    if (ell > 0.0) {
      const std::size_t a = stats.index(b.degree);
      risk += ell * ell * stats.s2[a] - 2.0 * ell * stats.s1[a] + theta * theta;
    } else {
      risk += theta * theta;
    }
  }
  for (const auto& tb : target.blocks) {
    if (tb.degree >= solution.blocks.size()) risk += tb.amplitude * tb.amplitude;
  }
  return risk.value();
}

std::size_t worker_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PINSKER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

SimReport monte_carlo(const ProblemConfig& config, const PinskerSolution& solution, const SpectrumTable& spectrum,
                      std::span<const RegressionFunction> targets, std::size_t reps, std::uint64_t seed,
                      const MonteCarloOptions& options) {
  if (reps < 2) throw ConfigError("monte carlo needs reps >= 2");
  if (targets.empty()) throw ConfigError("monte carlo needs at least one target");
  const double n_real = config.sample_size();
  if (n_real > static_cast<double>(options.gram_cap)) {
    throw ConfigError("sample too large for exact risk path (n = " + std::to_string(static_cast<long long>(n_real)) +
                      " > gram cap " + std::to_string(options.gram_cap) + "); lower d or gamma, or raise gram_cap");
  }
  const auto n = static_cast<std::size_t>(n_real);
  const double sigma = options.noise_sigma.value_or(config.noise_sigma);
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  const int d = config.dimension;
  const std::int64_t p = config.p();

  std::vector<unsigned> degrees;
  for (const auto& b : solution.blocks) {
    if (b.degree > 0 && b.retained && b.weight > 0.0) degrees.push_back(b.degree);
  }

  const std::size_t work = targets.size() * reps;
  std::vector<double> risk(work);
  std::vector<double> mean_term(work);
  parallel_for(work, worker_count(options.threads), [&](std::size_t idx) {
    const std::size_t t = idx / reps;
    const std::size_t r = idx % reps;
    Philox4x32 rng(seed, stream_id(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(r)));
    const PointSet pts = sample_sphere(n, d, rng);
    std::normal_distribution<double> noise;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = targets[t].evaluate(pts.point(i)) + sigma * noise(rng);
    const EmpiricalStats st = empirical_block_stats(pts, y, targets[t], degrees, options.gram_cap);
    risk[idx] = excess_risk(solution, st, targets[t], p);
    const double m = st.mean_coeff - targets[t].amplitude(0);
    mean_term[idx] = m * m;
  });

  SimReport rep;
  rep.reps = reps;
  rep.seed = seed;
  rep.dimension = d;
  rep.gamma = config.gamma.str();
  rep.smoothness = config.smoothness.str();
  rep.sample_size = n_real;
  rep.dstar = solution.dstar;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto rs = summarize(std::span<const double>(risk).subspan(t * reps, reps));
    const auto ms = summarize(std::span<const double>(mean_term).subspan(t * reps, reps));
    rep.targets.push_back({targets[t].name, rs.mean, rs.stderr_mean, ms.mean, ms.stderr_mean});
    if (t == 0 || rs.mean > rep.mean_risk) {
      rep.worst = t;
      rep.mean_risk = rs.mean;
      rep.stderr_risk = rs.stderr_mean;
    }
  }
  rep.ratio = rep.dstar > 0.0 ? rep.mean_risk / rep.dstar : 0.0;
  const double mu1 = spectrum.size() > 1 ? spectrum.block(1).eigenvalue : 0.0;
  rep.mean_term_bound = (sigma * sigma + std::pow(mu1, config.s()) * config.radius) / n_real;
  return rep;
}

double MomentEstimate::z_score() const {
  const double diff = std::fabs(mean - target);
  if (stderr_mean > 0.0) return diff / stderr_mean;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

DeltaDiagnostics delta_diagnostics(int d, std::size_t n, std::span<const unsigned> degrees,
                                   std::span<const double> theta, std::size_t reps, std::uint64_t seed) {
  if (n == 0) throw ConfigError("delta diagnostics need n >= 1");
  if (reps < 2) throw ConfigError("delta diagnostics need reps >= 2");
  if (degrees.empty()) throw ConfigError("delta diagnostics need at least one degree");
  std::vector<SpherePolynomial> phi;
  for (unsigned k : degrees) {
    auto basis = harmonic_basis(d, k);
    for (auto& f : basis.functions) phi.push_back(std::move(f));
  }
  const std::size_t big_n = phi.size();
  std::vector<double> th2(big_n, 1.0);
  if (!theta.empty()) {
    if (theta.size() != big_n) throw ConfigError("theta must have one entry per basis function");
    for (std::size_t j = 0; j < big_n; ++j) th2[j] = theta[j] * theta[j];
  }
  const std::size_t pairs = big_n * (big_n - 1) / 2;

  std::vector<double> agg(reps);
  std::vector<double> cross(reps * pairs);
  std::vector<double> diag(reps * big_n);
  parallel_for(reps, worker_count(0), [&](std::size_t r) {
    Philox4x32 rng(seed, stream_id(0, static_cast<std::uint32_t>(r)));
    const PointSet pts = sample_sphere(n, d, rng);
    std::vector<double> values(n * big_n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < big_n; ++j) values[i * big_n + j] = phi[j].evaluate(pts.point(i));
    }
    std::vector<double> delta(big_n * big_n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* v = values.data() + i * big_n;
      for (std::size_t a = 0; a < big_n; ++a) {
        for (std::size_t b = 0; b < big_n; ++b) delta[a * big_n + b] += v[a] * v[b];
      }
    }
    for (std::size_t a = 0; a < big_n; ++a) {
      for (std::size_t b = 0; b < big_n; ++b) {
        delta[a * big_n + b] /= static_cast<double>(n);
        if (a == b) delta[a * big_n + b] -= 1.0;
      }
    }
    double a_sum = 0.0;
    for (std::size_t j = 0; j < big_n; ++j) {
      for (std::size_t jp = 0; jp < big_n; ++jp) a_sum += th2[jp] * delta[j * big_n + jp] * delta[j * big_n + jp];
    }
    agg[r] = a_sum;
    std::size_t pi = 0;
    for (std::size_t u = 0; u < big_n; ++u) {
      for (std::size_t v = u + 1; v < big_n; ++v, ++pi) {
        double c = 0.0;
        for (std::size_t j = 0; j < big_n; ++j) c += delta[j * big_n + u] * delta[j * big_n + v];
        cross[r * pairs + pi] = c;
      }
    }
    for (std::size_t j = 0; j < big_n; ++j) diag[r * big_n + j] = delta[j * big_n + j] * delta[j * big_n + j];
  });

  DeltaDiagnostics out;
  out.n = n;
  out.reps = reps;
  out.functions = big_n;
  const double inv_n = 1.0 / static_cast<double>(n);
  double th_total = 0.0;
  for (double t : th2) th_total += t;
  out.aggregate = estimate(agg, th_total * static_cast<double>(big_n - 1) * inv_n);

  std::vector<double> column(reps);
  for (std::size_t pi = 0; pi < pairs; ++pi) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = cross[r * pairs + pi];
    out.cross.push_back(estimate(column, 0.0));
  }
  for (std::size_t j = 0; j < big_n; ++j) {
    const SpherePolynomial sq = phi[j] * phi[j];
    const double fourth = sphere_inner(sq, sq);
    for (std::size_t r = 0; r < reps; ++r) column[r] = diag[r * big_n + j];
    out.diagonal.push_back(estimate(column, fourth * inv_n - inv_n));
  }
  return out;
}

std::vector<SequenceGroup> sequence_groups(const PinskerSolution& solution, const RegressionFunction* target) {
  std::vector<SequenceGroup> groups;
  for (const auto& b : solution.blocks) {
    SequenceGroup g;
    g.multiplicity = b.multiplicity;
    g.weight = b.retained ? b.weight : 0.0;
    g.eigenvalue = b.eigenvalue;
    if (target != nullptr) g.theta = target->amplitude(b.degree) / std::sqrt(b.multiplicity);
    groups.push_back(g);
  }
  return groups;
}

SequenceModelResult sequence_model(std::span<const SequenceGroup> groups, double epsilon, double radius, double s,
                                   std::size_t reps, std::uint64_t seed) {
  SequenceModelResult res;
  const double eps2 = epsilon * epsilon;
  CompensatedSum exact;
  CompensatedSum noise;
  double worst_bias = 0.0;
  for (const auto& g : groups) {
    if (g.weight < 0.0 || g.weight > 1.0) throw ConfigError("sequence model weights must lie in [0, 1]");
    const double one_minus = 1.0 - g.weight;
    exact += g.multiplicity * (one_minus * one_minus * g.theta * g.theta + eps2 * g.weight * g.weight);
    noise += g.multiplicity * g.weight * g.weight;
    if (g.eigenvalue > 0.0) worst_bias = std::max(worst_bias, one_minus * one_minus * std::pow(g.eigenvalue, s));
  }
  res.exact_risk = exact.value();
  res.sup_risk = radius * worst_bias + eps2 * noise.value();
  if (reps == 0) return res;

  std::vector<double> draws(reps);
  parallel_for(reps, worker_count(0), [&](std::size_t r) {
    Philox4x32 rng(seed, stream_id(0, static_cast<std::uint32_t>(r)));
    std::normal_distribution<double> normal;
    CompensatedSum loss;
    for (const auto& g : groups) {
      const double bias = g.weight - 1.0;
      if (g.weight == 0.0) {
        loss += g.multiplicity * g.theta * g.theta;
        continue;
      }
      // Σ ξ over m coordinates is √m Z; Σ ξ^2 is Z^2 + χ²_{m-1}.
      const double z = normal(rng);
      double rest = 0.0;
      if (g.multiplicity > 1.0) {
        std::chi_squared_distribution<double> chi(g.multiplicity - 1.0);
        rest = chi(rng);
      }
      loss += g.multiplicity * bias * bias * g.theta * g.theta +
              2.0 * bias * g.theta * g.weight * epsilon * std::sqrt(g.multiplicity) * z +
              g.weight * g.weight * eps2 * (z * z + rest);
    }
    draws[r] = loss.value();
  });
  const Moments m = summarize(draws);
  res.mc_risk = m.mean;
  res.mc_stderr = m.stderr_mean;
  return res;
}

double bayes_risk(double prior_sd, std::span<const double> designs, double sigma) {
  if (!(prior_sd > 0.0)) throw ConfigError("prior standard deviation must be > 0");
  if (!(sigma > 0.0)) throw ConfigError("noise sigma must be > 0");
  double precision = 1.0 / (prior_sd * prior_sd);
  for (double c : designs) precision += c * c / (sigma * sigma);
  return 1.0 / precision;
}

MomentEstimate bayes_risk_mc(double prior_sd, std::span<const double> designs, std::span<const double> offsets,
                             double sigma, std::size_t reps, std::uint64_t seed) {
  if (offsets.size() != designs.size()) throw ConfigError("offsets must align with designs");
  if (reps < 2) throw ConfigError("bayes risk simulation needs reps >= 2");
  const double post_var = bayes_risk(prior_sd, designs, sigma);
  std::vector<double> err(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Philox4x32 rng(seed, stream_id(0, static_cast<std::uint32_t>(r)));
    std::normal_distribution<double> normal;
    const double a = prior_sd * normal(rng);
    double score = 0.0;
    for (std::size_t i = 0; i < designs.size(); ++i) {
      const double t = designs[i] * a + offsets[i] + sigma * normal(rng);
      score += designs[i] * (t - offsets[i]);
    }
    const double a_hat = post_var / (sigma * sigma) * score;
    err[r] = (a_hat - a) * (a_hat - a);
  }
  return estimate(err, post_var);
}

MomentEstimate sequence_bayes_mc(const PriorSpec& prior, double epsilon, std::size_t reps, std::uint64_t seed) {
  if (reps < 2) throw ConfigError("bayes risk simulation needs reps >= 2");
  const double eps2 = epsilon * epsilon;
  CompensatedSum expected;
  for (const auto& b : prior.blocks) {
    if (b.s_sq > 0.0) expected += b.multiplicity * b.s_sq * eps2 / (b.s_sq + eps2);
  }
  std::vector<double> loss(reps);
  parallel_for(reps, worker_count(0), [&](std::size_t r) {
    Philox4x32 rng(seed, stream_id(1, static_cast<std::uint32_t>(r)));
    std::normal_distribution<double> normal;
    CompensatedSum acc;
    for (const auto& b : prior.blocks) {
      if (b.s_sq <= 0.0) continue;
      const double shrink = b.s_sq / (b.s_sq + eps2);
      if (b.multiplicity <= 64.0) {
        const auto m = static_cast<int>(b.multiplicity);
        for (int c = 0; c < m; ++c) {
          const double theta = std::sqrt(b.s_sq) * normal(rng);
          const double z = theta + epsilon * normal(rng);
          const double e = shrink * z - theta;
          acc += e * e;
        }
      } else {
        // Per-coordinate errors are i.i.d. N(0, s^2 ε^2 / (s^2 + ε^2)).
        std::chi_squared_distribution<double> chi(b.multiplicity);
        acc += b.s_sq * eps2 / (b.s_sq + eps2) * chi(rng);
      }
    }
    loss[r] = acc.value();
  });
  return estimate(loss, expected.value());
}

}  // namespace kpinsker
