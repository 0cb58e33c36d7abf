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

// Monte Carlo verification of the linear filter estimator
//
//   f̂ = w_0 z̄_1 + Σ_{k>=1} ℓ_k Σ_{j in block k} z̄_j φ_j,  z̄_j = (1/n) Σ_i y_i φ_j(x_i),
//
// with its excess L2 risk evaluated by Parseval from block aggregates. The
// degree-k Gram matrix N(d,k) P_{k,d}(<x_i, x_i'>) replaces the individual
// harmonics, so any degree is reachable.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpinsker/harmonics.hpp"
#include "kpinsker/pinsker.hpp"
#include "kpinsker/random.hpp"
#include "kpinsker/spectrum.hpp"

namespace kpinsker {

struct PointSet {
  int dimension = 0;
  std::size_t count = 0;
  std::vector<double> coords;  // row-major, count x (d + 1)

  std::size_t ambient() const { return static_cast<std::size_t>(dimension) + 1; }
  std::span<const double> point(std::size_t i) const { return {coords.data() + i * ambient(), ambient()}; }
};

PointSet sample_sphere(std::size_t n, int d, Philox4x32& rng);
PointSet sample_sphere(std::size_t n, int d, std::uint64_t seed);

// Uniform unit vector in R^{d+1}.
std::vector<double> random_direction(int d, Philox4x32& rng);

struct TargetBlock {
  unsigned degree = 0;
  double amplitude = 0.0;          // θ_k^blk
  double multiplicity = 0.0;       // N(d, k)
  std::vector<double> direction;   // u_k
};

// f(x) = Σ_k θ_k √N(d,k) P_{k,d}(<x, u_k>).
struct RegressionFunction {
  std::string name;
  int dimension = 0;
  std::vector<TargetBlock> blocks;

  double evaluate(std::span<const double> x) const;
  // Degree-k part; 0 when the target has no block k.
  double component(unsigned degree, std::span<const double> x) const;
  double amplitude(unsigned degree) const;
  // Σ_k θ_k^2 μ_k^{-s}.
  double ball_norm(const SpectrumTable& spectrum, double s) const;
  double l2_norm_sq() const;
};

enum class Allocation { zero, single_block, uniform, prior };

std::string to_string(Allocation a);
Allocation parse_allocation(const std::string& name);

struct TargetSpec {
  Allocation allocation = Allocation::zero;
  std::vector<unsigned> degrees;
};

// Saturates Σ θ_k^2 μ_k^{-s} = R unless the allocation is zero. The prior
// allocation needs the solution; blocks with μ_k = 0 receive no mass.
RegressionFunction make_target(const SpectrumTable& spectrum, double s, double radius, const TargetSpec& spec,
                               std::uint64_t seed, const PinskerSolution* solution = nullptr);

// single_block(k) for every retained k >= 1 and for q + 1, uniform, prior.
std::vector<TargetSpec> default_target_family(const PinskerSolution& solution, const SpectrumTable& spectrum);

struct EmpiricalStats {
  std::vector<unsigned> degrees;
  std::vector<double> s2;  // Σ_{j in block} z̄_j^2
  std::vector<double> s1;  // Σ_{j in block} z̄_j θ_j
  double mean_coeff = 0.0;

  bool covers(unsigned degree) const;
  std::size_t index(unsigned degree) const;
};

inline constexpr std::size_t kDefaultGramCap = 5000;

EmpiricalStats empirical_block_stats(const PointSet& points, std::span<const double> responses,
                                     const RegressionFunction& target, std::span<const unsigned> degrees,
                                     std::size_t gram_cap = kDefaultGramCap);

// Degree-0 weight: ℓ_0 when p = 0, else 1.
double mean_weight(const PinskerSolution& solution, std::int64_t p);

double excess_risk(const PinskerSolution& solution, const EmpiricalStats& stats, const RegressionFunction& target,
                   std::int64_t p);

struct TargetReport {
  std::string name;
  double mean_risk = 0.0;
  double stderr_risk = 0.0;
  double mean_term = 0.0;
  double stderr_mean_term = 0.0;
};

struct SimReport {
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  int dimension = 0;
  std::string gamma;
  std::string smoothness;
  double sample_size = 0.0;
  double dstar = 0.0;
  std::vector<TargetReport> targets;
  std::size_t worst = 0;   // index of the target with the largest mean risk
  double mean_risk = 0.0;  // of the worst target
  double stderr_risk = 0.0;
  double ratio = 0.0;      // mean_risk / dstar
  double mean_term_bound = 0.0;  // σ^2/n + μ_1^s R / n
  std::string config_hash;
};

struct MonteCarloOptions {
  std::size_t threads = 0;  // 0: PINSKER_THREADS or hardware concurrency
  std::size_t gram_cap = kDefaultGramCap;
  std::optional<double> noise_sigma;  // data noise; defaults to the config's σ
};

std::size_t worker_count(std::size_t requested);

SimReport monte_carlo(const ProblemConfig& config, const PinskerSolution& solution, const SpectrumTable& spectrum,
                      std::span<const RegressionFunction> targets, std::size_t reps, std::uint64_t seed,
                      const MonteCarloOptions& options = {});

struct MomentEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  double target = 0.0;

  // |mean - target| / stderr; 0 when both vanish.
  double z_score() const;
};

struct DeltaDiagnostics {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::size_t functions = 0;            // N
  MomentEstimate aggregate;             // Σ_{j,j'} θ_{j'}^2 E Δ(j,j')^2
  std::vector<MomentEstimate> cross;    // Σ_j E[Δ(j,u) Δ(j,v)], u < v
  std::vector<MomentEstimate> diagonal; // E Δ(j,j)^2
};

// Uses the explicit bases of the listed degrees (each <= 2). θ has one entry
// per basis function, in degree-then-basis order; empty means uniform θ = 1.
DeltaDiagnostics delta_diagnostics(int d, std::size_t n, std::span<const unsigned> degrees,
                                   std::span<const double> theta, std::size_t reps, std::uint64_t seed);

// Coordinates sharing θ and ℓ, m of them.
struct SequenceGroup {
  double multiplicity = 1.0;
  double theta = 0.0;
  double weight = 0.0;
  double eigenvalue = 0.0;
};

struct SequenceModelResult {
  double exact_risk = 0.0;
  double mc_risk = 0.0;
  double mc_stderr = 0.0;
  double sup_risk = 0.0;  // R max_j (1 - ℓ_j)^2 λ_j^s + ε^2 Σ ℓ_j^2
};

// Groups for every block of the solution; θ_k from the target (0 if absent).
std::vector<SequenceGroup> sequence_groups(const PinskerSolution& solution, const RegressionFunction* target = nullptr);

SequenceModelResult sequence_model(std::span<const SequenceGroup> groups, double epsilon, double radius, double s,
                                   std::size_t reps, std::uint64_t seed);

// σ'^2 = (1/c^2 + Σ c_i^2 / σ^2)^{-1}.
double bayes_risk(double prior_sd, std::span<const double> designs, double sigma);

// Simulates t_i = c_i a + Δ_i + ε_i with a ~ N(0, c^2) and known offsets Δ_i,
// returning the mean squared error of the posterior mean.
MomentEstimate bayes_risk_mc(double prior_sd, std::span<const double> designs, std::span<const double> offsets,
                             double sigma, std::size_t reps, std::uint64_t seed);

// Bayes risk of the posterior mean in the sequence model under the prior
// θ_j ~ N(0, s_j^2), estimated by simulation.
MomentEstimate sequence_bayes_mc(const PriorSpec& prior, double epsilon, std::size_t reps, std::uint64_t seed);

}  // namespace kpinsker
