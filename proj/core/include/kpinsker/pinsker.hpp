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

// Pinsker water-level solution for the ellipsoid {Σ θ_j^2 λ_j^{-s} <= R}
// observed at noise level σ^2/n, and its large-d equivalent C* d^{-ζ}.
//
// With λ_j the kernel eigenvalues in non-increasing order, κ* solves
//
//   (σ^2 / (n κ)) Σ_j λ_j^{-s/2} (1 - κ λ_j^{-s/2})_+ = R,
//
// the filter is ℓ_j = (1 - κ* λ_j^{-s/2})_+, N = max{j : λ_j^{s/2} > κ*},
// and D* = (σ^2/n) Σ_{j <= N} ℓ_j. Every sum runs over eigenvalue blocks
// weighted by multiplicity, never over individual coordinates.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpinsker/rational.hpp"
#include "kpinsker/spectrum.hpp"

namespace kpinsker {

struct ProblemConfig {
  int dimension = 0;           // d
  Rational gamma{1};           // n ≈ α d^γ
  double alpha = 1.0;
  Rational smoothness{1};      // s
  double radius = 1.0;         // R
  double noise_sigma = 1.0;    // σ
  std::optional<std::uint64_t> sample_size_override;

  // Validates ranges and derives n = round(α d^γ) unless overridden.
  static ProblemConfig make(int d, Rational gamma, double alpha, Rational s, double radius, double sigma,
                            std::optional<std::uint64_t> n = std::nullopt);

  // round(α d^γ) or the override. Held in floating point: at large d and γ
  // the sample size exceeds 64-bit range.
  double sample_size() const;
  double noise_level() const;  // σ^2 / n
  double s() const { return smoothness.to_double(); }
  // p = ⌊γ/(s+1)⌋.
  std::int64_t p() const;
  // γ = p(s+1) + s/2, where the top retained degree is not determined by the rate.
  bool boundary_ambiguous() const;
  // Spectrum depth that keeps the fixed point off the last blocks.
  unsigned default_k_max() const;
};

struct BlockWeight {
  unsigned degree = 0;
  double eigenvalue = 0.0;
  double multiplicity = 0.0;
  std::uint64_t exact_multiplicity = 0;
  double weight = 0.0;  // ℓ for every coordinate of the block
  bool retained = false;
};

struct PinskerSolution {
  double kappa_star = 0.0;
  double cutoff = 0.0;                // N
  std::uint64_t exact_cutoff = 0;     // N when representable, else 0
  unsigned top_degree = 0;            // q: highest retained degree
  bool block_aligned = false;         // retained degrees are exactly 0..q
  std::size_t retained_blocks = 0;    // leading entries of the sorted order
  std::vector<BlockWeight> blocks;    // indexed by degree
  double dstar = 0.0;
  double identity_residual = 0.0;     // |R κ*^2 + (σ^2/n) Σ ℓ^2 - D*| / D*
  bool boundary_ambiguous = false;
  double smoothness = 1.0;
  double radius = 1.0;
  double noise_level = 0.0;
  double sample_size = 0.0;
};

// Scans block boundaries in sorted order for the unique consistent cutoff;
// also fills the filter weights and D*. Throws NumericError "degenerate
// spectrum" when no eigenvalue is positive and "spectrum too shallow" when a
// truncated table cannot certify λ_{N+1}^{s/2} <= κ*.
PinskerSolution solve_kappa(const SpectrumTable& spectrum, const ProblemConfig& config);

// ℓ_k = max(0, 1 - κ* μ_k^{-s/2}) for retained blocks, 0 elsewhere; by degree.
std::vector<double> filter_weights(const PinskerSolution& solution, const SpectrumTable& spectrum, double s);

// (σ^2/n) Σ_k N(d,k) ℓ_k.
double dstar(const PinskerSolution& solution, const ProblemConfig& config);

// R κ*^2 + (σ^2/n) Σ_k N(d,k) ℓ_k^2, equal to D* in exact arithmetic.
double dstar_identity_side(const PinskerSolution& solution, const ProblemConfig& config);

enum class Regime { case_i_interior, case_i_boundary, case_ii_interior, case_ii_boundary };

std::string to_string(Regime r);

struct AsymptoticBound {
  std::int64_t p = 0;
  Rational zeta;
  double cstar = 0.0;
  Regime regime = Regime::case_i_interior;
};

// Rate ζ and constant C* of the large-d equivalent, with the regime chosen
// by exact comparison of γ against p(s+1), p(s+1)+s and (p+1)(s+1).
AsymptoticBound asymptotic(const Rational& gamma, const Rational& s, double alpha, double radius, double sigma,
                           const KernelSpec& kernel);

// Rate only; does not depend on the kernel or the constants.
Rational rate_exponent(const Rational& gamma, const Rational& s);

struct RatePoint {
  Rational gamma;
  Rational zeta;
};

// Maximal run of consecutive grid points sharing one ζ (at least two points).
struct Plateau {
  Rational gamma_begin;
  Rational gamma_end;
  Rational zeta;
};

struct RateCurve {
  Rational s;
  std::vector<RatePoint> points;
  std::vector<Plateau> plateaus;
};

RateCurve rate_curve(const Rational& s, std::span<const Rational> gamma_grid);

struct ConstantPoint {
  Rational gamma;
  double cstar = 0.0;
  Regime regime = Regime::case_i_interior;
  bool jump = false;  // γ sits on a discontinuity of C*
};

std::vector<ConstantPoint> constant_curve(const Rational& s, std::span<const Rational> gamma_grid, double alpha,
                                          double radius, double sigma, const KernelSpec& kernel);

// Uniform grid begin, begin+step, ... <= end (all exact).
std::vector<Rational> rational_grid(const Rational& begin, const Rational& end, const Rational& step);

// max over retained blocks of ℓ_k / (n μ_k^{s/2} κ*); 0 when nothing is retained.
double max_ell_ratio(const PinskerSolution& solution);

struct PriorBlock {
  unsigned degree = 0;
  double eigenvalue = 0.0;
  double multiplicity = 0.0;
  double v_sq = 0.0;  // σ^2 ℓ / (n κ* λ^{-s/2})
  double s_sq = 0.0;  // (1 - δ) v^2
};

struct PriorSpec {
  double delta = 0.0;
  double smoothness = 1.0;
  std::vector<PriorBlock> blocks;

  // Σ_j s_j^2 λ_j^{-s}, equal to (1 - δ) R.
  double mass() const;
  // max_j s_j^2 λ_j^{-s}.
  double max_coordinate_mass() const;
};

struct LowerBoundDiagnostics {
  PriorSpec prior;
  double bayes_value = 0.0;     // (1-δ)(σ^2/n) Σ ℓ_j / (ℓ_j + κ* λ_j^{-s/2})
  double tail_probability = 0.0;  // bound on the prior mass outside the ellipsoid
  double residual_bound = 0.0;  // 6 λ_1^s R sqrt(tail_probability)
};

// Throws ConfigError for δ outside (0, 1).
LowerBoundDiagnostics lower_bound_diagnostics(const PinskerSolution& solution, double delta);

}  // namespace kpinsker
