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

// Reference computations that share no code path with the library: Boost's
// Gegenbauer polynomials and adaptive Gauss-Kronrod quadrature for the
// Funk-Hecke integrals, and exhaustive 50-digit scans for the water-level
// solver.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/math/special_functions/gegenbauer.hpp>

namespace oracle {

// P_{k,d}(t) = C_k^{(d-1)/2}(t) / C_k^{(d-1)/2}(1).
inline double gegenbauer(unsigned k, int d, double t) {
  const double lambda = (d - 1) / 2.0;
  return boost::math::gegenbauer(k, lambda, t) / boost::math::gegenbauer(k, lambda, 1.0);
}

// ∫ f(t) w_d(t) dt with w_d ∝ (1 - t^2)^{(d-2)/2} normalized, computed over
// θ with t = cos θ so the weight becomes sin^{d-1} θ.
inline double weighted_integral(int d, const std::function<double(double)>& f) {
  using boost::math::quadrature::gauss_kronrod;
  auto weight = [d](double th) { return std::pow(std::sin(th), d - 1); };
  const double tol = 1e-14;
  const double mass = gauss_kronrod<double, 61>::integrate(weight, 0.0, std::numbers::pi, 15, tol);
  const double value = gauss_kronrod<double, 61>::integrate(
      [&](double th) { return f(std::cos(th)) * weight(th); }, 0.0, std::numbers::pi, 15, tol);
  return value / mass;
}

// μ_k = ∫ Φ(t) P_{k,d}(t) w_d(t) dt with Φ given by its coefficients.
inline double funk_hecke_quadrature(const std::vector<double>& coefficients, int d, unsigned k) {
  auto phi = [&](double t) {
    double acc = 0.0;
    for (std::size_t j = coefficients.size(); j-- > 0;) acc = acc * t + coefficients[j];
    return acc;
  };
  return weighted_integral(d, [&](double t) { return phi(t) * gegenbauer(k, d, t); });
}

// N(d, k) as the dimension of degree-k harmonics: dim P_k - dim P_{k-2} over
// homogeneous polynomials in d+1 variables.
inline std::uint64_t harmonic_dimension(int d, unsigned k) {
  auto binom = [](std::uint64_t n, std::uint64_t r) {
    long double acc = 1.0L;
    for (std::uint64_t i = 1; i <= r; ++i) acc = acc * static_cast<long double>(n - r + i) / static_cast<long double>(i);
    return static_cast<std::uint64_t>(std::llround(acc));
  };
  const std::uint64_t m = static_cast<std::uint64_t>(d) + 1;
  const std::uint64_t top = binom(k + m - 1, k);
  const std::uint64_t low = k >= 2 ? binom(k - 2 + m - 1, k - 2) : 0;
  return top - low;
}

struct Block {
  double eigenvalue;
  double multiplicity;
};

struct Fit {
  double kappa = 0.0;
  double cutoff = 0.0;  // N
  std::size_t blocks = 0;
};

using Wide = boost::multiprecision::cpp_bin_float_50;

// Every block boundary b in sorted order: κ_b = σ²Σ N λ^{-s/2} / (nR + σ²Σ N λ^{-s}),
// kept when λ_b^{s/2} > κ_b >= λ_{b+1}^{s/2}. Returns all consistent cutoffs.
// Runs in 50 significant digits so the closed form stays exact enough even
// when nR is negligible against σ²Σ N λ^{-s}.
inline std::vector<Fit> scan_cutoffs(std::vector<Block> blocks, double s, double n, double radius, double sigma) {
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& a, const Block& b) { return a.eigenvalue > b.eigenvalue; });
  std::vector<Fit> fits;
  Wide a = 0;
  Wide b = 0;
  double count = 0.0;
  const Wide half = Wide(s) / 2;
  const Wide sig2 = Wide(sigma) * Wide(sigma);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].eigenvalue <= 0.0) break;
    const Wide lam = blocks[i].eigenvalue;
    a += Wide(blocks[i].multiplicity) * pow(lam, -half);
    b += Wide(blocks[i].multiplicity) * pow(lam, -Wide(s));
    count += blocks[i].multiplicity;
    const Wide kappa = sig2 * a / (Wide(n) * Wide(radius) + sig2 * b);
    const Wide here = pow(lam, half);
    const Wide next = i + 1 < blocks.size() && blocks[i + 1].eigenvalue > 0.0
                          ? Wide(pow(Wide(blocks[i + 1].eigenvalue), half))
                          : Wide(0);
    if (here > kappa && kappa >= next) fits.push_back({static_cast<double>(kappa), count, i + 1});
  }
  return fits;
}

// N from its definition: the largest j with
// (σ²/n) Σ_{m<=j} λ_m^{-s/2} (λ_j^{-s/2} - λ_m^{-s/2}) < R, evaluated per block.
inline double cutoff_by_definition(std::vector<Block> blocks, double s, double n, double radius, double sigma) {
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& a, const Block& b) { return a.eigenvalue > b.eigenvalue; });
  double best = 0.0;
  double count = 0.0;
  const Wide half = Wide(s) / 2;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (blocks[j].eigenvalue <= 0.0) break;
    const Wide lj = pow(Wide(blocks[j].eigenvalue), -half);
    Wide sum = 0;
    for (std::size_t m = 0; m <= j; ++m) {
      const Wide lm = pow(Wide(blocks[m].eigenvalue), -half);
      sum += Wide(blocks[m].multiplicity) * lm * (lj - lm);
    }
    count += blocks[j].multiplicity;
    if (Wide(sigma) * Wide(sigma) / Wide(n) * sum < Wide(radius)) best = count;
  }
  return best;
}

struct RandomProblem {
  std::vector<Block> blocks;
  double s = 1.0;
  double n = 1.0;
  double radius = 1.0;
  double sigma = 1.0;
};

// Random spectra with ties, wide eigenvalue ranges and large multiplicities.
inline RandomProblem random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nblocks(1, 9);
  std::uniform_real_distribution<double> log_eig(-8.0, 0.0);
  std::uniform_int_distribution<int> mult(1, 2000);
  std::uniform_int_distribution<int> coin(0, 5);
  const double s_choices[] = {0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
  RandomProblem p;
  const int b = nblocks(rng);
  for (int i = 0; i < b; ++i) {
    double e = std::pow(10.0, log_eig(rng));
    if (i > 0 && coin(rng) == 0) e = p.blocks[i - 1].eigenvalue;
    p.blocks.push_back({e, static_cast<double>(mult(rng))});
  }
  p.s = s_choices[std::uniform_int_distribution<int>(0, 5)(rng)];
  p.n = std::round(std::pow(10.0, std::uniform_real_distribution<double>(0.0, 7.0)(rng)));
  p.radius = std::pow(10.0, std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
  p.sigma = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
  return p;
}

// ζ = min{γ - p, (p+1)s} with p = ⌊γ/(s+1)⌋, in floating point.
inline double rate_by_min(double gamma, double s) {
  const double p = std::floor(gamma / (s + 1.0) + 1e-12);
  return std::min(gamma - p, (p + 1.0) * s);
}

}  // namespace oracle
