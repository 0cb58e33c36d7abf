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

// Explicit orthonormal spherical harmonics of degree 0, 1 and 2 on S^d,
// certified with exact moments of the uniform measure.

#pragma once

#include <span>
#include <vector>

namespace kpinsker {

struct MomentIndex {
  std::vector<unsigned> exponents;  // one per coordinate of R^{d+1}, trailing zeros optional
};

// E[Π_i x_i^{e_i}] for x uniform on S^d. Zero if any exponent is odd; else
// Γ((d+1)/2) Π_i Γ(a_i + 1/2) / (Γ(1/2)^m Γ((d+1)/2 + Σ a_i)) with e_i = 2 a_i
// over the m nonzero exponents.
double sphere_moment(int d, const MomentIndex& index);

// Polynomial on R^{d+1} as a sparse list of monomials.
class SpherePolynomial {
 public:
  struct Term {
    double coefficient = 0.0;
    std::vector<unsigned> exponents;  // length d + 1
  };

  SpherePolynomial() = default;
  explicit SpherePolynomial(int d) : dimension_(d) {}

  int dimension() const { return dimension_; }
  std::span<const Term> terms() const { return terms_; }

  void add_term(double coefficient, std::vector<unsigned> exponents);
  double evaluate(std::span<const double> x) const;

  SpherePolynomial operator*(const SpherePolynomial& other) const;
  SpherePolynomial& operator+=(const SpherePolynomial& other);
  SpherePolynomial scaled(double factor) const;

  // E[p] under the uniform measure on S^d.
  double expectation() const;

 private:
  int dimension_ = 0;
  std::vector<Term> terms_;
};

// E[p q] on S^d, exact.
double sphere_inner(const SpherePolynomial& p, const SpherePolynomial& q);

struct HarmonicBasis {
  int dimension = 0;
  unsigned degree = 0;
  std::vector<SpherePolynomial> functions;

  std::size_t size() const { return functions.size(); }
  // out[j] = Y_{k,j}(x).
  void evaluate(std::span<const double> x, std::span<double> out) const;
};

// Degree 0: {1}. Degree 1: {√(d+1) x_i}. Degree 2: {√((d+1)(d+3)) x_i x_j, i < j}
// plus Gram-Schmidt over x_i^2 - 1/(d+1) in lexicographic order.
// Throws ConfigError for k > 2 or d < 2.
HarmonicBasis harmonic_basis(int d, unsigned k);

// Gram matrix E[Y_a Y_b] of a basis, row-major.
std::vector<double> gram_matrix(const HarmonicBasis& basis);

// |Σ_j Y_{k,j}(x) Y_{k,j}(x') - N(d,k) P_{k,d}(<x, x'>)|. Inputs must be unit
// vectors to 1e-9 (ConfigError otherwise).
double addition_check(const HarmonicBasis& basis, std::span<const double> x, std::span<const double> x_prime);
double addition_check(int d, unsigned k, std::span<const double> x, std::span<const double> x_prime);

}  // namespace kpinsker
