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

#include "kpinsker/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "kpinsker/error.hpp"
#include "kpinsker/numeric.hpp"
#include "kpinsker/spectrum.hpp"

namespace kpinsker {

double sphere_moment(int d, const MomentIndex& index) {
  if (d < 2) throw ConfigError("sphere dimension d must be >= 2");
  if (index.exponents.size() > static_cast<std::size_t>(d) + 1) {
    throw ConfigError("moment index longer than the ambient dimension");
  }
  double half_total = 0.0;
  double log_value = log_gamma((d + 1) / 2.0);
  const double log_gamma_half = 0.5 * std::log(std::numbers::pi);
  for (unsigned e : index.exponents) {
    if (e % 2 != 0) return 0.0;
    if (e == 0) continue;
    const double a = e / 2;
    log_value += log_gamma(a + 0.5) - log_gamma_half;
    half_total += a;
  }
  if (half_total == 0.0) return 1.0;
  log_value -= log_gamma((d + 1) / 2.0 + half_total);
  return std::exp(log_value);
}

void SpherePolynomial::add_term(double coefficient, std::vector<unsigned> exponents) {
  exponents.resize(static_cast<std::size_t>(dimension_) + 1, 0);
  for (auto& t : terms_) {
    if (t.exponents == exponents) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms_.push_back({coefficient, std::move(exponents)});
}

double SpherePolynomial::evaluate(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& t : terms_) {
    double v = t.coefficient;
    for (std::size_t i = 0; i < t.exponents.size(); ++i) {
      for (unsigned e = 0; e < t.exponents[i]; ++e) v *= x[i];
    }
    acc += v;
  }
  return acc;
}

SpherePolynomial SpherePolynomial::operator*(const SpherePolynomial& other) const {
  std::map<std::vector<unsigned>, double> merged;
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      std::vector<unsigned> e(a.exponents.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.exponents[i] + b.exponents[i];
      merged[e] += a.coefficient * b.coefficient;
    }
  }
  SpherePolynomial out(dimension_);
  for (auto& [e, c] : merged) out.terms_.push_back({c, e});
  return out;
}

SpherePolynomial& SpherePolynomial::operator+=(const SpherePolynomial& other) {
  for (const auto& t : other.terms_) add_term(t.coefficient, t.exponents);
  return *this;
}

SpherePolynomial SpherePolynomial::scaled(double factor) const {
  SpherePolynomial out = *this;
  for (auto& t : out.terms_) t.coefficient *= factor;
  return out;
}

double SpherePolynomial::expectation() const {
  CompensatedSum sum;
  for (const auto& t : terms_) sum += t.coefficient * sphere_moment(dimension_, MomentIndex{t.exponents});
  return sum.value();
}

double sphere_inner(const SpherePolynomial& p, const SpherePolynomial& q) { return (p * q).expectation(); }

void HarmonicBasis::evaluate(std::span<const double> x, std::span<double> out) const {
  for (std::size_t j = 0; j < functions.size(); ++j) out[j] = functions[j].evaluate(x);
}

HarmonicBasis harmonic_basis(int d, unsigned k) {
  if (d < 2) throw ConfigError("sphere dimension d must be >= 2");
  if (k > 2) throw ConfigError("explicit harmonic bases stop at degree 2");
  const std::size_t m = static_cast<std::size_t>(d) + 1;
  HarmonicBasis basis;
  basis.dimension = d;
  basis.degree = k;

  if (k == 0) {
    SpherePolynomial one(d);
    one.add_term(1.0, {});
    basis.functions.push_back(std::move(one));
    return basis;
  }

  if (k == 1) {
    const double scale = std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
      SpherePolynomial p(d);
      std::vector<unsigned> e(m, 0);
      e[i] = 1;
      p.add_term(scale, std::move(e));
      basis.functions.push_back(std::move(p));
    }
    return basis;
  }

  const double cross_scale = std::sqrt(static_cast<double>(m) * (m + 2));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      SpherePolynomial p(d);
      std::vector<unsigned> e(m, 0);
      e[i] = 1;
      e[j] = 1;
      p.add_term(cross_scale, std::move(e));
      basis.functions.push_back(std::move(p));
    }
  }

  // x_i^2 - 1/(d+1) sum to zero on the sphere, so one candidate drops out.
  std::vector<SpherePolynomial> accepted;
  for (std::size_t i = 0; i < m; ++i) {
    SpherePolynomial g(d);
    std::vector<unsigned> e(m, 0);
    e[i] = 2;
    g.add_term(1.0, std::move(e));
    g.add_term(-1.0 / static_cast<double>(m), {});
    const double initial = sphere_inner(g, g);
    for (const auto& q : accepted) g += q.scaled(-sphere_inner(g, q));
    const double norm_sq = sphere_inner(g, g);
    if (norm_sq <= 1e-10 * initial) continue;
    accepted.push_back(g.scaled(1.0 / std::sqrt(norm_sq)));
  }
  for (auto& q : accepted) basis.functions.push_back(std::move(q));

  if (basis.functions.size() != multiplicity(d, 2)) {
    throw NumericError("degree-2 basis has " + std::to_string(basis.functions.size()) + " elements, expected N(d, 2)");
  }
  return basis;
}

std::vector<double> gram_matrix(const HarmonicBasis& basis) {
  const std::size_t n = basis.size();
  std::vector<double> g(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double v = sphere_inner(basis.functions[a], basis.functions[b]);
      g[a * n + b] = v;
      g[b * n + a] = v;
    }
  }
  return g;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void require_unit(std::span<const double> x, std::size_t m) {
  if (x.size() != m) throw ConfigError("point has wrong ambient dimension");
  if (std::fabs(std::sqrt(dot(x, x)) - 1.0) > 1e-9) throw ConfigError("point is not on the unit sphere");
}

}  // namespace

double addition_check(const HarmonicBasis& basis, std::span<const double> x, std::span<const double> x_prime) {
  const std::size_t m = static_cast<std::size_t>(basis.dimension) + 1;
  require_unit(x, m);
  require_unit(x_prime, m);
  std::vector<double> a(basis.size());
  std::vector<double> b(basis.size());
  basis.evaluate(x, a);
  basis.evaluate(x_prime, b);
  const double lhs = dot(a, b);
  const double t = std::clamp(dot(x, x_prime), -1.0, 1.0);
  const double rhs = static_cast<double>(multiplicity(basis.dimension, basis.degree)) *
                     gegenbauer(basis.degree, basis.dimension, t);
  return std::fabs(lhs - rhs);
}

double addition_check(int d, unsigned k, std::span<const double> x, std::span<const double> x_prime) {
  return addition_check(harmonic_basis(d, k), x, x_prime);
}

}  // namespace kpinsker
