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

#include "kpinsker/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "kpinsker/error.hpp"
#include "kpinsker/numeric.hpp"

namespace kpinsker {

namespace {

void require_dimension(int d) {
  if (d < 2) throw ConfigError("sphere dimension d must be >= 2, got " + std::to_string(d));
}

// C(n, r) with overflow detection. The running value increases with i for
// r <= n/2, so the first step past 2^64 proves the result does not fit.
bool binomial(std::uint64_t n, std::uint64_t r, std::uint64_t& out) {
  if (r > n) {
    out = 0;
    return true;
  }
  r = std::min(r, n - r);
  __extension__ unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return false;
  }
  out = static_cast<std::uint64_t>(acc);
  return true;
}

std::string format_integer_or_real(std::uint64_t exact, double approx) {
  if (exact != 0) return std::to_string(exact);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", approx);
  return buf;
}

}  // namespace

double KernelSpec::evaluate(double t) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double KernelSpec::value_at_one() const {
  CompensatedSum sum;
  for (double a : coefficients) sum += a;
  return sum.value();
}

unsigned KernelSpec::polynomial_degree() const {
  for (std::size_t j = coefficients.size(); j-- > 0;) {
    if (coefficients[j] != 0.0) return static_cast<unsigned>(j);
  }
  return 0;
}

KernelSpec KernelSpec::from_coefficients(std::string label, std::vector<double> coefficients) {
  if (coefficients.empty()) throw ConfigError("kernel needs at least one coefficient");
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    if (!std::isfinite(coefficients[j]) || coefficients[j] < 0.0) {
      throw ConfigError("kernel coefficient a_" + std::to_string(j) + " must be finite and >= 0");
    }
  }
  KernelSpec k;
  k.label = std::move(label);
  k.coefficients = std::move(coefficients);
  return k;
}

KernelSpec KernelSpec::rbf(unsigned truncation_degree) {
  std::vector<double> a(truncation_degree + 1);
  double log_e_factorial = 1.0;  // log(e * j!)
  CompensatedSum kept;
  for (unsigned j = 0; j <= truncation_degree; ++j) {
    if (j > 0) log_e_factorial += std::log(static_cast<double>(j));
    a[j] = std::exp(-log_e_factorial);
    kept += a[j];
  }
  KernelSpec k = from_coefficients("rbf", std::move(a));
  k.truncation_tail = std::max(0.0, 1.0 - kept.value());
  return k;
}

KernelSpec KernelSpec::polynomial(unsigned m) {
  std::vector<double> a(m + 1);
  for (unsigned j = 0; j <= m; ++j) {
    std::uint64_t c = 0;
    if (!binomial(m, j, c)) throw NumericError("polynomial kernel degree too large");
    a[j] = static_cast<double>(c);
  }
  return from_coefficients("poly:" + std::to_string(m), std::move(a));
}

KernelSpec KernelSpec::linear() { return from_coefficients("linear", {0.0, 1.0}); }

KernelSpec KernelSpec::constant() { return from_coefficients("constant", {1.0}); }

KernelSpec KernelSpec::preset(const std::string& name, unsigned truncation_degree) {
  if (name == "rbf") return rbf(truncation_degree);
  if (name == "linear") return linear();
  if (name == "constant") return constant();
  if (name.rfind("poly:", 0) == 0) {
    const std::string digits = name.substr(5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        digits.size() > 3) {
      throw ConfigError("bad polynomial preset '" + name + "'");
    }
    return polynomial(static_cast<unsigned>(std::stoul(digits)));
  }
  throw ConfigError("unknown kernel preset '" + name + "'");
}

double gegenbauer(unsigned k, int d, double t) {
  require_dimension(d);
  if (!(std::fabs(t) <= 1.0 + 1e-12)) throw ConfigError("gegenbauer argument outside [-1, 1]");
  t = std::clamp(t, -1.0, 1.0);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (unsigned i = 1; i < k; ++i) {
    double next = ((2.0 * i + d - 1) * t * cur - i * prev) / (i + d - 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void gegenbauer_all(int d, double t, std::span<double> out) {
  require_dimension(d);
  if (out.empty()) return;
  if (!(std::fabs(t) <= 1.0 + 1e-12)) throw ConfigError("gegenbauer argument outside [-1, 1]");
  t = std::clamp(t, -1.0, 1.0);
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = t;
  for (std::size_t i = 1; i + 1 < out.size(); ++i) {
    out[i + 1] = ((2.0 * i + d - 1) * t * out[i] - i * out[i - 1]) / (i + d - 1.0);
  }
}

// N(d, k) = C(k+d-1, k) + C(k+d-2, k-1), equal to the factorial form
// (2k+d-1)/k · (k+d-2)!/((d-1)!(k-1)!).
std::uint64_t multiplicity(int d, unsigned k) {
  require_dimension(d);
  if (k == 0) return 1;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  const auto n = static_cast<std::uint64_t>(d) + k;
  if (!binomial(n - 1, k, a) || !binomial(n - 2, k - 1, b) || a > std::numeric_limits<std::uint64_t>::max() - b) {
    throw NumericError("multiplicity N(" + std::to_string(d) + ", " + std::to_string(k) + ") exceeds 64 bits");
  }
  return a + b;
}

double log_multiplicity(int d, unsigned k) {
  require_dimension(d);
  if (k == 0) return 0.0;
  const double kk = k;
  return std::log(2.0 * kk + d - 1) - std::log(kk) + log_gamma(kk + d - 1) - log_gamma(static_cast<double>(d)) -
         log_gamma(kk);
}

double multiplicity_real(int d, unsigned k) {
  try {
    return static_cast<double>(multiplicity(d, k));
  } catch (const NumericError&) {
    return std::exp(log_multiplicity(d, k));
  }
}

double funk_hecke_log_integral(unsigned j, unsigned k, int d) {
  require_dimension(d);
  if (j < k || (j - k) % 2 != 0) return -std::numeric_limits<double>::infinity();
  const double jd = j;
  const double kd = k;
  const double dd = d;
  return -kd * std::numbers::ln2 + log_gamma(jd + 1) - log_gamma(jd - kd + 1) + log_gamma((dd + 1) / 2) +
         log_gamma((jd - kd + 1) / 2) - 0.5 * std::log(std::numbers::pi) - log_gamma((jd + kd + dd + 1) / 2);
}

double funk_hecke_integral(unsigned j, unsigned k, int d) { return std::exp(funk_hecke_log_integral(j, k, d)); }

double eigenvalue(const KernelSpec& kernel, int d, unsigned k) {
  require_dimension(d);
  if (k > kernel.truncation_degree()) {
    throw ConfigError("degree " + std::to_string(k) + " exceeds kernel truncation degree " +
                      std::to_string(kernel.truncation_degree()));
  }
  CompensatedSum mu;
  for (unsigned j = k; j < kernel.coefficients.size(); j += 2) {
    const double a = kernel.coefficients[j];
    if (a == 0.0) continue;
    const double log_i = funk_hecke_log_integral(j, k, d);
    if (std::isnan(log_i) || log_i == std::numeric_limits<double>::infinity()) {
      throw NumericError("non-finite Funk-Hecke integral at (j=" + std::to_string(j) + ", k=" + std::to_string(k) +
                         ", d=" + std::to_string(d) + ")");
    }
    const double term = a * std::exp(log_i);
    if (!std::isfinite(term)) {
      throw NumericError("non-finite eigenvalue term at (j=" + std::to_string(j) + ", k=" + std::to_string(k) +
                         ", d=" + std::to_string(d) + ")");
    }
    mu += term;
  }
  return mu.value();
}

SpectrumTable SpectrumTable::synthetic(const std::vector<std::pair<double, std::uint64_t>>& blocks) {
  if (blocks.empty()) throw ConfigError("synthetic spectrum needs at least one block");
  SpectrumTable table;
  std::uint64_t cumulative = 0;
  double cumulative_real = 0.0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto [value, count] = blocks[i];
    if (!std::isfinite(value) || value < 0.0) throw ConfigError("synthetic eigenvalues must be finite and >= 0");
    if (count == 0) throw ConfigError("synthetic multiplicities must be positive");
    if (cumulative > std::numeric_limits<std::uint64_t>::max() - count) {
      throw NumericError("synthetic cumulative multiplicity exceeds 64 bits");
    }
    cumulative += count;
    cumulative_real += static_cast<double>(count);
    SpectrumBlock b;
    b.degree = static_cast<unsigned>(i);
    b.eigenvalue = value;
    b.multiplicity = static_cast<double>(count);
    b.cumulative = cumulative_real;
    b.exact_multiplicity = count;
    b.exact_cumulative = cumulative;
    table.blocks_.push_back(b);
  }
  table.exhaustive_ = true;
  table.sort_blocks();
  return table;
}

bool SpectrumTable::strictly_decreasing_through(unsigned k) const {
  const std::size_t last = std::min<std::size_t>(k, blocks_.empty() ? 0 : blocks_.size() - 1);
  for (std::size_t i = 0; i < last; ++i) {
    if (!(blocks_[i].eigenvalue > blocks_[i + 1].eigenvalue)) return false;
  }
  return true;
}

double SpectrumTable::trace() const {
  CompensatedSum sum;
  for (const auto& b : blocks_) sum += b.eigenvalue * b.multiplicity;
  return sum.value();
}

void SpectrumTable::override_eigenvalue(unsigned degree, double value) {
  blocks_.at(degree).eigenvalue = value;
  sort_blocks();
}

void SpectrumTable::sort_blocks() {
  order_.resize(blocks_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return blocks_[a].eigenvalue > blocks_[b].eigenvalue; });
}

void SpectrumTable::write_csv(std::ostream& out) const {
  out << "degree,eigenvalue,multiplicity,cumulative\n";
  char buf[64];
  for (const auto& b : blocks_) {
    std::snprintf(buf, sizeof buf, "%.17g", b.eigenvalue);
    out << b.degree << ',' << buf << ',' << format_integer_or_real(b.exact_multiplicity, b.multiplicity) << ','
        << format_integer_or_real(b.exact_cumulative, b.cumulative) << '\n';
  }
}

SpectrumTable build_spectrum(const KernelSpec& kernel, int d, unsigned k_max) {
  require_dimension(d);
  if (k_max > kernel.truncation_degree()) {
    throw ConfigError("k_max " + std::to_string(k_max) + " exceeds kernel truncation degree " +
                      std::to_string(kernel.truncation_degree()));
  }
  SpectrumTable table;
  table.dimension_ = d;
  table.blocks_.reserve(k_max + 1);
  std::uint64_t cumulative = 0;
  bool cumulative_exact = true;
  CompensatedSum cumulative_real;
  for (unsigned k = 0; k <= k_max; ++k) {
    SpectrumBlock b;
    b.degree = k;
    double mu = eigenvalue(kernel, d, k);
    if (mu < 0.0) {
      table.clamped_.push_back(k);
      mu = 0.0;
    }
    b.eigenvalue = mu;
    try {
      b.exact_multiplicity = multiplicity(d, k);
      b.multiplicity = static_cast<double>(b.exact_multiplicity);
    } catch (const NumericError&) {
      b.exact_multiplicity = 0;
      b.multiplicity = std::exp(log_multiplicity(d, k));
    }
    if (cumulative_exact && b.exact_multiplicity != 0 &&
        cumulative <= std::numeric_limits<std::uint64_t>::max() - b.exact_multiplicity) {
      cumulative += b.exact_multiplicity;
      b.exact_cumulative = cumulative;
    } else {
      cumulative_exact = false;
    }
    cumulative_real += b.multiplicity;
    b.cumulative = b.exact_cumulative != 0 ? static_cast<double>(b.exact_cumulative) : cumulative_real.value();
    table.blocks_.push_back(b);
  }
  table.exhaustive_ = kernel.truncation_tail == 0.0 && kernel.polynomial_degree() <= k_max;
  table.sort_blocks();
  return table;
}

}  // namespace kpinsker
