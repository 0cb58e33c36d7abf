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

// Block spectrum of an inner-product kernel K(x, x') = Φ(<x, x'>) on the
// unit sphere S^d in R^{d+1}.
//
// The integral operator of K under the uniform measure diagonalises on the
// spherical harmonics: degree k carries eigenvalue μ_k with multiplicity
// N(d, k). With the normalised weight w_d(t) ∝ (1 - t^2)^{(d-2)/2} on
// [-1, 1] and the zonal polynomial P_{k,d} (P_{k,d}(1) = 1),
//
//   μ_k = ∫ Φ(t) P_{k,d}(t) w_d(t) dt = Σ_j a_j I(j, k, d),
//
// where I(j, k, d) = ∫ t^j P_{k,d}(t) w_d(t) dt reduces, after k
// integrations by parts of the Rodrigues form, to a Beta integral:
//
//   I(j, k, d) = 2^{-k} j!/(j-k)! Γ((d+1)/2) Γ((j-k+1)/2)
//                / (√π Γ((j+k+d+1)/2))        for j >= k, j - k even,
//
// and 0 otherwise.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kpinsker {

// Φ(t) = Σ_{j <= J} a_j t^j with a_j >= 0.
struct KernelSpec {
  std::string label;
  std::vector<double> coefficients;
  // Σ_{j > J} a_j when known (presets); bounds the truncation error of every μ_k.
  double truncation_tail = 0.0;

  unsigned truncation_degree() const { return static_cast<unsigned>(coefficients.size() - 1); }
  double evaluate(double t) const;
  double value_at_one() const;
  // Degree of the highest nonzero coefficient.
  unsigned polynomial_degree() const;

  // Validates non-negativity and finiteness.
  static KernelSpec from_coefficients(std::string label, std::vector<double> coefficients);

  // Φ(t) = exp(t - 1), i.e. exp(-|x - x'|^2 / 2) on the sphere; a_j = 1/(e j!).
  static KernelSpec rbf(unsigned truncation_degree = 60);
  // Φ(t) = (1 + t)^m.
  static KernelSpec polynomial(unsigned m);
  static KernelSpec linear();
  static KernelSpec constant();
  // "rbf", "poly:m", "linear", "constant".
  static KernelSpec preset(const std::string& name, unsigned truncation_degree = 60);
};

// Zonal polynomial P_{k,d} normalised to P_{k,d}(1) = 1, by the recurrence
// P_{k+1} = ((2k+d-1) t P_k - k P_{k-1}) / (k+d-1). Throws ConfigError for
// d < 2 or |t| > 1 + 1e-12; t is clamped to [-1, 1] otherwise.
double gegenbauer(unsigned k, int d, double t);

// Fills out[0..out.size()) with P_{0,d}(t) .. P_{out.size()-1,d}(t).
void gegenbauer_all(int d, double t, std::span<double> out);

// Exact N(d, k); throws NumericError when it does not fit in 64 bits.
std::uint64_t multiplicity(int d, unsigned k);
double log_multiplicity(int d, unsigned k);
// N(d, k) as a double: exact when the integer fits, log-scale otherwise.
double multiplicity_real(int d, unsigned k);

// log I(j, k, d); -infinity when the integral vanishes (j < k or j - k odd).
double funk_hecke_log_integral(unsigned j, unsigned k, int d);
double funk_hecke_integral(unsigned j, unsigned k, int d);

// μ_k for the kernel on S^d. Requires k <= kernel.truncation_degree().
double eigenvalue(const KernelSpec& kernel, int d, unsigned k);

struct SpectrumBlock {
  unsigned degree = 0;
  double eigenvalue = 0.0;
  double multiplicity = 0.0;  // N(d, k)
  double cumulative = 0.0;    // v_k = Σ_{k' <= k} N(d, k')
  // Exact N(d, k) and v_k when representable in 64 bits, otherwise 0.
  std::uint64_t exact_multiplicity = 0;
  std::uint64_t exact_cumulative = 0;
};

class SpectrumTable {
 public:
  SpectrumTable() = default;

  // Explicit (eigenvalue, multiplicity) list, one block per entry; degrees
  // are the entry positions and the table is taken as the full spectrum.
  static SpectrumTable synthetic(const std::vector<std::pair<double, std::uint64_t>>& blocks);

  int dimension() const { return dimension_; }
  std::span<const SpectrumBlock> blocks() const { return blocks_; }
  const SpectrumBlock& block(unsigned degree) const { return blocks_.at(degree); }
  std::size_t size() const { return blocks_.size(); }

  // Blocks in non-increasing eigenvalue order, ties by ascending degree.
  std::span<const std::size_t> order() const { return order_; }
  const SpectrumBlock& sorted(std::size_t rank) const { return blocks_[order_.at(rank)]; }

  // True when every eigenvalue beyond the table is known to be zero.
  bool exhaustive() const { return exhaustive_; }
  // μ_0 > μ_1 > ... > μ_k strictly (k clipped to the table).
  bool strictly_decreasing_through(unsigned k) const;
  // Σ_k μ_k N(d, k).
  double trace() const;
  // Degrees whose computed μ_k was negative from round-off and clamped to 0.
  std::span<const unsigned> clamped_degrees() const { return clamped_; }

  // Overwrites one eigenvalue and re-sorts. Used for negative controls.
  void override_eigenvalue(unsigned degree, double value);

  void write_csv(std::ostream& out) const;

 private:
  friend SpectrumTable build_spectrum(const KernelSpec&, int, unsigned);
  void sort_blocks();

  int dimension_ = 0;
  std::vector<SpectrumBlock> blocks_;
  std::vector<std::size_t> order_;
  std::vector<unsigned> clamped_;
  bool exhaustive_ = false;
};

// Blocks k = 0..k_max of the kernel's spectrum on S^d.
SpectrumTable build_spectrum(const KernelSpec& kernel, int d, unsigned k_max);

}  // namespace kpinsker
