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

#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "kpinsker/error.hpp"
#include "kpinsker/spectrum.hpp"
#include "oracles.hpp"

using namespace kpinsker;

TEST_SUITE("spectrum") {

TEST_CASE("gegenbauer small cases") {
  CHECK(gegenbauer(0, 5, 0.3) == 1.0);
  CHECK(gegenbauer(1, 7, -0.4) == -0.4);
  CHECK(gegenbauer(2, 3, 0.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  for (unsigned k = 0; k < 12; ++k) CHECK(gegenbauer(k, 6, 1.0) == 1.0);
}

TEST_CASE("gegenbauer against boost") {
  for (int d : {2, 3, 5, 10, 40}) {
    for (unsigned k = 0; k <= 10; ++k) {
      for (double t : {-1.0, -0.73, -0.2, 0.0, 0.11, 0.5, 0.99, 1.0}) {
        const double v = gegenbauer(k, d, t);
        CHECK(v == doctest::Approx(oracle::gegenbauer(k, d, t)).epsilon(1e-12).scale(1.0));
        CHECK(std::fabs(v) <= 1.0 + 1e-15);
      }
    }
  }
}

TEST_CASE("gegenbauer argument handling") {
  CHECK(gegenbauer(3, 4, 1.0 + 1e-13) == 1.0);
  CHECK_THROWS_AS(gegenbauer(3, 4, 1.0 + 1e-9), ConfigError);
  CHECK_THROWS_AS(gegenbauer(3, 1, 0.5), ConfigError);
  std::vector<double> all(7);
  gegenbauer_all(5, 0.37, all);
  for (unsigned k = 0; k < all.size(); ++k) CHECK(all[k] == doctest::Approx(gegenbauer(k, 5, 0.37)).epsilon(1e-15));
}

TEST_CASE("gegenbauer orthogonality and normalization by quadrature") {
  for (int d : {3, 5, 10}) {
    for (unsigned k = 0; k <= 6; ++k) {
      for (unsigned kp = 0; kp <= 6; ++kp) {
        const double v = oracle::weighted_integral(d, [&](double t) { return gegenbauer(k, d, t) * gegenbauer(kp, d, t); });
        if (k == kp) {
          CHECK(v == doctest::Approx(1.0 / static_cast<double>(multiplicity(d, k))).epsilon(1e-8));
        } else {
          CHECK(std::fabs(v) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("multiplicity examples") {
  CHECK(multiplicity(100, 0) == 1);
  CHECK(multiplicity(9, 1) == 10);
  CHECK(multiplicity(3, 2) == 9);
  CHECK(multiplicity(2, 5) == 11);  // 2k + 1 on S^2
}

TEST_CASE("multiplicity against harmonic dimension count") {
  for (int d = 2; d <= 30; ++d) {
    for (unsigned k = 0; k <= 8; ++k) {
      CHECK(multiplicity(d, k) == oracle::harmonic_dimension(d, k));
      CHECK(multiplicity_real(d, k) == doctest::Approx(static_cast<double>(oracle::harmonic_dimension(d, k))));
      CHECK(std::exp(log_multiplicity(d, k)) ==
            doctest::Approx(static_cast<double>(oracle::harmonic_dimension(d, k))).epsilon(1e-12));
    }
  }
}

TEST_CASE("multiplicity overflow is reported") {
  CHECK_THROWS_AS(multiplicity(1000000, 6), NumericError);
  CHECK(std::isfinite(log_multiplicity(1000000, 6)));
  CHECK(multiplicity_real(1000000, 6) > 1e30);
  CHECK_THROWS_AS(multiplicity(1, 2), ConfigError);
}

TEST_CASE("eigenvalue examples") {
  const KernelSpec one = KernelSpec::constant();
  CHECK(eigenvalue(one, 6, 0) == doctest::Approx(1.0).epsilon(1e-15));
  for (unsigned k = 1; k <= one.truncation_degree(); ++k) CHECK(eigenvalue(one, 6, k) == 0.0);
  CHECK(oracle::funk_hecke_quadrature({1.0}, 6, 0) == doctest::Approx(1.0).epsilon(1e-12));

  const KernelSpec lin = KernelSpec::linear();
  CHECK(eigenvalue(lin, 9, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(oracle::funk_hecke_quadrature({0.0, 1.0}, 9, 1) == doctest::Approx(0.1).epsilon(1e-10));

  const KernelSpec sq = KernelSpec::from_coefficients("t^2", {0.0, 0.0, 1.0});
  CHECK(eigenvalue(sq, 3, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(eigenvalue(sq, 3, 1) == 0.0);
  CHECK(eigenvalue(sq, 3, 2) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK(eigenvalue(sq, 3, 0) + 9.0 * eigenvalue(sq, 3, 2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("funk-hecke integral parity and range") {
  CHECK(funk_hecke_integral(2, 3, 7) == 0.0);
  CHECK(funk_hecke_integral(5, 2, 7) == 0.0);
  CHECK(funk_hecke_integral(0, 0, 7) == doctest::Approx(1.0));
  for (int d : {3, 8, 20}) {
    for (unsigned j = 0; j <= 12; ++j) {
      for (unsigned k = 0; k <= j; ++k) {
        std::vector<double> mono(j + 1, 0.0);
        mono[j] = 1.0;
        const double q = oracle::funk_hecke_quadrature(mono, d, k);
        const double v = funk_hecke_integral(j, k, d);
        CHECK(std::fabs(v - q) <= 1e-9 * std::fabs(q) + 1e-14);
      }
    }
  }
}

TEST_CASE("funk-hecke eigenvalues against quadrature for the rbf kernel") {
  const KernelSpec rbf = KernelSpec::rbf();
  const std::vector<double> coeff(rbf.coefficients.begin(), rbf.coefficients.begin() + 31);
  for (int d : {2, 3, 5, 10, 20, 40}) {
    for (unsigned k = 0; k <= 6; ++k) {
      const double q = oracle::funk_hecke_quadrature(coeff, d, k);
      CHECK(eigenvalue(rbf, d, k) == doctest::Approx(q).epsilon(1e-8));
    }
  }
}

TEST_CASE("eigenvalue errors") {
  const KernelSpec poly = KernelSpec::polynomial(3);
  CHECK_THROWS_AS(eigenvalue(poly, 5, 4), ConfigError);
  CHECK_THROWS_AS(eigenvalue(poly, 1, 0), ConfigError);
  CHECK_THROWS_AS(KernelSpec::from_coefficients("neg", {1.0, -0.5}), ConfigError);
  CHECK_THROWS_AS(KernelSpec::preset("gauss"), ConfigError);
}

TEST_CASE("presets") {
  const KernelSpec rbf = KernelSpec::rbf();
  CHECK(rbf.truncation_degree() == 60);
  CHECK(rbf.coefficients[3] == doctest::Approx(1.0 / (std::numbers::e * 6.0)));
  CHECK(rbf.value_at_one() + rbf.truncation_tail == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rbf.evaluate(0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  const KernelSpec p4 = KernelSpec::preset("poly:4");
  CHECK(p4.evaluate(0.5) == doctest::Approx(std::pow(1.5, 4)));
  CHECK(p4.polynomial_degree() == 4);
}

TEST_CASE("build_spectrum examples") {
  const SpectrumTable c = build_spectrum(KernelSpec::from_coefficients("1", {1.0, 0.0, 0.0, 0.0}), 5, 3);
  REQUIRE(c.size() == 4);
  CHECK(c.sorted(0).degree == 0);
  CHECK(c.sorted(0).eigenvalue == doctest::Approx(1.0));
  for (std::size_t r = 1; r < 4; ++r) CHECK(c.sorted(r).eigenvalue == 0.0);

  const SpectrumTable sq = build_spectrum(KernelSpec::from_coefficients("t^2", {0.0, 0.0, 1.0, 0.0, 0.0}), 3, 4);
  CHECK(sq.sorted(0).degree == 0);
  CHECK(sq.sorted(1).degree == 2);
  CHECK(sq.sorted(1).eigenvalue == doctest::Approx(1.0 / 12.0));
  CHECK(sq.sorted(2).degree == 1);  // zeros tie-broken by ascending degree
  CHECK(sq.sorted(3).degree == 3);
  CHECK(sq.sorted(4).degree == 4);
  CHECK(sq.exhaustive());

  const SpectrumTable rbf = build_spectrum(KernelSpec::rbf(), 1000, 4);
  for (unsigned k = 0; k <= 3; ++k) {
    const double scaled = rbf.block(k).eigenvalue * std::pow(1000.0, k) * std::numbers::e;
    CHECK(scaled == doctest::Approx(1.0).epsilon(0.05));
  }
  CHECK(rbf.strictly_decreasing_through(4));
  CHECK_FALSE(rbf.exhaustive());
  CHECK_THROWS_AS(build_spectrum(KernelSpec::polynomial(2), 4, 5), ConfigError);
}

TEST_CASE("cumulative multiplicities") {
  const SpectrumTable t = build_spectrum(KernelSpec::rbf(), 7, 5);
  std::uint64_t v = 0;
  for (const auto& b : t.blocks()) {
    v += b.exact_multiplicity;
    CHECK(b.exact_cumulative == v);
    CHECK(b.cumulative == static_cast<double>(v));
  }
}

TEST_CASE("trace identity") {
  for (int d : {2, 3, 7, 15}) {
    const KernelSpec p = KernelSpec::polynomial(5);
    const SpectrumTable t = build_spectrum(p, d, 5);
    CHECK(t.trace() == doctest::Approx(p.value_at_one()).epsilon(1e-10));
    const SpectrumTable partial = build_spectrum(p, d, 3);
    CHECK(partial.trace() <= p.value_at_one());
  }
  const KernelSpec rbf = KernelSpec::rbf();
  double prev_gap = 1.0;
  for (unsigned k_max : {2u, 4u, 8u, 16u}) {
    const double gap = rbf.value_at_one() - build_spectrum(rbf, 4, k_max).trace();
    CHECK(gap >= -1e-15);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("eigenvalue ratio two degrees apart") {
  for (const auto& kernel : {KernelSpec::rbf(), KernelSpec::polynomial(12)}) {
    for (int d : {2, 3, 10, 100, 1000}) {
      const SpectrumTable t = build_spectrum(kernel, d, 12);
      for (unsigned k = 0; k + 2 <= 12; ++k) {
        const double a = t.block(k).eigenvalue;
        const double b = t.block(k + 2).eigenvalue;
        if (a > 0.0) CHECK(b / a <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("asymptotic bracket at large d") {
  const KernelSpec rbf = KernelSpec::rbf();
  for (int d : {500, 1000, 4000}) {
    for (unsigned k = 0; k <= 3; ++k) {
      double fact = 1.0;
      for (unsigned i = 2; i <= k; ++i) fact *= i;
      const double lead = rbf.coefficients[k] * fact * std::pow(d, -static_cast<double>(k));
      const double mu = eigenvalue(rbf, d, k);
      CHECK(mu >= 0.9 * lead);
      CHECK(mu <= 1.1 * lead);
    }
  }
}

TEST_CASE("synthetic tables and csv") {
  const SpectrumTable t = SpectrumTable::synthetic({{0.25, 2}, {1.0, 1}, {0.25, 3}});
  CHECK(t.sorted(0).degree == 1);
  CHECK(t.sorted(1).degree == 0);
  CHECK(t.sorted(2).degree == 2);
  std::ostringstream o;
  t.write_csv(o);
  CHECK(o.str() == "degree,eigenvalue,multiplicity,cumulative\n0,0.25,2,2\n1,1,1,3\n2,0.25,3,6\n");
  CHECK_THROWS_AS(SpectrumTable::synthetic({}), ConfigError);
  CHECK_THROWS_AS(SpectrumTable::synthetic({{-1.0, 1}}), ConfigError);
}

}  // TEST_SUITE
