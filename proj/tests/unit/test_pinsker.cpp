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
#include <random>
#include <utility>
#include <vector>

#include <doctest.h>

#include "kpinsker/error.hpp"
#include "kpinsker/pinsker.hpp"
#include "kpinsker/spectrum.hpp"
#include "oracles.hpp"

using namespace kpinsker;

namespace {

SpectrumTable table_of(const oracle::RandomProblem& p) {
  std::vector<std::pair<double, std::uint64_t>> blocks;
  for (const auto& b : p.blocks) blocks.emplace_back(b.eigenvalue, static_cast<std::uint64_t>(b.multiplicity));
  return SpectrumTable::synthetic(blocks);
}

ProblemConfig config_of(const oracle::RandomProblem& p) {
  return ProblemConfig::make(2, Rational(1), 1.0, Rational::parse(std::to_string(p.s)), p.radius, p.sigma,
                             static_cast<std::uint64_t>(p.n));
}

ProblemConfig rbf_config(int d, Rational gamma, Rational s = Rational(1)) {
  return ProblemConfig::make(d, gamma, 1.0, s, 1.0, 1.0);
}

PinskerSolution rbf_solution(const ProblemConfig& c) {
  return solve_kappa(build_spectrum(KernelSpec::rbf(), c.dimension, c.default_k_max()), c);
}

}  // namespace

TEST_SUITE("pinsker") {

TEST_CASE("single block") {
  const SpectrumTable t = SpectrumTable::synthetic({{1.0, 1}});
  const ProblemConfig c = ProblemConfig::make(2, Rational(1), 1.0, Rational(1), 1.0, 1.0, 100);
  const PinskerSolution sol = solve_kappa(t, c);
  CHECK(sol.kappa_star == doctest::Approx(1.0 / 101.0).epsilon(1e-15));
  CHECK(sol.dstar == doctest::Approx(1.0 / 101.0).epsilon(1e-15));
  CHECK(sol.cutoff == 1.0);
  CHECK(sol.exact_cutoff == 1);
  CHECK(sol.blocks[0].weight == doctest::Approx(100.0 / 101.0).epsilon(1e-15));
}

TEST_CASE("two blocks by hand") {
  // λ = 1, 1/4 with s = 2: λ^{-s/2} = 1, 4. With σ^2/n = 1/10, R = 1 both
  // blocks survive: κ = 0.1 * 5 / (1 + 0.1 * 17) = 5/27 < 1/4.
  const SpectrumTable t = SpectrumTable::synthetic({{1.0, 1}, {0.25, 1}});
  const ProblemConfig c = ProblemConfig::make(2, Rational(1), 1.0, Rational(2), 1.0, 1.0, 10);
  const PinskerSolution sol = solve_kappa(t, c);
  CHECK(sol.kappa_star == doctest::Approx(5.0 / 27.0).epsilon(1e-14));
  CHECK(sol.retained_blocks == 2);
  CHECK(sol.blocks[1].weight == doctest::Approx(1.0 - 20.0 / 27.0).epsilon(1e-14));
  CHECK(sol.dstar == doctest::Approx(0.1 * (22.0 / 27.0 + 7.0 / 27.0)).epsilon(1e-14));
  CHECK(sol.identity_residual < 1e-14);
}

TEST_CASE("two blocks with multiplicity") {
  // λ = 1 (m = 1) and 1/4 (m = 2), s = 1, n = 10: κ* = 0.1 * 5 / (1 + 0.1 * 9) = 5/19.
  const SpectrumTable t = SpectrumTable::synthetic({{1.0, 1}, {0.25, 2}});
  const ProblemConfig c = ProblemConfig::make(2, Rational(1), 1.0, Rational(1), 1.0, 1.0, 10);
  const PinskerSolution sol = solve_kappa(t, c);
  CHECK(sol.kappa_star == doctest::Approx(5.0 / 19.0).epsilon(1e-14));
  CHECK(sol.exact_cutoff == 3);
  CHECK(sol.blocks[0].weight == doctest::Approx(14.0 / 19.0).epsilon(1e-14));
  CHECK(sol.blocks[1].weight == doctest::Approx(9.0 / 19.0).epsilon(1e-14));
  CHECK(sol.dstar == doctest::Approx(16.0 / 95.0).epsilon(1e-14));
  CHECK(dstar_identity_side(sol, c) == doctest::Approx(16.0 / 95.0).epsilon(1e-14));
  CHECK(max_ell_ratio(sol) == doctest::Approx(0.36).epsilon(1e-14));
  const LowerBoundDiagnostics lb = lower_bound_diagnostics(sol, 0.5);
  CHECK(lb.prior.mass() == doctest::Approx(0.5).epsilon(1e-12));

  const ProblemConfig wide = ProblemConfig::make(2, Rational(1), 1.0, Rational(1), 1e6, 1.0, 10);
  const PinskerSolution w = solve_kappa(t, wide);
  CHECK(w.kappa_star < 1e-4);
  CHECK(w.exact_cutoff == 3);

  const PinskerSolution single = solve_kappa(SpectrumTable::synthetic({{1.0, 1}}),
                                             ProblemConfig::make(2, Rational(1), 1.0, Rational(1), 1.0, 1.0, 100));
  CHECK(max_ell_ratio(single) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solver matches exhaustive scan on random spectra") {
  std::mt19937_64 rng(20260101);
  for (int trial = 0; trial < 1000; ++trial) {
    const oracle::RandomProblem p = oracle::random_problem(rng);
    const auto fits = oracle::scan_cutoffs(p.blocks, p.s, p.n, p.radius, p.sigma);
    REQUIRE(fits.size() == 1);
    const PinskerSolution sol = solve_kappa(table_of(p), config_of(p));
    CHECK(sol.cutoff == fits[0].cutoff);
    CHECK(sol.cutoff == oracle::cutoff_by_definition(p.blocks, p.s, p.n, p.radius, p.sigma));
    CHECK(sol.kappa_star == doctest::Approx(fits[0].kappa).epsilon(1e-12));
    CHECK(sol.identity_residual < 1e-10);
    CHECK(sol.dstar > 0.0);
  }
}

TEST_CASE("filter weights") {
  const ProblemConfig c = rbf_config(30, Rational(3, 2));
  const SpectrumTable t = build_spectrum(KernelSpec::rbf(), 30, c.default_k_max());
  const PinskerSolution sol = solve_kappa(t, c);
  const std::vector<double> w = filter_weights(sol, t, c.s());
  for (const auto& b : sol.blocks) {
    CHECK(w[b.degree] == b.weight);
    if (b.retained) {
      CHECK(b.weight > 0.0);
      CHECK(b.weight < 1.0);
    } else {
      CHECK(b.weight == 0.0);
    }
  }
  CHECK(dstar(sol, c) == doctest::Approx(dstar_identity_side(sol, c)).epsilon(1e-12));
}

TEST_CASE("solver errors") {
  const ProblemConfig c = ProblemConfig::make(2, Rational(1), 1.0, Rational(1), 1.0, 1.0, 100);
  CHECK_THROWS_AS(solve_kappa(SpectrumTable::synthetic({{0.0, 3}}), c), NumericError);
  // Huge n keeps everything: a two-degree rbf table cannot certify the cutoff.
  const ProblemConfig big = ProblemConfig::make(5, Rational(6), 1.0, Rational(1), 1.0, 1.0);
  CHECK_THROWS_AS(solve_kappa(build_spectrum(KernelSpec::rbf(), 5, 2), big), NumericError);
  CHECK_THROWS_AS(ProblemConfig::make(1, Rational(1), 1.0, Rational(1), 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(ProblemConfig::make(5, Rational(0), 1.0, Rational(1), 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(ProblemConfig::make(5, Rational(1), 1.0, Rational(-1), 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(ProblemConfig::make(5, Rational(1), 1.0, Rational(1), 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(ProblemConfig::make(5, Rational(1), 1.0, Rational(1), 1.0, 1.0, 0), ConfigError);
}

TEST_CASE("config derived quantities") {
  const ProblemConfig c = rbf_config(100, Rational(3, 2));
  CHECK(c.sample_size() == 1000.0);
  CHECK(c.noise_level() == doctest::Approx(1e-3));
  CHECK(c.p() == 0);
  CHECK_FALSE(c.boundary_ambiguous());
  CHECK(rbf_config(100, Rational(1, 2)).boundary_ambiguous());
  CHECK(rbf_config(100, Rational(5, 2)).boundary_ambiguous());
  CHECK(rbf_config(100, Rational(5, 2)).p() == 1);
}

TEST_CASE("top degree follows the rate split") {
  for (int d : {200, 500}) {
    CHECK(rbf_solution(rbf_config(d, Rational(13, 10))).top_degree == 1);
    CHECK(rbf_solution(rbf_config(d, Rational(17, 10))).top_degree == 1);
    CHECK(rbf_solution(rbf_config(d, Rational(33, 10))).top_degree == 2);
    CHECK(rbf_solution(rbf_config(d, Rational(37, 10))).top_degree == 2);
    CHECK(rbf_solution(rbf_config(d, Rational(37, 10))).block_aligned);
  }
}

TEST_CASE("rate exponent against min formula") {
  for (const Rational& s : {Rational(1, 100), Rational(1, 2), Rational(1), Rational(3), Rational(8)}) {
    for (const Rational& g : rational_grid(Rational(1, 20), Rational(9), Rational(1, 20))) {
      CHECK(rate_exponent(g, s).to_double() == doctest::Approx(oracle::rate_by_min(g.to_double(), s.to_double())));
    }
  }
  CHECK(rate_exponent(Rational(3, 2), Rational(1)) == Rational(1));
  CHECK(rate_exponent(Rational(5, 2), Rational(1)) == Rational(3, 2));
  CHECK(rate_exponent(Rational(15, 2), Rational(3)) == Rational(6));
  CHECK_THROWS_AS(rate_exponent(Rational(0), Rational(1)), ConfigError);
}

TEST_CASE("asymptotic constant") {
  const KernelSpec rbf = KernelSpec::rbf();
  const AsymptoticBound a = asymptotic(Rational(3, 2), Rational(1), 1.0, 1.0, 1.0, rbf);
  CHECK(a.p == 0);
  CHECK(a.zeta == Rational(1));
  CHECK(a.regime == Regime::case_ii_interior);
  CHECK(a.cstar == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  const AsymptoticBound b = asymptotic(Rational(15, 2), Rational(3), 1.0, 1.0, 1.0, rbf);
  CHECK(b.p == 1);
  CHECK(b.zeta == Rational(6));
  CHECK(b.regime == Regime::case_ii_interior);
  CHECK(b.cstar == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));

  const AsymptoticBound c = asymptotic(Rational(5, 2), Rational(1), 2.0, 1.0, 3.0, rbf);
  CHECK(c.p == 1);
  CHECK(c.regime == Regime::case_i_interior);
  CHECK(c.zeta == Rational(3, 2));
  CHECK(c.cstar == doctest::Approx(9.0 / 2.0));

  const AsymptoticBound half = asymptotic(Rational(1, 2), Rational(1), 1.0, 1.0, 1.0, rbf);
  CHECK(half.zeta == Rational(1, 2));
  CHECK(half.cstar == doctest::Approx(1.0));

  // Boundaries: γ = p(s+1) and γ = p(s+1) + s.
  const AsymptoticBound lo = asymptotic(Rational(2), Rational(1), 1.0, 1.0, 1.0, rbf);
  CHECK(lo.regime == Regime::case_i_boundary);
  CHECK(lo.cstar == doctest::Approx(1.0 / (1.0 + 1.0 / (rbf.coefficients[1] * 1.0))));
  const AsymptoticBound mid = asymptotic(Rational(1), Rational(1), 1.0, 1.0, 1.0, rbf);
  CHECK(mid.regime == Regime::case_ii_boundary);
  CHECK(mid.cstar == doctest::Approx(rbf.coefficients[1] + 1.0));

  CHECK_THROWS_AS(asymptotic(Rational(3, 2), Rational(1), 1.0, 1.0, 1.0, KernelSpec::linear()), ConfigError);
  CHECK(to_string(Regime::case_ii_boundary) == "case_ii_boundary");
}

TEST_CASE("rate curves and plateaus") {
  const std::vector<Rational> grid = rational_grid(Rational(1, 20), Rational(9), Rational(1, 20));
  CHECK(grid.size() == 180);
  const RateCurve s3 = rate_curve(Rational(3), grid);
  REQUIRE(s3.plateaus.size() == 2);
  CHECK(s3.plateaus[0].gamma_begin == Rational(3));
  CHECK(s3.plateaus[0].gamma_end == Rational(4));
  CHECK(s3.plateaus[0].zeta == Rational(3));
  CHECK(s3.plateaus[1].gamma_begin == Rational(7));
  CHECK(s3.plateaus[1].gamma_end == Rational(8));
  CHECK(s3.plateaus[1].zeta == Rational(6));

  const RateCurve tiny = rate_curve(Rational(1, 100), grid);
  for (const auto& pt : tiny.points) {
    CHECK(pt.zeta > Rational(0));
    CHECK(pt.zeta <= Rational(1, 100) * Rational(pt.gamma.floor() + 1));
  }
  CHECK(rational_grid(Rational(1), Rational(0), Rational(1)).empty());
  CHECK_THROWS_AS(rational_grid(Rational(0), Rational(1), Rational(0)), ConfigError);

  const auto cc = constant_curve(Rational(1), grid, 1.0, 1.0, 1.0, KernelSpec::rbf());
  int jumps = 0;
  for (const auto& pt : cc) {
    CHECK(pt.cstar > 0.0);
    jumps += pt.jump ? 1 : 0;
  }
  CHECK(jumps == 9);  // γ = 1, 2, ..., 9 for s = 1
}

TEST_CASE("lower bound diagnostics") {
  const ProblemConfig c = rbf_config(30, Rational(3, 2));
  const PinskerSolution sol = rbf_solution(c);
  for (double delta : {0.05, 0.3, 0.9}) {
    const LowerBoundDiagnostics lb = lower_bound_diagnostics(sol, delta);
    CHECK(lb.prior.mass() == doctest::Approx((1.0 - delta) * c.radius).epsilon(1e-10));
    CHECK(lb.bayes_value == doctest::Approx((1.0 - delta) * sol.dstar).epsilon(1e-10));
    CHECK(lb.tail_probability > 0.0);
    CHECK(lb.tail_probability <= 1.0);
    CHECK(lb.residual_bound >= 0.0);
  }
  CHECK_THROWS_AS(lower_bound_diagnostics(sol, 0.0), ConfigError);
  CHECK_THROWS_AS(lower_bound_diagnostics(sol, 1.0), ConfigError);
}

TEST_CASE("max ell ratio") {
  const PinskerSolution sol = rbf_solution(rbf_config(100, Rational(5, 2)));
  const double r = max_ell_ratio(sol);
  CHECK(r > 0.0);
  double manual = 0.0;
  for (const auto& b : sol.blocks) {
    if (b.retained) manual = std::max(manual, b.weight / (sol.sample_size * std::sqrt(b.eigenvalue) * sol.kappa_star));
  }
  CHECK(r == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("monotonicity in n, R and sigma") {
  const SpectrumTable t = build_spectrum(KernelSpec::rbf(), 20, 8);
  auto solve = [&](std::uint64_t n, double radius, double sigma) {
    return solve_kappa(t, ProblemConfig::make(20, Rational(1), 1.0, Rational(1), radius, sigma, n)).dstar;
  };
  double prev = solve(10, 1.0, 1.0);
  for (std::uint64_t n : {30, 100, 300, 1000, 3000}) {
    const double v = solve(n, 1.0, 1.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(solve(500, 2.0, 1.0) > solve(500, 1.0, 1.0));
  CHECK(solve(500, 1.0, 2.0) > solve(500, 1.0, 1.0));
}

}  // TEST_SUITE
