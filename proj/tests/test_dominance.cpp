#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "supertail/supertail.hpp"

using namespace supertail;
using Catch::Approx;

TEST_CASE("degenerate weight vector gives exact ties") {
  RngStream s(1, 0);
  auto rep = penalty_experiment(LossDistribution::pareto(1.0),
                                CopulaSpec::independence(), {1.0, 0.0},
                                {1.5, 2.0, 5.0}, 50000, s);
  for (const auto& r : rep.rows) {
    REQUIRE(r.lhs == r.rhs);
    REQUIRE(r.verdict == Verdict::holds);
  }
  REQUIRE(rep.overall == Verdict::holds);
}

TEST_CASE("independent pareto pair matches the convolution oracle") {
  RngStream s(2, 0);
  std::uint64_t n = 1000000;
  auto rep = penalty_experiment(LossDistribution::pareto(1.0),
                                CopulaSpec::independence(), {0.5, 0.5},
                                {2.0}, n, s);
  const auto& r = rep.rows[0];
  double oracle = pareto1_pair_sum_survival(4.0);
  REQUIRE(std::abs(r.lhs - oracle) <= 4.0 * binomial_se(oracle, n));
  REQUIRE(std::abs(r.rhs - 0.5) <= 4.0 * binomial_se(0.5, n));
  REQUIRE(r.rhs_analytic == Approx(0.5));
  REQUIRE(r.verdict == Verdict::holds_strictly);
}

TEST_CASE("comonotone coupling collapses the diversified sum") {
  RngStream s(3, 0);
  auto rep = penalty_experiment(LossDistribution::pareto(1.0),
                                CopulaSpec::comonotone(), {0.2, 0.5, 0.3},
                                {1.5, 3.0, 9.0}, 30000, s);
  for (const auto& r : rep.rows) {
    REQUIRE(r.lhs == r.rhs);
    REQUIRE(r.verdict == Verdict::holds);
  }
}

TEST_CASE("weights off the simplex are rejected") {
  RngStream s(4, 0);
  auto p1 = LossDistribution::pareto(1.0);
  REQUIRE_THROWS_AS(penalty_experiment(p1, CopulaSpec::independence(),
                                       {0.5, 0.4}, {2.0}, 100, s),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(penalty_experiment(p1, CopulaSpec::independence(),
                                       {1.5, -0.5}, {2.0}, 100, s),
                    std::invalid_argument);
  // a finite-mean truncated marginal is outside this experiment's scope
  REQUIRE_THROWS_AS(
      penalty_experiment(LossDistribution::truncated(p1, 5.0),
                         CopulaSpec::independence(), {0.5, 0.5}, {2.0}, 100,
                         s),
      std::invalid_argument);
}

TEST_CASE("mixture exceedance interpolates its components") {
  RngStream s(5, 0);
  auto p1 = LossDistribution::pareto(1.0);
  std::vector<double> theta{0.5, 0.5};
  std::vector<double> grid{2.0, 4.0};
  std::uint64_t n = 400000;
  double lambda = 0.25;
  auto mixed = penalty_experiment(
      p1,
      CopulaSpec::mixture({lambda, 1.0 - lambda},
                          {CopulaSpec::comonotone(),
                           CopulaSpec::independence()}),
      theta, grid, n, s);
  auto com = penalty_experiment(p1, CopulaSpec::comonotone(), theta, grid, n,
                                s.substream(1));
  auto ind = penalty_experiment(p1, CopulaSpec::independence(), theta, grid,
                                n, s.substream(2));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double blend =
        lambda * com.rows[g].lhs + (1.0 - lambda) * ind.rows[g].lhs;
    REQUIRE(mixed.rows[g].lhs ==
            Approx(blend).margin(4.0 * binomial_se(blend, n) + 1e-4));
  }
}

TEST_CASE("closure checks: convolution and convex transforms") {
  RngStream s(6, 0);
  // the empirical law of a pair sum used as the marginal still dominates
  auto summed = convolve_iid(LossDistribution::pareto(1.0), 2,
                             s.substream(1), 1 << 18);
  auto rep = penalty_experiment(summed, CopulaSpec::independence(),
                                {0.5, 0.5}, {5.0, 8.0, 16.0}, 300000,
                                s.substream(2));
  REQUIRE(rep.holds_everywhere());

  // squaring each coordinate keeps strict dominance
  auto squared =
      LossDistribution::convex_transform(PiecewiseConvexFn::power(2.0));
  auto rep2 = penalty_experiment(squared, CopulaSpec::independence(),
                                 {0.5, 0.5}, {4.0, 16.0, 100.0}, 1000000,
                                 s.substream(3));
  REQUIRE(rep2.overall == Verdict::holds_strictly);
}

TEST_CASE("negative-correlation gaussian coupling keeps the dominance") {
  RngStream s(15, 0);
  auto g = CopulaSpec::gaussian_nsd(2, {1.0, -0.5, -0.5, 1.0});
  auto rep = penalty_experiment(LossDistribution::pareto(1.0), g, {0.5, 0.5},
                                {2.0, 4.0, 10.0}, 400000, s);
  REQUIRE(rep.overall == Verdict::holds_strictly);
}

TEST_CASE("tail ratio diagnostic stays above one for large thresholds") {
  RngStream s(7, 0);
  auto rep = penalty_experiment(LossDistribution::pareto(0.8),
                                CopulaSpec::independence(), {0.5, 0.5},
                                {10.0, 50.0, 200.0}, 1000000, s);
  for (const auto& r : rep.rows) REQUIRE(r.ratio > 1.0 - 0.05);
}

TEST_CASE("truncated experiment: exact identity and var rows") {
  RngStream s(8, 0);
  auto p1 = LossDistribution::pareto(1.0);
  std::uint64_t n = 500000;
  auto rep = truncated_penalty_experiment(
      p1, CopulaSpec::independence(), {0.5, 0.5}, {10.0, 10.0},
      {2.0, 3.0, 4.999}, {0.5, 0.75}, n, s);
  REQUIRE(rep.c_bound == Approx(5.0));
  REQUIRE(rep.region_p_max == Approx(0.8));
  for (auto m : rep.mismatches) REQUIRE(m == 0);

  // at t=2 the exceedance equals the untruncated pair-sum value exactly
  double oracle = pareto1_pair_sum_survival(4.0);
  REQUIRE(std::abs(rep.dominance.rows[0].lhs - oracle) <=
          4.0 * binomial_se(oracle, n));

  // inside the region the diversified truncated VaR beats the weighted sum
  for (const auto& vr : rep.var_rows) {
    REQUIRE(vr.in_valid_region);
    REQUIRE(vr.lhs_lo > vr.rhs);
  }
}

TEST_CASE("truncated experiment validations") {
  RngStream s(9, 0);
  auto p1 = LossDistribution::pareto(1.0);
  // grid above the usable bound
  REQUIRE_THROWS_AS(
      truncated_penalty_experiment(p1, CopulaSpec::independence(),
                                   {0.5, 0.5}, {10.0, 10.0}, {6.0}, {0.5},
                                   1000, s),
      std::invalid_argument);
  // cap below the support
  REQUIRE_THROWS_AS(
      truncated_penalty_experiment(p1, CopulaSpec::independence(),
                                   {0.5, 0.5}, {0.5, 10.0}, {2.0}, {0.5},
                                   1000, s),
      std::invalid_argument);
}

TEST_CASE("degenerate truncated weights equal the single-loss var") {
  RngStream s(10, 0);
  auto p1 = LossDistribution::pareto(1.0);
  auto rep = truncated_penalty_experiment(p1, CopulaSpec::independence(),
                                          {1.0, 0.0}, {10.0, 10.0}, {2.0},
                                          {0.5}, 400000, s);
  // both sides are VaR_p(Y_1) = min(VaR_p(X), 10)
  const auto& vr = rep.var_rows[0];
  REQUIRE(vr.rhs == Approx(2.0));
  REQUIRE(vr.lhs == Approx(2.0).margin(0.02));
}

TEST_CASE("collective risk model: degenerate counts") {
  RngStream s(11, 0);
  auto p1 = LossDistribution::pareto(1.0);
  auto one = collective_risk_experiment(p1, WeightLaw::dirac(1.0),
                                        CountLaw::dirac(1), {2.0, 4.0},
                                        {2.0, 4.0}, 300000, s);
  REQUIRE_FALSE(one.strictness_expected);
  for (const auto& r : one.average_form.rows) {
    REQUIRE(r.verdict != Verdict::violated);
    REQUIRE(std::abs(r.lhs - r.rhs) <=
            4.0 * std::sqrt(2.0) * binomial_se(r.lhs, 300000));
  }
  auto zero = collective_risk_experiment(p1, WeightLaw::dirac(1.0),
                                         CountLaw::dirac(0), {2.0, 4.0},
                                         {2.0, 4.0}, 10000, s.substream(1));
  for (const auto& r : zero.average_form.rows) {
    REQUIRE(r.lhs == 0.0);
    REQUIRE(r.rhs == 0.0);
  }
  for (const auto& r : zero.weighted_form.rows) {
    REQUIRE(r.lhs == 0.0);
    REQUIRE(r.rhs == 0.0);
  }
}

TEST_CASE("collective risk model: mixture oracle at t=4") {
  RngStream s(12, 0);
  std::uint64_t n = 1000000;
  auto rep = collective_risk_experiment(
      LossDistribution::pareto(1.0), WeightLaw::dirac(1.0),
      CountLaw::uniform_int(1, 2), {4.0}, {4.0}, n, s);
  REQUIRE(rep.strictness_expected);
  // average-loss form: lhs is X (always one claim or more), rhs mixes the
  // single draw and the half-sum of two draws
  double oracle =
      0.5 * 0.25 + 0.5 * pareto1_pair_sum_survival(8.0);
  const auto& r = rep.average_form.rows[0];
  REQUIRE(std::abs(r.lhs - oracle) <= 4.0 * binomial_se(oracle, n));
  REQUIRE(std::abs(r.rhs - 0.25) <= 4.0 * binomial_se(0.25, n));
  REQUIRE(r.verdict == Verdict::holds_strictly);
  REQUIRE(rep.weighted_form.rows[0].verdict != Verdict::violated);
}

TEST_CASE("empirical fsd: degenerate and shifted samples") {
  std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  auto same = empirical_fsd(a, a);
  for (const auto& r : same.rows) REQUIRE(r.diff == 0.0);
  REQUIRE(same.dominance_holds_everywhere);

  std::vector<double> b;
  for (double x : a) b.push_back(x + 1.0);
  auto shifted = empirical_fsd(a, b);
  REQUIRE(shifted.dominance_holds_everywhere);
  for (const auto& r : shifted.rows) REQUIRE(r.diff >= 0.0);
}

TEST_CASE("empirical fsd: comonotone vs independent sums break in the tail") {
  RngStream s(13, 0);
  auto p1 = LossDistribution::pareto(1.0);
  auto da = sample(p1, 1000, s.substream(1));
  auto db = sample(p1, 1000, s.substream(2));
  auto fa = LossDistribution::empirical(da);
  auto fb = LossDistribution::empirical(db);
  std::size_t n_out = 10000;
  auto como_s = sample(comonotonic_sum(fa, fb), n_out, s.substream(3));
  auto ind_s = independent_sum(fa, fb, n_out, s.substream(4));
  auto rep = empirical_fsd(como_s, ind_s);
  // dominance of the comonotone sum holds over the bulk and breaks only in
  // the far tail of the bounded resamples
  REQUIRE_FALSE(rep.dominance_holds_everywhere);
  std::vector<double> pooled(como_s);
  pooled.insert(pooled.end(), ind_s.begin(), ind_s.end());
  std::sort(pooled.begin(), pooled.end());
  REQUIRE(rep.first_violation_t > sorted_quantile(pooled, 0.9));
}

TEST_CASE("one-sided dominance test: clear directions and validation") {
  RngStream s(14, 0);
  auto p1 = LossDistribution::pareto(1.0);
  auto a = sample(p1, 5000, s.substream(1));
  auto b = sample(p1, 5000, s.substream(2));
  for (auto& x : b) x += 5.0;
  REQUIRE(one_sided_dominance_test(a, b, 199, s.substream(3)).p_value >=
          0.99);
  REQUIRE(one_sided_dominance_test(b, a, 199, s.substream(4)).p_value <
          0.01);
  REQUIRE_THROWS_AS(one_sided_dominance_test(a, b, 99, s), std::invalid_argument);
}

TEST_CASE("default grid spans the requested quantile range") {
  auto g = default_dominance_grid(LossDistribution::pareto(1.0));
  REQUIRE(g.size() == 41);
  REQUIRE(g.front() == Approx(2.0));
  REQUIRE(g.back() == Approx(1000.0));
  REQUIRE(std::is_sorted(g.begin(), g.end()));
}
