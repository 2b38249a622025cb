#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "supertail/supertail.hpp"

using namespace supertail;
using Catch::Approx;

// ---------------- hill ----------------

TEST_CASE("hill estimator on the hand-built geometric sample") {
  std::vector<double> sample{1.0, std::exp(1.0), std::exp(2.0),
                             std::exp(3.0)};
  auto r = hill_estimator(sample, 3);
  REQUIRE(r.alpha_hat == Approx(0.5).margin(1e-12));
  REQUIRE(r.threshold == 1.0);
  REQUIRE(r.ci_low < r.alpha_hat);
  REQUIRE(r.alpha_hat < r.ci_high);
}

TEST_CASE("hill estimator: k = n-1 collapses to the reciprocal log mean") {
  RngStream s(41, 0);
  auto sample = supertail::sample(LossDistribution::pareto(1.3), 500, s);
  sample.push_back(1.0);  // pin the minimum at 1 so the threshold log is 0
  std::size_t n = sample.size();
  auto r = hill_estimator(sample, n - 1);
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) acc += std::log(sorted[i]);
  REQUIRE(r.alpha_hat ==
          Approx(1.0 / (acc / static_cast<double>(n - 1))).epsilon(1e-12));
}

TEST_CASE("hill estimator validations") {
  std::vector<double> bad{-1.0, 0.5, 2.0, 3.0};
  REQUIRE_THROWS_AS(hill_estimator(bad, 3), std::invalid_argument);
  std::vector<double> ok{1.0, 2.0, 3.0, 4.0};
  REQUIRE_THROWS_AS(hill_estimator(ok, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(hill_estimator(ok, 4), std::invalid_argument);
}

TEST_CASE("hill estimator is scale invariant") {
  RngStream s(42, 0);
  auto sample = supertail::sample(LossDistribution::pareto(0.9), 2000, s);
  auto base = hill_estimator(sample, 100);
  for (double c : {0.001, 7.0, 1e6}) {
    std::vector<double> scaled(sample);
    for (auto& x : scaled) x *= c;
    auto r = hill_estimator(scaled, 100);
    REQUIRE(r.alpha_hat == Approx(base.alpha_hat).epsilon(1e-11));
  }
}

TEST_CASE("hill consistency and ci coverage over seeded replications") {
  double alpha = 0.85;
  int covered = 0;
  for (int rep = 0; rep < 50; ++rep) {
    RngStream s(5000 + rep, 0);
    auto sample =
        supertail::sample(LossDistribution::pareto(alpha), 5000, s);
    auto r = hill_estimator(sample, default_threshold_k(sample.size()));
    if (r.ci_low <= alpha && alpha <= r.ci_high) ++covered;
  }
  REQUIRE(covered >= 44);  // 95% nominal, allow monte carlo slack
}

TEST_CASE("power transforms rescale the tail index") {
  RngStream s(43, 0);
  double alpha = 1.2, beta = 2.0;
  auto sample = supertail::sample(LossDistribution::pareto(alpha), 20000, s);
  std::vector<double> transformed(sample);
  for (auto& x : transformed) x = std::pow(x, beta);
  auto r = hill_estimator(transformed, 1000);
  REQUIRE(r.ci_low <= alpha / beta);
  REQUIRE(alpha / beta <= r.ci_high);
}

TEST_CASE("hill plot: degenerate range and deterministic series") {
  RngStream s(44, 0);
  auto sample = supertail::sample(LossDistribution::pareto(1.0), 300, s);
  auto single = hill_plot(sample, 10, 10);
  REQUIRE(single.size() == 1);
  auto direct = hill_estimator(sample, 10);
  REQUIRE(single[0].alpha_hat == Approx(direct.alpha_hat).epsilon(1e-12));

  // deterministic sample exp(i/10), i=1..10: for k=3 the mean log excess is
  // ((8+9+10)-3*7)/30 = 0.2, so alpha_hat = 5 and the threshold is e^{0.7}
  std::vector<double> det;
  for (int i = 1; i <= 10; ++i) det.push_back(std::exp(i / 10.0));
  auto series = hill_plot(det, 2, 4);
  REQUIRE(series.size() == 3);
  REQUIRE(series[1].k == 3);
  REQUIRE(series[1].alpha_hat == Approx(5.0).epsilon(1e-9));
  REQUIRE(series[1].threshold == Approx(std::exp(0.7)).epsilon(1e-12));
}

TEST_CASE("hill plot: ci width shrinks as k grows on pareto data") {
  RngStream s(50, 0);
  auto sample = supertail::sample(LossDistribution::pareto(1.0), 20000, s);
  auto series = hill_plot(sample, 50, 800);
  double w_front = series.front().ci_high - series.front().ci_low;
  double w_back = series.back().ci_high - series.back().ci_low;
  REQUIRE(w_back < w_front);
  // the estimate fluctuates around the true index
  std::size_t inside = 0;
  for (const auto& r : series)
    if (r.ci_low <= 1.0 && 1.0 <= r.ci_high) ++inside;
  REQUIRE(inside > series.size() / 2);
}

TEST_CASE("default threshold rule") {
  REQUIRE(default_threshold_k(1274) == 64);
  REQUIRE(default_threshold_k(10915) == 546);
  REQUIRE(default_threshold_k(40) == 2);
  REQUIRE_THROWS_AS(default_threshold_k(39), std::invalid_argument);
}

// ---------------- data io ----------------

namespace {
std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("supertail_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}
}  // namespace

TEST_CASE("csv loading: header, column, scale") {
  auto path = write_temp("basic.csv", "id,loss\n1,1.0\n2,2.5\n");
  auto v = load_losses(path, "loss");
  REQUIRE(v == std::vector<double>{1.0, 2.5});
  CsvOptions opt;
  opt.scale = 500.0;
  auto scaled = load_losses(path, "loss", opt);
  REQUIRE(scaled == std::vector<double>{500.0, 1250.0});
  std::remove(path.c_str());
}

TEST_CASE("csv loading: no header, index column, delimiter") {
  auto path = write_temp("noheader.csv", "1.5;9\n2.5;9\n");
  CsvOptions opt;
  opt.has_header = false;
  opt.delimiter = ';';
  auto v = load_losses(path, "0", opt);
  REQUIRE(v == std::vector<double>{1.5, 2.5});
  std::remove(path.c_str());
}

TEST_CASE("csv loading: malformed cells name the line") {
  auto path = write_temp("bad.csv", "loss\n1.0\nnot_a_number\n3.0\n");
  try {
    load_losses(path, "loss");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("csv loading: nonpositive policy") {
  auto path = write_temp("nonpos.csv", "loss\n1.0\n-2.0\n3.0\n");
  REQUIRE_THROWS_AS(load_losses(path, "loss"), std::invalid_argument);
  CsvOptions opt;
  opt.nonpositive = CsvOptions::NonPositive::drop;
  auto v = load_losses(path, "loss", opt);
  REQUIRE(v == std::vector<double>{1.0, 3.0});
  std::remove(path.c_str());
}

TEST_CASE("comonotonic sum of equal two-point laws") {
  auto f = LossDistribution::empirical({1.0, 2.0});
  auto cs = comonotonic_sum(f, f);
  REQUIRE(cs.quantile(0.5) == 2.0);
  REQUIRE(cs.quantile(0.9) == 4.0);
}

TEST_CASE("comonotonic sum with a degenerate component and var additivity") {
  auto f1 = LossDistribution::empirical({1.0, 3.0, 8.0});
  auto zero = LossDistribution::constant(0.0);
  auto cs = comonotonic_sum(f1, zero);
  for (int i = 1; i < 60; ++i) {
    double p = i / 60.0;
    REQUIRE(cs.quantile(p) == Approx(f1.quantile(p)).margin(1e-12));
  }
  auto f2 = LossDistribution::empirical({0.5, 0.5, 2.0, 4.0});
  auto both = comonotonic_sum(f1, f2);
  for (int i = 1; i < 60; ++i) {
    double p = i / 60.0;
    REQUIRE(var(both, p) ==
            Approx(var(f1, p) + var(f2, p)).margin(1e-12));
  }
}

TEST_CASE("independent sum: degenerate components") {
  RngStream s(45, 0);
  auto f1 = LossDistribution::empirical({1.0, 2.0, 5.0});
  auto c = LossDistribution::constant(3.0);
  auto v = independent_sum(f1, c, 5000, s);
  auto plain = independent_sum(f1, LossDistribution::constant(0.0), 5000, s);
  for (std::size_t i = 0; i < v.size(); ++i)
    REQUIRE(v[i] == Approx(plain[i] + 3.0).margin(1e-12));
  auto both = independent_sum(c, c, 100, s.substream(1));
  for (double x : both) REQUIRE(x == 6.0);
}

TEST_CASE("independent sum matches the exhaustive double-sum oracle") {
  RngStream s(46, 0);
  std::size_t n_emp = 1000;
  auto draws = supertail::sample(LossDistribution::pareto(1.0), n_emp, s);
  auto f = LossDistribution::empirical(draws);
  std::size_t n_out = 1000000;
  auto sums = independent_sum(f, f, n_out, s.substream(1));
  double t = 4.0;
  std::uint64_t hits = 0;
  for (double x : sums)
    if (x > t) ++hits;
  double est = static_cast<double>(hits) / static_cast<double>(n_out);
  // brute-force enumeration over the n_emp x n_emp support grid
  std::vector<double> sorted(draws);
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t cnt = 0;
  for (double x : sorted) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), t - x);
    cnt += static_cast<std::uint64_t>(sorted.end() - it);
  }
  double oracle = static_cast<double>(cnt) /
                  (static_cast<double>(n_emp) * static_cast<double>(n_emp));
  REQUIRE(std::abs(est - oracle) <= 3.0 * binomial_se(oracle, n_out));
}

TEST_CASE("independent sum preserves the component marginals") {
  RngStream s(47, 0);
  auto f1 = LossDistribution::empirical(
      supertail::sample(LossDistribution::pareto(1.0), 2000, s));
  auto zero = LossDistribution::constant(0.0);
  auto resampled = independent_sum(f1, zero, 100000, s.substream(1));
  double ks = ks_distance(resampled, [&](double x) { return f1.cdf(x); });
  REQUIRE(ks < 0.01);
}
