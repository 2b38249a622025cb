#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "supertail/copulas.hpp"
#include "supertail/distributions.hpp"
#include "supertail/rng.hpp"
#include "supertail/stats.hpp"

namespace supertail {

enum class Verdict { holds, holds_strictly, inconclusive, violated };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_strictly: return "holds_strictly";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::violated: return "violated";
  }
  return "?";
}

struct DominanceRow {
  double t = 0.0;
  double lhs = 0.0, lhs_lo = 0.0, lhs_hi = 0.0;  // diversified-side exceedance
  double rhs = 0.0, rhs_lo = 0.0, rhs_hi = 0.0;  // single-loss exceedance
  double rhs_analytic = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();  // lhs/rhs diagnostic
  Verdict verdict = Verdict::inconclusive;
};

struct DominanceReport {
  std::vector<DominanceRow> rows;
  Verdict overall = Verdict::inconclusive;
  std::uint64_t n_mc = 0;
  bool coupled = false;

  bool holds_everywhere() const {
    for (const auto& r : rows)
      if (r.verdict != Verdict::holds && r.verdict != Verdict::holds_strictly)
        return false;
    return true;
  }
};

struct ExperimentOptions {
  bool couple = true;  // drive both arms with the same underlying uniforms
  unsigned threads = 1;
  double ci_z = kZ99;
};

namespace detail {

inline void validate_simplex(const std::vector<double>& theta) {
  if (theta.empty()) throw std::invalid_argument("theta: empty weight vector");
  double s = 0.0;
  for (double w : theta) {
    if (w < 0.0) throw std::invalid_argument("theta: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("theta: weights must sum to 1");
}

inline Verdict row_verdict(const Interval& lhs, const Interval& rhs,
                           double lhs_hat, double rhs_hat) {
  if (rhs.lo > lhs.hi) return Verdict::violated;
  if (lhs.lo > rhs.hi) return Verdict::holds_strictly;
  if (lhs_hat >= rhs_hat) return Verdict::holds;
  return Verdict::inconclusive;
}

inline Verdict overall_verdict(const std::vector<DominanceRow>& rows) {
  bool all_strict = true, all_hold = true;
  for (const auto& r : rows) {
    if (r.verdict == Verdict::violated) return Verdict::violated;
    if (r.verdict != Verdict::holds_strictly) all_strict = false;
    if (r.verdict != Verdict::holds && r.verdict != Verdict::holds_strictly)
      all_hold = false;
  }
  if (all_strict) return Verdict::holds_strictly;
  if (all_hold) return Verdict::holds;
  return Verdict::inconclusive;
}

inline DominanceReport assemble_report(
    const std::vector<double>& grid, const std::vector<std::uint64_t>& lhs_cnt,
    const std::vector<std::uint64_t>& rhs_cnt, std::uint64_t n,
    const ExperimentOptions& opt,
    const std::vector<double>* rhs_analytic = nullptr) {
  DominanceReport rep;
  rep.n_mc = n;
  rep.coupled = opt.couple;
  rep.rows.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    DominanceRow row;
    row.t = grid[g];
    double nn = static_cast<double>(n);
    row.lhs = static_cast<double>(lhs_cnt[g]) / nn;
    row.rhs = static_cast<double>(rhs_cnt[g]) / nn;
    Interval li = wilson_interval(lhs_cnt[g], n, opt.ci_z);
    Interval ri = wilson_interval(rhs_cnt[g], n, opt.ci_z);
    row.lhs_lo = li.lo;
    row.lhs_hi = li.hi;
    row.rhs_lo = ri.lo;
    row.rhs_hi = ri.hi;
    if (rhs_analytic) row.rhs_analytic = (*rhs_analytic)[g];
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs
                              : std::numeric_limits<double>::quiet_NaN();
    if (opt.couple && lhs_cnt[g] == rhs_cnt[g]) {
      row.verdict = Verdict::holds;  // exact pathwise tie under coupling
    } else {
      row.verdict = row_verdict(li, ri, row.lhs, row.rhs);
    }
    rep.rows.push_back(row);
  }
  rep.overall = overall_verdict(rep.rows);
  return rep;
}

}  // namespace detail

// 41 log-spaced thresholds between the median and the 0.999 quantile.
inline std::vector<double> default_dominance_grid(
    const LossDistribution& marginal, std::size_t points = 41) {
  double lo = marginal.quantile(0.5);
  double hi = marginal.quantile(0.999);
  if (!(lo > 0.0)) {  // fall back to linear spacing for nonpositive supports
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
      g[i] = lo + (hi - lo) * static_cast<double>(i) /
                      static_cast<double>(points - 1);
    return g;
  }
  std::vector<double> g(points);
  double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                              static_cast<double>(points - 1));
  return g;
}

// Compares P(sum_i theta_i X_i > t) against P(X > t) on a threshold grid.
// With coupling the single-loss arm is the first coordinate of the same
// joint draw, which makes degenerate weights exact ties.
inline DominanceReport penalty_experiment(const LossDistribution& marginal,
                                          const CopulaSpec& copula,
                                          const std::vector<double>& theta,
                                          const std::vector<double>& grid,
                                          std::uint64_t n_mc,
                                          const RngStream& stream,
                                          const ExperimentOptions& opt = {}) {
  detail::validate_simplex(theta);
  if (grid.empty()) throw std::invalid_argument("grid: empty");
  if (!marginal.super_pareto_capable() &&
      marginal.kind() != LossDistribution::Kind::empirical)
    throw std::invalid_argument(
        "penalty_experiment: marginal is not super-Pareto-capable or "
        "empirical");
  std::size_t d = theta.size();
  copula.check_dimension(d);
  std::uint64_t budget = copula.row_budget(d) + 1;  // one slot for an
                                                    // uncoupled reference arm
  std::vector<std::uint64_t> lhs_cnt(grid.size(), 0), rhs_cnt(grid.size(), 0);
  std::mutex merge_mutex;
  for_blocks(n_mc, kDefaultBlockSize, opt.threads,
             [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
               std::vector<std::uint64_t> l(grid.size(), 0), r(grid.size(), 0);
               std::vector<double> u(d);
               for (std::uint64_t i = b0; i < b1; ++i) {
                 copula.fill_row(stream, i * budget, u);
                 double sum = 0.0;
                 for (std::size_t j = 0; j < d; ++j)
                   sum += theta[j] * marginal.quantile(u[j]);
                 double ref =
                     opt.couple
                         ? marginal.quantile(u[0])
                         : marginal.quantile(stream.uniform(i * budget +
                                                            budget - 1));
                 for (std::size_t g = 0; g < grid.size(); ++g) {
                   if (sum > grid[g]) ++l[g];
                   if (ref > grid[g]) ++r[g];
                 }
               }
               std::lock_guard<std::mutex> lock(merge_mutex);
               for (std::size_t g = 0; g < grid.size(); ++g) {
                 lhs_cnt[g] += l[g];
                 rhs_cnt[g] += r[g];
               }
             });
  std::vector<double> analytic(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    analytic[g] = 1.0 - marginal.cdf(grid[g]);
  return detail::assemble_report(grid, lhs_cnt, rhs_cnt, n_mc, opt,
                                 &analytic);
}

struct VarComparisonRow {
  double p = 0.0;
  double lhs = 0.0;          // MC VaR of the diversified truncated sum
  double lhs_lo = 0.0, lhs_hi = 0.0;
  double rhs = 0.0;          // sum of weighted analytic truncated VaRs
  double gap = 0.0;
  bool in_valid_region = false;  // p < P(X <= min_i theta_i c_i), where
                                 // the truncated comparison is guaranteed
};

struct TruncatedPenaltyReport {
  DominanceReport dominance;
  std::vector<std::uint64_t> mismatches;  // per grid t; 0 expected below c
  std::vector<VarComparisonRow> var_rows;
  double c_bound = 0.0;        // min_i theta_i c_i
  double region_p_max = 0.0;   // P(X <= c_bound)
};

// Truncation experiment: under shared uniforms the indicator identity
// 1{sum theta_i (X_i ^ c_i) > t} == 1{sum theta_i X_i > t} is checked
// exactly for t below c = min_i theta_i c_i, and the VaR comparison rows
// report the diversified truncated sum against the weighted analytic VaRs.
// Levels outside (0, P(X<=c)) are computed but flagged out-of-region.
inline TruncatedPenaltyReport truncated_penalty_experiment(
    const LossDistribution& marginal, const CopulaSpec& copula,
    const std::vector<double>& theta, const std::vector<double>& caps,
    const std::vector<double>& grid, const std::vector<double>& p_grid,
    std::uint64_t n_mc, const RngStream& stream,
    const ExperimentOptions& opt = {}) {
  detail::validate_simplex(theta);
  if (caps.size() != theta.size())
    throw std::invalid_argument("caps: size mismatch with theta");
  double z = marginal.lower_bound();
  for (double c : caps)
    if (!(c >= z))
      throw std::invalid_argument("caps: threshold below the support");
  // zero-weight coordinates never enter either sum, so the usable bound is
  // the minimum of theta_i c_i over the positive weights
  double c_bound = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < caps.size(); ++j)
    if (theta[j] > 0.0) c_bound = std::min(c_bound, theta[j] * caps[j]);
  for (double t : grid)
    if (!(t > z && t <= c_bound))
      throw std::invalid_argument(
          "grid: thresholds must lie in (z_X, min_i theta_i c_i]");

  std::size_t d = theta.size();
  copula.check_dimension(d);
  std::uint64_t budget = copula.row_budget(d);

  std::vector<std::uint64_t> lhs_cnt(grid.size(), 0), rhs_cnt(grid.size(), 0),
      mism(grid.size(), 0);
  std::vector<double> truncated_sums(n_mc);
  std::mutex merge_mutex;
  for_blocks(n_mc, kDefaultBlockSize, opt.threads,
             [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
               std::vector<std::uint64_t> l(grid.size(), 0), r(grid.size(), 0),
                   m(grid.size(), 0);
               std::vector<double> u(d);
               for (std::uint64_t i = b0; i < b1; ++i) {
                 copula.fill_row(stream, i * budget, u);
                 double sum_full = 0.0, sum_trunc = 0.0;
                 double first = 0.0;
                 for (std::size_t j = 0; j < d; ++j) {
                   double x = marginal.quantile(u[j]);
                   if (j == 0) first = std::min(x, caps[0]);
                   sum_full += theta[j] * x;
                   sum_trunc += theta[j] * std::min(x, caps[j]);
                 }
                 truncated_sums[i] = sum_trunc;
                 for (std::size_t g = 0; g < grid.size(); ++g) {
                   bool a = sum_trunc > grid[g];
                   bool b = sum_full > grid[g];
                   if (a) ++l[g];
                   if (first > grid[g]) ++r[g];
                   if (a != b) ++m[g];
                 }
               }
               std::lock_guard<std::mutex> lock(merge_mutex);
               for (std::size_t g = 0; g < grid.size(); ++g) {
                 lhs_cnt[g] += l[g];
                 rhs_cnt[g] += r[g];
                 mism[g] += m[g];
               }
             });

  TruncatedPenaltyReport rep;
  rep.c_bound = c_bound;
  rep.region_p_max = marginal.cdf(c_bound);
  rep.mismatches = mism;
  std::vector<double> analytic(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    analytic[g] = 1.0 - marginal.cdf(grid[g]);
  rep.dominance = detail::assemble_report(grid, lhs_cnt, rhs_cnt, n_mc, opt,
                                          &analytic);

  std::sort(truncated_sums.begin(), truncated_sums.end());
  for (double p : p_grid) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("p_grid: levels must be in (0,1)");
    VarComparisonRow row;
    row.p = p;
    row.lhs = sorted_quantile(truncated_sums, p);
    Interval ci = quantile_order_stat_ci(truncated_sums, p, opt.ci_z);
    row.lhs_lo = ci.lo;
    row.lhs_hi = ci.hi;
    double rhs = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      rhs += theta[j] * std::min(marginal.quantile(p), caps[j]);
    row.rhs = rhs;
    row.gap = row.lhs - row.rhs;
    row.in_valid_region = p < rep.region_p_max;
    rep.var_rows.push_back(row);
  }
  return rep;
}

// -------- collective risk model --------

class CountLaw {
 public:
  enum class Kind { dirac, uniform_int, poisson };
  static CountLaw dirac(std::uint64_t m) {
    CountLaw c(Kind::dirac);
    c.a_ = m;
    return c;
  }
  static CountLaw uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    CountLaw c(Kind::uniform_int);
    c.a_ = lo;
    c.b_ = hi;
    return c;
  }
  static CountLaw poisson(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("poisson: lambda < 0");
    CountLaw c(Kind::poisson);
    c.lambda_ = lambda;
    return c;
  }
  Kind kind() const { return kind_; }
  std::uint64_t lo() const { return a_; }
  std::uint64_t hi() const { return b_; }
  double lambda() const { return lambda_; }

  std::uint64_t draw(double u) const {
    switch (kind_) {
      case Kind::dirac:
        return a_;
      case Kind::uniform_int:
        return a_ + std::min<std::uint64_t>(
                        b_ - a_, static_cast<std::uint64_t>(
                                     u * static_cast<double>(b_ - a_ + 1)));
      case Kind::poisson: {
        // inverse CDF scan; adequate for the moderate intensities used here
        double p = std::exp(-lambda_), cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && k < 100000) {
          ++k;
          p *= lambda_ / static_cast<double>(k);
          cdf += p;
        }
        return k;
      }
    }
    return 0;
  }
  bool can_exceed_one() const {
    switch (kind_) {
      case Kind::dirac: return a_ >= 2;
      case Kind::uniform_int: return b_ >= 2;
      case Kind::poisson: return lambda_ > 0.0;
    }
    return false;
  }

 private:
  explicit CountLaw(Kind k) : kind_(k) {}
  Kind kind_;
  std::uint64_t a_ = 0, b_ = 0;
  double lambda_ = 0.0;
};

class WeightLaw {
 public:
  enum class Kind { dirac, uniform };
  static WeightLaw dirac(double w) {
    if (!(w > 0.0)) throw std::invalid_argument("WeightLaw: w must be > 0");
    WeightLaw l(Kind::dirac);
    l.a_ = w;
    return l;
  }
  static WeightLaw uniform(double lo, double hi) {
    if (!(0.0 < lo && lo <= hi))
      throw std::invalid_argument("WeightLaw: need 0 < lo <= hi");
    WeightLaw l(Kind::uniform);
    l.a_ = lo;
    l.b_ = hi;
    return l;
  }
  Kind kind() const { return kind_; }
  double lo() const { return a_; }
  double hi() const { return b_; }
  double draw(double u) const {
    return kind_ == Kind::dirac ? a_ : a_ + (b_ - a_) * u;
  }

 private:
  explicit WeightLaw(Kind k) : kind_(k) {}
  Kind kind_;
  double a_ = 0.0, b_ = 0.0;
};

struct CollectiveReport {
  DominanceReport average_form;   // X 1{N>=1}  vs  (sum W_i X_i)/(sum W_i)
  DominanceReport weighted_form;  // (sum W_i) X  vs  sum W_i X_i
  bool strictness_expected = false;  // P(N >= 2) > 0
};

// Randomly counted portfolios: both stochastic comparisons of the collective
// model, sharing N and the weights between the two arms of each comparison.
inline CollectiveReport collective_risk_experiment(
    const LossDistribution& marginal, const WeightLaw& weight_law,
    const CountLaw& count_law, const std::vector<double>& grid_avg,
    const std::vector<double>& grid_wsum, std::uint64_t n_mc,
    const RngStream& stream, const ExperimentOptions& opt = {}) {
  if (grid_avg.empty() || grid_wsum.empty())
    throw std::invalid_argument("collective_risk_experiment: empty grid");
  std::vector<std::uint64_t> al(grid_avg.size(), 0), ar(grid_avg.size(), 0);
  std::vector<std::uint64_t> wl(grid_wsum.size(), 0), wr(grid_wsum.size(), 0);
  std::mutex merge_mutex;
  for_blocks(
      n_mc, kDefaultBlockSize, opt.threads,
      [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
        std::vector<std::uint64_t> l1(grid_avg.size(), 0),
            r1(grid_avg.size(), 0), l2(grid_wsum.size(), 0),
            r2(grid_wsum.size(), 0);
        for (std::uint64_t i = b0; i < b1; ++i) {
          RngStream sub = stream.substream(i);
          std::uint64_t n_claims = count_law.draw(sub.uniform(0));
          double solo = marginal.quantile(sub.uniform(1));
          double wsum = 0.0, wxsum = 0.0;
          for (std::uint64_t c = 0; c < n_claims; ++c) {
            double w = weight_law.draw(sub.uniform(2 + 2 * c));
            double x = marginal.quantile(sub.uniform(3 + 2 * c));
            wsum += w;
            wxsum += w * x;
          }
          double avg_rhs = n_claims >= 1 ? wxsum / wsum : 0.0;
          double avg_lhs = n_claims >= 1 ? solo : 0.0;
          double sum_rhs = wxsum;
          double sum_lhs = wsum * solo;
          for (std::size_t g = 0; g < grid_avg.size(); ++g) {
            if (avg_rhs > grid_avg[g]) ++l1[g];
            if (avg_lhs > grid_avg[g]) ++r1[g];
          }
          for (std::size_t g = 0; g < grid_wsum.size(); ++g) {
            if (sum_rhs > grid_wsum[g]) ++l2[g];
            if (sum_lhs > grid_wsum[g]) ++r2[g];
          }
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        for (std::size_t g = 0; g < grid_avg.size(); ++g) {
          al[g] += l1[g];
          ar[g] += r1[g];
        }
        for (std::size_t g = 0; g < grid_wsum.size(); ++g) {
          wl[g] += l2[g];
          wr[g] += r2[g];
        }
      });
  CollectiveReport rep;
  ExperimentOptions o = opt;
  o.couple = false;  // arms share N and W but not the loss uniforms
  rep.average_form = detail::assemble_report(grid_avg, al, ar, n_mc, o);
  rep.weighted_form = detail::assemble_report(grid_wsum, wl, wr, n_mc, o);
  rep.strictness_expected = count_law.can_exceed_one();
  return rep;
}

// -------- empirical two-sample comparison --------

struct EmpiricalFsdRow {
  double t = 0.0;
  double f_a = 0.0, f_b = 0.0;
  double diff = 0.0;  // F_a - F_b; nonnegative under a <=_st b
};

struct EmpiricalFsdReport {
  std::vector<EmpiricalFsdRow> rows;
  double first_violation_t = std::numeric_limits<double>::quiet_NaN();
  double max_violation = 0.0;  // max (F_b - F_a)_+
  bool dominance_holds_everywhere = true;
};

inline EmpiricalFsdReport empirical_fsd(const std::vector<double>& sample_a,
                                        const std::vector<double>& sample_b,
                                        std::vector<double> grid = {}) {
  if (sample_a.empty() || sample_b.empty())
    throw std::invalid_argument("empirical_fsd: empty sample");
  std::vector<double> a(sample_a), b(sample_b);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (grid.empty()) {
    grid.reserve(a.size() + b.size());
    grid.insert(grid.end(), a.begin(), a.end());
    grid.insert(grid.end(), b.begin(), b.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  } else {
    std::sort(grid.begin(), grid.end());
  }
  auto ecdf = [](const std::vector<double>& s, double t) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), t) -
                               s.begin()) /
           static_cast<double>(s.size());
  };
  EmpiricalFsdReport rep;
  rep.rows.reserve(grid.size());
  for (double t : grid) {
    EmpiricalFsdRow row;
    row.t = t;
    row.f_a = ecdf(a, t);
    row.f_b = ecdf(b, t);
    row.diff = row.f_a - row.f_b;
    if (row.diff < 0.0) {
      rep.max_violation = std::max(rep.max_violation, -row.diff);
      if (rep.dominance_holds_everywhere) {
        rep.dominance_holds_everywhere = false;
        rep.first_violation_t = t;
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

struct DominanceTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::uint64_t n_boot = 0;
};

// One-sided test of H0: sample_a <=_st sample_b, i.e. F_b <= F_a pointwise.
// Statistic sup_t sqrt(nm/(n+m)) (F_b(t) - F_a(t))_+ with a pooled-sample
// bootstrap null.
inline DominanceTestResult one_sided_dominance_test(
    const std::vector<double>& sample_a, const std::vector<double>& sample_b,
    std::uint64_t n_boot, const RngStream& stream) {
  if (n_boot < 100)
    throw std::invalid_argument("one_sided_dominance_test: n_boot < 100");
  if (sample_a.empty() || sample_b.empty())
    throw std::invalid_argument("one_sided_dominance_test: empty sample");
  std::size_t n = sample_a.size(), m = sample_b.size();
  std::size_t total = n + m;
  // pooled sorted values with origin labels for the observed statistic
  std::vector<std::pair<double, int>> tagged;
  tagged.reserve(total);
  for (double v : sample_a) tagged.emplace_back(v, 0);
  for (double v : sample_b) tagged.emplace_back(v, 1);
  std::sort(tagged.begin(), tagged.end());
  // ECDFs may only be compared at whole values; mark the last slot of each
  // tie block
  std::vector<char> at_value(total, 0);
  for (std::size_t r = 0; r < total; ++r)
    at_value[r] = (r + 1 == total || tagged[r + 1].first != tagged[r].first);
  double scale = std::sqrt(static_cast<double>(n) * static_cast<double>(m) /
                           static_cast<double>(total));

  double best = 0.0;
  {
    std::uint64_t ca = 0, cb = 0;
    for (std::size_t r = 0; r < total; ++r) {
      (tagged[r].second == 0) ? ++ca : ++cb;
      if (!at_value[r]) continue;
      double diff = static_cast<double>(cb) / static_cast<double>(m) -
                    static_cast<double>(ca) / static_cast<double>(n);
      best = std::max(best, diff);
    }
  }
  DominanceTestResult res;
  res.n_boot = n_boot;
  res.statistic = scale * best;

  // pooled bootstrap: draws are ranks into the pooled sorted sample
  std::uint64_t exceed = 0;
  std::vector<std::uint32_t> cnt_a(total), cnt_b(total);
  for (std::uint64_t bi = 0; bi < n_boot; ++bi) {
    RngStream sub = stream.substream(bi);
    std::fill(cnt_a.begin(), cnt_a.end(), 0);
    std::fill(cnt_b.begin(), cnt_b.end(), 0);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto r = static_cast<std::size_t>(sub.uniform(c++) *
                                        static_cast<double>(total));
      ++cnt_a[std::min(r, total - 1)];
    }
    for (std::size_t j = 0; j < m; ++j) {
      auto r = static_cast<std::size_t>(sub.uniform(c++) *
                                        static_cast<double>(total));
      ++cnt_b[std::min(r, total - 1)];
    }
    double boot_best = 0.0;
    std::uint64_t acc_a = 0, acc_b = 0;
    for (std::size_t r = 0; r < total; ++r) {
      acc_a += cnt_a[r];
      acc_b += cnt_b[r];
      if (!at_value[r]) continue;
      double diff = static_cast<double>(acc_b) / static_cast<double>(m) -
                    static_cast<double>(acc_a) / static_cast<double>(n);
      boot_best = std::max(boot_best, diff);
    }
    if (scale * boot_best >= res.statistic) ++exceed;
  }
  res.p_value = (1.0 + static_cast<double>(exceed)) /
                (1.0 + static_cast<double>(n_boot));
  return res;
}

}  // namespace supertail
