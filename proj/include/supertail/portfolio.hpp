#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "supertail/copulas.hpp"
#include "supertail/distributions.hpp"
#include "supertail/dominance.hpp"
#include "supertail/risk_measures.hpp"
#include "supertail/rng.hpp"
#include "supertail/stats.hpp"

namespace supertail {

// Compensation as a function of total exposure; piecewise linear, anchored
// at its value at zero.
class CompensationFn {
 public:
  static CompensationFn zero() { return CompensationFn(0.0, {}, {0.0}); }
  static CompensationFn linear(double rate) {
    return CompensationFn(0.0, {}, {rate});
  }
  CompensationFn(double value_at_zero, std::vector<double> knots,
                 std::vector<double> slopes)
      : v0_(value_at_zero), knots_(std::move(knots)), slopes_(std::move(slopes)) {
    if (slopes_.size() != knots_.size() + 1)
      throw std::invalid_argument("CompensationFn: slope count mismatch");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
      if (!(knots_[i] < knots_[i + 1]))
        throw std::invalid_argument("CompensationFn: knots not increasing");
    for (double k : knots_)
      if (!(k > 0.0))
        throw std::invalid_argument("CompensationFn: knots must be positive");
  }
  double operator()(double w) const {
    if (w < 0.0) throw std::invalid_argument("CompensationFn: w < 0");
    double v = v0_, prev = 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (w <= knots_[i]) return v + slopes_[i] * (w - prev);
      v += slopes_[i] * (knots_[i] - prev);
      prev = knots_[i];
    }
    return v + slopes_.back() * (w - prev);
  }
  double value_at_zero() const { return v0_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& slopes() const { return slopes_; }

 private:
  double v0_;
  std::vector<double> knots_;
  std::vector<double> slopes_;
};

struct PositionProblem {
  LossDistribution marginal;
  CopulaSpec copula;
  std::size_t n_assets = 2;
  RiskMeasureSpec rho;
  CompensationFn g = CompensationFn::zero();
  // FixedTotal: ||w|| = total; Free: w ranges over the nonnegative orthant.
  enum class Constraint { fixed_total, free } constraint = Constraint::free;
  double total = 1.0;  // for fixed_total

  void validate() const {
    if (n_assets == 0)
      throw std::invalid_argument("PositionProblem: n_assets must be >= 1");
    if (constraint == Constraint::fixed_total && !(total > 0.0))
      throw std::invalid_argument("PositionProblem: total must be > 0");
    copula.check_dimension(n_assets);
  }
};

// rho(w . X - g(||w||)) by Monte Carlo; ES on an infinite-mean portfolio
// short-circuits to the infinity sentinel.
inline ExtReal evaluate_position(const PositionProblem& problem,
                                 const std::vector<double>& w, std::size_t n_mc,
                                 const RngStream& stream,
                                 unsigned threads = 1) {
  problem.validate();
  if (w.size() != problem.n_assets)
    throw std::invalid_argument("evaluate_position: w size mismatch");
  double norm = 0.0;
  for (double wi : w) {
    if (wi < 0.0)
      throw std::invalid_argument("evaluate_position: negative exposure");
    norm += wi;
  }
  double comp = problem.g(norm);
  if (norm == 0.0) {
    // degenerate portfolio: constant loss -g(0)
    return evaluate_sample(problem.rho, std::vector<double>{-comp, -comp});
  }
  if (problem.rho.kind() == RiskMeasureSpec::Kind::es &&
      problem.marginal.infinite_mean())
    return ExtReal::infinity();

  std::size_t d = problem.n_assets;
  std::uint64_t budget = problem.copula.row_budget(d);
  std::vector<double> losses(n_mc);
  for_blocks(n_mc, kDefaultBlockSize, threads,
             [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
               std::vector<double> u(d);
               for (std::uint64_t i = b0; i < b1; ++i) {
                 problem.copula.fill_row(stream, i * budget, u);
                 double s = 0.0;
                 for (std::size_t j = 0; j < d; ++j)
                   if (w[j] > 0.0) s += w[j] * problem.marginal.quantile(u[j]);
                 losses[i] = s - comp;
               }
             });
  return evaluate_sample(problem.rho, std::move(losses));
}

struct OptimizeCertificate {
  std::string reduction;  // how the search space was cut down
  std::string route;      // "analytic" or "monte_carlo"
  bool ties = false;      // all concentrated positions equivalent
  bool unbounded_below = false;
  std::string message;
};

struct OptimizeResult {
  std::vector<double> w;
  ExtReal value = 0.0;
  OptimizeCertificate certificate;
};

// Optimal position search. Mild monotonicity reduces the feasible set to
// concentrated positions w e_i; identical marginals make all coordinates
// equivalent, so ties break to the lowest index. The free problem is a 1-D
// search in the total exposure; an objective still decreasing at w_max is
// reported as unbounded rather than clipped.
inline OptimizeResult optimize_position(const PositionProblem& problem,
                                        std::size_t n_mc,
                                        const RngStream& stream,
                                        double w_max = 1e3,
                                        unsigned threads = 1) {
  problem.validate();
  if (!problem.rho.mildly_monotone())
    throw std::invalid_argument(
        "optimize_position: risk measure is not mildly monotone");
  OptimizeResult res;
  res.certificate.reduction =
      "mild monotonicity: minimizers are concentrated positions w*e_i; "
      "ties broken by lowest asset index";
  if (problem.copula.kind() == CopulaSpec::Kind::comonotone) {
    res.certificate.ties = true;
    res.certificate.message =
        "comonotone coupling collapses every fixed-norm position to the "
        "same objective";
  }

  bool analytic = problem.rho.positively_homogeneous();
  double rho_x = 0.0;
  if (analytic) {
    ExtReal r = evaluate(problem.rho, problem.marginal);
    if (!r.is_finite()) {
      analytic = false;
    } else {
      rho_x = r.value();
    }
  }
  auto concentrated_value = [&](double total) -> ExtReal {
    if (analytic) return total * rho_x - problem.g(total);
    std::vector<double> w(problem.n_assets, 0.0);
    w[0] = total;
    return evaluate_position(problem, w, n_mc, stream, threads);
  };
  res.certificate.route = analytic ? "analytic" : "monte_carlo";

  if (problem.constraint == PositionProblem::Constraint::fixed_total) {
    res.w.assign(problem.n_assets, 0.0);
    res.w[0] = problem.total;
    res.value = concentrated_value(problem.total);
    return res;
  }

  // Free problem: coarse grid bracket, then golden-section refinement.
  const std::size_t grid_n = 1024;
  std::vector<double> vals(grid_n + 1);
  std::size_t best = 0;
  for (std::size_t i = 0; i <= grid_n; ++i) {
    double wtot = w_max * static_cast<double>(i) / static_cast<double>(grid_n);
    ExtReal v = concentrated_value(wtot);
    vals[i] = v.is_finite() ? v.value()
                            : std::numeric_limits<double>::infinity();
    if (vals[i] < vals[best]) best = i;
  }
  if (best == grid_n && vals[grid_n] < vals[grid_n - 1]) {
    res.certificate.unbounded_below = true;
    res.certificate.message =
        "objective still decreasing at w_max; problem unbounded below on "
        "the searched range";
    res.w.assign(problem.n_assets, 0.0);
    res.w[0] = w_max;
    res.value = vals[grid_n];
    return res;
  }
  double lo = best == 0 ? 0.0
                        : w_max * static_cast<double>(best - 1) /
                              static_cast<double>(grid_n);
  double hi = best == grid_n
                  ? w_max
                  : w_max * static_cast<double>(best + 1) /
                        static_cast<double>(grid_n);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = concentrated_value(x1).value();
  double f2 = concentrated_value(x2).value();
  for (int it = 0; it < 80 && (b - a) > 1e-10 * (1.0 + b); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = concentrated_value(x1).value();
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = concentrated_value(x2).value();
    }
  }
  double w_star = 0.5 * (a + b);
  ExtReal v_star = concentrated_value(w_star);
  // keep the exact endpoint when it wins (e.g. w*=0 for positive rho, g=0)
  for (double cand : {0.0, lo, hi}) {
    ExtReal v = concentrated_value(cand);
    if (v.value() <= v_star.value()) {
      w_star = cand;
      v_star = v;
    }
  }
  res.w.assign(problem.n_assets, 0.0);
  res.w[0] = w_star;
  res.value = v_star;
  return res;
}

struct SuperadditivityRow {
  double p = 0.0;
  double var_sum = 0.0;  // MC VaR of the weighted sum
  double var_sum_lo = 0.0, var_sum_hi = 0.0;
  double sum_var = 0.0;  // weighted sum of per-loss analytic VaRs
  double gap = 0.0;
};

struct SuperadditivityReport {
  std::vector<SuperadditivityRow> rows;
  bool gap_monotone = true;  // diagnostic: gap nondecreasing in p
  bool heterogeneous = false;
  std::string note;
};

// VaR of an independent weighted sum against the weighted sum of marginal
// VaRs over a grid of levels. Heterogeneous marginals are reported as
// empirical evidence only; no dominance claim is attached.
inline SuperadditivityReport var_superadditivity_report(
    const std::vector<LossDistribution>& losses,
    const std::vector<double>& theta, const std::vector<double>& p_grid,
    std::uint64_t n_mc, const RngStream& stream,
    const ExperimentOptions& opt = {}) {
  if (losses.empty() || losses.size() != theta.size())
    throw std::invalid_argument(
        "var_superadditivity_report: losses/theta size mismatch");
  detail::validate_simplex(theta);
  std::size_t d = losses.size();
  std::vector<double> sums(n_mc);
  for_blocks(n_mc, kDefaultBlockSize, opt.threads,
             [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
               for (std::uint64_t i = b0; i < b1; ++i) {
                 double s = 0.0;
                 for (std::size_t j = 0; j < d; ++j)
                   s += theta[j] * losses[j].quantile(stream.uniform(i * d + j));
                 sums[i] = s;
               }
             });
  std::sort(sums.begin(), sums.end());
  SuperadditivityReport rep;
  {
    bool same = true;
    for (std::size_t j = 1; j < d && same; ++j)
      for (double p : {0.25, 0.5, 0.9})
        if (std::abs(losses[j].quantile(p) - losses[0].quantile(p)) >
            1e-12 * (1.0 + std::abs(losses[0].quantile(p))))
          same = false;
    rep.heterogeneous = !same;
  }
  if (rep.heterogeneous)
    rep.note =
        "empirical only: heterogeneous marginals carry no dominance "
        "guarantee";
  double prev_gap = -std::numeric_limits<double>::infinity();
  for (double p : p_grid) {
    SuperadditivityRow row;
    row.p = p;
    row.var_sum = sorted_quantile(sums, p);
    Interval ci = quantile_order_stat_ci(sums, p, opt.ci_z);
    row.var_sum_lo = ci.lo;
    row.var_sum_hi = ci.hi;
    double rhs = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      rhs += theta[j] * losses[j].quantile(p);
    row.sum_var = rhs;
    row.gap = row.var_sum - row.sum_var;
    if (row.gap < prev_gap) rep.gap_monotone = false;
    prev_gap = row.gap;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace supertail
