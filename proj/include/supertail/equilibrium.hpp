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
#include "supertail/risk_measures.hpp"
#include "supertail/rng.hpp"
#include "supertail/stats.hpp"

namespace supertail {

// Numerical failure distinct from input validation; the CLI maps these to a
// separate exit code.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Convex cost of deviating from the initial total exposure: c(0) = 0,
// nonnegative, with computable one-sided derivatives everywhere.
class CostFunction {
 public:
  enum class Kind { zero, linear, quadratic, excess_only, piecewise };

  static CostFunction zero() { return CostFunction(Kind::zero, 0.0); }
  static CostFunction linear(double lambda) {
    check_lambda(lambda);
    return CostFunction(Kind::linear, lambda);
  }
  static CostFunction quadratic(double lambda) {
    check_lambda(lambda);
    return CostFunction(Kind::quadratic, lambda);
  }
  static CostFunction excess_only(double lambda) {
    check_lambda(lambda);
    return CostFunction(Kind::excess_only, lambda);
  }
  // Piecewise form given by a continuous nondecreasing derivative table;
  // the cost integrates the derivative from 0 (piecewise quadratic, exact).
  static CostFunction piecewise(std::vector<double> xs,
                                std::vector<double> ds) {
    if (xs.size() != ds.size() || xs.size() < 2)
      throw std::invalid_argument("CostFunction: need >= 2 derivative nodes");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (!(xs[i] < xs[i + 1]))
        throw std::invalid_argument("CostFunction: nodes not increasing");
      if (ds[i] > ds[i + 1])
        throw std::invalid_argument(
            "CostFunction: derivative must be nondecreasing (convexity)");
    }
    CostFunction c(Kind::piecewise, 0.0);
    c.xs_ = std::move(xs);
    c.ds_ = std::move(ds);
    // nonnegativity with c(0)=0 and a continuous derivative forces the
    // minimum to sit at 0
    if (std::abs(c.deriv_at(0.0)) > 1e-12)
      throw std::invalid_argument(
          "CostFunction: piecewise derivative must vanish at 0");
    return c;
  }

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& nodes_x() const { return xs_; }
  const std::vector<double>& nodes_d() const { return ds_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::zero: return 0.0;
      case Kind::linear: return lambda_ * std::abs(x);
      case Kind::quadratic: return lambda_ * x * x;
      case Kind::excess_only: return lambda_ * std::max(x, 0.0);
      case Kind::piecewise: return integrate_derivative(x);
    }
    return 0.0;
  }

  double d_left(double x) const {
    switch (kind_) {
      case Kind::zero: return 0.0;
      case Kind::linear: return x > 0.0 ? lambda_ : -lambda_;
      case Kind::quadratic: return 2.0 * lambda_ * x;
      case Kind::excess_only: return x > 0.0 ? lambda_ : 0.0;
      case Kind::piecewise: return deriv_at(x);
    }
    return 0.0;
  }
  double d_right(double x) const {
    switch (kind_) {
      case Kind::zero: return 0.0;
      case Kind::linear: return x >= 0.0 ? lambda_ : -lambda_;
      case Kind::quadratic: return 2.0 * lambda_ * x;
      case Kind::excess_only: return x >= 0.0 ? lambda_ : 0.0;
      case Kind::piecewise: return deriv_at(x);
    }
    return 0.0;
  }

  // Strict convexity probe: derivative strictly increasing on a grid.
  bool strictly_convex_on(double lo, double hi, std::size_t grid = 128) const {
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= grid; ++i) {
      double x = lo + (hi - lo) * static_cast<double>(i) /
                          static_cast<double>(grid);
      double d = deriv_mid(x);
      if (i > 0 && !(d > prev)) return false;
      prev = d;
    }
    return true;
  }

 private:
  CostFunction(Kind k, double l) : kind_(k), lambda_(l) {}
  static void check_lambda(double l) {
    if (!(l > 0.0))
      throw std::invalid_argument("CostFunction: lambda must be > 0");
  }
  double deriv_mid(double x) const { return 0.5 * (d_left(x) + d_right(x)); }
  double deriv_at(double x) const {
    // continuous linear interpolation of the node table, flat beyond ends
    if (x <= xs_.front()) return ds_.front();
    if (x >= xs_.back()) return ds_.back();
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return ds_[i] + w * (ds_[i + 1] - ds_[i]);
  }
  double integrate_derivative(double x) const {
    // exact integral of the piecewise-linear derivative from 0 to x
    double a = std::min(0.0, x), b = std::max(0.0, x);
    double sign = x >= 0.0 ? 1.0 : -1.0;
    double acc = 0.0;
    std::vector<double> cuts{a, b};
    for (double c : xs_)
      if (c > a && c < b) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double lo = cuts[i], hi = cuts[i + 1];
      acc += 0.5 * (deriv_at(lo) + deriv_at(hi)) * (hi - lo);
    }
    return sign * acc;
  }

  Kind kind_;
  double lambda_;
  std::vector<double> xs_, ds_;
};

struct InternalMarketSpec {
  std::vector<double> exposures;            // a_i > 0
  std::vector<double> risk_values;          // rho_i(X), resolved scalars
  std::vector<CostFunction> costs;
  bool positively_homogeneous = true;  // the distortion-type setting

  std::size_t size() const { return exposures.size(); }
  void validate() const {
    if (exposures.size() < 2)
      throw std::invalid_argument("InternalMarketSpec: need >= 2 agents");
    if (risk_values.size() != exposures.size() ||
        costs.size() != exposures.size())
      throw std::invalid_argument("InternalMarketSpec: size mismatch");
    for (double a : exposures)
      if (!(a > 0.0))
        throw std::invalid_argument(
            "InternalMarketSpec: exposures must be positive");
  }
};

inline double resolve_risk_value(const RiskMeasureSpec& rho,
                                 const LossDistribution& marginal) {
  ExtReal r = evaluate(rho, marginal);
  if (!r.is_finite())
    throw std::invalid_argument(
        "risk value is not finite on this loss model; pricing requires a "
        "finite per-unit assessment (VaR or RVaR remain finite on "
        "infinite-mean losses)");
  return r.value();
}

// Sufficient price interval for the stay-put equilibrium: the intersection
// over agents of [rho_i + c'_{i-}(0), rho_i + c'_{i+}(0)], within [0, inf).
// Any price inside it supports the identity allocation; an empty interval
// means this sufficient condition certifies nothing.
inline Interval internal_equilibrium_price_interval(
    const InternalMarketSpec& spec) {
  spec.validate();
  if (!spec.positively_homogeneous)
    throw std::invalid_argument(
        "internal_equilibrium_price_interval: requires the positively "
        "homogeneous (distortion) setting");
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    lo = std::max(lo, spec.risk_values[i] + spec.costs[i].d_left(0.0));
    hi = std::min(hi, spec.risk_values[i] + spec.costs[i].d_right(0.0));
  }
  return {lo, hi};  // empty() when lo > hi
}

struct InternalValidation {
  bool price_constant = false;
  bool allocation_is_permutation = false;
  bool necessary_condition = false;  // one-sided derivative band per agent
  bool clearance = false;
  bool all_pass() const {
    return price_constant && allocation_is_permutation &&
           necessary_condition && clearance;
  }
};

// Diagnostic checks of a proposed internal equilibrium: constant prices, a
// permutation allocation, the derivative band on p - rho_i, and clearance.
inline InternalValidation validate_internal_equilibrium(
    const InternalMarketSpec& spec, const std::vector<double>& price,
    const std::vector<std::vector<double>>& allocation, double tol = 1e-9) {
  spec.validate();
  std::size_t n = spec.size();
  InternalValidation v;
  if (price.size() != n || allocation.size() != n) return v;

  v.price_constant = true;
  for (double p : price)
    if (std::abs(p - price[0]) > tol * (1.0 + std::abs(price[0])))
      v.price_constant = false;
  double p = price.empty() ? 0.0 : price[0];

  // each agent holds exactly one position a_j e_j; the j's cover [n]
  std::vector<int> taken(n, 0);
  v.allocation_is_permutation = true;
  for (std::size_t i = 0; i < n && v.allocation_is_permutation; ++i) {
    if (allocation[i].size() != n) {
      v.allocation_is_permutation = false;
      break;
    }
    int nonzero = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(allocation[i][j]) > tol) {
        if (nonzero >= 0) {
          nonzero = -2;
          break;
        }
        nonzero = static_cast<int>(j);
      }
    }
    if (nonzero < 0 ||
        std::abs(allocation[i][static_cast<std::size_t>(nonzero)] -
                 spec.exposures[static_cast<std::size_t>(nonzero)]) >
            tol * (1.0 + spec.exposures[static_cast<std::size_t>(nonzero)])) {
      v.allocation_is_permutation = false;
      break;
    }
    if (++taken[static_cast<std::size_t>(nonzero)] > 1)
      v.allocation_is_permutation = false;
  }

  v.necessary_condition = true;
  for (std::size_t i = 0; i < n; ++i) {
    double max_right = -std::numeric_limits<double>::infinity();
    double min_left = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      double delta = spec.exposures[j] - spec.exposures[i];
      max_right = std::max(max_right, spec.costs[i].d_right(delta));
      min_left = std::min(min_left, spec.costs[i].d_left(delta));
    }
    double excess = p - spec.risk_values[i];
    double band = tol * (1.0 + std::abs(p));
    if (!(excess <= max_right + band && excess >= min_left - band))
      v.necessary_condition = false;
  }

  v.clearance = true;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += allocation[i][j];
    if (std::abs(col - spec.exposures[j]) >
        tol * (1.0 + spec.exposures[j]))
      v.clearance = false;
  }
  return v;
}

// -------- external-transfer market --------

struct ExternalMarketSpec {
  std::size_t n = 2;   // internal agents
  std::size_t k = 1;   // externals per internal agent (m = k n)
  double a = 1.0;      // common initial exposure
  double rho_internal = 0.0;
  double rho_external = 0.0;
  CostFunction cost_internal = CostFunction::quadratic(1.0);
  CostFunction cost_external = CostFunction::quadratic(1.0);

  void validate() const {
    if (n < 2) throw std::invalid_argument("ExternalMarketSpec: n >= 2");
    if (k < 1) throw std::invalid_argument("ExternalMarketSpec: k >= 1");
    if (!(a > 0.0)) throw std::invalid_argument("ExternalMarketSpec: a > 0");
    double span = 2.0 * a;
    if (!cost_internal.strictly_convex_on(-span, span) ||
        !cost_external.strictly_convex_on(-span, span))
      throw std::invalid_argument(
          "ExternalMarketSpec: costs must be strictly convex");
  }
  // marginal cost-plus-risk curves
  double L_E(double b) const {
    return cost_external.d_right(b) + rho_external;
  }
  double L_I(double b) const { return cost_internal.d_right(b) + rho_internal; }
  double L_I_left0() const { return cost_internal.d_left(0.0) + rho_internal; }
  double L_I_right0() const {
    return cost_internal.d_right(0.0) + rho_internal;
  }
};

enum class EquilibriumCase {
  transfer_all,
  partial_share,
  no_trade,
  internal_exchange
};

inline const char* case_name(EquilibriumCase c) {
  switch (c) {
    case EquilibriumCase::transfer_all: return "transfer_all";
    case EquilibriumCase::partial_share: return "partial_share";
    case EquilibriumCase::no_trade: return "no_trade";
    case EquilibriumCase::internal_exchange: return "internal_exchange";
  }
  return "?";
}

struct EquilibriumResult {
  std::vector<double> price;  // constant price vector, one entry per loss
  std::vector<std::vector<double>> internal_alloc;
  std::vector<std::vector<double>> external_alloc;
  EquilibriumCase tag = EquilibriumCase::no_trade;
  double u_star = 0.0;  // per-external exposure
  double w_star = 0.0;  // per-internal retained exposure
  double clearance_residual = 0.0;
  Interval price_interval{0.0, 0.0};  // nondegenerate only for no_trade
  double bisection_residual = 0.0;
  bool externals_split_each_loss = false;  // u* < a/(2k) structural note
  std::string note;
};

// Dispatches the three-case characterization of the external-transfer
// market and returns one canonical equilibrium (identity assignment of
// agents to losses). Clearance w* + k u* = a holds by construction.
inline EquilibriumResult external_equilibrium(const ExternalMarketSpec& spec,
                                              double tol_scale = 1e-10) {
  spec.validate();
  double a = spec.a;
  double k = static_cast<double>(spec.k);
  double le_full = spec.L_E(a / k);
  double li_neg_a = spec.L_I(-a);
  double le0 = spec.L_E(0.0);
  double li0_left = spec.L_I_left0();

  EquilibriumResult res;
  bool case_i = le_full < li_neg_a;
  bool case_iii = le0 >= li0_left;
  bool case_ii = !case_i && !case_iii;
  if (case_i + case_iii + case_ii != 1)
    throw numeric_error("external_equilibrium: case predicates overlap");

  double p = 0.0, u = 0.0, w = 0.0;
  if (case_i) {
    res.tag = EquilibriumCase::transfer_all;
    u = a / k;
    w = 0.0;
    p = le_full;
  } else if (case_iii) {
    res.tag = EquilibriumCase::no_trade;
    u = 0.0;
    w = a;
    res.price_interval = {li0_left,
                          std::min(le0, spec.L_I_right0())};
    p = res.price_interval.center();
  } else {
    res.tag = EquilibriumCase::partial_share;
    auto g = [&](double uu) { return spec.L_E(uu) - spec.L_I(-k * uu); };
    double lo = 0.0, hi = a / k;
    double glo = le0 - li0_left;  // limit from the right at 0
    double ghi = g(hi);
    if (!(glo < 0.0) || !(ghi >= 0.0))
      throw numeric_error(
          "external_equilibrium: bisection sign condition violated");
    for (int it = 0; it < 200 && (hi - lo) > 0.0; ++it) {
      double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0) ? lo = mid : hi = mid;
    }
    u = hi;
    p = spec.L_E(u);
    w = a - k * u;
    res.bisection_residual = std::abs(spec.L_E(u) - spec.L_I(-k * u));
    double tol = tol_scale * (1.0 + std::abs(p));
    if (res.bisection_residual > tol)
      throw numeric_error("external_equilibrium: bisection residual too big");
    res.externals_split_each_loss = u < a / (2.0 * k);
    if (res.externals_split_each_loss)
      res.note =
          "u* < a/(2k): each loss is shared by one internal and k external "
          "agents in every equilibrium";
  }
  res.u_star = u;
  res.w_star = w;
  res.price.assign(spec.n, p);
  res.internal_alloc.assign(spec.n, std::vector<double>(spec.n, 0.0));
  for (std::size_t i = 0; i < spec.n; ++i) res.internal_alloc[i][i] = w;
  res.external_alloc.assign(spec.k * spec.n,
                            std::vector<double>(spec.n, 0.0));
  for (std::size_t j = 0; j < spec.k * spec.n; ++j)
    res.external_alloc[j][j / spec.k] = u;
  // per-loss clearance of the returned assignment
  double worst = 0.0;
  for (std::size_t s = 0; s < spec.n; ++s) {
    double col = 0.0;
    for (const auto& wi : res.internal_alloc) col += wi[s];
    for (const auto& uj : res.external_alloc) col += uj[s];
    worst = std::max(worst, std::abs(col - a));
  }
  res.clearance_residual = worst;
  if (res.clearance_residual > 1e-10 * (1.0 + a))
    throw numeric_error("external_equilibrium: clearance violated");
  return res;
}

// Closed-form quadratic-cost benchmark for the partial-share case.
struct QuadraticEquilibrium {
  double p, u, w;
};
inline QuadraticEquilibrium quadratic_external_equilibrium(
    double lambda_i, double lambda_e, std::size_t k, double rho_i,
    double rho_e, double a) {
  double kk = static_cast<double>(k);
  double denom = kk * lambda_i + lambda_e;
  QuadraticEquilibrium q;
  q.p = (kk * lambda_i * rho_e + lambda_e * rho_i) / denom;
  q.u = (rho_i - rho_e) / (2.0 * denom);
  q.w = kk * (rho_e - rho_i) / (2.0 * denom) + a;
  return q;
}

// -------- finite-mean contrast (proportional sharing under ES) --------

struct EsEquilibriumResult {
  std::vector<double> price;           // per-loss conditional tail means
  std::vector<double> price_se;
  std::vector<std::vector<double>> allocation;  // proportional
  double var_q_aggregate = 0.0;
  double euler_lhs = 0.0;  // sum_i a_i E[X_i | A]
  double euler_rhs = 0.0;  // tail-average ES of the aggregate
  double euler_rhs_se = 0.0;
  std::uint64_t tail_count = 0;
};

// Proportional-sharing equilibrium for iid finite-mean losses under ES:
// prices are conditional means on the aggregate tail event, allocations are
// proportional to exposures, and the Euler identity ties the two together.
inline EsEquilibriumResult es_finite_mean_equilibrium(
    std::size_t n, const std::vector<double>& exposures,
    const LossDistribution& marginal, double q, std::uint64_t n_mc,
    const RngStream& stream, unsigned threads = 1) {
  if (n < 2 || exposures.size() != n)
    throw std::invalid_argument("es_finite_mean_equilibrium: bad sizes");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("es_finite_mean_equilibrium: q in (0,1)");
  if (marginal.infinite_mean())
    throw std::invalid_argument(
        "es_finite_mean_equilibrium: infinite-mean marginal rejected; ES "
        "pricing breaks down exactly where the no-sharing market analysis "
        "applies");
  for (double a : exposures)
    if (!(a > 0.0))
      throw std::invalid_argument(
          "es_finite_mean_equilibrium: exposures must be positive");

  std::vector<double> rows = sample_joint(
      marginal, CopulaSpec::independence(), n, n_mc, stream, threads);
  std::vector<double> agg(n_mc);
  for (std::uint64_t i = 0; i < n_mc; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += exposures[j] * rows[i * n + j];
    agg[i] = s;
  }
  std::vector<double> sorted(agg);
  std::sort(sorted.begin(), sorted.end());
  double var_q = sorted_quantile(sorted, q);

  EsEquilibriumResult res;
  res.var_q_aggregate = var_q;
  std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
  double agg_sum = 0.0, agg_sumsq = 0.0;
  std::uint64_t cnt = 0;
  for (std::uint64_t i = 0; i < n_mc; ++i) {
    if (agg[i] < var_q) continue;
    ++cnt;
    agg_sum += agg[i];
    agg_sumsq += agg[i] * agg[i];
    for (std::size_t j = 0; j < n; ++j) {
      double x = rows[i * n + j];
      sum[j] += x;
      sumsq[j] += x * x;
    }
  }
  if (cnt < 2)
    throw numeric_error("es_finite_mean_equilibrium: empty tail event");
  double cc = static_cast<double>(cnt);
  res.tail_count = cnt;
  res.price.resize(n);
  res.price_se.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    res.price[j] = sum[j] / cc;
    double v = std::max(sumsq[j] / cc - res.price[j] * res.price[j], 0.0);
    res.price_se[j] = std::sqrt(v / cc);
  }
  double total = 0.0;
  for (double a : exposures) total += a;
  res.allocation.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      res.allocation[i][j] = exposures[i] / total * exposures[j];

  res.euler_lhs = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    res.euler_lhs += exposures[j] * res.price[j];
  // independent route: exact step-function tail average of the aggregate
  res.euler_rhs = es_sample(std::move(agg), q).value;
  double tail_mean = agg_sum / cc;
  double av = std::max(agg_sumsq / cc - tail_mean * tail_mean, 0.0);
  res.euler_rhs_se = std::sqrt(av / cc);
  return res;
}

struct TwoAgentRVaRCheck {
  double p_star = 0.0;
  double r_at_corner = 0.0;       // r(1,0) = p*(sqrt(2)-1)
  double max_abs_r_on_diagonal = 0.0;
  double min_r = 0.0;             // over the grid; should be >= -tiny
  double argmin_x = 0.0, argmin_y = 0.0;  // over the simplex slice x+y=1
};

// Grid verification of the symmetric two-agent normal market: the excess
// objective r(x,y) = p* sqrt(2x^2+2y^2) - p*(x+y) vanishes on the diagonal
// and the constrained minimum sits at the equal split.
inline TwoAgentRVaRCheck normal_rvar_two_agent_check(double p, double q,
                                                     double grid_step = 0.05) {
  if (!(0.0 <= p && p < q && q < 1.0))
    throw std::invalid_argument("normal_rvar_two_agent_check: 0<=p<q<1");
  if (!(grid_step > 0.0 && grid_step <= 0.5))
    throw std::invalid_argument("normal_rvar_two_agent_check: bad grid step");
  double phi_p = p == 0.0 ? 0.0 : normal_pdf(normal_quantile(p));
  double phi_q = normal_pdf(normal_quantile(q));
  double c_pq = (phi_p - phi_q) / (q - p);
  TwoAgentRVaRCheck res;
  res.p_star = c_pq / std::sqrt(2.0);
  auto r = [&](double x, double y) {
    return res.p_star * std::sqrt(2.0 * x * x + 2.0 * y * y) -
           res.p_star * (x + y);
  };
  res.r_at_corner = r(1.0, 0.0);
  res.min_r = std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (double x = 0.0; x <= 1.0 + 1e-12; x += grid_step) {
    res.max_abs_r_on_diagonal =
        std::max(res.max_abs_r_on_diagonal, std::abs(r(x, x)));
    for (double y = 0.0; y <= 1.0 + 1e-12; y += grid_step)
      res.min_r = std::min(res.min_r, r(x, y));
    double y = 1.0 - x;
    if (y >= -1e-12) {
      double v = r(x, std::max(y, 0.0));
      if (v < best) {
        best = v;
        res.argmin_x = x;
        res.argmin_y = std::max(y, 0.0);
      }
    }
  }
  return res;
}

}  // namespace supertail
