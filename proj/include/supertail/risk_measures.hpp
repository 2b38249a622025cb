#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "supertail/convex_fn.hpp"
#include "supertail/distributions.hpp"
#include "supertail/extended_real.hpp"
#include "supertail/hill.hpp"
#include "supertail/quadrature.hpp"
#include "supertail/rng.hpp"
#include "supertail/stats.hpp"

namespace supertail {

// Distortion function h: [0,1] -> [0,1], nondecreasing, h(0)=0, h(1)=1.
// Internally every form normalizes to a node table (t_i, h_i); duplicate
// t-values encode jumps. A jump at an interior t contributes
// mass * Q(1-t) using the left quantile; jumps at t=0 and t=1 weight the
// essential supremum and infimum respectively.
class DistortionFn {
 public:
  enum class Kind {
    identity,
    var_step,
    es_ramp,
    ess_inf,
    ess_sup,
    inf_sup_mix,
    table
  };

  static DistortionFn identity() {
    return DistortionFn(Kind::identity, {0.0, 1.0}, {0.0, 1.0});
  }
  static DistortionFn var_step(double p) {
    check_level(p);
    DistortionFn h(Kind::var_step, {0.0, 1.0 - p, 1.0 - p, 1.0},
                   {0.0, 0.0, 1.0, 1.0});
    h.p_ = p;
    return h;
  }
  static DistortionFn es_ramp(double p) {
    check_level(p);
    DistortionFn h(Kind::es_ramp, {0.0, 1.0 - p, 1.0}, {0.0, 1.0, 1.0});
    h.p_ = p;
    return h;
  }
  static DistortionFn ess_inf() {
    return DistortionFn(Kind::ess_inf, {0.0, 1.0, 1.0}, {0.0, 0.0, 1.0});
  }
  static DistortionFn ess_sup() {
    return DistortionFn(Kind::ess_sup, {0.0, 0.0, 1.0}, {0.0, 1.0, 1.0});
  }
  // h == lambda on (0,1): lambda*esssup + (1-lambda)*essinf.
  static DistortionFn inf_sup_mix(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw std::invalid_argument("inf_sup_mix: lambda must be in [0,1]");
    DistortionFn h(Kind::inf_sup_mix, {0.0, 0.0, 1.0, 1.0},
                   {0.0, lambda, lambda, 1.0});
    h.lambda_ = lambda;
    return h;
  }
  static DistortionFn table(std::vector<double> t, std::vector<double> h) {
    return DistortionFn(Kind::table, std::move(t), std::move(h));
  }

  Kind kind() const { return kind_; }
  double level() const { return p_; }
  double mix_lambda() const { return lambda_; }
  const std::vector<double>& nodes_t() const { return t_; }
  const std::vector<double>& nodes_h() const { return h_; }

  // Pointwise evaluation. A jump at t_j takes effect for t > t_j (so the
  // VaR step is 1{t > 1-p}), h(0)=0 and h(1)=1 exactly.
  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double val = h_.front();
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
      if (t_[i] == t_[i + 1]) {
        if (t > t_[i]) val = h_[i + 1];
        continue;
      }
      if (t > t_[i] && t <= t_[i + 1]) {
        double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
        val = h_[i] + w * (h_[i + 1] - h_[i]);
      } else if (t > t_[i + 1]) {
        val = h_[i + 1];
      }
    }
    return val;
  }

  std::vector<double> jump_points() const {
    std::vector<double> js;
    for (std::size_t i = 0; i + 1 < t_.size(); ++i)
      if (t_[i] == t_[i + 1] && h_[i + 1] > h_[i]) js.push_back(t_[i]);
    return js;
  }

 private:
  DistortionFn(Kind k, std::vector<double> t, std::vector<double> h)
      : kind_(k), t_(std::move(t)), h_(std::move(h)) {
    if (t_.size() != h_.size() || t_.size() < 2)
      throw std::invalid_argument("DistortionFn: bad node table");
    if (t_.front() != 0.0 || t_.back() != 1.0 || h_.front() != 0.0 ||
        h_.back() != 1.0)
      throw std::invalid_argument(
          "DistortionFn: table must run from (0,0) to (1,1)");
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
      if (t_[i] > t_[i + 1])
        throw std::invalid_argument("DistortionFn: t not nondecreasing");
      if (h_[i] > h_[i + 1] + 1e-15)
        throw std::invalid_argument("DistortionFn: h not nondecreasing");
    }
  }
  static void check_level(double p) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("DistortionFn: level must be in (0,1)");
  }

  Kind kind_;
  std::vector<double> t_, h_;
  double p_ = 0.0;
  double lambda_ = 0.0;
};

// True iff h is constant on the open interval (0,1); such distortions are
// mixtures of esssup/essinf and the induced measure is not mildly monotone.
inline bool is_degenerate_distortion(const DistortionFn& h,
                                     std::size_t grid = 4096) {
  std::vector<double> pts;
  pts.reserve(grid + 8);
  for (std::size_t i = 1; i <= grid; ++i)
    pts.push_back(static_cast<double>(i) / static_cast<double>(grid + 1));
  for (double j : h.jump_points()) {
    for (double t : {j - 1e-9, j, j + 1e-9})
      if (t > 0.0 && t < 1.0) pts.push_back(t);
  }
  double lo = 2.0, hi = -1.0;
  for (double t : pts) {
    double v = h(t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo <= 1e-14;
}

// -------- scalar risk measures on distributions --------

inline double var(const LossDistribution& d, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("var: p must be in (0,1)");
  return d.quantile(p);
}

inline ExtReal es(const LossDistribution& d, double p, double tol = 1e-11) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("es: p must be in (0,1)");
  if (d.infinite_mean()) return ExtReal::infinity();
  QuadResult r = quantile_integral(d, p, 1.0, tol);
  if (r.diverged) return ExtReal::infinity();
  return r.value / (1.0 - p);
}

inline double rvar(const LossDistribution& d, double p, double q,
                   double tol = 1e-11) {
  if (!(0.0 <= p && p < q && q < 1.0))
    throw std::invalid_argument("rvar: need 0 <= p < q < 1");
  QuadResult r = quantile_integral(d, p, q, tol);
  return r.value / (q - p);
}

// Distortion risk measure evaluated through the quantile representation:
// rho_h(X) = sum over linear segments of h'(t) * integral of Q(1-t), plus
// jump masses at interior points valued at the left quantile. The survival
// form of the same functional lives in distortion_survival_form and serves
// as an independent route.
inline ExtReal distortion(const LossDistribution& d, const DistortionFn& h,
                          double tol = 1e-11) {
  const auto& t = h.nodes_t();
  const auto& hv = h.nodes_h();
  ExtReal acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    double mass = hv[i + 1] - hv[i];
    if (mass <= 0.0) continue;
    if (t[i] == t[i + 1]) {
      double tj = t[i];
      double value;
      if (tj <= 0.0)
        value = d.upper_bound();
      else if (tj >= 1.0)
        value = d.lower_bound();
      else
        value = d.quantile(1.0 - tj);
      acc += ExtReal(mass * value);
    } else {
      double slope = mass / (t[i + 1] - t[i]);
      QuadResult r =
          quantile_integral(d, 1.0 - t[i + 1], 1.0 - t[i], tol);
      if (r.diverged) return ExtReal::infinity();
      acc += ExtReal(slope * r.value);
    }
  }
  return acc;
}

// Survival-integral form: int_{-inf}^0 (h(P(Y>x)) - 1) dx
//                        + int_0^inf h(P(Y>x)) dx.
inline ExtReal distortion_survival_form(const LossDistribution& d,
                                        const DistortionFn& h,
                                        double tol = 1e-9) {
  double lo = d.lower_bound();
  double hi = d.upper_bound();
  auto upper_integrand = [&](double x) { return h(1.0 - d.cdf(x)); };
  auto lower_integrand = [&](double x) { return h(1.0 - d.cdf(x)) - 1.0; };

  double neg_part = 0.0;
  if (lo < 0.0) {
    double start = std::isfinite(lo) ? lo : d.quantile(1e-13);
    start = std::min(start, 0.0);
    neg_part = detail::adaptive_simpson(lower_integrand, start, 0.0, tol);
  }
  double pos_part = 0.0;
  if (hi > 0.0) {
    // below the support h(S(x)) = 1, so the integral always starts at 0
    if (std::isfinite(hi)) {
      pos_part = detail::adaptive_simpson(upper_integrand, 0.0, hi, tol);
    } else {
      // march in expanding panels until the integrand is negligible
      double a = 0.0;
      double width = std::max(1.0, std::abs(std::isfinite(lo) ? lo : 1.0));
      double prev = std::numeric_limits<double>::infinity();
      for (int it = 0; it < 200; ++it) {
        double b = a + width;
        double c = detail::adaptive_simpson(upper_integrand, a, b, tol);
        pos_part += c;
        if (upper_integrand(b) < 1e-13 && c < tol * (1.0 + pos_part))
          return neg_part + pos_part;
        if (it > 8 && c >= prev)  // not decaying: divergent upper integral
          return ExtReal::infinity();
        prev = c;
        a = b;
        width *= 2.0;
      }
      return ExtReal::infinity();
    }
  }
  return neg_part + pos_part;
}

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool diverged = false;
};

// Monte Carlo disutility mean with a stability check: the running mean is
// compared across sample-size doublings (n/4, n/2, n); relative drift above
// 5% flags nonconvergence, which is the expected outcome for unbounded
// disutilities of infinite-mean losses.
inline McEstimate expected_disutility(const LossDistribution& d,
                                      const MonotoneFn& v, std::size_t n_mc,
                                      const RngStream& stream,
                                      unsigned threads = 1) {
  if (n_mc < 16) throw std::invalid_argument("expected_disutility: n_mc < 16");
  std::uint64_t n_blocks = (n_mc + kDefaultBlockSize - 1) / kDefaultBlockSize;
  std::vector<double> block_sum(n_blocks, 0.0), block_sq(n_blocks, 0.0);
  for_blocks(n_mc, kDefaultBlockSize, threads,
             [&](std::uint64_t b, std::uint64_t b0, std::uint64_t b1) {
               double s = 0.0, s2 = 0.0;
               for (std::uint64_t i = b0; i < b1; ++i) {
                 double y = v(d.quantile(stream.uniform(i)));
                 s += y;
                 s2 += y * y;
               }
               block_sum[b] = s;
               block_sq[b] = s2;
             });
  double total = 0.0, total_sq = 0.0;
  for (std::uint64_t b = 0; b < n_blocks; ++b) {
    total += block_sum[b];
    total_sq += block_sq[b];
  }
  double n = static_cast<double>(n_mc);
  McEstimate out;
  out.value = total / n;
  double varc = std::max(total_sq / n - out.value * out.value, 0.0);
  out.std_error = std::sqrt(varc / n);

  auto running_mean = [&](std::uint64_t upto) {
    double s = 0.0;
    std::uint64_t seen = 0;
    for (std::uint64_t b = 0; b < n_blocks && seen < upto; ++b) {
      std::uint64_t b0 = b * kDefaultBlockSize;
      std::uint64_t b1 = std::min<std::uint64_t>(n_mc, b0 + kDefaultBlockSize);
      if (b1 <= upto) {
        s += block_sum[b];
        seen = b1;
      } else {
        for (std::uint64_t i = b0; i < upto; ++i)
          s += v(d.quantile(stream.uniform(i)));
        seen = upto;
      }
    }
    return s / static_cast<double>(upto);
  };
  double m1 = running_mean(n_mc / 4), m2 = running_mean(n_mc / 2);
  double scale = std::max({std::abs(out.value), std::abs(m1), 1e-12});
  if (std::abs(m2 - m1) / scale > 0.05 ||
      std::abs(out.value - m2) / scale > 0.05)
    out.diverged = true;
  return out;
}

// Expected disutility through the quantile integral (no sampling); used as
// the analytic route where it converges.
inline ExtReal expected_disutility_analytic(const LossDistribution& d,
                                            const MonotoneFn& v,
                                            double tol = 1e-11) {
  QuadResult r = quantile_integral_fn(
      [&](double u) { return v(d.quantile(u)); },
      [&](double s) { return v(d.tail_quantile(s)); }, 0.0, 1.0, tol);
  if (r.diverged) return ExtReal::infinity();
  return r.value;
}

// -------- sample-path evaluators --------

inline double var(std::vector<double> sample, double p) {
  std::sort(sample.begin(), sample.end());
  return sorted_quantile(sample, p);
}

struct SampleEsResult {
  double value = 0.0;
  double alpha_prescreen = 0.0;  // 0 when the prescreen is not applicable
  bool tail_warning = false;     // heavy-tail prescreen fired (alpha <= 1.2)
};

// Tail mean of the sorted sample above the p-quantile, exact step-function
// integral. A Hill prescreen on the top 5% flags estimates whose tail index
// suggests the sample mean machinery is unreliable.
inline SampleEsResult es_sample(std::vector<double> sample, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("es_sample: p must be in (0,1)");
  std::sort(sample.begin(), sample.end());
  std::size_t n = sample.size();
  double nn = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = std::max(p, static_cast<double>(i) / nn);
    double hi = static_cast<double>(i + 1) / nn;
    if (hi > lo) acc += sample[i] * (hi - lo);
  }
  SampleEsResult r;
  r.value = acc / (1.0 - p);
  if (n >= 40 && sample[n - 1 - default_threshold_k(n)] > 0.0) {
    try {
      HillResult h = hill_estimator(sample, default_threshold_k(n));
      r.alpha_prescreen = h.alpha_hat;
      r.tail_warning = h.alpha_hat <= 1.2;
    } catch (const std::invalid_argument&) {
      // degenerate upper tail: no power-tail prescreen applies
    }
  }
  return r;
}

inline double rvar_sample(std::vector<double> sample, double p, double q) {
  if (!(0.0 <= p && p < q && q < 1.0))
    throw std::invalid_argument("rvar_sample: need 0 <= p < q < 1");
  std::sort(sample.begin(), sample.end());
  std::size_t n = sample.size();
  double nn = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = std::max(p, static_cast<double>(i) / nn);
    double hi = std::min(q, static_cast<double>(i + 1) / nn);
    if (hi > lo) acc += sample[i] * (hi - lo);
  }
  return acc / (q - p);
}

// -------- measure descriptor --------

class RiskMeasureSpec {
 public:
  enum class Kind { var, es, rvar, distortion, expected_disutility };

  static RiskMeasureSpec var(double p) {
    check(p);
    RiskMeasureSpec s(Kind::var);
    s.p_ = p;
    return s;
  }
  static RiskMeasureSpec es(double p) {
    check(p);
    RiskMeasureSpec s(Kind::es);
    s.p_ = p;
    return s;
  }
  static RiskMeasureSpec rvar(double p, double q) {
    if (!(0.0 <= p && p < q && q < 1.0))
      throw std::invalid_argument("RiskMeasureSpec: need 0 <= p < q < 1");
    RiskMeasureSpec s(Kind::rvar);
    s.p_ = p;
    s.q_ = q;
    return s;
  }
  static RiskMeasureSpec distortion(DistortionFn h) {
    RiskMeasureSpec s(Kind::distortion);
    s.h_ = std::move(h);
    return s;
  }
  static RiskMeasureSpec expected_disutility(MonotoneFn v) {
    RiskMeasureSpec s(Kind::expected_disutility);
    s.v_ = std::move(v);
    return s;
  }

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  double q() const { return q_; }
  const DistortionFn& h() const { return *h_; }
  const MonotoneFn& v() const { return *v_; }

  // Translation invariant and positively homogeneous (distortion family).
  bool positively_homogeneous() const {
    return kind_ != Kind::expected_disutility;
  }
  bool mildly_monotone() const {
    switch (kind_) {
      case Kind::var:
      case Kind::es:
      case Kind::rvar:
        return true;
      case Kind::distortion:
        return !is_degenerate_distortion(*h_);
      case Kind::expected_disutility:
        return v_->strictly_increasing();
    }
    return false;
  }

 private:
  explicit RiskMeasureSpec(Kind k) : kind_(k) {}
  static void check(double p) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("RiskMeasureSpec: level must be in (0,1)");
  }
  Kind kind_;
  double p_ = 0.0, q_ = 0.0;
  std::optional<DistortionFn> h_;
  std::optional<MonotoneFn> v_;
};

inline ExtReal evaluate(const RiskMeasureSpec& rho, const LossDistribution& d,
                        double tol = 1e-11) {
  switch (rho.kind()) {
    case RiskMeasureSpec::Kind::var:
      return var(d, rho.p());
    case RiskMeasureSpec::Kind::es:
      return es(d, rho.p(), tol);
    case RiskMeasureSpec::Kind::rvar:
      return rvar(d, rho.p(), rho.q(), tol);
    case RiskMeasureSpec::Kind::distortion:
      return distortion(d, rho.h(), tol);
    case RiskMeasureSpec::Kind::expected_disutility:
      return expected_disutility_analytic(d, rho.v(), tol);
  }
  throw std::logic_error("evaluate: unknown risk measure");
}

inline double evaluate_sample(const RiskMeasureSpec& rho,
                              std::vector<double> sample) {
  switch (rho.kind()) {
    case RiskMeasureSpec::Kind::var:
      return var(std::move(sample), rho.p());
    case RiskMeasureSpec::Kind::es:
      return es_sample(std::move(sample), rho.p()).value;
    case RiskMeasureSpec::Kind::rvar:
      return rvar_sample(std::move(sample), rho.p(), rho.q());
    case RiskMeasureSpec::Kind::distortion: {
      ExtReal r = distortion(LossDistribution::empirical(std::move(sample)),
                             rho.h());
      return r.value();
    }
    case RiskMeasureSpec::Kind::expected_disutility: {
      double acc = 0.0;
      for (double x : sample) acc += rho.v()(x);
      return acc / static_cast<double>(sample.size());
    }
  }
  throw std::logic_error("evaluate_sample: unknown risk measure");
}

}  // namespace supertail
