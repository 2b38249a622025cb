#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "supertail/convex_fn.hpp"
#include "supertail/extended_real.hpp"
#include "supertail/quadrature.hpp"
#include "supertail/rng.hpp"
#include "supertail/stats.hpp"

namespace supertail {

class LossDistribution;

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class DistKind {
  pareto,
  gpd,
  convex_transform,
  truncated,
  tail_graft,
  empirical,
  normal,
  comonotone_sum,
};

struct Dist {
  virtual ~Dist() = default;
  virtual DistKind kind() const = 0;
  virtual double cdf(double x) const = 0;
  // Left quantile inf{t : F(t) >= p}, p in (0,1).
  virtual double quantile(double p) const = 0;
  // quantile(1-s) evaluated stably for tail probabilities s near zero.
  virtual double tail_quantile(double s) const { return quantile(1.0 - s); }
  virtual double lower_bound() const = 0;  // essential infimum
  virtual double upper_bound() const = 0;  // essential supremum
  virtual bool infinite_mean() const = 0;  // analytic tail prescreen
  virtual ExtReal mean() const = 0;
  // Family-level flag: tail at least as heavy as Pareto(1) by construction.
  virtual bool super_pareto_capable() const { return false; }
};

struct ParetoDist final : Dist {
  double alpha;
  explicit ParetoDist(double a) : alpha(a) {
    if (!(a > 0.0)) throw std::invalid_argument("Pareto: alpha must be > 0");
  }
  DistKind kind() const override { return DistKind::pareto; }
  double cdf(double x) const override {
    return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -alpha);
  }
  double quantile(double p) const override { return tail_quantile(1.0 - p); }
  double tail_quantile(double s) const override {
    return std::pow(s, -1.0 / alpha);
  }
  double lower_bound() const override { return 1.0; }
  double upper_bound() const override { return kInf; }
  bool infinite_mean() const override { return alpha <= 1.0; }
  ExtReal mean() const override {
    return alpha > 1.0 ? ExtReal(alpha / (alpha - 1.0)) : ExtReal::infinity();
  }
  bool super_pareto_capable() const override { return alpha <= 1.0; }
};

struct GpdDist final : Dist {
  double xi, beta;
  GpdDist(double xi_, double beta_) : xi(xi_), beta(beta_) {
    if (!(xi > 0.0) || !(beta > 0.0))
      throw std::invalid_argument("GPD: xi and beta must be > 0");
  }
  DistKind kind() const override { return DistKind::gpd; }
  double cdf(double x) const override {
    return x <= 0.0 ? 0.0 : 1.0 - std::pow(1.0 + xi * x / beta, -1.0 / xi);
  }
  double quantile(double p) const override { return tail_quantile(1.0 - p); }
  double tail_quantile(double s) const override {
    return (beta / xi) * (std::pow(s, -xi) - 1.0);
  }
  double lower_bound() const override { return 0.0; }
  double upper_bound() const override { return kInf; }
  bool infinite_mean() const override { return xi >= 1.0; }
  ExtReal mean() const override {
    return xi < 1.0 ? ExtReal(beta / (1.0 - xi)) : ExtReal::infinity();
  }
  bool super_pareto_capable() const override { return xi >= 1.0; }
};

// Law of f(Y), Y ~ Pareto(1), f increasing convex non-constant. Always
// infinite-mean.
struct ConvexTransformDist final : Dist {
  PiecewiseConvexFn f;
  explicit ConvexTransformDist(PiecewiseConvexFn fn) : f(std::move(fn)) {}
  DistKind kind() const override { return DistKind::convex_transform; }
  double cdf(double x) const override {
    double y = f.inverse_upper(x);
    return y < 1.0 ? 0.0 : 1.0 - 1.0 / y;
  }
  double quantile(double p) const override { return f(1.0 / (1.0 - p)); }
  double tail_quantile(double s) const override { return f(1.0 / s); }
  double lower_bound() const override { return f.value_at_one(); }
  double upper_bound() const override { return kInf; }
  bool infinite_mean() const override { return true; }
  ExtReal mean() const override { return ExtReal::infinity(); }
  bool super_pareto_capable() const override { return true; }
};

struct EmpiricalDist final : Dist {
  std::vector<double> sample;  // sorted ascending
  explicit EmpiricalDist(std::vector<double> s) : sample(std::move(s)) {
    if (sample.empty()) throw std::invalid_argument("Empirical: empty sample");
    for (double v : sample)
      if (!std::isfinite(v))
        throw std::invalid_argument("Empirical: non-finite value");
    std::sort(sample.begin(), sample.end());
  }
  DistKind kind() const override { return DistKind::empirical; }
  double cdf(double x) const override {
    auto it = std::upper_bound(sample.begin(), sample.end(), x);
    return static_cast<double>(it - sample.begin()) /
           static_cast<double>(sample.size());
  }
  double quantile(double p) const override {
    return sorted_quantile(sample, p);
  }
  double tail_quantile(double s) const override {
    // rank from the top avoids forming 1-s
    std::size_t n = sample.size();
    double ns = s * static_cast<double>(n);
    auto j = static_cast<std::size_t>(std::floor(ns + 1e-9 * std::max(1.0, ns)));
    if (j >= n) j = n - 1;
    return sample[n - 1 - j];
  }
  double lower_bound() const override { return sample.front(); }
  double upper_bound() const override { return sample.back(); }
  bool infinite_mean() const override { return false; }
  ExtReal mean() const override {
    double m = 0.0;
    for (double v : sample) m += v;
    return m / static_cast<double>(sample.size());
  }
  bool super_pareto_capable() const override { return true; }
  // Exact integral of the step quantile over [a,b].
  double quantile_integral(double a, double b) const {
    std::size_t n = sample.size();
    double nn = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double lo = std::max(a, static_cast<double>(i) / nn);
      double hi = std::min(b, static_cast<double>(i + 1) / nn);
      if (hi > lo) acc += sample[i] * (hi - lo);
    }
    return acc;
  }
};

struct NormalDist final : Dist {
  double mu, sigma;
  NormalDist(double m, double s) : mu(m), sigma(s) {
    if (!(s > 0.0)) throw std::invalid_argument("Normal: sigma must be > 0");
  }
  DistKind kind() const override { return DistKind::normal; }
  double cdf(double x) const override { return normal_cdf((x - mu) / sigma); }
  double quantile(double p) const override {
    return mu + sigma * normal_quantile(p);
  }
  double tail_quantile(double s) const override {
    return mu - sigma * normal_quantile(s);  // upper tail by symmetry
  }
  double lower_bound() const override { return -kInf; }
  double upper_bound() const override { return kInf; }
  bool infinite_mean() const override { return false; }
  ExtReal mean() const override { return mu; }
};

struct TruncatedDist final : Dist {
  std::shared_ptr<const Dist> base;
  double cap;
  TruncatedDist(std::shared_ptr<const Dist> b, double c)
      : base(std::move(b)), cap(c) {
    if (!(cap >= base->lower_bound()))
      throw std::invalid_argument(
          "Truncated: cap below the support of the base distribution");
  }
  DistKind kind() const override { return DistKind::truncated; }
  double cdf(double x) const override {
    return x >= cap ? 1.0 : base->cdf(x);
  }
  double quantile(double p) const override {
    return std::min(base->quantile(p), cap);
  }
  double tail_quantile(double s) const override {
    return std::min(base->tail_quantile(s), cap);
  }
  double lower_bound() const override { return base->lower_bound(); }
  double upper_bound() const override {
    return std::min(base->upper_bound(), cap);
  }
  bool infinite_mean() const override { return false; }
  ExtReal mean() const override;  // defined below (needs the evaluator)
};

// Distribution equal to `base` from x onward, with a body that must sit at
// or above the base in stochastic order: F_body <= F_base on [z, x],
// validated on a grid.
struct TailGraftDist final : Dist {
  std::shared_ptr<const Dist> base;
  double x;
  std::shared_ptr<const Dist> body;
  std::size_t grid_points;
  TailGraftDist(std::shared_ptr<const Dist> b, double x_,
                std::shared_ptr<const Dist> body_, std::size_t grid = 1024)
      : base(std::move(b)), x(x_), body(std::move(body_)), grid_points(grid) {
    double z = base->lower_bound();
    if (!std::isfinite(z))
      throw std::invalid_argument("TailGraft: base support unbounded below");
    if (!(x >= z))
      throw std::invalid_argument("TailGraft: graft point below base support");
    if (grid_points < 2)
      throw std::invalid_argument("TailGraft: need at least 2 grid points");
    // the body only defines the law strictly below x, so the stochastic
    // order check samples [z, x) up to a point just under the graft
    for (std::size_t j = 0; j < grid_points && x > z; ++j) {
      double t = z + (x - z) * static_cast<double>(j) /
                         static_cast<double>(grid_points);
      if (body->cdf(t) > base->cdf(t) + 1e-9)
        throw std::invalid_argument(
            "TailGraft: body exceeds the base CDF on the validation grid");
    }
  }
  DistKind kind() const override { return DistKind::tail_graft; }
  double cdf(double t) const override {
    return t < x ? body->cdf(t) : base->cdf(t);
  }
  double quantile(double p) const override {
    double qb = body->quantile(p);
    if (qb < x) return qb;
    return std::max(x, base->quantile(p));
  }
  double tail_quantile(double s) const override {
    double sx = 1.0 - base->cdf(x);
    if (s <= sx) return std::max(x, base->tail_quantile(s));
    return quantile(1.0 - s);  // body region; 1-s is not near 1 here
  }
  double lower_bound() const override {
    return std::min(body->lower_bound(), x);
  }
  double upper_bound() const override { return base->upper_bound(); }
  bool infinite_mean() const override { return base->infinite_mean(); }
  ExtReal mean() const override;
  bool super_pareto_capable() const override {
    return base->super_pareto_capable();
  }
};

// Sum of comonotonic components: the quantile is the pointwise sum of the
// component quantiles. The CDF is recovered by monotone bisection.
struct ComonotoneSumDist final : Dist {
  std::vector<std::shared_ptr<const Dist>> parts;
  explicit ComonotoneSumDist(std::vector<std::shared_ptr<const Dist>> p)
      : parts(std::move(p)) {
    if (parts.empty())
      throw std::invalid_argument("ComonotoneSum: no components");
  }
  DistKind kind() const override { return DistKind::comonotone_sum; }
  double quantile(double p) const override {
    double s = 0.0;
    for (const auto& d : parts) s += d->quantile(p);
    return s;
  }
  double tail_quantile(double s) const override {
    double t = 0.0;
    for (const auto& d : parts) t += d->tail_quantile(s);
    return t;
  }
  double cdf(double t) const override {
    if (t < lower_bound()) return 0.0;
    double ub = upper_bound();
    if (std::isfinite(ub) && t >= ub) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (lo + hi);
      (quantile(mid) <= t) ? lo = mid : hi = mid;
    }
    return lo;
  }
  double lower_bound() const override {
    double s = 0.0;
    for (const auto& d : parts) s += d->lower_bound();
    return s;
  }
  double upper_bound() const override {
    double s = 0.0;
    for (const auto& d : parts) s += d->upper_bound();
    return s;
  }
  bool infinite_mean() const override {
    for (const auto& d : parts)
      if (d->infinite_mean()) return true;
    return false;
  }
  ExtReal mean() const override {
    ExtReal m = 0.0;
    for (const auto& d : parts) m += d->mean();
    return m;
  }
  bool super_pareto_capable() const override {
    for (const auto& d : parts)
      if (!d->super_pareto_capable()) return false;
    return true;
  }
};

// Integral of the left-quantile function over [a,b] in [0,1]. Exact for
// empirical laws, decomposed for truncations and comonotone sums, numeric
// quadrature otherwise. Returns +inf with the diverged flag when the upper
// tail integral does not converge.
inline QuadResult dist_quantile_integral(const Dist& d, double a, double b,
                                         double tol = 1e-11) {
  if (a >= b) return {0.0, false};
  switch (d.kind()) {
    case DistKind::empirical: {
      const auto& e = static_cast<const EmpiricalDist&>(d);
      return {e.quantile_integral(a, b), false};
    }
    case DistKind::comonotone_sum: {
      const auto& c = static_cast<const ComonotoneSumDist&>(d);
      QuadResult acc;
      for (const auto& part : c.parts) {
        QuadResult r = dist_quantile_integral(*part, a, b, tol);
        if (r.diverged) return r;
        acc.value += r.value;
      }
      return acc;
    }
    case DistKind::truncated: {
      const auto& t = static_cast<const TruncatedDist&>(d);
      double pc = t.base->cdf(t.cap);
      double m = std::min(b, pc);
      QuadResult r{0.0, false};
      if (m > a) {
        r = dist_quantile_integral(*t.base, a, m, tol);
        if (r.diverged) return r;
      }
      if (b > m) r.value += t.cap * (b - std::max(a, m));
      return r;
    }
    default:
      return quantile_integral_fn(
          [&d](double u) { return d.quantile(u); },
          [&d](double s) { return d.tail_quantile(s); }, a, b, tol);
  }
}

inline ExtReal TruncatedDist::mean() const {
  QuadResult r = dist_quantile_integral(*this, 0.0, 1.0);
  return r.diverged ? ExtReal::infinity() : ExtReal(r.value);
}

inline ExtReal TailGraftDist::mean() const {
  if (infinite_mean()) return ExtReal::infinity();
  QuadResult r = dist_quantile_integral(*this, 0.0, 1.0);
  return r.diverged ? ExtReal::infinity() : ExtReal(r.value);
}

}  // namespace detail

// Value-semantic handle over an immutable loss model. Thread-safe to share;
// all sampling is inverse-transform so comonotone couplings are exact.
class LossDistribution {
 public:
  using Kind = detail::DistKind;

  static LossDistribution pareto(double alpha) {
    return LossDistribution(std::make_shared<detail::ParetoDist>(alpha));
  }
  static LossDistribution gpd(double xi, double beta) {
    return LossDistribution(std::make_shared<detail::GpdDist>(xi, beta));
  }
  static LossDistribution convex_transform(PiecewiseConvexFn f) {
    return LossDistribution(
        std::make_shared<detail::ConvexTransformDist>(std::move(f)));
  }
  static LossDistribution truncated(const LossDistribution& base, double cap) {
    return LossDistribution(
        std::make_shared<detail::TruncatedDist>(base.impl_, cap));
  }
  static LossDistribution tail_graft(const LossDistribution& base, double x,
                                     const LossDistribution& body,
                                     std::size_t grid_points = 1024) {
    return LossDistribution(std::make_shared<detail::TailGraftDist>(
        base.impl_, x, body.impl_, grid_points));
  }
  static LossDistribution empirical(std::vector<double> sample) {
    return LossDistribution(
        std::make_shared<detail::EmpiricalDist>(std::move(sample)));
  }
  static LossDistribution normal(double mu, double sigma) {
    return LossDistribution(std::make_shared<detail::NormalDist>(mu, sigma));
  }
  static LossDistribution comonotone_sum(
      const std::vector<LossDistribution>& parts) {
    std::vector<std::shared_ptr<const detail::Dist>> ps;
    ps.reserve(parts.size());
    for (const auto& p : parts) ps.push_back(p.impl_);
    return LossDistribution(
        std::make_shared<detail::ComonotoneSumDist>(std::move(ps)));
  }
  static LossDistribution constant(double c) { return empirical({c}); }

  double cdf(double x) const { return impl_->cdf(x); }
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("quantile: p must be in (0,1)");
    return impl_->quantile(p);
  }
  double tail_quantile(double s) const {
    if (!(s > 0.0 && s < 1.0))
      throw std::invalid_argument("tail_quantile: s must be in (0,1)");
    return impl_->tail_quantile(s);
  }
  double lower_bound() const { return impl_->lower_bound(); }
  double upper_bound() const { return impl_->upper_bound(); }
  bool infinite_mean() const { return impl_->infinite_mean(); }
  ExtReal mean() const { return impl_->mean(); }
  bool super_pareto_capable() const { return impl_->super_pareto_capable(); }
  Kind kind() const { return impl_->kind(); }

  const detail::Dist& impl() const { return *impl_; }
  std::shared_ptr<const detail::Dist> impl_ptr() const { return impl_; }
  static LossDistribution wrap(std::shared_ptr<const detail::Dist> impl) {
    return LossDistribution(std::move(impl));
  }

 private:
  explicit LossDistribution(std::shared_ptr<const detail::Dist> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::Dist> impl_;
};

inline QuadResult quantile_integral(const LossDistribution& d, double a,
                                    double b, double tol = 1e-11) {
  return detail::dist_quantile_integral(d.impl(), a, b, tol);
}

// Inverse-transform sampling; draw i consumes uniform i of the stream.
inline std::vector<double> sample(const LossDistribution& d, std::size_t n,
                                  const RngStream& stream,
                                  unsigned threads = 1) {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  std::vector<double> out(n);
  for_blocks(n, kDefaultBlockSize, threads,
             [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
               for (std::uint64_t i = b0; i < b1; ++i)
                 out[i] = d.quantile(stream.uniform(i));
             });
  return out;
}

// Distribution of the sum of m independent copies, realized as an empirical
// law from n_rep sampled sums.
inline LossDistribution convolve_iid(const LossDistribution& d, std::size_t m,
                                     const RngStream& stream,
                                     std::size_t n_rep = (1u << 20),
                                     unsigned threads = 1) {
  if (m == 0) throw std::invalid_argument("convolve_iid: m must be >= 1");
  std::vector<double> sums(n_rep);
  for_blocks(n_rep, kDefaultBlockSize, threads,
             [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
               for (std::uint64_t i = b0; i < b1; ++i) {
                 double s = 0.0;
                 for (std::size_t j = 0; j < m; ++j)
                   s += d.quantile(stream.uniform(i * m + j));
                 sums[i] = s;
               }
             });
  return LossDistribution::empirical(std::move(sums));
}

// P(X1 + X2 > s) for iid Pareto(1); closed form used as a test oracle.
inline double pareto1_pair_sum_survival(double s) {
  if (s <= 2.0) return 1.0;
  return 2.0 / s + 2.0 * std::log(s - 1.0) / (s * s);
}

}  // namespace supertail
