#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace supertail {

inline constexpr double kZ95 = 1.959963984540054;   // two-sided 95%
inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99%

inline double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014327;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Inverse standard normal CDF, Acklam's rational approximation refined with
// one Halley step against erfc. Accurate to ~1e-15 over (0,1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");

  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (std::abs(x) < 37.0) {
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool empty() const { return lo > hi; }
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t n,
                                double z) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n == 0");
  double ph = static_cast<double>(successes) / static_cast<double>(n);
  double z2 = z * z;
  double nn = static_cast<double>(n);
  double denom = 1.0 + z2 / nn;
  double center = (ph + z2 / (2.0 * nn)) / denom;
  double half =
      z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {center - half, center + half};
}

inline double binomial_se(double p_hat, std::uint64_t n) {
  return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) /
                   static_cast<double>(n));
}

// Left-quantile of a sorted sample: smallest order statistic x_(i) with
// i/n >= p. A small slack guards against binary rounding of n*p.
inline double sorted_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("sorted_quantile: empty");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("sorted_quantile: p must be in (0,1)");
  std::size_t n = sorted.size();
  double np = p * static_cast<double>(n);
  double eps = 1e-9 * std::max(1.0, np);
  auto i = static_cast<std::size_t>(std::ceil(np - eps));
  if (i < 1) i = 1;
  if (i > n) i = n;
  return sorted[i - 1];
}

// Order-statistic confidence interval for the p-quantile of a sample.
inline Interval quantile_order_stat_ci(const std::vector<double>& sorted,
                                       double p, double z) {
  std::size_t n = sorted.size();
  if (n < 2) throw std::invalid_argument("quantile_order_stat_ci: n < 2");
  double nn = static_cast<double>(n);
  double spread = z * std::sqrt(nn * p * (1.0 - p));
  auto lo_rank = static_cast<long long>(std::floor(nn * p - spread));
  auto hi_rank = static_cast<long long>(std::ceil(nn * p + spread));
  lo_rank = std::clamp<long long>(lo_rank, 1, static_cast<long long>(n));
  hi_rank = std::clamp<long long>(hi_rank, 1, static_cast<long long>(n));
  return {sorted[static_cast<std::size_t>(lo_rank) - 1],
          sorted[static_cast<std::size_t>(hi_rank) - 1]};
}

// One-sample Kolmogorov-Smirnov distance against an analytic CDF.
template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                             f - static_cast<double>(i) / n));
  }
  return d;
}

namespace detail {
inline std::vector<double> midranks(const std::vector<double>& v) {
  std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    double mid = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
    i = j + 1;
  }
  return r;
}
}  // namespace detail

// Spearman rank correlation (midranks for ties).
inline double spearman_rho(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman_rho: size mismatch");
  auto rx = detail::midranks(x);
  auto ry = detail::midranks(y);
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace supertail
