#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "supertail/stats.hpp"

namespace supertail {

struct HillResult {
  std::size_t k = 0;       // upper order statistics used
  double threshold = 0.0;  // the (n-k)-th order statistic
  double alpha_hat = 0.0;
  double ci_low = 0.0;  // 95%
  double ci_high = 0.0;
};

// Hill estimator of the Pareto tail index from the top k order statistics:
// alpha_hat = 1 / mean(log X_(n-i+1) - log X_(n-k)), i = 1..k, with the
// asymptotic-normality interval alpha_hat (1 +- z_.975 / sqrt(k)).
inline HillResult hill_estimator(std::vector<double> sample, std::size_t k) {
  std::size_t n = sample.size();
  if (!(k >= 2 && k < n))
    throw std::invalid_argument("hill_estimator: need 2 <= k < n");
  std::stable_sort(sample.begin(), sample.end());
  double threshold = sample[n - k - 1];
  if (!(threshold > 0.0))
    throw std::invalid_argument(
        "hill_estimator: top order statistics must be strictly positive");
  double log_thr = std::log(threshold);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    acc += std::log(sample[n - 1 - i]) - log_thr;
  double mean_excess = acc / static_cast<double>(k);
  if (!(mean_excess > 0.0))
    throw std::invalid_argument("hill_estimator: degenerate upper tail");
  HillResult r;
  r.k = k;
  r.threshold = threshold;
  r.alpha_hat = 1.0 / mean_excess;
  double rel = kZ95 / std::sqrt(static_cast<double>(k));
  r.ci_low = r.alpha_hat * (1.0 - rel);
  r.ci_high = r.alpha_hat * (1.0 + rel);
  return r;
}

inline std::vector<HillResult> hill_plot(const std::vector<double>& sample,
                                         std::size_t k_min,
                                         std::size_t k_max) {
  if (!(2 <= k_min && k_min <= k_max && k_max < sample.size()))
    throw std::invalid_argument("hill_plot: need 2 <= k_min <= k_max < n");
  std::vector<double> sorted(sample);
  std::stable_sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  // one pass over cumulative log sums instead of re-sorting per k
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (n - 1 - i < k_max + 1 && !(sorted[i] > 0.0))
      throw std::invalid_argument(
          "hill_plot: top order statistics must be strictly positive");
    logs[i] = sorted[i] > 0.0 ? std::log(sorted[i]) : 0.0;
  }
  std::vector<HillResult> out;
  out.reserve(k_max - k_min + 1);
  double top_sum = 0.0;
  std::size_t have = 0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    top_sum += logs[n - k];
    ++have;
    if (k < k_min) continue;
    double thr = sorted[n - k - 1];
    double mean_excess =
        top_sum / static_cast<double>(have) - logs[n - k - 1];
    HillResult r;
    r.k = k;
    r.threshold = thr;
    r.alpha_hat = 1.0 / mean_excess;
    double rel = kZ95 / std::sqrt(static_cast<double>(k));
    r.ci_low = r.alpha_hat * (1.0 - rel);
    r.ci_high = r.alpha_hat * (1.0 + rel);
    out.push_back(r);
  }
  return out;
}

// Default threshold rule: the top 5% of order statistics.
inline std::size_t default_threshold_k(std::size_t n) {
  if (n < 40)
    throw std::invalid_argument("default_threshold_k: need n >= 40");
  return static_cast<std::size_t>(
      std::ceil(0.05 * static_cast<double>(n) - 1e-9));
}

}  // namespace supertail
