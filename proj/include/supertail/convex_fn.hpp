#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace supertail {

// Increasing convex function on [1, inf): finitely many linear pieces plus
// an optional terminal power segment. Convexity is enforced by nondecreasing
// slopes; non-constancy by a positive final slope (or power coefficient).
// The representation is exactly invertible, which keeps inverse-transform
// sampling and CDF evaluation closed-form.
class PiecewiseConvexFn {
 public:
  struct PowerTail {
    double coeff;     // > 0
    double exponent;  // >= 1
  };

  PiecewiseConvexFn(double value_at_one, std::vector<double> knots,
                    std::vector<double> slopes,
                    std::optional<PowerTail> tail = std::nullopt)
      : v1_(value_at_one),
        knots_(std::move(knots)),
        slopes_(std::move(slopes)),
        tail_(tail) {
    validate();
    precompute();
  }

  static PiecewiseConvexFn identity() { return {1.0, {}, {1.0}}; }

  // y -> y^e with e >= 1; maps Pareto(1) to Pareto(1/e).
  static PiecewiseConvexFn power(double exponent) {
    return {1.0, {}, {}, PowerTail{1.0, exponent}};
  }

  // y -> slope*y + intercept with slope > 0.
  static PiecewiseConvexFn affine(double slope, double intercept) {
    return {slope + intercept, {}, {slope}};
  }

  // y -> (beta/xi) (y^xi - 1); maps Pareto(1) to the heavy GPD (xi >= 1).
  static PiecewiseConvexFn gpd_map(double xi, double beta) {
    if (!(beta > 0.0))
      throw std::invalid_argument("gpd_map: beta must be positive");
    return {0.0, {}, {}, PowerTail{beta / xi, xi}};
  }

  double operator()(double y) const {
    if (y < 1.0) throw std::invalid_argument("PiecewiseConvexFn: y < 1");
    std::size_t nseg = slopes_.size();
    for (std::size_t j = 0; j < nseg; ++j) {
      double seg_end = (j < knots_.size())
                           ? knots_[j]
                           : std::numeric_limits<double>::infinity();
      if (y <= seg_end || (j + 1 == nseg && !tail_))
        return seg_values_[j] + slopes_[j] * (y - seg_starts_[j]);
    }
    double k = tail_start_;
    return tail_value_ +
           tail_->coeff * (std::pow(y, tail_->exponent) -
                           std::pow(k, tail_->exponent));
  }

  // sup{y >= 1 : f(y) <= x}; returns 0 when x < f(1) (below the range),
  // +inf never occurs since the final piece is strictly increasing.
  double inverse_upper(double x) const {
    if (x < v1_) return 0.0;
    std::size_t nseg = slopes_.size();
    for (std::size_t j = 0; j < nseg; ++j) {
      bool last_linear = (j + 1 == nseg) && !tail_;
      double seg_end = (j < knots_.size())
                           ? knots_[j]
                           : std::numeric_limits<double>::infinity();
      double end_value = last_linear ? std::numeric_limits<double>::infinity()
                                     : value_at_end_[j];
      if (x <= end_value || last_linear) {
        if (slopes_[j] == 0.0) {
          if (x > seg_values_[j]) continue;  // value jumps past a flat run
          return seg_end;                    // sup over the flat segment
        }
        return seg_starts_[j] + (x - seg_values_[j]) / slopes_[j];
      }
    }
    double k = tail_start_;
    double t = (x - tail_value_) / tail_->coeff + std::pow(k, tail_->exponent);
    return std::pow(t, 1.0 / tail_->exponent);
  }

  double value_at_one() const { return v1_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& slopes() const { return slopes_; }
  const std::optional<PowerTail>& power_tail() const { return tail_; }

 private:
  void validate() const {
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
      if (!(knots_[i] < knots_[i + 1]))
        throw std::invalid_argument("PiecewiseConvexFn: knots not increasing");
    if (!knots_.empty() && !(knots_.front() > 1.0))
      throw std::invalid_argument("PiecewiseConvexFn: knots must exceed 1");
    std::size_t expected = tail_ ? knots_.size() : knots_.size() + 1;
    if (slopes_.size() != expected)
      throw std::invalid_argument("PiecewiseConvexFn: slope count mismatch");
    double prev = 0.0;
    for (double s : slopes_) {
      if (s < 0.0)
        throw std::invalid_argument("PiecewiseConvexFn: negative slope");
      if (s < prev)
        throw std::invalid_argument(
            "PiecewiseConvexFn: slopes must be nondecreasing (convexity)");
      prev = s;
    }
    if (tail_) {
      if (!(tail_->coeff > 0.0) || !(tail_->exponent >= 1.0))
        throw std::invalid_argument(
            "PiecewiseConvexFn: power tail needs coeff > 0, exponent >= 1");
      double k = knots_.empty() ? 1.0 : knots_.back();
      double d0 = tail_->coeff * tail_->exponent *
                  std::pow(k, tail_->exponent - 1.0);
      if (d0 + 1e-12 < prev)
        throw std::invalid_argument(
            "PiecewiseConvexFn: power tail breaks convexity at the junction");
    } else if (!(slopes_.back() > 0.0)) {
      throw std::invalid_argument(
          "PiecewiseConvexFn: constant function (no positive slope)");
    }
  }

  void precompute() {
    std::size_t nseg = slopes_.size();
    seg_starts_.resize(nseg);
    seg_values_.resize(nseg);
    value_at_end_.resize(nseg);
    double y = 1.0, v = v1_;
    for (std::size_t j = 0; j < nseg; ++j) {
      seg_starts_[j] = y;
      seg_values_[j] = v;
      double end = (j < knots_.size())
                       ? knots_[j]
                       : std::numeric_limits<double>::infinity();
      value_at_end_[j] = std::isfinite(end)
                             ? v + slopes_[j] * (end - y)
                             : std::numeric_limits<double>::infinity();
      if (std::isfinite(end)) {
        v = value_at_end_[j];
        y = end;
      }
    }
    tail_start_ = knots_.empty() ? 1.0 : knots_.back();
    tail_value_ = slopes_.empty() ? v1_ : (knots_.empty() ? v1_ : v);
  }

  double v1_;
  std::vector<double> knots_;
  std::vector<double> slopes_;
  std::optional<PowerTail> tail_;
  std::vector<double> seg_starts_, seg_values_, value_at_end_;
  double tail_start_ = 1.0, tail_value_ = 0.0;
};

// Nondecreasing piecewise-linear function on the real line. Covers the
// disutility shapes used here: linear, flat-then-concave (limited liability)
// and convex-concave profiles.
class MonotoneFn {
 public:
  MonotoneFn(std::vector<double> knots, std::vector<double> slopes,
             double value_at_first_knot)
      : knots_(std::move(knots)),
        slopes_(std::move(slopes)),
        v0_(value_at_first_knot) {
    if (knots_.empty() || slopes_.size() != knots_.size() + 1)
      throw std::invalid_argument("MonotoneFn: need k knots and k+1 slopes");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
      if (!(knots_[i] < knots_[i + 1]))
        throw std::invalid_argument("MonotoneFn: knots not increasing");
    for (double s : slopes_)
      if (s < 0.0)
        throw std::invalid_argument("MonotoneFn: negative slope");
    knot_values_.resize(knots_.size());
    knot_values_[0] = v0_;
    for (std::size_t i = 1; i < knots_.size(); ++i)
      knot_values_[i] =
          knot_values_[i - 1] + slopes_[i] * (knots_[i] - knots_[i - 1]);
  }

  static MonotoneFn identity() { return {{0.0}, {1.0, 1.0}, 0.0}; }
  static MonotoneFn constant(double k) { return {{0.0}, {0.0, 0.0}, k}; }
  // Flat at value_at_floor below floor_x, then piecewise linear above.
  static MonotoneFn limited_liability(double floor_x, double value_at_floor,
                                      std::vector<double> knots_above,
                                      std::vector<double> slopes_above) {
    std::vector<double> knots{floor_x};
    knots.insert(knots.end(), knots_above.begin(), knots_above.end());
    std::vector<double> slopes{0.0};
    slopes.insert(slopes.end(), slopes_above.begin(), slopes_above.end());
    return {std::move(knots), std::move(slopes), value_at_floor};
  }

  double operator()(double x) const {
    if (x <= knots_.front()) return v0_ - slopes_.front() * (knots_.front() - x);
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (x <= knots_[i])
        return knot_values_[i - 1] + slopes_[i] * (x - knots_[i - 1]);
    return knot_values_.back() + slopes_.back() * (x - knots_.back());
  }

  bool strictly_increasing() const {
    for (double s : slopes_)
      if (!(s > 0.0)) return false;
    return true;
  }

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& slopes() const { return slopes_; }
  double value_at_first_knot() const { return v0_; }

 private:
  std::vector<double> knots_, slopes_;
  double v0_;
  std::vector<double> knot_values_;
};

}  // namespace supertail
