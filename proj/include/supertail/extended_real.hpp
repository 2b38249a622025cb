#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace supertail {

// Extended-real value: a finite double or an infinity sentinel. Arithmetic
// follows the usual extended-real rules (delegated to IEEE semantics) and
// comparisons are total.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : v_(v) {}  // NOLINT: implicit by design

  static constexpr ExtReal infinity() {
    return ExtReal(std::numeric_limits<double>::infinity());
  }

  double value() const { return v_; }
  bool is_finite() const { return std::isfinite(v_); }
  bool is_pos_infinity() const {
    return v_ == std::numeric_limits<double>::infinity();
  }

  friend ExtReal operator+(ExtReal a, ExtReal b) { return {a.v_ + b.v_}; }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return {a.v_ - b.v_}; }
  friend ExtReal operator*(ExtReal a, ExtReal b) { return {a.v_ * b.v_}; }
  ExtReal& operator+=(ExtReal o) {
    v_ += o.v_;
    return *this;
  }
  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
  friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
  friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
  friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }

  std::string str() const {
    if (is_pos_infinity()) return "inf";
    if (v_ == -std::numeric_limits<double>::infinity()) return "-inf";
    return std::to_string(v_);
  }

 private:
  double v_ = 0.0;
};

}  // namespace supertail
