#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace supertail {

struct QuadResult {
  double value = 0.0;
  bool diverged = false;
};

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

template <class F>
double adaptive_simpson(F f, double a, double b, double tol, int depth = 48) {
  if (!(a < b)) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Integrates g over [t0, inf) in chunks, where g decays (for convergent
// cases) like e^{-c t}. Non-decaying chunks flag divergence; a slowly
// decaying geometric remainder is completed by extrapolation instead of
// being truncated (tail indices just above 1 decay at e.g. 0.97 per chunk
// and would otherwise lose a visible fraction of the integral).
template <class G>
QuadResult chunked_exponential_tail(G g, double t0, double tol_abs,
                                    double tol_rel) {
  QuadResult r;
  const double chunk_len = 3.0;
  double c_prev = 0.0, c_curr = 0.0;
  bool warmed = false;
  int small_streak = 0;
  int growth_streak = 0;
  for (int j = 0; j < 256; ++j) {
    double lo = t0 + j * chunk_len;
    if (lo > 700.0) break;  // e^{-t} underflow region
    double hi = lo + chunk_len;
    double c = adaptive_simpson(g, lo, hi, tol_abs * 0.05 + 1e-300, 40);
    r.value += c;
    double floor = tol_abs + tol_rel * std::abs(r.value);
    if (std::abs(c) <= floor) {
      if (++small_streak >= 2) return r;
    } else {
      small_streak = 0;
    }
    if (j > 0 && std::abs(c) >= 0.999 * std::abs(c_curr) &&
        std::abs(c) > floor) {
      if (++growth_streak >= 3) {
        r.diverged = true;
        r.value = std::numeric_limits<double>::infinity();
        return r;
      }
    } else {
      growth_streak = 0;
    }
    c_prev = c_curr;
    c_curr = c;
    warmed = j > 0;
  }
  // budget exhausted while chunks were still decaying geometrically:
  // complete the remainder by extrapolation instead of truncating it
  if (warmed && c_prev != 0.0 && c_curr != 0.0) {
    double ratio = c_curr / c_prev;
    if (ratio > 0.0 && ratio < 0.995)
      r.value += c_curr * ratio / (1.0 - ratio);
  }
  return r;
}

}  // namespace detail

// Integral of a quantile-type function over [a,b] within [0,1].
//
// q(u) is the integrand; tail_q(s) must equal q(1-s) computed stably for
// tail probabilities s near zero (1-s rounds to 1 in double precision long
// before s underflows). Endpoints at 0 and 1 are handled by an exponential
// substitution; divergence of the upper integral is detected and reported.
template <class Q, class TailQ>
QuadResult quantile_integral_fn(Q q, TailQ tail_q, double a, double b,
                                double tol = 1e-11) {
  if (!(0.0 <= a && a < b && b <= 1.0))
    throw std::invalid_argument("quantile_integral: need 0 <= a < b <= 1");
  QuadResult out;
  double lo = a, hi = b;

  // Left endpoint at 0: substitute u = e^{-t}.
  if (lo == 0.0) {
    double cut = std::min(0.25, hi);
    auto g = [&](double t) { return q(std::exp(-t)) * std::exp(-t); };
    QuadResult left =
        detail::chunked_exponential_tail(g, -std::log(cut), tol, tol);
    if (left.diverged) return {left.value, true};
    out.value += left.value;
    lo = cut;
  }
  // Right endpoint at 1: substitute s = 1-u = e^{-t}.
  if (hi == 1.0) {
    double cut = std::max(0.75, lo);
    auto g = [&](double t) { return tail_q(std::exp(-t)) * std::exp(-t); };
    QuadResult right =
        detail::chunked_exponential_tail(g, -std::log(1.0 - cut), tol, tol);
    if (right.diverged) return {right.value, true};
    out.value += right.value;
    hi = cut;
  }
  if (lo < hi) {
    double scale = std::max({1.0, std::abs(q(lo)), std::abs(q(hi))});
    out.value += detail::adaptive_simpson(q, lo, hi, tol * scale);
  }
  return out;
}

}  // namespace supertail
