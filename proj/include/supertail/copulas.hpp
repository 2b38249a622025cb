#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "supertail/distributions.hpp"
#include "supertail/rng.hpp"
#include "supertail/stats.hpp"

namespace supertail {

namespace detail {

// Cholesky-type factorization for positive semidefinite matrices, row-major.
// Pivoting rule: a diagonal pivot within tol of zero is treated as exactly
// zero and the remaining entries of its column must vanish within tol,
// otherwise the matrix is not PSD and construction fails.
inline std::vector<double> cholesky_psd(const std::vector<double>& a,
                                        std::size_t n, double tol = 1e-10) {
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (d > tol) {
      l[j * n + j] = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = a[i * n + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = s / l[j * n + j];
      }
    } else if (d > -tol) {
      l[j * n + j] = 0.0;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = a[i * n + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        if (std::abs(s) > tol * 10.0)
          throw std::invalid_argument(
              "cholesky_psd: matrix is not positive semidefinite");
        l[i * n + j] = 0.0;
      }
    } else {
      throw std::invalid_argument(
          "cholesky_psd: matrix is not positive semidefinite");
    }
  }
  return l;
}

}  // namespace detail

// Dependence structure descriptor for identically distributed coordinates.
class CopulaSpec {
 public:
  enum class Kind { independence, comonotone, mixture, gaussian_nsd };

  static CopulaSpec independence() { return CopulaSpec(Kind::independence); }
  static CopulaSpec comonotone() { return CopulaSpec(Kind::comonotone); }

  static CopulaSpec mixture(std::vector<double> weights,
                            std::vector<CopulaSpec> components) {
    if (weights.size() != components.size() || weights.empty())
      throw std::invalid_argument("Mixture: weight/component count mismatch");
    double s = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("Mixture: negative weight");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("Mixture: weights must sum to 1");
    CopulaSpec c(Kind::mixture);
    c.weights_ = std::move(weights);
    c.components_ = std::move(components);
    return c;
  }

  // Gaussian copula with unit diagonal, nonpositive off-diagonal entries and
  // a PSD correlation matrix (row-major). This is the constructive
  // weak-negative-association instance used throughout.
  static CopulaSpec gaussian_nsd(std::size_t dim,
                                 std::vector<double> corr_row_major) {
    if (dim == 0 || corr_row_major.size() != dim * dim)
      throw std::invalid_argument("GaussianNSD: bad matrix dimensions");
    for (std::size_t i = 0; i < dim; ++i) {
      if (std::abs(corr_row_major[i * dim + i] - 1.0) > 1e-12)
        throw std::invalid_argument("GaussianNSD: diagonal must be 1");
      for (std::size_t j = 0; j < dim; ++j) {
        if (std::abs(corr_row_major[i * dim + j] -
                     corr_row_major[j * dim + i]) > 1e-12)
          throw std::invalid_argument("GaussianNSD: matrix not symmetric");
        if (i != j && corr_row_major[i * dim + j] > 1e-12)
          throw std::invalid_argument(
              "GaussianNSD: off-diagonal entries must be nonpositive");
      }
    }
    CopulaSpec c(Kind::gaussian_nsd);
    c.dim_ = dim;
    c.corr_ = std::move(corr_row_major);
    c.chol_ = detail::cholesky_psd(c.corr_, dim);
    return c;
  }

  Kind kind() const { return kind_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<CopulaSpec>& components() const { return components_; }
  const std::vector<double>& corr() const { return corr_; }
  std::size_t gaussian_dim() const { return dim_; }

  // Uniforms consumed per row; mixtures reserve one selector slot.
  std::uint64_t row_budget(std::size_t d) const {
    switch (kind_) {
      case Kind::independence:
      case Kind::comonotone:
      case Kind::gaussian_nsd:
        return d;
      case Kind::mixture: {
        std::uint64_t m = 0;
        for (const auto& c : components_)
          m = std::max(m, c.row_budget(d));
        return 1 + m;
      }
    }
    return d;
  }

  void check_dimension(std::size_t d) const {
    if (kind_ == Kind::gaussian_nsd && dim_ != d)
      throw std::invalid_argument(
          "GaussianNSD: matrix dimension does not match d");
    if (kind_ == Kind::mixture)
      for (const auto& c : components_) c.check_dimension(d);
  }

  // Writes the d coordinate uniforms of one row, reading the stream at
  // absolute counters [base, base + row_budget).
  void fill_row(const RngStream& stream, std::uint64_t base,
                std::span<double> u) const {
    std::size_t d = u.size();
    switch (kind_) {
      case Kind::independence:
        for (std::size_t j = 0; j < d; ++j) u[j] = stream.uniform(base + j);
        return;
      case Kind::comonotone: {
        double v = stream.uniform(base);
        for (std::size_t j = 0; j < d; ++j) u[j] = v;
        return;
      }
      case Kind::gaussian_nsd: {
        std::vector<double> z(d);
        for (std::size_t j = 0; j < d; ++j)
          z[j] = normal_quantile(stream.uniform(base + j));
        for (std::size_t j = d; j-- > 0;) {
          double y = 0.0;
          for (std::size_t k = 0; k <= j; ++k) y += chol_[j * d + k] * z[k];
          u[j] = normal_cdf(y);
        }
        return;
      }
      case Kind::mixture: {
        double sel = stream.uniform(base);
        double acc = 0.0;
        std::size_t pick = components_.size() - 1;
        for (std::size_t c = 0; c < components_.size(); ++c) {
          acc += weights_[c];
          if (sel <= acc) {
            pick = c;
            break;
          }
        }
        components_[pick].fill_row(stream, base + 1, u);
        return;
      }
    }
  }

 private:
  explicit CopulaSpec(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<double> weights_;
  std::vector<CopulaSpec> components_;
  std::size_t dim_ = 0;
  std::vector<double> corr_;
  std::vector<double> chol_;
};

// n x d row-major sample with the given marginal on every coordinate. Rows
// are independent; the joint law of a row follows the copula. Output is a
// pure function of (stream, n, d), independent of threads or block size.
inline std::vector<double> sample_joint(const LossDistribution& marginal,
                                        const CopulaSpec& copula,
                                        std::size_t d, std::size_t n,
                                        const RngStream& stream,
                                        unsigned threads = 1) {
  if (d == 0) throw std::invalid_argument("sample_joint: d must be >= 1");
  copula.check_dimension(d);
  std::vector<double> out(n * d);
  std::uint64_t budget = copula.row_budget(d);
  for_blocks(n, kDefaultBlockSize, threads,
             [&](std::uint64_t, std::uint64_t b0, std::uint64_t b1) {
               std::vector<double> u(d);
               for (std::uint64_t i = b0; i < b1; ++i) {
                 copula.fill_row(stream, i * budget, u);
                 for (std::size_t j = 0; j < d; ++j)
                   out[i * d + j] = marginal.quantile(u[j]);
               }
             });
  return out;
}

}  // namespace supertail
