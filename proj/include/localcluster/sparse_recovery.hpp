#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "localcluster/error.hpp"
#include "localcluster/node_set.hpp"
#include "localcluster/random.hpp"
#include "localcluster/selection.hpp"

namespace localcluster {

/// A matrix that can enumerate the nonzeros of any one column.
template <class Op>
concept ColumnOperator = requires(const Op& op, std::size_t j) {
  { op.rows() } -> std::convertible_to<std::size_t>;
  { op.cols() } -> std::convertible_to<std::size_t>;
  op.for_each_in_column(j, [](std::size_t, double) {});
};

template <class Op>
concept FastTranspose = requires(const Op& op, std::span<const double> r, std::span<double> out) {
  op.transpose_apply(r, out);
};

class DenseColumnOperator {
public:
  explicit DenseColumnOperator(Eigen::MatrixXd m) : m_(std::move(m)) {}

  std::size_t rows() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(m_.cols()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

  template <class F>
  void for_each_in_column(std::size_t j, F&& f) const {
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      const double v = m_(i, static_cast<Eigen::Index>(j));
      if (v != 0.0) f(static_cast<std::size_t>(i), v);
    }
  }

private:
  Eigen::MatrixXd m_;
};

/// The columns `columns[0], columns[1], ...` of a base operator, renumbered 0..k-1.
template <ColumnOperator Base>
class ColumnSubset {
public:
  ColumnSubset(const Base& base, std::vector<std::size_t> columns)
      : base_(&base), columns_(std::move(columns)) {}

  std::size_t rows() const { return base_->rows(); }
  std::size_t cols() const noexcept { return columns_.size(); }
  std::size_t base_column(std::size_t j) const { return columns_[j]; }
  std::span<const std::size_t> base_columns() const noexcept { return columns_; }

  template <class F>
  void for_each_in_column(std::size_t j, F&& f) const {
    base_->for_each_in_column(columns_[j], std::forward<F>(f));
  }

  void transpose_apply(std::span<const double> r, std::span<double> out) const
    requires FastTranspose<Base>
  {
    std::vector<double> full(base_->cols());
    base_->transpose_apply(r, full);
    for (std::size_t j = 0; j < columns_.size(); ++j) out[j] = full[columns_[j]];
  }

private:
  const Base* base_;
  std::vector<std::size_t> columns_;
};

/// Φᵀ r.
template <ColumnOperator Op>
std::vector<double> correlate(const Op& phi, std::span<const double> r) {
  std::vector<double> out(phi.cols(), 0.0);
  if constexpr (FastTranspose<Op>) {
    phi.transpose_apply(r, out);
  } else {
    for (std::size_t j = 0; j < phi.cols(); ++j) {
      double acc = 0.0;
      phi.for_each_in_column(j, [&](std::size_t i, double v) { acc += v * r[i]; });
      out[j] = acc;
    }
  }
  return out;
}

namespace detail {

// Compressed-column copy of Φ restricted to a support.
struct GatheredColumns {
  std::size_t rows = 0;
  std::vector<std::size_t> ptr{0};
  std::vector<std::size_t> row_index;
  std::vector<double> values;

  std::size_t cols() const noexcept { return ptr.size() - 1; }

  template <ColumnOperator Op>
  static GatheredColumns gather(const Op& phi, std::span<const NodeId> support) {
    GatheredColumns g;
    g.rows = phi.rows();
    g.ptr.reserve(support.size() + 1);
    for (NodeId j : support) {
      phi.for_each_in_column(j, [&](std::size_t i, double v) {
        g.row_index.push_back(i);
        g.values.push_back(v);
      });
      g.ptr.push_back(g.row_index.size());
    }
    return g;
  }

  void multiply(std::span<const double> c, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t a = 0; a < cols(); ++a) {
      const double ca = c[a];
      if (ca == 0.0) continue;
      for (std::size_t k = ptr[a]; k < ptr[a + 1]; ++k) out[row_index[k]] += values[k] * ca;
    }
  }

  void transpose_multiply(std::span<const double> r, std::span<double> out) const {
    for (std::size_t a = 0; a < cols(); ++a) {
      double acc = 0.0;
      for (std::size_t k = ptr[a]; k < ptr[a + 1]; ++k) acc += values[k] * r[row_index[k]];
      out[a] = acc;
    }
  }

  double frobenius_squared() const {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return acc;
  }

  Eigen::VectorXd column_squared_norms() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(cols()));
    for (std::size_t a = 0; a < cols(); ++a) {
      double acc = 0.0;
      for (std::size_t k = ptr[a]; k < ptr[a + 1]; ++k) acc += values[k] * values[k];
      out[static_cast<Eigen::Index>(a)] = acc;
    }
    return out;
  }

  // Φ_Sᵀ Φ_S accumulated row by row, so cost scales with the per-row overlap.
  Eigen::MatrixXd gram() const {
    const auto k = static_cast<Eigen::Index>(cols());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
    std::vector<std::size_t> row_start(rows + 1, 0);
    for (std::size_t r : row_index) ++row_start[r + 1];
    for (std::size_t i = 0; i < rows; ++i) row_start[i + 1] += row_start[i];
    std::vector<std::size_t> fill(row_start.begin(), row_start.end() - 1);
    std::vector<std::pair<Eigen::Index, double>> by_row(row_index.size());
    for (std::size_t a = 0; a < cols(); ++a) {
      for (std::size_t e = ptr[a]; e < ptr[a + 1]; ++e) {
        by_row[fill[row_index[e]]++] = {static_cast<Eigen::Index>(a), values[e]};
      }
    }
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t p = row_start[i]; p < row_start[i + 1]; ++p) {
        const auto [a, va] = by_row[p];
        for (std::size_t q = p; q < row_start[i + 1]; ++q) {
          const auto [b, vb] = by_row[q];
          g(a, b) += va * vb;
        }
      }
    }
    return Eigen::MatrixXd(g.selfadjointView<Eigen::Upper>());
  }
};

}  // namespace detail

struct LeastSquaresOptions {
  /// Supports up to this size use a dense factorization of the Gram matrix;
  /// larger ones run preconditioned conjugate gradients on the same system.
  std::size_t dense_limit = 256;
  double cg_tolerance = 1e-11;
  std::size_t cg_max_iterations = 2000;
  /// Pivot ratio below which the Gram matrix counts as numerically singular.
  double singular_ratio = 1e-12;
};

struct LeastSquaresResult {
  std::vector<double> coefficients;
  bool ridge = false;
  std::size_t cg_iterations = 0;
};

namespace detail {

inline double ridge_parameter(const GatheredColumns& cols) {
  const double lambda = 1e-10 * cols.frobenius_squared() / static_cast<double>(cols.cols());
  return lambda > 0.0 ? lambda : std::numeric_limits<double>::min();
}

inline LeastSquaresResult solve_dense(const GatheredColumns& cols, const Eigen::VectorXd& rhs,
                                      const LeastSquaresOptions& opt) {
  LeastSquaresResult out;
  Eigen::MatrixXd gram = cols.gram();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  bool singular = ldlt.info() != Eigen::Success;
  if (!singular) {
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    singular = d.minCoeff() <= opt.singular_ratio * d.maxCoeff();
  }
  if (singular) {
    gram.diagonal().array() += ridge_parameter(cols);
    ldlt.compute(gram);
    out.ridge = true;
  }
  const Eigen::VectorXd c = ldlt.solve(rhs);
  if (!c.allFinite()) throw NumericError("least squares: non-finite solution");
  out.coefficients.assign(c.data(), c.data() + c.size());
  return out;
}

// Jacobi-preconditioned CG on (Φ_SᵀΦ_S + λI) c = rhs. Returns false on breakdown
// or stagnation so the caller can retry with a ridge term.
inline bool conjugate_gradient(const GatheredColumns& cols, const Eigen::VectorXd& rhs, double lambda,
                               const LeastSquaresOptions& opt, Eigen::VectorXd& c, std::size_t& iterations) {
  const auto k = static_cast<Eigen::Index>(cols.cols());
  std::vector<double> tmp_rows(cols.rows);
  auto gram_apply = [&](const Eigen::VectorXd& p, Eigen::VectorXd& out) {
    cols.multiply({p.data(), static_cast<std::size_t>(k)}, tmp_rows);
    cols.transpose_multiply(tmp_rows, {out.data(), static_cast<std::size_t>(k)});
    out += lambda * p;
  };
  Eigen::VectorXd diag = cols.column_squared_norms().array() + lambda;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(diag[i] > 0.0)) diag[i] = 1.0;
  }
  const Eigen::VectorXd inv_diag = diag.cwiseInverse();

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    c.setZero();
    return true;
  }
  Eigen::VectorXd gp(k);
  gram_apply(c, gp);
  Eigen::VectorXd r = rhs - gp;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double target = opt.cg_tolerance * rhs_norm;
  for (iterations = 0; iterations < opt.cg_max_iterations; ++iterations) {
    if (r.norm() <= target) return true;
    gram_apply(p, gp);
    const double curvature = p.dot(gp);
    if (!(curvature > 0.0)) return false;
    const double alpha = rz / curvature;
    c += alpha * p;
    r -= alpha * gp;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return r.norm() <= target;
}

inline LeastSquaresResult solve_iterative(const GatheredColumns& cols, const Eigen::VectorXd& rhs,
                                          std::span<const double> warm_start, const LeastSquaresOptions& opt) {
  LeastSquaresResult out;
  const auto k = static_cast<Eigen::Index>(cols.cols());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
  if (warm_start.size() == static_cast<std::size_t>(k)) {
    for (Eigen::Index i = 0; i < k; ++i) c[i] = warm_start[static_cast<std::size_t>(i)];
  }
  std::size_t iterations = 0;
  if (!conjugate_gradient(cols, rhs, 0.0, opt, c, iterations)) {
    out.ridge = true;
    c.setZero();
    std::size_t more = 0;
    const bool ok = conjugate_gradient(cols, rhs, ridge_parameter(cols), opt, c, more);
    iterations += more;
    if (!ok && !c.allFinite()) throw NumericError("least squares: conjugate gradients diverged");
  }
  if (!c.allFinite()) throw NumericError("least squares: non-finite solution");
  out.cg_iterations = iterations;
  out.coefficients.assign(c.data(), c.data() + c.size());
  return out;
}

inline LeastSquaresResult least_squares_gathered(const detail::GatheredColumns& cols, std::span<const double> y,
                                          std::span<const double> warm_start, const LeastSquaresOptions& opt) {
  const auto k = static_cast<Eigen::Index>(cols.cols());
  if (k == 0) return {};
  Eigen::VectorXd rhs(k);
  cols.transpose_multiply(y, {rhs.data(), static_cast<std::size_t>(k)});
  if (static_cast<std::size_t>(k) <= opt.dense_limit) return solve_dense(cols, rhs, opt);
  return solve_iterative(cols, rhs, warm_start, opt);
}

}  // namespace detail

/// argmin_c ‖Φ_S c − y‖₂ via the Gram system Φ_SᵀΦ_S c = Φ_Sᵀ y. A ridge of
/// 1e-10·‖Φ_S‖_F²/|S| is added when that system is numerically singular.
template <ColumnOperator Op>
LeastSquaresResult least_squares_on_support(const Op& phi, std::span<const double> y, const NodeSet& support,
                                            const LeastSquaresOptions& opt = {},
                                            std::span<const double> warm_start = {}) {
  detail::require(y.size() == phi.rows(), "least_squares_on_support: measurement length mismatch");
  support.check_range(phi.cols(), "least_squares_on_support");
  const auto cols = detail::GatheredColumns::gather(phi, support.ids());
  return detail::least_squares_gathered(cols, y, warm_start, opt);
}

template <ColumnOperator Op>
struct SensingProblem {
  const Op& phi;
  std::span<const double> y;
  std::size_t sparsity = 1;
};

struct RecoveryResult {
  std::vector<double> x;
  NodeSet support;
  double residual_norm = 0.0;
  double initial_residual_norm = 0.0;
  std::size_t iterations = 0;
  bool ridge_used = false;
  /// Support after every iteration, starting with the initial correlation estimate.
  std::vector<NodeSet> support_trace;
};

struct SubspacePursuitOptions {
  /// 0 selects ceil(log2 N) + 1.
  std::size_t max_iter = 0;
  double min_relative_improvement = 1e-8;
  LeastSquaresOptions least_squares;
};

inline std::size_t default_max_iterations(std::size_t num_columns) {
  if (num_columns <= 1) return 1;
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(num_columns)))) + 1;
}

namespace detail {

inline double residual_into(const GatheredColumns& cols, std::span<const double> coeffs, std::span<const double> y,
                            std::vector<double>& r) {
  r.assign(y.size(), 0.0);
  if (cols.cols() > 0) cols.multiply(coeffs, r);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    r[i] = y[i] - r[i];
    acc += r[i] * r[i];
  }
  return std::sqrt(acc);
}

inline NodeSet top_support(std::span<const double> magnitudes, std::size_t s) {
  const auto picked = largest_magnitude(magnitudes, s);
  return NodeSet(std::vector<NodeId>(picked.begin(), picked.end()));
}

// Coefficients of `from` (on support `from_support`) laid out on `to_support`.
inline std::vector<double> restrict_to(const NodeSet& from_support, std::span<const double> from,
                                       const NodeSet& to_support) {
  std::vector<double> out(to_support.size(), 0.0);
  std::size_t i = 0;
  for (std::size_t k = 0; k < to_support.size(); ++k) {
    while (i < from_support.size() && from_support[i] < to_support[k]) ++i;
    if (i < from_support.size() && from_support[i] == to_support[k]) out[k] = from[i];
  }
  return out;
}

}  // namespace detail

/// Subspace Pursuit: greedy recovery of an s-sparse x with Φx ≈ y.
///
/// Each iteration merges the s strongest residual correlations into the
/// current support, solves least squares on the merged set, prunes back to
/// the s largest coefficients and re-solves. Stops at max_iter or as soon as
/// the residual fails to shrink; the best iterate is returned.
template <ColumnOperator Op>
RecoveryResult subspace_pursuit(const SensingProblem<Op>& problem, const SubspacePursuitOptions& opt = {}) {
  const Op& phi = problem.phi;
  const std::size_t n_cols = phi.cols();
  detail::require(problem.y.size() == phi.rows(), "subspace_pursuit: measurement length mismatch");
  detail::require(problem.sparsity >= 1, "subspace_pursuit: sparsity must be at least 1");
  const std::size_t s = std::min(problem.sparsity, n_cols);
  const std::size_t max_iter = opt.max_iter == 0 ? default_max_iterations(n_cols) : opt.max_iter;
  const std::span<const double> y = problem.y;

  RecoveryResult result;
  result.x.assign(n_cols, 0.0);
  double y_norm = 0.0;
  for (double v : y) y_norm += v * v;
  y_norm = std::sqrt(y_norm);
  if (y_norm == 0.0 || s == 0) {
    result.residual_norm = result.initial_residual_norm = y_norm;
    result.iterations = 1;
    result.support_trace.push_back({});
    return result;
  }

  auto solve = [&](const NodeSet& support, std::span<const double> warm, std::vector<double>& r, double& norm) {
    const auto cols = detail::GatheredColumns::gather(phi, support.ids());
    auto ls = detail::least_squares_gathered(cols, y, warm, opt.least_squares);
    result.ridge_used = result.ridge_used || ls.ridge;
    norm = detail::residual_into(cols, ls.coefficients, y, r);
    return ls.coefficients;
  };

  std::vector<double> corr = correlate(phi, y);
  NodeSet support = detail::top_support(corr, s);
  std::vector<double> residual;
  double residual_norm = 0.0;
  std::vector<double> coeffs = solve(support, {}, residual, residual_norm);
  result.initial_residual_norm = residual_norm;
  result.support_trace.push_back(support);
  result.iterations = 1;

  while (result.iterations < max_iter && residual_norm > 0.0) {
    corr = correlate(phi, residual);
    const NodeSet merged = set_union(support, detail::top_support(corr, s));
    std::vector<double> merged_residual;
    double merged_norm = 0.0;
    const auto merged_coeffs =
        solve(merged, detail::restrict_to(support, coeffs, merged), merged_residual, merged_norm);

    NodeSet pruned;
    {
      const auto keep = largest_magnitude(merged_coeffs, s);
      std::vector<NodeId> ids;
      ids.reserve(keep.size());
      for (std::size_t k : keep) ids.push_back(merged[k]);
      pruned = NodeSet(std::move(ids));
    }
    std::vector<double> next_residual;
    double next_norm = 0.0;
    auto next_coeffs = solve(pruned, detail::restrict_to(merged, merged_coeffs, pruned), next_residual, next_norm);
    ++result.iterations;
    result.support_trace.push_back(pruned);

    if (!(next_norm < residual_norm * (1.0 - opt.min_relative_improvement))) break;
    support = std::move(pruned);
    coeffs = std::move(next_coeffs);
    residual = std::move(next_residual);
    residual_norm = next_norm;
  }

  for (std::size_t k = 0; k < support.size(); ++k) result.x[support[k]] = coeffs[k];
  result.support = support;
  result.residual_norm = residual_norm;
  return result;
}

template <ColumnOperator Op>
RecoveryResult subspace_pursuit(const SensingProblem<Op>& problem, std::size_t max_iter) {
  SubspacePursuitOptions opt;
  opt.max_iter = max_iter;
  return subspace_pursuit(problem, opt);
}

/// Monte-Carlo lower bound on the restricted isometry constant δ_s: the
/// largest |‖Φx‖² − 1| over random unit-norm s-sparse x. Diagnostic only.
template <ColumnOperator Op>
double rip_probe(const Op& phi, std::size_t s, std::size_t trials, Rng& rng) {
  const std::size_t n_cols = phi.cols();
  detail::require(s >= 1 && s <= n_cols, "rip_probe: sparsity must be in [1, N]");
  std::normal_distribution<double> gauss;
  std::vector<std::size_t> columns(n_cols);
  std::vector<double> image(phi.rows());
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t j = 0; j < n_cols; ++j) columns[j] = j;
    for (std::size_t k = 0; k < s; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, n_cols - 1);
      std::swap(columns[k], columns[pick(rng)]);
    }
    std::vector<double> coeffs(s);
    double norm = 0.0;
    for (double& c : coeffs) {
      c = gauss(rng);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    std::fill(image.begin(), image.end(), 0.0);
    for (std::size_t k = 0; k < s; ++k) {
      const double c = coeffs[k] / norm;
      phi.for_each_in_column(columns[k], [&](std::size_t i, double v) { image[i] += v * c; });
    }
    double energy = 0.0;
    for (double v : image) energy += v * v;
    worst = std::max(worst, std::abs(energy - 1.0));
  }
  return worst;
}

}  // namespace localcluster
