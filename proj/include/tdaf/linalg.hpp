#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace tdaf {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Compressed matrix with duplicates summed. Explicit zeros are kept so that
/// repeated assemblies produce the same sparsity pattern.
SparseMatrix from_triplets(int n_rows, int n_cols, std::span<const Triplet> triplets);

struct LinearSolveReport {
  /// ||A x - b||_2, recomputed after the solve.
  double residual_norm = 0.0;
  bool factor_ok = false;
};

/// Sparse LU with partial pivoting. The symbolic analysis is reused for as
/// long as consecutive matrices share a sparsity pattern.
///
/// Throws SolverError (with the failing pivot column when known) if the matrix
/// is singular to working precision or the solve misses
/// ||Ax - b|| <= 1e-10 (||A|| ||x|| + ||b||) in the infinity norm.
class SparseLu {
 public:
  SparseLu();
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;
  SparseLu(const SparseLu&) = delete;
  SparseLu& operator=(const SparseLu&) = delete;

  /// `column_order`, when non-empty, is a fill-reducing permutation of the
  /// columns (new position k holds original column column_order[k]).
  void factorize(const SparseMatrix& a, const std::vector<int>& column_order = {});
  std::pair<Vector, LinearSolveReport> solve(const Vector& b) const;

  /// Number of symbolic analyses performed so far.
  int analyses() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::pair<Vector, LinearSolveReport> lu_solve(const SparseMatrix& a, const Vector& b,
                                              const std::vector<int>& column_order = {});

/// Nested-dissection ordering of unknowns located at `points` on a structured
/// nx x ny grid with origin (x0, y0) and spacings (hx, hy). Subdomains are
/// split along grid lines, separators are numbered after both halves, and
/// points with non-finite coordinates come last.
std::vector<int> nested_dissection_order(std::span<const Eigen::Vector2d> points, double x0, double y0, double hx,
                                         double hy, int nx, int ny);

}  // namespace tdaf
