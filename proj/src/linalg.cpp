#include "tdaf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "tdaf/errors.hpp"

#ifdef TDAF_HAVE_UMFPACK
#include <umfpack.h>
#else
#include <Eigen/SparseLU>
#endif

namespace tdaf {

namespace {

// Reciprocal condition estimate below which a factorization is rejected.
constexpr double kSingularRcond = 1e-14;
constexpr double kResidualBound = 1e-10;

bool same_pattern(const SparseMatrix& a, const std::vector<int>& outer, const std::vector<int>& inner) {
  if (static_cast<size_t>(a.outerSize() + 1) != outer.size() || static_cast<size_t>(a.nonZeros()) != inner.size()) {
    return false;
  }
  return std::equal(outer.begin(), outer.end(), a.outerIndexPtr()) &&
         std::equal(inner.begin(), inner.end(), a.innerIndexPtr());
}

}  // namespace

SparseMatrix from_triplets(int n_rows, int n_cols, std::span<const Triplet> triplets) {
  if (n_rows < 0 || n_cols < 0) throw StructuralError("from_triplets: negative dimensions");
  for (const Triplet& t : triplets) {
    if (t.row() < 0 || t.row() >= n_rows || t.col() < 0 || t.col() >= n_cols) {
      throw StructuralError("from_triplets: entry (" + std::to_string(t.row()) + ", " + std::to_string(t.col()) +
                            ") outside " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
  }
  SparseMatrix a(n_rows, n_cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

namespace {

void check_order(const std::vector<int>& order, int n) {
  if (order.empty()) return;
  if (static_cast<int>(order.size()) != n) throw StructuralError("lu: column order has wrong length");
  std::vector<char> seen(n, 0);
  for (int c : order) {
    if (c < 0 || c >= n || seen[c]) throw StructuralError("lu: column order is not a permutation");
    seen[c] = 1;
  }
}

void dissect(std::vector<int>& idx, std::span<const Eigen::Vector2d> pts, int i0, int i1, int j0, int j1, double x0,
             double y0, double hx, double hy, std::vector<int>& out) {
  constexpr size_t kLeaf = 64;
  if (idx.size() <= kLeaf || (i1 - i0 < 2 && j1 - j0 < 2)) {
    out.insert(out.end(), idx.begin(), idx.end());
    return;
  }
  const bool cut_x = (i1 - i0) * hx >= (j1 - j0) * hy;
  const int m = cut_x ? (i0 + i1) / 2 : (j0 + j1) / 2;
  const double c = cut_x ? x0 + m * hx : y0 + m * hy;
  const double tol = 1e-9 * (cut_x ? hx : hy);
  std::vector<int> lo, hi, sep;
  for (int k : idx) {
    const double v = cut_x ? pts[k].x() : pts[k].y();
    if (std::abs(v - c) <= tol) {
      sep.push_back(k);
    } else if (v < c) {
      lo.push_back(k);
    } else {
      hi.push_back(k);
    }
  }
  if (cut_x) {
    dissect(lo, pts, i0, m, j0, j1, x0, y0, hx, hy, out);
    dissect(hi, pts, m, i1, j0, j1, x0, y0, hx, hy, out);
  } else {
    dissect(lo, pts, i0, i1, j0, m, x0, y0, hx, hy, out);
    dissect(hi, pts, i0, i1, m, j1, x0, y0, hx, hy, out);
  }
  out.insert(out.end(), sep.begin(), sep.end());
}

}  // namespace

std::vector<int> nested_dissection_order(std::span<const Eigen::Vector2d> points, double x0, double y0, double hx,
                                         double hy, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(hx > 0.0) || !(hy > 0.0)) throw ParameterError("nested_dissection_order: bad grid");
  std::vector<int> inside, rest;
  for (int k = 0; k < static_cast<int>(points.size()); ++k) {
    (points[k].allFinite() ? inside : rest).push_back(k);
  }
  std::vector<int> out;
  out.reserve(points.size());
  dissect(inside, points, 0, nx, 0, ny, x0, y0, hx, hy, out);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

struct SparseLu::Impl {
  SparseMatrix a;
  std::vector<int> outer;
  std::vector<int> inner;
  std::vector<int> order;
  double a_norm = 0.0;
  int analyses = 0;
  bool factorized = false;

#ifdef TDAF_HAVE_UMFPACK
  void* symbolic = nullptr;
  void* numeric = nullptr;
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];

  Impl() { umfpack_di_defaults(control); }
  ~Impl() { release(); }

  void release() {
    if (numeric) umfpack_di_free_numeric(&numeric);
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    numeric = nullptr;
    symbolic = nullptr;
  }

  long weakest_pivot_column() const {
    const int n = static_cast<int>(a.rows());
    std::vector<int> q(n);
    std::vector<double> udiag(n);
    int do_recip = 0;
    const int status = umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, q.data(),
                                              udiag.data(), &do_recip, nullptr, numeric);
    if (status != UMFPACK_OK) return -1;
    int k = 0;
    for (int i = 1; i < n; ++i) {
      if (std::abs(udiag[i]) < std::abs(udiag[k])) k = i;
    }
    return q[k];
  }
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  Eigen::SparseLU<SparseMatrix, Eigen::NaturalOrdering<int>> lu_ordered;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  SparseMatrix permuted;
#endif
};

SparseLu::SparseLu() : impl_(std::make_unique<Impl>()) {}
SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

int SparseLu::analyses() const { return impl_->analyses; }

void SparseLu::factorize(const SparseMatrix& matrix, const std::vector<int>& column_order) {
  if (matrix.rows() != matrix.cols()) throw StructuralError("lu: matrix is not square");
  check_order(column_order, static_cast<int>(matrix.rows()));
  Impl& s = *impl_;
  s.factorized = false;
  s.a = matrix;
  s.a.makeCompressed();
  const bool reuse = s.analyses > 0 && same_pattern(s.a, s.outer, s.inner) && column_order == s.order;
  s.a_norm = 0.0;
  {
    Vector row_sum = Vector::Zero(s.a.rows());
    for (int c = 0; c < s.a.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(s.a, c); it; ++it) row_sum[it.row()] += std::abs(it.value());
    }
    s.a_norm = row_sum.size() ? row_sum.maxCoeff() : 0.0;
  }

#ifdef TDAF_HAVE_UMFPACK
  const int n = static_cast<int>(s.a.rows());
  if (!reuse) {
    s.release();
    int status;
    if (column_order.empty()) {
      s.control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_AUTO;
      status = umfpack_di_symbolic(n, n, s.a.outerIndexPtr(), s.a.innerIndexPtr(), s.a.valuePtr(), &s.symbolic,
                                   s.control, s.info);
    } else {
      s.control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
      status = umfpack_di_qsymbolic(n, n, s.a.outerIndexPtr(), s.a.innerIndexPtr(), s.a.valuePtr(),
                                    const_cast<int*>(column_order.data()), &s.symbolic, s.control, s.info);
    }
    if (status != UMFPACK_OK) throw SolverError("lu: symbolic analysis failed (status " + std::to_string(status) + ")", -1);
    s.order = column_order;
    s.outer.assign(s.a.outerIndexPtr(), s.a.outerIndexPtr() + s.a.outerSize() + 1);
    s.inner.assign(s.a.innerIndexPtr(), s.a.innerIndexPtr() + s.a.nonZeros());
    ++s.analyses;
  }
  if (s.numeric) umfpack_di_free_numeric(&s.numeric);
  const int status = umfpack_di_numeric(s.a.outerIndexPtr(), s.a.innerIndexPtr(), s.a.valuePtr(), s.symbolic,
                                        &s.numeric, s.control, s.info);
  const double rcond = s.info[UMFPACK_RCOND];
  if (status == UMFPACK_WARNING_singular_matrix || (status == UMFPACK_OK && !(rcond >= kSingularRcond))) {
    const long pivot = s.weakest_pivot_column();
    char rc[32];
    std::snprintf(rc, sizeof rc, "%.3e", rcond);
    throw SolverError("lu: singular matrix (status " + std::to_string(status) + ", rcond " + rc + ", pivot column " +
                          std::to_string(pivot) + "); check pressure gauge and boundary conditions",
                      pivot);
  }
  if (status != UMFPACK_OK) throw SolverError("lu: numeric factorization failed (status " + std::to_string(status) + ")", -1);
#else
  const bool ordered = !column_order.empty();
  if (ordered) {
    // perm maps original index to position in the ordering.
    std::vector<int> pos(column_order.size());
    for (size_t k = 0; k < column_order.size(); ++k) pos[column_order[k]] = static_cast<int>(k);
    s.perm.indices() = Eigen::Map<const Eigen::VectorXi>(pos.data(), static_cast<Eigen::Index>(pos.size()));
    s.permuted = s.a.twistedBy(s.perm);
    s.permuted.makeCompressed();
  }
  if (!reuse) {
    if (ordered) {
      s.lu_ordered.analyzePattern(s.permuted);
    } else {
      s.lu.analyzePattern(s.a);
    }
    s.order = column_order;
    s.outer.assign(s.a.outerIndexPtr(), s.a.outerIndexPtr() + s.a.outerSize() + 1);
    s.inner.assign(s.a.innerIndexPtr(), s.a.innerIndexPtr() + s.a.nonZeros());
    ++s.analyses;
  }
  Eigen::ComputationInfo info;
  std::string msg;
  if (ordered) {
    s.lu_ordered.factorize(s.permuted);
    info = s.lu_ordered.info();
    if (info != Eigen::Success) msg = s.lu_ordered.lastErrorMessage();
  } else {
    s.lu.factorize(s.a);
    info = s.lu.info();
    if (info != Eigen::Success) msg = s.lu.lastErrorMessage();
  }
  if (info != Eigen::Success) {
    long pivot = -1;
    const auto pos = msg.find_last_of(' ');
    if (pos != std::string::npos) {
      try {
        pivot = std::stol(msg.substr(pos + 1)) - 1;
      } catch (...) {
      }
    }
    if (ordered && pivot >= 0 && pivot < static_cast<long>(column_order.size())) pivot = column_order[pivot];
    throw SolverError("lu: singular matrix (" + msg + "); check pressure gauge and boundary conditions", pivot);
  }
#endif
  s.factorized = true;
}

std::pair<Vector, LinearSolveReport> SparseLu::solve(const Vector& b) const {
  const Impl& s = *impl_;
  if (!s.factorized) throw SolverError("lu: solve before a successful factorization", -1);
  if (b.size() != s.a.rows()) throw StructuralError("lu: right-hand side has wrong length");

  Vector x(b.size());
#ifdef TDAF_HAVE_UMFPACK
  double info[UMFPACK_INFO];
  const int status = umfpack_di_solve(UMFPACK_A, s.a.outerIndexPtr(), s.a.innerIndexPtr(), s.a.valuePtr(), x.data(),
                                      b.data(), s.numeric, s.control, info);
  if (status != UMFPACK_OK) throw SolverError("lu: solve failed (status " + std::to_string(status) + ")", -1);
#else
  if (s.order.empty()) {
    x = s.lu.solve(b);
  } else {
    const Vector y = s.lu_ordered.solve(s.perm * b);
    x = s.perm.transpose() * y;
  }
#endif

  LinearSolveReport report;
  report.factor_ok = true;
  const Vector r = s.a * x - b;
  report.residual_norm = r.norm();
  const double bound = kResidualBound * (s.a_norm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>());
  if (!std::isfinite(report.residual_norm) || r.lpNorm<Eigen::Infinity>() > bound) {
    throw SolverError("lu: residual " + std::to_string(report.residual_norm) + " exceeds bound", -1);
  }
  return {std::move(x), report};
}

std::pair<Vector, LinearSolveReport> lu_solve(const SparseMatrix& a, const Vector& b,
                                              const std::vector<int>& column_order) {
  SparseLu lu;
  lu.factorize(a, column_order);
  return lu.solve(b);
}

}  // namespace tdaf
