#include "grd/eig_utils.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace grd {

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {  // strict: ties go to the lower index
        best = a;
        arg = i;
      }
    }
    if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

namespace {

bool lex_greater(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

// Replace the columns [lo, hi) of `vecs` (an orthonormal basis of one
// eigenspace) by the projected-identity Gram-Schmidt basis of that space.
void pin_degenerate_basis(Eigen::MatrixXd& vecs, int lo, int hi) {
  const int dim = hi - lo;
  if (dim <= 1) return;
  const Eigen::MatrixXd basis = vecs.middleCols(lo, dim);
  Eigen::MatrixXd out(vecs.rows(), dim);
  int filled = 0;
  for (Eigen::Index e = 0; e < vecs.rows() && filled < dim; ++e) {
    // Projection of e_i onto the eigenspace, then off the picked vectors.
    Eigen::VectorXd v = basis * basis.row(e).transpose();
    for (int c = 0; c < filled; ++c) v -= out.col(c).dot(v) * out.col(c);
    const double nrm = v.norm();
    if (nrm < 1e-8) continue;
    out.col(filled++) = v / nrm;
  }
  if (filled < dim)
    throw std::runtime_error("pin_degenerate_basis: eigenspace span lost");
  vecs.middleCols(lo, dim) = out;
}

}  // namespace

SymEigen sym_eigs_descending(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("sym_eigs_descending: matrix must be square");
  const Eigen::Index n = m.rows();
  SymEigen result;
  if (n == 0) {
    result.values = Eigen::VectorXd(0);
    result.vectors = Eigen::MatrixXd(0, 0);
    return result;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eigs_descending: eigensolver failed");

  // Eigen returns ascending order; flip to descending.
  result.values = solver.eigenvalues().reverse();
  result.vectors = solver.eigenvectors().rowwise().reverse();

  const double scale = std::max(1.0, std::abs(result.values[0]));
  const double tol =
      1e-9 * std::max(scale, std::abs(result.values[n - 1]));

  int lo = 0;
  while (lo < n) {
    int hi = lo + 1;
    while (hi < n && std::abs(result.values[hi] - result.values[lo]) <= tol)
      ++hi;
    pin_degenerate_basis(result.vectors, lo, hi);
    lo = hi;
  }

  fix_signs(result.vectors);

  // Order within tied groups: lexicographic descending on entries.
  lo = 0;
  while (lo < n) {
    int hi = lo + 1;
    while (hi < n && std::abs(result.values[hi] - result.values[lo]) <= tol)
      ++hi;
    if (hi - lo > 1) {
      std::vector<int> order(hi - lo);
      std::iota(order.begin(), order.end(), lo);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return lex_greater(result.vectors.col(a), result.vectors.col(b));
      });
      Eigen::MatrixXd tmp(n, hi - lo);
      for (int c = 0; c < hi - lo; ++c) tmp.col(c) = result.vectors.col(order[c]);
      result.vectors.middleCols(lo, hi - lo) = tmp;
    }
    lo = hi;
  }
  return result;
}

}  // namespace grd
