#pragma once

#include <Eigen/Dense>

namespace grd {

// Symmetric eigendecomposition with a fully pinned output: eigenvalues
// descending, and inside each group of numerically equal eigenvalues the
// solver's arbitrary basis is replaced by the Gram-Schmidt
// orthonormalization of the identity vectors projected onto the
// eigenspace. Every eigenvector then gets the sign fix (largest-|entry|
// coordinate nonnegative, ties to the lower index) and tied groups are
// ordered lexicographically descending on entries. The result depends
// only on the input matrix, not on solver internals.
struct SymEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns, paired with values
};

SymEigen sym_eigs_descending(const Eigen::MatrixXd& m);

// Applies the sign convention to each column in place.
void fix_signs(Eigen::MatrixXd& vectors);

}  // namespace grd
