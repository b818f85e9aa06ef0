#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "grd/krein.hpp"

namespace grd {

// Eigenvalues of a symmetric matrix split by sign: positive values
// descending, absolute negative values descending, paired orthonormal
// eigenvectors. Values below the zero cutoff are excluded from both
// sides.
struct SignedSpectrum {
  Vector pos_vals;  // > 0, descending
  Vector neg_vals;  // absolute values of negative eigenvalues, descending
  Matrix pos_vecs;  // n x n_pos
  Matrix neg_vecs;  // n x n_neg
  int n = 0;        // input matrix dimension

  int n_pos() const { return static_cast<int>(pos_vals.size()); }
  int n_neg() const { return static_cast<int>(neg_vals.size()); }
};

// Full symmetric eigendecomposition with |value| < 1e-12 * max(1, ||A||_op)
// classified as zero. Deterministic sign convention and degenerate-basis
// rule as in eig_utils. Rejects nonsymmetric or non-finite input.
SignedSpectrum signed_eigendecompose(const Matrix& a);

// Rows of the truncated weighted spectral embedding: node i gets
// positive coordinates (sqrt(lam_1) a_1i, ..., sqrt(lam_p1) a_p1,i) and
// the analogous negative block, each coordinate scaled by rho^{-1/2}.
struct Embedding {
  std::vector<KreinVector> rows;
  int p1 = 0, p2 = 0;
  double rho_used = 1.0;
};

Embedding embed(const SignedSpectrum& spec, int p1, int p2, double rho = 1.0);

// Empirical distribution putting 1/n mass at each embedded row.
DiscreteGRD to_grd(const Embedding& e);

// Eigenvalue thresholding rule: p1 = #{lam > c sqrt(n)}, p2 analogous.
std::pair<int, int> choose_dims(const SignedSpectrum& spec, int n,
                                double c = 1.0);

// Diagnostic power-law fit of the spectrum decay (alpha) and gap decay
// (beta). When both signs are present the per-rank minimum sequence is
// fitted. Ranks with values at or below `noise_floor` are dropped.
struct EigenDecayProfile {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  bool alpha_ok = false;
  bool beta_ok = false;
  int ranks_used = 0;
};

EigenDecayProfile fit_decay_profile(const SignedSpectrum& spec, int max_rank,
                                    double noise_floor = 0.0);

// Scree CSV: rank,abs_eigenvalue,sign with sign in {+,-}, descending.
void save_scree_csv(const SignedSpectrum& spec, const std::string& path);

// Embedding CSV: node_id,x1..xp1,y1..yp2. Optional labels are joined as a
// trailing `label` column.
void save_embedding_csv(const Embedding& e, const std::string& path,
                        const std::vector<std::string>* labels = nullptr);

}  // namespace grd
