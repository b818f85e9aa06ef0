#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace grd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point z = (x, y) in the Krein space H+ (-) H-, stored as finite
// positive and negative coordinate blocks with implicit zero tails.
struct KreinVector {
  Vector pos;
  Vector neg;

  KreinVector() : pos(0), neg(0) {}
  KreinVector(Vector p, Vector n);

  int p1() const { return static_cast<int>(pos.size()); }
  int p2() const { return static_cast<int>(neg.size()); }

  // Norm of the isomorphic Hilbert space: ||z||^2 = ||x||^2 + ||y||^2.
  double squared_norm() const { return pos.squaredNorm() + neg.squaredNorm(); }
  double norm() const;
};

// <a, b>_K = <pos_a, pos_b> - <neg_a, neg_b>; shorter blocks are
// zero-padded, so mismatched dims are fine.
double krein_inner(const KreinVector& a, const KreinVector& b);

// ||a - b|| in the isomorphic Hilbert space (the transport ground cost).
double krein_distance(const KreinVector& a, const KreinVector& b);

// T(x) = min(max(x, 0), 1).
double truncate_prob(double x);

// A blockwise orthogonal transform Q+ (+) Q-.
struct OrthogonalPair {
  Matrix q_pos;
  Matrix q_neg;

  static OrthogonalPair identity(int p1, int p2);
  bool is_orthogonal(double tol = 1e-10) const;
  KreinVector apply(const KreinVector& z) const;
  OrthogonalPair transpose() const;
};

// A weighted finite set of Krein vectors. Both exact model GRDs (point
// masses) and empirical embeddings live here. All atoms share the same
// (p1, p2); weights are renormalized when they sum within 1e-9 of 1 and
// rejected otherwise.
class DiscreteGRD {
 public:
  DiscreteGRD(std::vector<KreinVector> atoms, Vector weights,
              bool canonical = false);

  // Uniform weights.
  explicit DiscreteGRD(std::vector<KreinVector> atoms);

  int size() const { return static_cast<int>(atoms_.size()); }
  int p1() const { return p1_; }
  int p2() const { return p2_; }
  const std::vector<KreinVector>& atoms() const { return atoms_; }
  const KreinVector& atom(int i) const { return atoms_[i]; }
  const Vector& weights() const { return weights_; }
  bool canonical() const { return canonical_; }
  void set_canonical(bool c) { canonical_ = c; }

  // Valid GRD iff <z_i, z_j> in [0,1] for all pairs including i == j.
  bool pair_validity(double tol = 1e-9) const;

  double mean_norm() const;        // E ||Z||
  Matrix second_moment_pos() const;  // E[X X^T], weighted
  Matrix second_moment_neg() const;  // E[Y Y^T]
  Matrix cross_moment() const;       // E[X Y^T]

  DiscreteGRD transformed(const OrthogonalPair& q) const;
  DiscreteGRD scaled(double factor) const;

 private:
  std::vector<KreinVector> atoms_;
  Vector weights_;
  int p1_ = 0, p2_ = 0;
  bool canonical_ = false;
};

struct CanonicalizeResult {
  DiscreteGRD grd;
  OrthogonalPair rotation;
  // Diagnostic only: max |E[X_j Y_j']| after rotation. A separate pair of
  // block rotations cannot force this to zero in general.
  double cross_moment_residual = 0.0;
};

// Rotate F by some Q+ (+) Q- so the weighted second-moment matrix of each
// block is diagonal with nonincreasing diagonal; sign convention makes
// each coordinate's largest-magnitude loading nonnegative. Repeated
// eigenvalues get a deterministic basis (see eig_utils).
CanonicalizeResult canonicalize(const DiscreteGRD& f);

// Keep the first p1 positive and p2 negative coordinates of every atom.
DiscreteGRD truncate_grd(const DiscreteGRD& f, int p1, int p2);

// G_ij = <z_i, z_j>_K.
Matrix gram_matrix(const std::vector<KreinVector>& points);

// CSV with header weight,x1..xp1,y1..yp2 (17 significant digits) plus a
// JSON sidecar <path>.json holding {p1, p2, canonical}.
void save_grd_csv(const DiscreteGRD& f, const std::string& path);
DiscreteGRD load_grd_csv(const std::string& path);

}  // namespace grd
