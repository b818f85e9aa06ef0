#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grd/graphon.hpp"
#include "grd/krein.hpp"

namespace grd {

struct TransportEntry {
  int i = 0;
  int j = 0;
  double mass = 0.0;
};

// A coupling between two weighted atom sets with its cost
// sum nu_ij ||z_i - z'_j||. Exact solvers also carry dual potentials so
// optimality can be certified by complementary slackness.
struct TransportPlan {
  std::vector<TransportEntry> entries;
  double cost = 0.0;
  int rows = 0, cols = 0;
  Vector u, v;  // dual potentials (exact solvers only)
  bool has_duals = false;
  int iterations = 0;      // sinkhorn
  bool converged = true;   // sinkhorn

  Vector row_marginals() const;
  Vector col_marginals() const;
  Matrix to_dense() const;
};

// Exact Wasserstein-1 coupling for the ground cost ||z - z'|| (blocks are
// zero-padded to common dims). Solved as a linear assignment when both
// marginals are uniform with equal atom counts, else by a
// transportation-simplex solver. The result satisfies complementary
// slackness to 1e-8.
TransportPlan wasserstein(const DiscreteGRD& f1, const DiscreteGRD& f2);

double wasserstein_distance(const DiscreteGRD& f1, const DiscreteGRD& f2);

struct OptimalityCheck {
  double max_dual_infeasibility = 0.0;  // max(0, u_i + v_j - c_ij)
  double max_support_slack = 0.0;       // |c_ij - u_i - v_j| on the support
  double max_marginal_error = 0.0;
};

OptimalityCheck verify_transport_optimality(const TransportPlan& plan,
                                            const DiscreteGRD& f1,
                                            const DiscreteGRD& f2);

// Entropic-regularized plan (log-stabilized iterations, then rounded to
// exact marginal feasibility). For converged runs the cost lies within
// epsilon * log(m * m') of the exact optimum; non-convergence within
// max_iter is reported through the `converged` flag.
TransportPlan sinkhorn_wasserstein(const DiscreteGRD& f1,
                                   const DiscreteGRD& f2, double epsilon,
                                   int max_iter = 10000);

struct OwResult {
  double value = 0.0;  // upper bound on d_ow
  OrthogonalPair rotation;
  TransportPlan plan;
  int restarts_used = 0;
};

// Upper bound on the orthogonal Wasserstein distance by alternating
// minimization: exact transport for a fixed rotation, then blockwise
// orthogonal alignment of the coupled clouds (squared-cost Procrustes
// surrogate; the unsquared objective is what gets tracked). Initialized
// from the identity, from canonicalization-matched rotations (with
// coordinate-sign enumeration on small instances) and from `restarts`
// Haar-random rotations. The objective is nonconvex; global optimality is
// not claimed.
OwResult orthogonal_wasserstein(const DiscreteGRD& f1, const DiscreteGRD& f2,
                                int restarts = 8, double tol = 1e-9,
                                std::uint64_t seed = 0x6f77);

double orthogonal_wasserstein_distance(const DiscreteGRD& f1,
                                       const DiscreteGRD& f2,
                                       int restarts = 8, double tol = 1e-9);

// Exact cut norm ||W1 - W2||_box for step graphons on a common refinement
// (built internally when partitions differ): for step functions the sup
// is attained on unions of blocks, so subsets of one side are enumerated
// and the other side is chosen greedily. Rejects more than 20 refined
// blocks.
double cut_norm_step(const StepGraphon& w1, const StepGraphon& w2);

// Step graphon induced by a discrete GRD: atoms as blocks, weights as
// measures, values T(<z_i, z_j>).
StepGraphon graphon_of_grd(const DiscreteGRD& f);

struct CutBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  int atoms_1 = 0;
  int atoms_2 = 0;

  bool holds(double tol = 1e-9) const { return lhs <= rhs + tol; }
  std::string to_json() const;
};

// Tests the Wasserstein-dominates-cut bound: the induced step graphons of
// F1 and F2 are aligned on the refinement given by the optimal coupling,
// lhs is their cut norm on that alignment (an upper bound of the cut
// distance), and rhs = (E||Z||_F1 + E||Z||_F2) * d_w(F1, F2).
CutBoundReport check_cut_bound(const DiscreteGRD& f1, const DiscreteGRD& f2);

}  // namespace grd
