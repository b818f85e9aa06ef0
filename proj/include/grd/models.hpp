#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grd/graphon.hpp"
#include "grd/krein.hpp"
#include "grd/rng.hpp"
#include "grd/spectral.hpp"

namespace grd {

struct SBMSpec {
  Vector pi;  // block probabilities, sum to 1
  Matrix B;   // k x k symmetric, entries in [0,1]

  SBMSpec(Vector pi_, Matrix b);
  int k() const { return static_cast<int>(pi.size()); }
};

// Node activeness distribution; support must satisfy
// theta^2 * max(B) <= 1 so edge probabilities stay in [0,1].
struct ThetaDesc {
  enum class Kind { point_mass, uniform };
  Kind kind = Kind::point_mass;
  double lo = 1.0;
  double hi = 1.0;

  static ThetaDesc point(double value) {
    return {Kind::point_mass, value, value};
  }
  static ThetaDesc unif(double lo, double hi) { return {Kind::uniform, lo, hi}; }
  double max_value() const { return hi; }
  double draw(CounterRng& rng) const;
};

struct DCBMSpec {
  SBMSpec sbm;
  ThetaDesc theta;

  DCBMSpec(SBMSpec s, ThetaDesc t);
};

struct MMBMSpec {
  Matrix B;  // k x k symmetric, entries in [0,1]
  Vector a;  // Dirichlet concentration, strictly positive

  MMBMSpec(Matrix b, Vector a_);
  int k() const { return static_cast<int>(a.size()); }
};

// Weighted spectral factorization of a step graphon: the GRD whose atom
// for block i has coordinates sqrt(|eig_j|) * v_ji / sqrt(pi_i) from the
// eigensystem of M = D^{1/2} B D^{1/2}, weight pi_i. The gram matrix of
// the atoms reproduces the block values and the GRD is canonical with
// respect to its own weights.
std::pair<DiscreteGRD, SignedSpectrum> spectral_factorize(const StepGraphon& w);

StepGraphon sbm_graphon(const SBMSpec& spec);

// Point-mass GRD of an SBM. Atom coordinates come from the block
// matrix's own eigenbasis (uniform block measures), which reproduces the
// standard printed coordinates for these models; weights are pi.
DiscreteGRD grd_from_sbm(const SBMSpec& spec);

// A sampler of node vectors Z ~ F for the supported model families.
class GRDSampler {
 public:
  enum class Kind { discrete, dcbm_segments, mmbm_polytope };

  // One draw; `label` (optional) receives the block index for discrete
  // and segment kinds, -1 for the polytope kind.
  KreinVector draw(CounterRng& rng, int* label = nullptr) const;

  Kind kind() const { return kind_; }
  const std::vector<KreinVector>& vertex_atoms() const { return atoms_; }
  const Vector& block_weights() const { return weights_; }

  static GRDSampler discrete_sampler(const DiscreteGRD& f);
  static GRDSampler dcbm_sampler(std::vector<KreinVector> atoms, Vector pi,
                                 ThetaDesc theta);
  static GRDSampler mmbm_sampler(std::vector<KreinVector> atoms, Vector a);

 private:
  GRDSampler() = default;
  Kind kind_ = Kind::discrete;
  std::vector<KreinVector> atoms_;
  Vector weights_;     // block probabilities (discrete, segments)
  Vector cumulative_;  // cumulative weights
  ThetaDesc theta_;
  Vector dirichlet_a_;
};

GRDSampler grd_sampler_from_sbm(const SBMSpec& spec);
GRDSampler grd_sampler_from_dcbm(const DCBMSpec& spec);
// Vertex atoms are built with the given node-measure weighting, pinned
// explicitly because the model itself does not determine it.
GRDSampler grd_sampler_from_mmbm(const MMBMSpec& spec,
                                 const Vector& pi_for_vertices);

// Model configuration (JSON): keys model in {sbm,dcbm,mmbm}, pi,
// B (row-major), theta {kind, lo, hi}, a. Unknown keys are rejected.
struct ModelConfig {
  std::string model;
  std::optional<Vector> pi;
  Matrix B;
  std::optional<ThetaDesc> theta;
  std::optional<Vector> a;

  GRDSampler make_sampler() const;
  // The reference GRD the estimator is compared against: the canonical
  // weighted factorization of the model's kernel for SBM/DCBM vertex
  // structure; see pipeline for how continuous GRDs are discretized.
  DiscreteGRD exact_grd() const;
  StepGraphon graphon() const;  // SBM only
};

ModelConfig parse_model_config(const std::string& json_text);
ModelConfig load_model_config(const std::string& path);

}  // namespace grd
