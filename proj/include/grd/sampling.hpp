#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "grd/graph.hpp"
#include "grd/graphon.hpp"
#include "grd/models.hpp"

namespace grd {

struct SamplingConfig {
  int n = 1;
  double rho = 1.0;  // sparsity scale, in (0, 1]
  std::uint64_t seed = 0;

  SamplingConfig(int n_, double rho_, std::uint64_t seed_);
};

// Realized latent node variables: Krein vectors for graph-root sampling,
// latent uniforms for graphon sampling. Labels hold block assignments
// where the sampler produces them (-1 otherwise, empty for graphon draws).
struct LatentSample {
  std::vector<KreinVector> positions;
  std::vector<double> uniforms;
  std::vector<int> labels;

  int size() const {
    return static_cast<int>(positions.empty() ? uniforms.size()
                                              : positions.size());
  }
};

// n independent draws from the sampler; node i consumes the stream
// (seed, node, i), so the result is a pure function of (sampler, config).
LatentSample sample_nodes(const GRDSampler& sampler,
                          const SamplingConfig& cfg);

// Edge (i, j) is Bernoulli(T(rho * <Z_i, Z_j>)) on the stream
// (seed, edge, i*n + j); truncation is always applied so floating drift
// cannot produce an invalid Bernoulli parameter.
AdjacencyMatrix sample_adjacency(const LatentSample& latent,
                                 const SamplingConfig& cfg);

// Graphon route: latent uniforms s_i, edges Bernoulli(rho * W(s_i, s_j)).
std::pair<LatentSample, AdjacencyMatrix> sample_from_graphon(
    const StepGraphon& w, const SamplingConfig& cfg);

}  // namespace grd
