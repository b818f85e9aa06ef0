#include "grd/sampling.hpp"

#include <stdexcept>

namespace grd {

SamplingConfig::SamplingConfig(int n_, double rho_, std::uint64_t seed_)
    : n(n_), rho(rho_), seed(seed_) {
  if (n < 1) throw std::invalid_argument("SamplingConfig: n must be >= 1");
  if (!(rho > 0.0) || rho > 1.0)
    throw std::invalid_argument("SamplingConfig: rho must be in (0,1]");
}

LatentSample sample_nodes(const GRDSampler& sampler,
                          const SamplingConfig& cfg) {
  LatentSample out;
  out.positions.reserve(cfg.n);
  out.labels.reserve(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    CounterRng rng(cfg.seed, CounterRng::Stream::node, i);
    int label = -1;
    out.positions.push_back(sampler.draw(rng, &label));
    out.labels.push_back(label);
  }
  return out;
}

AdjacencyMatrix sample_adjacency(const LatentSample& latent,
                                 const SamplingConfig& cfg) {
  if (latent.positions.empty())
    throw std::invalid_argument("sample_adjacency: latent positions missing");
  const int n = static_cast<int>(latent.positions.size());
  AdjacencyMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = truncate_prob(
          cfg.rho * krein_inner(latent.positions[i], latent.positions[j]));
      CounterRng rng(cfg.seed, CounterRng::Stream::edge,
                     static_cast<std::uint64_t>(i) * n + j);
      if (rng.bernoulli(p)) a.set(i, j, true);
    }
  }
  return a;
}

std::pair<LatentSample, AdjacencyMatrix> sample_from_graphon(
    const StepGraphon& w, const SamplingConfig& cfg) {
  LatentSample latent;
  latent.uniforms.reserve(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    CounterRng rng(cfg.seed, CounterRng::Stream::node, i);
    latent.uniforms.push_back(rng.next_double());
  }
  AdjacencyMatrix a(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    const int bi = w.block_of(latent.uniforms[i]);
    for (int j = i + 1; j < cfg.n; ++j) {
      const double p =
          truncate_prob(cfg.rho * w.values()(bi, w.block_of(latent.uniforms[j])));
      CounterRng rng(cfg.seed, CounterRng::Stream::edge,
                     static_cast<std::uint64_t>(i) * cfg.n + j);
      if (rng.bernoulli(p)) a.set(i, j, true);
    }
  }
  return {std::move(latent), std::move(a)};
}

}  // namespace grd
