#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grd/graph.hpp"
#include "grd/models.hpp"
#include "grd/sampling.hpp"
#include "grd/spectral.hpp"

namespace grd {

// Sparsity schedule over the n grid: a constant rho or rho_n = c log n / n
// (clamped to (0, 1]).
struct RhoRule {
  enum class Kind { constant, logn_over_n };
  Kind kind = Kind::constant;
  double value = 1.0;  // constant rho
  double c = 1.0;      // multiplier for the log n / n rule

  double at(int n) const;
};

// Embedding dimension selection: fixed (p1, p2) or eigenvalue
// thresholding. Threshold modes: dense keeps values above c * sqrt(n);
// sparse uses 2.01 * sqrt(n * rho_hat * (1 - rho_hat)) instead, an
// adjustment for sparse graphs where sqrt(n) overshoots the noise level.
struct DimsRule {
  enum class Kind { fixed, threshold };
  enum class Mode { dense, sparse };
  Kind kind = Kind::threshold;
  int p1 = 1, p2 = 1;
  double c = 1.0;
  Mode mode = Mode::dense;

  std::pair<int, int> select(const SignedSpectrum& spec, int n,
                             double rho_hat) const;
};

struct ExperimentConfig {
  ModelConfig model;
  std::vector<int> n_grid;
  RhoRule rho_rule;
  std::vector<std::uint64_t> seeds;
  DimsRule dims_rule;
  std::string output_dir;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Fixed seed of the reference discretization used as "truth" for models
// whose GRD is continuous (DCBM, MMBM): 2000 draws from the exact
// sampler, independent of experiment seeds.
inline constexpr std::uint64_t kReferenceSeed = 0x5eedcafe01ULL;
inline constexpr int kReferenceAtoms = 2000;

// The reference the estimates are compared against: the canonical
// factorized GRD for SBM, the fixed reference cloud otherwise.
DiscreteGRD truth_reference(const ModelConfig& model);

struct CellResult {
  std::string model;
  int n = 0;
  double rho = 1.0;
  std::uint64_t seed = 0;
  int p1 = 0, p2 = 0;
  double d_w = 0.0;
  double d_ow = 0.0;
  double runtime_ms = 0.0;
};

// One simulation cell: sample a graph from the model, embed, and measure
// distances to the truth reference. Exposed separately so tests and both
// commands share it.
CellResult run_cell(const ModelConfig& model, const DiscreteGRD& truth,
                    int n, double rho, std::uint64_t seed,
                    const DimsRule& dims, const std::string& out_prefix);

// simulate: per (n, seed) writes embedding/scree CSVs, the truth GRD CSV,
// and a summary JSON; returns the summary rows.
std::vector<CellResult> cmd_simulate(const ExperimentConfig& cfg,
                                     const std::string& out_dir);

struct ConvergeSummary {
  std::vector<CellResult> cells;
  std::vector<int> n_values;
  std::vector<double> median_d_w;
  std::vector<double> median_d_ow;
  double slope_log_dw_log_n = 0.0;
};

// converge: the (n, seed) grid with a trend summary; writes the table CSV
// and a summary JSON with the log-log slope of the median d_w.
ConvergeSummary cmd_converge(const ExperimentConfig& cfg,
                             const std::string& out_dir);

struct EmbedOutput {
  int n = 0;
  int p1 = 0, p2 = 0;
  double rho_hat = 0.0;
  EdgeListWarnings warnings;
  // Decay diagnostic fitted above the sqrt(n) noise floor.
  EigenDecayProfile decay;
};

// embed: edge list -> scree CSV + embedding CSV (optionally joined with a
// node_id,label file).
EmbedOutput cmd_embed(const std::string& edge_list_path, const DimsRule& dims,
                      std::optional<double> rho,
                      const std::optional<std::string>& labels_path,
                      const std::string& out_dir);

// grd: the model's exact GRD (point masses for SBM, segment endpoints /
// polytope vertices otherwise) written as CSV.
void cmd_grd(const ModelConfig& model, const std::string& out_path);

// Every run records {config_hash, version, rng} next to its outputs.
void write_manifest(const std::string& out_dir, const std::string& config_text);
std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace grd
