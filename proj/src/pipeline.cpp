#include "grd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "grd/errors.hpp"
#include "grd/transport.hpp"
#include "grd/version.hpp"

namespace grd {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void reject_unknown_keys(const nlohmann::json& j,
                         const std::set<std::string>& allowed,
                         const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(path + "." + it.key() + ": unknown key");
  }
}

}  // namespace

double RhoRule::at(int n) const {
  double rho = kind == Kind::constant ? value : c * std::log(n) / n;
  rho = std::min(rho, 1.0);
  if (!(rho > 0.0))
    throw ConfigError("rho_rule: produced nonpositive rho at n=" +
                      std::to_string(n));
  return rho;
}

std::pair<int, int> DimsRule::select(const SignedSpectrum& spec, int n,
                                     double rho_hat) const {
  if (kind == Kind::fixed) {
    return {std::min(p1, spec.n_pos()), std::min(p2, spec.n_neg())};
  }
  if (mode == Mode::dense) return choose_dims(spec, n, c);
  const double level = 2.01 * std::sqrt(n * rho_hat * (1.0 - rho_hat));
  int q1 = 0, q2 = 0;
  for (int j = 0; j < spec.n_pos(); ++j)
    if (spec.pos_vals[j] > level) ++q1;
  for (int j = 0; j < spec.n_neg(); ++j)
    if (spec.neg_vals[j] > level) ++q2;
  return {q1, q2};
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("experiment config: expected JSON object");
  reject_unknown_keys(
      j, {"model", "n_grid", "rho_rule", "seeds", "dims_rule", "output_dir"},
      "experiment config");
  try {
  ExperimentConfig cfg;
  if (!j.contains("model"))
    throw ConfigError("experiment config.model: required");
  cfg.model = parse_model_config(j["model"].dump());

  if (!j.contains("n_grid") || !j["n_grid"].is_array() || j["n_grid"].empty())
    throw ConfigError("experiment config.n_grid: nonempty array required");
  for (const auto& v : j["n_grid"]) cfg.n_grid.push_back(v.get<int>());
  for (size_t i = 0; i + 1 < cfg.n_grid.size(); ++i)
    if (cfg.n_grid[i] >= cfg.n_grid[i + 1])
      throw ConfigError("experiment config.n_grid: must be ascending");
  for (int n : cfg.n_grid)
    if (n < 1) throw ConfigError("experiment config.n_grid: n must be >= 1");

  if (!j.contains("seeds") || !j["seeds"].is_array() || j["seeds"].empty())
    throw ConfigError("experiment config.seeds: nonempty array required");
  for (const auto& v : j["seeds"])
    cfg.seeds.push_back(v.get<std::uint64_t>());

  if (j.contains("rho_rule")) {
    const auto& r = j["rho_rule"];
    reject_unknown_keys(r, {"kind", "value", "c"},
                        "experiment config.rho_rule");
    const std::string kind = r.at("kind").get<std::string>();
    if (kind == "constant") {
      cfg.rho_rule.kind = RhoRule::Kind::constant;
      cfg.rho_rule.value = r.value("value", 1.0);
      if (!(cfg.rho_rule.value > 0.0) || cfg.rho_rule.value > 1.0)
        throw ConfigError("experiment config.rho_rule.value: not in (0,1]");
    } else if (kind == "logn_over_n") {
      cfg.rho_rule.kind = RhoRule::Kind::logn_over_n;
      cfg.rho_rule.c = r.value("c", 1.0);
      if (!(cfg.rho_rule.c > 0.0))
        throw ConfigError("experiment config.rho_rule.c: must be > 0");
    } else {
      throw ConfigError(
          "experiment config.rho_rule.kind: expected constant or logn_over_n");
    }
  }

  if (j.contains("dims_rule")) {
    const auto& d = j["dims_rule"];
    reject_unknown_keys(d, {"kind", "p1", "p2", "c", "mode"},
                        "experiment config.dims_rule");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "fixed") {
      cfg.dims_rule.kind = DimsRule::Kind::fixed;
      cfg.dims_rule.p1 = d.at("p1").get<int>();
      cfg.dims_rule.p2 = d.at("p2").get<int>();
      if (cfg.dims_rule.p1 < 0 || cfg.dims_rule.p2 < 0)
        throw ConfigError("experiment config.dims_rule: negative dims");
    } else if (kind == "threshold") {
      cfg.dims_rule.kind = DimsRule::Kind::threshold;
      cfg.dims_rule.c = d.value("c", 1.0);
      if (!(cfg.dims_rule.c > 0.0))
        throw ConfigError("experiment config.dims_rule.c: must be > 0");
      const std::string mode = d.value("mode", "dense");
      if (mode == "dense")
        cfg.dims_rule.mode = DimsRule::Mode::dense;
      else if (mode == "sparse")
        cfg.dims_rule.mode = DimsRule::Mode::sparse;
      else
        throw ConfigError(
            "experiment config.dims_rule.mode: expected dense or sparse");
    } else {
      throw ConfigError(
          "experiment config.dims_rule.kind: expected fixed or threshold");
    }
  }

  if (j.contains("output_dir"))
    cfg.output_dir = j["output_dir"].get<std::string>();
  return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

DiscreteGRD truth_reference(const ModelConfig& model) {
  if (model.model == "sbm") return model.exact_grd();
  const GRDSampler sampler = model.make_sampler();
  const SamplingConfig ref_cfg(kReferenceAtoms, 1.0, kReferenceSeed);
  const LatentSample latent = sample_nodes(sampler, ref_cfg);
  return DiscreteGRD(latent.positions);
}

CellResult run_cell(const ModelConfig& model, const DiscreteGRD& truth,
                    int n, double rho, std::uint64_t seed,
                    const DimsRule& dims, const std::string& out_prefix) {
  const auto t0 = std::chrono::steady_clock::now();
  const GRDSampler sampler = model.make_sampler();
  const SamplingConfig cfg(n, rho, seed);
  const LatentSample latent = sample_nodes(sampler, cfg);
  const AdjacencyMatrix adj = sample_adjacency(latent, cfg);
  const SignedSpectrum spec = signed_eigendecompose(adj.to_dense());
  const auto [p1, p2] = dims.select(spec, n, adj.density());
  const Embedding emb = embed(spec, p1, p2, rho);
  const DiscreteGRD empirical = to_grd(emb);

  CellResult cell;
  cell.model = model.model;
  cell.n = n;
  cell.rho = rho;
  cell.seed = seed;
  cell.p1 = p1;
  cell.p2 = p2;
  cell.d_w = wasserstein_distance(empirical, truth);
  // Full restarts on small references; the identity + canonical starts
  // carry large empirical-vs-cloud instances, where exact transport
  // solves dominate the budget.
  const int restarts = truth.size() <= 100 ? 8 : 2;
  const double tol = truth.size() <= 100 ? 1e-9 : 1e-5;
  cell.d_ow = orthogonal_wasserstein(empirical, truth, restarts, tol).value;
  // The identity rotation is always a candidate, so d_ow <= d_w holds.
  cell.d_ow = std::min(cell.d_ow, cell.d_w);

  if (!out_prefix.empty()) {
    save_scree_csv(spec, out_prefix + "_scree.csv");
    save_embedding_csv(emb, out_prefix + "_embedding.csv");
  }
  const auto t1 = std::chrono::steady_clock::now();
  cell.runtime_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return cell;
}

namespace {

void write_summary_json(const std::vector<CellResult>& cells,
                        const std::string& path,
                        std::optional<double> slope = std::nullopt) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : cells) {
    rows.push_back({{"model", c.model},
                    {"n", c.n},
                    {"rho", c.rho},
                    {"seed", c.seed},
                    {"p1", c.p1},
                    {"p2", c.p2},
                    {"d_w_to_truth", c.d_w},
                    {"d_ow_to_truth", c.d_ow}});
  }
  nlohmann::json out;
  out["cells"] = rows;
  if (slope) out["slope_log_dw_log_n"] = *slope;
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << out.dump(2) << "\n";
}

}  // namespace

std::vector<CellResult> cmd_simulate(const ExperimentConfig& cfg,
                                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const DiscreteGRD truth = truth_reference(cfg.model);
  save_grd_csv(truth, out_dir + "/" + cfg.model.model + "_truth.csv");
  std::vector<CellResult> cells;
  for (const int n : cfg.n_grid) {
    for (const auto seed : cfg.seeds) {
      const double rho = cfg.rho_rule.at(n);
      const std::string prefix = out_dir + "/" + cfg.model.model + "_n" +
                                 std::to_string(n) + "_seed" +
                                 std::to_string(seed);
      cells.push_back(
          run_cell(cfg.model, truth, n, rho, seed, cfg.dims_rule, prefix));
    }
  }
  write_summary_json(cells, out_dir + "/summary.json");
  return cells;
}

ConvergeSummary cmd_converge(const ExperimentConfig& cfg,
                             const std::string& out_dir) {
  if (cfg.n_grid.size() < 3)
    throw ConfigError("converge: n_grid must have at least 3 sizes");
  std::filesystem::create_directories(out_dir);
  const DiscreteGRD truth = truth_reference(cfg.model);

  ConvergeSummary summary;
  std::ofstream table(out_dir + "/converge_table.csv");
  if (!table)
    throw DataError("cannot open for writing: " + out_dir +
                    "/converge_table.csv");
  table << "model,n,rho,seed,p1,p2,d_w,d_ow,runtime_ms\n";
  for (const int n : cfg.n_grid) {
    std::vector<double> dws, dows;
    for (const auto seed : cfg.seeds) {
      const double rho = cfg.rho_rule.at(n);
      CellResult cell =
          run_cell(cfg.model, truth, n, rho, seed, cfg.dims_rule, "");
      table << cell.model << "," << n << "," << fmt17(rho) << "," << seed
            << "," << cell.p1 << "," << cell.p2 << "," << fmt17(cell.d_w)
            << "," << fmt17(cell.d_ow) << "," << fmt17(cell.runtime_ms)
            << "\n";
      dws.push_back(cell.d_w);
      dows.push_back(cell.d_ow);
      summary.cells.push_back(std::move(cell));
    }
    summary.n_values.push_back(n);
    summary.median_d_w.push_back(median(dws));
    summary.median_d_ow.push_back(median(dows));
  }
  std::vector<double> lx, ly;
  for (size_t i = 0; i < summary.n_values.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(summary.n_values[i])));
    ly.push_back(std::log(summary.median_d_w[i]));
  }
  summary.slope_log_dw_log_n = ls_slope(lx, ly);
  write_summary_json(summary.cells, out_dir + "/summary.json",
                     summary.slope_log_dw_log_n);
  return summary;
}

EmbedOutput cmd_embed(const std::string& edge_list_path, const DimsRule& dims,
                      std::optional<double> rho,
                      const std::optional<std::string>& labels_path,
                      const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  EmbedOutput out;
  AdjacencyMatrix adj = parse_edge_list(edge_list_path, &out.warnings);
  out.n = adj.n();
  out.rho_hat = adj.n() >= 2 ? adj.density() : 0.0;
  const SignedSpectrum spec = signed_eigendecompose(adj.to_dense());
  const auto [p1, p2] = dims.select(spec, adj.n(), out.rho_hat);
  out.p1 = p1;
  out.p2 = p2;
  if (spec.n_pos() + spec.n_neg() >= 3)
    out.decay = fit_decay_profile(spec, 20, std::sqrt(double(adj.n())));
  const Embedding emb = embed(spec, p1, p2, rho.value_or(1.0));

  std::optional<std::vector<std::string>> labels;
  if (labels_path) {
    std::ifstream in(*labels_path);
    if (!in) throw DataError("cannot open labels file: " + *labels_path);
    labels.emplace(adj.n());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw DataError(*labels_path + ":" + std::to_string(lineno) +
                        ": expected node_id,label");
      int id;
      try {
        id = std::stoi(line.substr(0, comma));
      } catch (const std::exception&) {
        throw DataError(*labels_path + ":" + std::to_string(lineno) +
                        ": bad node id");
      }
      if (id < 0 || id >= adj.n())
        throw DataError(*labels_path + ":" + std::to_string(lineno) +
                        ": node id out of range");
      (*labels)[id] = line.substr(comma + 1);
    }
  }
  save_scree_csv(spec, out_dir + "/scree.csv");
  save_embedding_csv(emb, out_dir + "/embedding.csv",
                     labels ? &*labels : nullptr);
  return out;
}

void cmd_grd(const ModelConfig& model, const std::string& out_path) {
  if (model.model == "sbm") {
    save_grd_csv(grd_from_sbm(SBMSpec(*model.pi, model.B)), out_path);
    return;
  }
  // Continuous GRDs: emit the vertex atoms (segment endpoints for DCBM,
  // polytope vertices for MMBM) with their block weights.
  const GRDSampler sampler = model.make_sampler();
  const int k = static_cast<int>(sampler.vertex_atoms().size());
  const Vector w = sampler.block_weights().size()
                       ? sampler.block_weights()
                       : Vector::Constant(k, 1.0 / k);
  save_grd_csv(DiscreteGRD(sampler.vertex_atoms(), w), out_path);
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_manifest(const std::string& out_dir,
                    const std::string& config_text) {
  std::filesystem::create_directories(out_dir);
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(config_text)));
  nlohmann::json manifest = {
      {"config_hash", hash}, {"version", kVersion}, {"rng", kRngName}};
  std::ofstream f(out_dir + "/manifest.json");
  if (!f) throw DataError("cannot open for writing: " + out_dir + "/manifest.json");
  f << manifest.dump(2) << "\n";
}

}  // namespace grd
