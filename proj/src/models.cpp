#include "grd/models.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "grd/errors.hpp"

namespace grd {

namespace {

void check_block_matrix(const Matrix& b, int k, const char* what) {
  if (b.rows() != k || b.cols() != k)
    throw std::invalid_argument(std::string(what) + ": B must be k x k");
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (!std::isfinite(b(i, j)) || b(i, j) < -1e-12 || b(i, j) > 1.0 + 1e-12)
        throw std::invalid_argument(std::string(what) +
                                    ": B entries must lie in [0,1]");
      if (std::abs(b(i, j) - b(j, i)) > 1e-12)
        throw std::invalid_argument(std::string(what) + ": B must be symmetric");
    }
  }
}

}  // namespace

SBMSpec::SBMSpec(Vector pi_, Matrix b) : pi(std::move(pi_)), B(std::move(b)) {
  const int kk = static_cast<int>(pi.size());
  if (kk == 0) throw std::invalid_argument("SBMSpec: empty pi");
  double total = 0.0;
  for (int i = 0; i < kk; ++i) {
    if (!(pi[i] >= 0.0)) throw std::invalid_argument("SBMSpec: pi must be >= 0");
    total += pi[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("SBMSpec: pi must sum to 1");
  pi /= total;
  check_block_matrix(B, kk, "SBMSpec");
}

double ThetaDesc::draw(CounterRng& rng) const {
  if (kind == Kind::point_mass) return lo;
  return rng.uniform(lo, hi);
}

DCBMSpec::DCBMSpec(SBMSpec s, ThetaDesc t) : sbm(std::move(s)), theta(t) {
  // Point masses must be strictly positive; a uniform may touch 0 at the
  // lower end (draws are a.s. positive).
  const bool ok = theta.kind == ThetaDesc::Kind::point_mass
                      ? theta.lo > 0.0
                      : theta.lo >= 0.0 && theta.hi > theta.lo;
  if (!ok)
    throw std::invalid_argument("DCBMSpec: theta support must be positive");
  const double bmax = sbm.B.maxCoeff();
  if (theta.max_value() * theta.max_value() * bmax > 1.0 + 1e-12)
    throw std::invalid_argument(
        "DCBMSpec: theta^2 * max(B) exceeds 1; edge probabilities leave [0,1]");
}

MMBMSpec::MMBMSpec(Matrix b, Vector a_) : B(std::move(b)), a(std::move(a_)) {
  const int kk = static_cast<int>(a.size());
  if (kk == 0) throw std::invalid_argument("MMBMSpec: empty a");
  for (int i = 0; i < kk; ++i)
    if (!(a[i] > 0.0))
      throw std::invalid_argument("MMBMSpec: a must be strictly positive");
  check_block_matrix(B, kk, "MMBMSpec");
}

std::pair<DiscreteGRD, SignedSpectrum> spectral_factorize(const StepGraphon& w) {
  const int k = w.blocks();
  const Vector& pi = w.measures();
  Vector sq(k);
  for (int i = 0; i < k; ++i) sq[i] = std::sqrt(pi[i]);
  const Matrix m = sq.asDiagonal() * w.values() * sq.asDiagonal();
  SignedSpectrum spec = signed_eigendecompose(m);

  std::vector<KreinVector> atoms;
  atoms.reserve(k);
  for (int i = 0; i < k; ++i) {
    Vector x(spec.n_pos()), y(spec.n_neg());
    for (int j = 0; j < spec.n_pos(); ++j)
      x[j] = std::sqrt(spec.pos_vals[j]) * spec.pos_vecs(i, j) / sq[i];
    for (int j = 0; j < spec.n_neg(); ++j)
      y[j] = std::sqrt(spec.neg_vals[j]) * spec.neg_vecs(i, j) / sq[i];
    atoms.emplace_back(std::move(x), std::move(y));
  }
  DiscreteGRD f(std::move(atoms), pi, /*canonical=*/true);
  return {std::move(f), std::move(spec)};
}

StepGraphon sbm_graphon(const SBMSpec& spec) {
  return StepGraphon(spec.B, spec.pi);
}

DiscreteGRD grd_from_sbm(const SBMSpec& spec) {
  const int k = spec.k();
  const Vector uniform = Vector::Constant(k, 1.0 / k);
  auto [f, s] = spectral_factorize(StepGraphon(spec.B, uniform));
  DiscreteGRD out(f.atoms(), spec.pi);
  // Canonical with respect to uniform weighting; near-canonical under pi.
  out.set_canonical(false);
  return out;
}

KreinVector GRDSampler::draw(CounterRng& rng, int* label) const {
  switch (kind_) {
    case Kind::discrete: {
      const int i = rng.discrete(cumulative_);
      if (label) *label = i;
      return atoms_[i];
    }
    case Kind::dcbm_segments: {
      const int e = rng.discrete(cumulative_);
      const double theta = theta_.draw(rng);
      if (label) *label = e;
      return KreinVector(theta * atoms_[e].pos, theta * atoms_[e].neg);
    }
    case Kind::mmbm_polytope: {
      Vector g;
      rng.dirichlet(dirichlet_a_, g);
      const int p1 = atoms_[0].p1(), p2 = atoms_[0].p2();
      Vector x = Vector::Zero(p1), y = Vector::Zero(p2);
      for (size_t v = 0; v < atoms_.size(); ++v) {
        x += g[v] * atoms_[v].pos;
        y += g[v] * atoms_[v].neg;
      }
      if (label) *label = -1;
      return KreinVector(std::move(x), std::move(y));
    }
  }
  throw std::logic_error("GRDSampler: bad kind");
}

namespace {

Vector cumulative_of(const Vector& w) {
  Vector c(w.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    acc += w[i];
    c[i] = acc;
  }
  return c;
}

}  // namespace

GRDSampler GRDSampler::discrete_sampler(const DiscreteGRD& f) {
  GRDSampler s;
  s.kind_ = Kind::discrete;
  s.atoms_ = f.atoms();
  s.weights_ = f.weights();
  s.cumulative_ = cumulative_of(s.weights_);
  return s;
}

GRDSampler GRDSampler::dcbm_sampler(std::vector<KreinVector> atoms, Vector pi,
                                    ThetaDesc theta) {
  GRDSampler s;
  s.kind_ = Kind::dcbm_segments;
  s.atoms_ = std::move(atoms);
  s.weights_ = std::move(pi);
  s.cumulative_ = cumulative_of(s.weights_);
  s.theta_ = theta;
  return s;
}

GRDSampler GRDSampler::mmbm_sampler(std::vector<KreinVector> atoms, Vector a) {
  GRDSampler s;
  s.kind_ = Kind::mmbm_polytope;
  s.atoms_ = std::move(atoms);
  s.dirichlet_a_ = std::move(a);
  return s;
}

GRDSampler grd_sampler_from_sbm(const SBMSpec& spec) {
  return GRDSampler::discrete_sampler(grd_from_sbm(spec));
}

GRDSampler grd_sampler_from_dcbm(const DCBMSpec& spec) {
  const DiscreteGRD base = grd_from_sbm(spec.sbm);
  return GRDSampler::dcbm_sampler(base.atoms(), spec.sbm.pi, spec.theta);
}

GRDSampler grd_sampler_from_mmbm(const MMBMSpec& spec,
                                 const Vector& pi_for_vertices) {
  if (pi_for_vertices.size() != spec.k())
    throw std::invalid_argument("grd_sampler_from_mmbm: pi dimension mismatch");
  auto [f, s] = spectral_factorize(StepGraphon(spec.B, pi_for_vertices));
  return GRDSampler::mmbm_sampler(f.atoms(), spec.a);
}

namespace {

Vector json_vector(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path + ": expected a nonempty array");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigError(path + "[" + std::to_string(i) + "]: expected number");
    v[i] = j[i].get<double>();
  }
  return v;
}

Matrix json_square_matrix(const nlohmann::json& j, const std::string& path) {
  const Vector flat = json_vector(j, path);
  const int k = static_cast<int>(std::llround(std::sqrt(double(flat.size()))));
  if (k * k != flat.size())
    throw ConfigError(path + ": row-major length " +
                      std::to_string(flat.size()) + " is not a perfect square");
  Matrix m(k, k);
  for (int i = 0; i < k; ++i)
    for (int c = 0; c < k; ++c) m(i, c) = flat[i * k + c];
  return m;
}

void reject_unknown_keys(const nlohmann::json& j,
                         const std::set<std::string>& allowed,
                         const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(path + "." + it.key() + ": unknown key");
  }
}

ThetaDesc parse_theta(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected object");
  reject_unknown_keys(j, {"kind", "lo", "hi"}, path);
  if (!j.contains("kind") || !j.contains("lo") || !j.contains("hi"))
    throw ConfigError(path + ": needs kind, lo, hi");
  const std::string kind = j.at("kind").get<std::string>();
  const double lo = j.at("lo").get<double>();
  const double hi = j.at("hi").get<double>();
  if (kind == "point") {
    if (lo != hi) throw ConfigError(path + ": point mass needs lo == hi");
    return ThetaDesc::point(lo);
  }
  if (kind == "uniform") return ThetaDesc::unif(lo, hi);
  throw ConfigError(path + ".kind: expected 'point' or 'uniform'");
}

}  // namespace

ModelConfig parse_model_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("model config: expected JSON object");
  reject_unknown_keys(j, {"model", "pi", "B", "theta", "a"}, "model config");
  ModelConfig cfg;
  if (!j.contains("model") || !j["model"].is_string())
    throw ConfigError("model config.model: required string");
  cfg.model = j["model"].get<std::string>();
  if (cfg.model != "sbm" && cfg.model != "dcbm" && cfg.model != "mmbm")
    throw ConfigError("model config.model: expected sbm, dcbm or mmbm");
  if (!j.contains("B")) throw ConfigError("model config.B: required");
  cfg.B = json_square_matrix(j["B"], "model config.B");
  if (j.contains("pi")) cfg.pi = json_vector(j["pi"], "model config.pi");
  if (j.contains("theta"))
    cfg.theta = parse_theta(j["theta"], "model config.theta");
  if (j.contains("a")) cfg.a = json_vector(j["a"], "model config.a");

  if (cfg.model == "sbm" || cfg.model == "dcbm") {
    if (!cfg.pi) throw ConfigError("model config.pi: required for " + cfg.model);
    if (cfg.pi->size() != cfg.B.rows())
      throw ConfigError("model config.pi: length must match B");
  }
  if (cfg.model == "dcbm" && !cfg.theta)
    throw ConfigError("model config.theta: required for dcbm");
  if (cfg.model == "mmbm") {
    if (!cfg.a) throw ConfigError("model config.a: required for mmbm");
    if (cfg.a->size() != cfg.B.rows())
      throw ConfigError("model config.a: length must match B");
  }
  // Validate through the model constructors so bad values fail here.
  try {
    if (cfg.model == "sbm") SBMSpec(*cfg.pi, cfg.B);
    if (cfg.model == "dcbm") DCBMSpec(SBMSpec(*cfg.pi, cfg.B), *cfg.theta);
    if (cfg.model == "mmbm") MMBMSpec(cfg.B, *cfg.a);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_config(ss.str());
}

GRDSampler ModelConfig::make_sampler() const {
  if (model == "sbm") return grd_sampler_from_sbm(SBMSpec(*pi, B));
  if (model == "dcbm")
    return grd_sampler_from_dcbm(DCBMSpec(SBMSpec(*pi, B), *theta));
  const int k = static_cast<int>(B.rows());
  const Vector piv = pi ? *pi : Vector::Constant(k, 1.0 / k);
  return grd_sampler_from_mmbm(MMBMSpec(B, *a), piv);
}

DiscreteGRD ModelConfig::exact_grd() const {
  if (model != "sbm")
    throw std::invalid_argument("exact_grd: only SBM has a point-mass GRD");
  return spectral_factorize(StepGraphon(B, *pi)).first;
}

StepGraphon ModelConfig::graphon() const {
  if (model != "sbm")
    throw std::invalid_argument("graphon: only SBM is a step graphon");
  return StepGraphon(B, *pi);
}

}  // namespace grd
