#include "grd/krein.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "grd/eig_utils.hpp"
#include "grd/errors.hpp"

namespace grd {

namespace {

void check_finite(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw std::invalid_argument(std::string(what) +
                                  ": coordinates must be finite");
  }
}

double padded_dot(const Vector& a, const Vector& b) {
  const Eigen::Index m = std::min(a.size(), b.size());
  if (m == 0) return 0.0;
  return a.head(m).dot(b.head(m));
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

KreinVector::KreinVector(Vector p, Vector n)
    : pos(std::move(p)), neg(std::move(n)) {
  check_finite(pos, "KreinVector");
  check_finite(neg, "KreinVector");
}

double KreinVector::norm() const { return std::sqrt(squared_norm()); }

double krein_inner(const KreinVector& a, const KreinVector& b) {
  return padded_dot(a.pos, b.pos) - padded_dot(a.neg, b.neg);
}

double krein_distance(const KreinVector& a, const KreinVector& b) {
  double s = 0.0;
  const Eigen::Index m1 = std::min(a.pos.size(), b.pos.size());
  for (Eigen::Index i = 0; i < m1; ++i) {
    const double d = a.pos[i] - b.pos[i];
    s += d * d;
  }
  for (Eigen::Index i = m1; i < a.pos.size(); ++i) s += a.pos[i] * a.pos[i];
  for (Eigen::Index i = m1; i < b.pos.size(); ++i) s += b.pos[i] * b.pos[i];
  const Eigen::Index m2 = std::min(a.neg.size(), b.neg.size());
  for (Eigen::Index i = 0; i < m2; ++i) {
    const double d = a.neg[i] - b.neg[i];
    s += d * d;
  }
  for (Eigen::Index i = m2; i < a.neg.size(); ++i) s += a.neg[i] * a.neg[i];
  for (Eigen::Index i = m2; i < b.neg.size(); ++i) s += b.neg[i] * b.neg[i];
  return std::sqrt(s);
}

double truncate_prob(double x) { return std::min(std::max(x, 0.0), 1.0); }

OrthogonalPair OrthogonalPair::identity(int p1, int p2) {
  return {Matrix::Identity(p1, p1), Matrix::Identity(p2, p2)};
}

bool OrthogonalPair::is_orthogonal(double tol) const {
  const Matrix rp = q_pos.transpose() * q_pos -
                    Matrix::Identity(q_pos.cols(), q_pos.cols());
  const Matrix rn = q_neg.transpose() * q_neg -
                    Matrix::Identity(q_neg.cols(), q_neg.cols());
  const double ep = rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0;
  const double en = rn.size() ? rn.cwiseAbs().maxCoeff() : 0.0;
  return ep <= tol && en <= tol;
}

KreinVector OrthogonalPair::apply(const KreinVector& z) const {
  return KreinVector(q_pos * z.pos, q_neg * z.neg);
}

OrthogonalPair OrthogonalPair::transpose() const {
  return {q_pos.transpose(), q_neg.transpose()};
}

DiscreteGRD::DiscreteGRD(std::vector<KreinVector> atoms, Vector weights,
                         bool canonical)
    : atoms_(std::move(atoms)), weights_(std::move(weights)),
      canonical_(canonical) {
  if (atoms_.empty()) throw std::invalid_argument("DiscreteGRD: no atoms");
  if (weights_.size() != static_cast<Eigen::Index>(atoms_.size()))
    throw std::invalid_argument("DiscreteGRD: weights/atoms size mismatch");
  p1_ = atoms_[0].p1();
  p2_ = atoms_[0].p2();
  for (const auto& a : atoms_) {
    if (a.p1() != p1_ || a.p2() != p2_)
      throw std::invalid_argument("DiscreteGRD: atoms have mixed dims");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0))
      throw std::invalid_argument("DiscreteGRD: weights must be nonnegative");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("DiscreteGRD: weights sum to " +
                                std::to_string(total) + ", expected 1");
  weights_ /= total;
}

DiscreteGRD::DiscreteGRD(std::vector<KreinVector> atoms) {
  const Eigen::Index n = static_cast<Eigen::Index>(atoms.size());
  if (n == 0) throw std::invalid_argument("DiscreteGRD: no atoms");
  *this = DiscreteGRD(std::move(atoms),
                      Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

bool DiscreteGRD::pair_validity(double tol) const {
  for (int i = 0; i < size(); ++i) {
    for (int j = i; j < size(); ++j) {
      const double ip = krein_inner(atoms_[i], atoms_[j]);
      if (ip < -tol || ip > 1.0 + tol) return false;
    }
  }
  return true;
}

double DiscreteGRD::mean_norm() const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += weights_[i] * atoms_[i].norm();
  return s;
}

Matrix DiscreteGRD::second_moment_pos() const {
  Matrix m = Matrix::Zero(p1_, p1_);
  for (int i = 0; i < size(); ++i)
    m.noalias() += weights_[i] * atoms_[i].pos * atoms_[i].pos.transpose();
  return m;
}

Matrix DiscreteGRD::second_moment_neg() const {
  Matrix m = Matrix::Zero(p2_, p2_);
  for (int i = 0; i < size(); ++i)
    m.noalias() += weights_[i] * atoms_[i].neg * atoms_[i].neg.transpose();
  return m;
}

Matrix DiscreteGRD::cross_moment() const {
  Matrix m = Matrix::Zero(p1_, p2_);
  for (int i = 0; i < size(); ++i)
    m.noalias() += weights_[i] * atoms_[i].pos * atoms_[i].neg.transpose();
  return m;
}

DiscreteGRD DiscreteGRD::transformed(const OrthogonalPair& q) const {
  std::vector<KreinVector> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(q.apply(a));
  return DiscreteGRD(std::move(out), weights_);
}

DiscreteGRD DiscreteGRD::scaled(double factor) const {
  std::vector<KreinVector> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_)
    out.emplace_back(factor * a.pos, factor * a.neg);
  return DiscreteGRD(std::move(out), weights_);
}

CanonicalizeResult canonicalize(const DiscreteGRD& f) {
  const SymEigen ep = sym_eigs_descending(f.second_moment_pos());
  const SymEigen en = sym_eigs_descending(f.second_moment_neg());
  // New coordinates are V^T x, so the rotation applied to atoms is V^T.
  OrthogonalPair q{ep.vectors.transpose(), en.vectors.transpose()};
  DiscreteGRD rotated = f.transformed(q);
  rotated.set_canonical(true);
  double residual = 0.0;
  const Matrix cross = rotated.cross_moment();
  if (cross.size() > 0) residual = cross.cwiseAbs().maxCoeff();
  return {std::move(rotated), std::move(q), residual};
}

DiscreteGRD truncate_grd(const DiscreteGRD& f, int p1, int p2) {
  if (p1 < 0 || p1 > f.p1() || p2 < 0 || p2 > f.p2())
    throw std::invalid_argument("truncate_grd: dims out of range");
  std::vector<KreinVector> out;
  out.reserve(f.size());
  for (const auto& a : f.atoms())
    out.emplace_back(a.pos.head(p1).eval(), a.neg.head(p2).eval());
  DiscreteGRD g(std::move(out), f.weights());
  g.set_canonical(f.canonical());
  return g;
}

Matrix gram_matrix(const std::vector<KreinVector>& points) {
  if (points.empty())
    throw std::invalid_argument("gram_matrix: empty point list");
  const int n = static_cast<int>(points.size());
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      g(i, j) = g(j, i) = krein_inner(points[i], points[j]);
    }
  }
  return g;
}

void save_grd_csv(const DiscreteGRD& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "weight";
  for (int j = 1; j <= f.p1(); ++j) out << ",x" << j;
  for (int j = 1; j <= f.p2(); ++j) out << ",y" << j;
  out << "\n";
  for (int i = 0; i < f.size(); ++i) {
    out << fmt17(f.weights()[i]);
    for (int j = 0; j < f.p1(); ++j) out << "," << fmt17(f.atom(i).pos[j]);
    for (int j = 0; j < f.p2(); ++j) out << "," << fmt17(f.atom(i).neg[j]);
    out << "\n";
  }
  nlohmann::json meta = {
      {"p1", f.p1()}, {"p2", f.p2()}, {"canonical", f.canonical()}};
  std::ofstream side(path + ".json");
  if (!side) throw DataError("cannot open for writing: " + path + ".json");
  side << meta.dump(2) << "\n";
}

DiscreteGRD load_grd_csv(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw DataError("missing GRD sidecar: " + path + ".json");
  nlohmann::json meta;
  side >> meta;
  const int p1 = meta.at("p1").get<int>();
  const int p2 = meta.at("p2").get<int>();
  const bool canonical = meta.value("canonical", false);

  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty GRD file: " + path);
  std::vector<KreinVector> atoms;
  std::vector<double> weights;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": bad number '" + tok + "'");
      }
    }
    if (static_cast<int>(vals.size()) != 1 + p1 + p2)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected " + std::to_string(1 + p1 + p2) +
                      " fields, got " + std::to_string(vals.size()));
    weights.push_back(vals[0]);
    Vector pos(p1), neg(p2);
    for (int j = 0; j < p1; ++j) pos[j] = vals[1 + j];
    for (int j = 0; j < p2; ++j) neg[j] = vals[1 + p1 + j];
    atoms.emplace_back(std::move(pos), std::move(neg));
  }
  Vector w = Eigen::Map<Vector>(weights.data(), weights.size());
  return DiscreteGRD(std::move(atoms), std::move(w), canonical);
}

}  // namespace grd
