#include "grd/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "grd/eig_utils.hpp"
#include "grd/errors.hpp"

namespace grd {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

SignedSpectrum signed_eigendecompose(const Matrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("signed_eigendecompose: matrix not square");
  const int n = static_cast<int>(a.rows());
  const double scale =
      a.size() ? std::max(1.0, a.cwiseAbs().maxCoeff()) : 1.0;
  if (!std::isfinite(scale))
    throw std::invalid_argument("signed_eigendecompose: non-finite entry");
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (!std::isfinite(a(i, j)) || !std::isfinite(a(j, i)))
        throw std::invalid_argument("signed_eigendecompose: non-finite entry");
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale)
        throw std::invalid_argument("signed_eigendecompose: matrix not symmetric");
    }
  }
  const SymEigen eig = sym_eigs_descending(a);
  const double opnorm =
      n > 0 ? std::max(std::abs(eig.values[0]), std::abs(eig.values[n - 1]))
            : 0.0;
  const double cutoff = 1e-12 * std::max(1.0, opnorm);

  SignedSpectrum out;
  out.n = n;
  std::vector<int> pos, neg;
  for (int j = 0; j < n; ++j) {
    if (eig.values[j] > cutoff)
      pos.push_back(j);
    else if (eig.values[j] < -cutoff)
      neg.push_back(j);
  }
  out.pos_vals.resize(pos.size());
  out.pos_vecs.resize(n, pos.size());
  for (size_t k = 0; k < pos.size(); ++k) {
    out.pos_vals[k] = eig.values[pos[k]];
    out.pos_vecs.col(k) = eig.vectors.col(pos[k]);
  }
  // values are descending overall, so negatives come out ascending in
  // value = descending in magnitude when read from the back.
  out.neg_vals.resize(neg.size());
  out.neg_vecs.resize(n, neg.size());
  for (size_t k = 0; k < neg.size(); ++k) {
    const int src = neg[neg.size() - 1 - k];
    out.neg_vals[k] = -eig.values[src];
    out.neg_vecs.col(k) = eig.vectors.col(src);
  }
  // Reading from the back flipped the lexicographic order inside groups
  // of equal magnitudes; reverse each group to restore it.
  const double tie_tol = 1e-9 * std::max(1.0, opnorm);
  int lo = 0;
  while (lo < out.n_neg()) {
    int hi = lo + 1;
    while (hi < out.n_neg() &&
           std::abs(out.neg_vals[hi] - out.neg_vals[lo]) <= tie_tol)
      ++hi;
    for (int a = lo, b = hi - 1; a < b; ++a, --b) out.neg_vecs.col(a).swap(out.neg_vecs.col(b));
    lo = hi;
  }
  return out;
}

Embedding embed(const SignedSpectrum& spec, int p1, int p2, double rho) {
  if (p1 < 0 || p1 > spec.n_pos() || p2 < 0 || p2 > spec.n_neg())
    throw std::invalid_argument(
        "embed: requested dims (" + std::to_string(p1) + "," +
        std::to_string(p2) + ") exceed available (" +
        std::to_string(spec.n_pos()) + "," + std::to_string(spec.n_neg()) +
        ")");
  if (!(rho > 0.0) || rho > 1.0)
    throw std::invalid_argument("embed: rho must be in (0,1]");
  Embedding e;
  e.p1 = p1;
  e.p2 = p2;
  e.rho_used = rho;
  const double scale = 1.0 / std::sqrt(rho);
  Vector wp(p1), wn(p2);
  for (int j = 0; j < p1; ++j) wp[j] = std::sqrt(spec.pos_vals[j]) * scale;
  for (int j = 0; j < p2; ++j) wn[j] = std::sqrt(spec.neg_vals[j]) * scale;
  e.rows.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    Vector x(p1), y(p2);
    for (int j = 0; j < p1; ++j) x[j] = wp[j] * spec.pos_vecs(i, j);
    for (int j = 0; j < p2; ++j) y[j] = wn[j] * spec.neg_vecs(i, j);
    e.rows.emplace_back(std::move(x), std::move(y));
  }
  return e;
}

DiscreteGRD to_grd(const Embedding& e) { return DiscreteGRD(e.rows); }

std::pair<int, int> choose_dims(const SignedSpectrum& spec, int n, double c) {
  if (n < 1) throw std::invalid_argument("choose_dims: n must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("choose_dims: c must be > 0");
  const double threshold = c * std::sqrt(static_cast<double>(n));
  int p1 = 0, p2 = 0;
  for (int j = 0; j < spec.n_pos(); ++j)
    if (spec.pos_vals[j] > threshold) ++p1;
  for (int j = 0; j < spec.n_neg(); ++j)
    if (spec.neg_vals[j] > threshold) ++p2;
  return {p1, p2};
}

EigenDecayProfile fit_decay_profile(const SignedSpectrum& spec, int max_rank,
                                    double noise_floor) {
  if (max_rank < 3)
    throw std::invalid_argument("fit_decay_profile: max_rank must be >= 3");
  // Per-rank minimum of the two sequences when both are present.
  std::vector<double> vals;
  const bool both = spec.n_pos() > 0 && spec.n_neg() > 0;
  const int limit =
      both ? std::min({max_rank, spec.n_pos(), spec.n_neg()})
           : std::min(max_rank, std::max(spec.n_pos(), spec.n_neg()));
  for (int j = 0; j < limit; ++j) {
    double v;
    if (both)
      v = std::min(spec.pos_vals[j], spec.neg_vals[j]);
    else
      v = spec.n_pos() > 0 ? spec.pos_vals[j] : spec.neg_vals[j];
    if (v <= noise_floor) break;
    vals.push_back(v);
  }
  EigenDecayProfile prof;
  prof.ranks_used = static_cast<int>(vals.size());
  if (vals.size() < 3) return prof;

  std::vector<double> lr, lv;
  for (size_t j = 0; j < vals.size(); ++j) {
    lr.push_back(std::log(static_cast<double>(j + 1)));
    lv.push_back(std::log(vals[j]));
  }
  prof.alpha_hat = -ls_slope(lr, lv);
  prof.alpha_ok = true;

  // The gap between ranks r and r+1 is regressed at the geometric
  // midpoint rank sqrt(r (r+1)), which keeps pure power laws exact.
  std::vector<double> gr, gv;
  for (size_t j = 0; j + 1 < vals.size(); ++j) {
    const double gap = vals[j] - vals[j + 1];
    if (gap <= 0.0) continue;
    gr.push_back(0.5 * (std::log(static_cast<double>(j + 1)) +
                        std::log(static_cast<double>(j + 2))));
    gv.push_back(std::log(gap));
  }
  if (gr.size() >= 2) {
    prof.beta_hat = -ls_slope(gr, gv);
    prof.beta_ok = true;
  }
  return prof;
}

void save_scree_csv(const SignedSpectrum& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "rank,abs_eigenvalue,sign\n";
  int ip = 0, in = 0, rank = 1;
  while (ip < spec.n_pos() || in < spec.n_neg()) {
    const double pv = ip < spec.n_pos() ? spec.pos_vals[ip] : -1.0;
    const double nv = in < spec.n_neg() ? spec.neg_vals[in] : -1.0;
    if (pv >= nv) {
      out << rank << "," << fmt17(pv) << ",+\n";
      ++ip;
    } else {
      out << rank << "," << fmt17(nv) << ",-\n";
      ++in;
    }
    ++rank;
  }
}

void save_embedding_csv(const Embedding& e, const std::string& path,
                        const std::vector<std::string>* labels) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "node_id";
  for (int j = 1; j <= e.p1; ++j) out << ",x" << j;
  for (int j = 1; j <= e.p2; ++j) out << ",y" << j;
  if (labels) out << ",label";
  out << "\n";
  for (size_t i = 0; i < e.rows.size(); ++i) {
    out << i;
    for (int j = 0; j < e.p1; ++j) out << "," << fmt17(e.rows[i].pos[j]);
    for (int j = 0; j < e.p2; ++j) out << "," << fmt17(e.rows[i].neg[j]);
    if (labels) out << "," << (i < labels->size() ? (*labels)[i] : "");
    out << "\n";
  }
}

}  // namespace grd
