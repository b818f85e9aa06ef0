#include "grd/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "grd/eig_utils.hpp"
#include "grd/rng.hpp"

namespace grd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix cost_matrix(const std::vector<KreinVector>& a,
                   const std::vector<KreinVector>& b) {
  Matrix c(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c(i, j) = krein_distance(a[i], b[j]);
  return c;
}

bool is_uniform(const Vector& w) {
  const double target = 1.0 / static_cast<double>(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (std::abs(w[i] - target) > 1e-12) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Linear assignment (Jonker-Volgenant style shortest augmenting paths with
// potentials). Used when both marginals are uniform with equal counts.
// ---------------------------------------------------------------------------

TransportPlan solve_assignment(const Matrix& c) {
  const int n = static_cast<int>(c.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  TransportPlan plan;
  plan.rows = plan.cols = n;
  const double mass = 1.0 / n;
  plan.entries.reserve(n);
  plan.u.resize(n);
  plan.v.resize(n);
  for (int j = 1; j <= n; ++j) {
    plan.entries.push_back({match[j] - 1, j - 1, mass});
    plan.cost += mass * c(match[j] - 1, j - 1);
    plan.v[j - 1] = v[j];
  }
  for (int i = 1; i <= n; ++i) plan.u[i - 1] = u[i];
  plan.has_duals = true;
  std::sort(plan.entries.begin(), plan.entries.end(),
            [](const TransportEntry& a, const TransportEntry& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });
  return plan;
}

// ---------------------------------------------------------------------------
// Transportation simplex (MODI) with a spanning-tree basis and block
// pricing. Exact for arbitrary nonnegative marginals.
// ---------------------------------------------------------------------------

struct SimplexArc {
  int src;   // source index in [0, m)
  int dst;   // sink index in [0, m')
  double flow = 0.0;
};

class TransportSimplex {
 public:
  TransportSimplex(const Matrix& c, const Vector& a, const Vector& b)
      : c_(c), a_(a), b_(b), m_(static_cast<int>(a.size())),
        k_(static_cast<int>(b.size())), nodes_(m_ + k_) {}

  TransportPlan solve() {
    northwest_corner();
    rebuild_adjacency();
    compute_potentials();

    const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());
    const double enter_tol = 1e-12 * scale;
    const std::int64_t total_arcs = static_cast<std::int64_t>(m_) * k_;
    const std::int64_t block =
        std::max<std::int64_t>(2048, total_arcs / 512);
    const std::int64_t max_pivots =
        200000 + 64LL * (m_ + k_) * 32;

    std::int64_t scan_pos = 0;
    for (std::int64_t pivot = 0;; ++pivot) {
      if (pivot > max_pivots)
        throw std::runtime_error("transport simplex: pivot limit exceeded");
      // Block pricing: scan blocks until a negative reduced cost shows up;
      // a full fruitless sweep proves optimality.
      int best_i = -1, best_j = -1;
      double best_r = -enter_tol;
      std::int64_t scanned = 0;
      while (scanned < total_arcs) {
        const std::int64_t stop = std::min(total_arcs, scanned + block);
        for (; scanned < stop; ++scanned) {
          const std::int64_t idx = (scan_pos + scanned) % total_arcs;
          const int i = static_cast<int>(idx / k_);
          const int j = static_cast<int>(idx % k_);
          const double r = c_(i, j) - pot_[i] - pot_[m_ + j];
          if (r < best_r) {
            best_r = r;
            best_i = i;
            best_j = j;
          }
        }
        if (best_i >= 0) break;
      }
      scan_pos = (scan_pos + scanned) % total_arcs;
      if (best_i < 0) break;  // optimal
      pivot_on(best_i, best_j);
    }
    return extract_plan();
  }

 private:
  void northwest_corner() {
    arcs_.reserve(m_ + k_ - 1);
    int i = 0, j = 0;
    double ra = a_[0], rb = b_[0];
    for (int step = 0; step < m_ + k_ - 1; ++step) {
      const double f = std::min(ra, rb);
      arcs_.push_back({i, j, f});
      ra -= f;
      rb -= f;
      if (step == m_ + k_ - 2) break;
      bool advance_row = ra <= rb;
      if (i == m_ - 1) advance_row = false;
      if (j == k_ - 1) advance_row = true;
      if (advance_row) {
        ++i;
        ra = a_[i];
      } else {
        ++j;
        rb = b_[j];
      }
    }
  }

  void rebuild_adjacency() {
    adj_.assign(nodes_, {});
    for (int t = 0; t < static_cast<int>(arcs_.size()); ++t) {
      adj_[arcs_[t].src].push_back(t);
      adj_[m_ + arcs_[t].dst].push_back(t);
    }
  }

  void drop_from_adjacency(int node, int arc) {
    auto& list = adj_[node];
    for (size_t t = 0; t < list.size(); ++t) {
      if (list[t] == arc) {
        list[t] = list.back();
        list.pop_back();
        return;
      }
    }
  }

  int other_end(int arc, int node) const {
    const int s = arcs_[arc].src;
    const int d = m_ + arcs_[arc].dst;
    return node == s ? d : s;
  }

  void compute_potentials() {
    if (pot_.empty()) {
      pot_.assign(nodes_, 0.0);
      seen_.assign(nodes_, 0);
      stack_.reserve(nodes_);
      parent_.assign(nodes_, -1);
      parent_arc_.assign(nodes_, -1);
    }
    std::fill(seen_.begin(), seen_.end(), 0);
    stack_.clear();
    stack_.push_back(0);
    seen_[0] = 1;
    pot_[0] = 0.0;
    while (!stack_.empty()) {
      const int node = stack_.back();
      stack_.pop_back();
      for (const int t : adj_[node]) {
        const int next = other_end(t, node);
        if (seen_[next]) continue;
        seen_[next] = 1;
        pot_[next] = c_(arcs_[t].src, arcs_[t].dst) - pot_[node];
        stack_.push_back(next);
      }
    }
  }

  // Tree path from node `from` to node `to`, returned as arc indices.
  void tree_path(int from, int to, std::vector<int>& path) {
    std::fill(parent_.begin(), parent_.end(), -1);
    stack_.clear();
    stack_.push_back(from);
    parent_[from] = from;
    while (!stack_.empty()) {
      const int node = stack_.back();
      stack_.pop_back();
      if (node == to) break;
      for (const int t : adj_[node]) {
        const int next = other_end(t, node);
        if (parent_[next] >= 0) continue;
        parent_[next] = node;
        parent_arc_[next] = t;
        stack_.push_back(next);
      }
    }
    if (parent_[to] < 0)
      throw std::runtime_error("transport simplex: basis tree disconnected");
    path.clear();
    for (int node = to; node != from; node = parent_[node])
      path.push_back(parent_arc_[node]);
    std::reverse(path.begin(), path.end());  // arcs from `from` towards `to`
  }

  void pivot_on(int ei, int ej) {
    // Cycle = entering arc (+) plus the tree path from source ei to sink
    // ej; walking back from the sink, tree arcs alternate -, +, -, ...
    tree_path(ei, m_ + ej, path_);
    const int len = static_cast<int>(path_.size());
    double delta = kInf;
    int leaving = -1;
    for (int t = 0; t < len; ++t) {
      const bool minus = ((len - 1 - t) % 2) == 0;
      if (!minus) continue;
      const double f = arcs_[path_[t]].flow;
      if (f < delta - 1e-18 ||
          (std::abs(f - delta) <= 1e-18 && path_[t] < leaving)) {
        delta = f;
        leaving = path_[t];
      }
    }
    if (leaving < 0)
      throw std::runtime_error("transport simplex: no leaving arc");
    for (int t = 0; t < len; ++t) {
      const bool minus = ((len - 1 - t) % 2) == 0;
      arcs_[path_[t]].flow += minus ? -delta : delta;
    }
    drop_from_adjacency(arcs_[leaving].src, leaving);
    drop_from_adjacency(m_ + arcs_[leaving].dst, leaving);
    arcs_[leaving] = {ei, ej, delta};
    adj_[ei].push_back(leaving);
    adj_[m_ + ej].push_back(leaving);
    compute_potentials();
  }

  TransportPlan extract_plan() {
    TransportPlan plan;
    plan.rows = m_;
    plan.cols = k_;
    for (const auto& arc : arcs_) {
      if (arc.flow > 1e-15) {
        plan.entries.push_back({arc.src, arc.dst, arc.flow});
        plan.cost += arc.flow * c_(arc.src, arc.dst);
      }
    }
    std::sort(plan.entries.begin(), plan.entries.end(),
              [](const TransportEntry& a, const TransportEntry& b) {
                return a.i != b.i ? a.i < b.i : a.j < b.j;
              });
    plan.u = Eigen::Map<Vector>(pot_.data(), m_);
    plan.v = Eigen::Map<Vector>(pot_.data() + m_, k_);
    plan.has_duals = true;
    return plan;
  }

  const Matrix& c_;
  const Vector& a_;
  const Vector& b_;
  int m_, k_, nodes_;
  std::vector<SimplexArc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> pot_;
  std::vector<char> seen_;
  std::vector<int> stack_, parent_, parent_arc_, path_;
};

TransportPlan solve_exact(const Matrix& c, const Vector& a, const Vector& b) {
  const int m = static_cast<int>(a.size());
  const int k = static_cast<int>(b.size());
  if (m == k && m <= 2500 && is_uniform(a) && is_uniform(b))
    return solve_assignment(c);
  TransportSimplex simplex(c, a, b);
  return simplex.solve();
}

}  // namespace

Vector TransportPlan::row_marginals() const {
  Vector r = Vector::Zero(rows);
  for (const auto& e : entries) r[e.i] += e.mass;
  return r;
}

Vector TransportPlan::col_marginals() const {
  Vector c = Vector::Zero(cols);
  for (const auto& e : entries) c[e.j] += e.mass;
  return c;
}

Matrix TransportPlan::to_dense() const {
  Matrix m = Matrix::Zero(rows, cols);
  for (const auto& e : entries) m(e.i, e.j) += e.mass;
  return m;
}

TransportPlan wasserstein(const DiscreteGRD& f1, const DiscreteGRD& f2) {
  if (f1.size() == 0 || f2.size() == 0)
    throw std::invalid_argument("wasserstein: empty GRD");
  const Matrix c = cost_matrix(f1.atoms(), f2.atoms());
  TransportPlan plan = solve_exact(c, f1.weights(), f2.weights());
  const double row_err =
      (plan.row_marginals() - f1.weights()).cwiseAbs().maxCoeff();
  const double col_err =
      (plan.col_marginals() - f2.weights()).cwiseAbs().maxCoeff();
  if (row_err > 1e-9 || col_err > 1e-9)
    throw std::runtime_error("wasserstein: marginal feasibility lost");
  return plan;
}

double wasserstein_distance(const DiscreteGRD& f1, const DiscreteGRD& f2) {
  return wasserstein(f1, f2).cost;
}

OptimalityCheck verify_transport_optimality(const TransportPlan& plan,
                                            const DiscreteGRD& f1,
                                            const DiscreteGRD& f2) {
  if (!plan.has_duals)
    throw std::invalid_argument("verify_transport_optimality: no duals");
  const Matrix c = cost_matrix(f1.atoms(), f2.atoms());
  OptimalityCheck check;
  for (int i = 0; i < plan.rows; ++i)
    for (int j = 0; j < plan.cols; ++j)
      check.max_dual_infeasibility = std::max(
          check.max_dual_infeasibility, plan.u[i] + plan.v[j] - c(i, j));
  check.max_dual_infeasibility = std::max(0.0, check.max_dual_infeasibility);
  for (const auto& e : plan.entries)
    check.max_support_slack = std::max(
        check.max_support_slack, std::abs(c(e.i, e.j) - plan.u[e.i] - plan.v[e.j]));
  check.max_marginal_error =
      std::max((plan.row_marginals() - f1.weights()).cwiseAbs().maxCoeff(),
               (plan.col_marginals() - f2.weights()).cwiseAbs().maxCoeff());
  return check;
}

TransportPlan sinkhorn_wasserstein(const DiscreteGRD& f1,
                                   const DiscreteGRD& f2, double epsilon,
                                   int max_iter) {
  if (f1.size() == 0 || f2.size() == 0)
    throw std::invalid_argument("sinkhorn_wasserstein: empty GRD");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("sinkhorn_wasserstein: epsilon must be > 0");
  const int m = f1.size(), k = f2.size();
  const Matrix c = cost_matrix(f1.atoms(), f2.atoms());
  const Vector& a = f1.weights();
  const Vector& b = f2.weights();

  Vector log_a(m), log_b(k);
  for (int i = 0; i < m; ++i) log_a[i] = a[i] > 0 ? std::log(a[i]) : -kInf;
  for (int j = 0; j < k; ++j) log_b[j] = b[j] > 0 ? std::log(b[j]) : -kInf;

  Vector f = Vector::Zero(m), g = Vector::Zero(k);
  auto lse_rows = [&](double eps, Vector& out) {
    // out_i = LSE_j ( (g_j - c_ij) / eps )
    for (int i = 0; i < m; ++i) {
      double mx = -kInf;
      for (int j = 0; j < k; ++j)
        mx = std::max(mx, (g[j] - c(i, j)) / eps);
      if (mx == -kInf) {
        out[i] = -kInf;
        continue;
      }
      double s = 0.0;
      for (int j = 0; j < k; ++j)
        s += std::exp((g[j] - c(i, j)) / eps - mx);
      out[i] = mx + std::log(s);
    }
  };
  auto lse_cols = [&](double eps, Vector& out) {
    for (int j = 0; j < k; ++j) {
      double mx = -kInf;
      for (int i = 0; i < m; ++i)
        mx = std::max(mx, (f[i] - c(i, j)) / eps);
      if (mx == -kInf) {
        out[j] = -kInf;
        continue;
      }
      double s = 0.0;
      for (int i = 0; i < m; ++i)
        s += std::exp((f[i] - c(i, j)) / eps - mx);
      out[j] = mx + std::log(s);
    }
  };
  auto row_error = [&](double eps) {
    double err = 0.0;
    for (int i = 0; i < m; ++i) {
      double ri = 0.0;
      for (int j = 0; j < k; ++j) {
        const double e = (f[i] + g[j] - c(i, j)) / eps;
        ri += e > -745.0 ? std::exp(e) : 0.0;
      }
      err = std::max(err, std::abs(ri - a[i]));
    }
    return err;
  };

  TransportPlan plan;
  plan.rows = m;
  plan.cols = k;

  // Epsilon scaling: anneal from a coarse regularization down to the
  // target, warm-starting the potentials, which keeps small-epsilon runs
  // from stalling.
  std::vector<double> ladder{epsilon};
  const double cmax = c.size() ? c.maxCoeff() : 1.0;
  for (double e = epsilon; e < 0.25 * std::max(cmax, 4 * epsilon);)
    ladder.push_back(e *= 2);
  std::reverse(ladder.begin(), ladder.end());

  int iter = 0;
  bool converged = false;
  Vector lse(m), lsec(k);
  for (size_t level = 0; level < ladder.size(); ++level) {
    const double eps = ladder[level];
    const bool last = level + 1 == ladder.size();
    const int budget = last ? max_iter : std::min(max_iter, 15);
    for (int step = 0; step < budget && iter < max_iter; ++step, ++iter) {
      lse_rows(eps, lse);
      for (int i = 0; i < m; ++i)
        f[i] = a[i] > 0 ? eps * (log_a[i] - lse[i]) : -kInf;
      lse_cols(eps, lsec);
      for (int j = 0; j < k; ++j)
        g[j] = b[j] > 0 ? eps * (log_b[j] - lsec[j]) : -kInf;
      if (last && row_error(eps) < 1e-9) {
        converged = true;
        ++iter;
        break;
      }
    }
    if (converged) break;
  }
  plan.iterations = iter;
  plan.converged = converged;

  // Dense plan, then round to exact marginal feasibility: scale rows and
  // columns down to their targets and spread the leftover mass rank-one.
  Matrix p(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      const double e = (f[i] + g[j] - c(i, j)) / epsilon;
      p(i, j) = e > -745.0 ? std::exp(e) : 0.0;
    }
  for (int i = 0; i < m; ++i) {
    const double r = p.row(i).sum();
    if (r > 0) p.row(i) *= std::min(1.0, a[i] / r);
  }
  for (int j = 0; j < k; ++j) {
    const double s = p.col(j).sum();
    if (s > 0) p.col(j) *= std::min(1.0, b[j] / s);
  }
  Vector err_a = a - p.rowwise().sum();
  Vector err_b = b - p.colwise().sum().transpose();
  const double deficit = err_a.cwiseAbs().sum();
  if (deficit > 0) p += err_a * err_b.transpose() / deficit;

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j)
      if (p(i, j) > 1e-16) plan.entries.push_back({i, j, p(i, j)});
  plan.cost = 0.0;
  for (const auto& e : plan.entries) plan.cost += e.mass * c(e.i, e.j);
  return plan;
}

namespace {

DiscreteGRD pad_grd(const DiscreteGRD& f, int p1, int p2) {
  if (f.p1() == p1 && f.p2() == p2) return f;
  std::vector<KreinVector> atoms;
  atoms.reserve(f.size());
  for (const auto& z : f.atoms()) {
    Vector x = Vector::Zero(p1), y = Vector::Zero(p2);
    x.head(z.p1()) = z.pos;
    y.head(z.p2()) = z.neg;
    atoms.emplace_back(std::move(x), std::move(y));
  }
  return DiscreteGRD(std::move(atoms), f.weights());
}

// Best orthogonal Q maximizing sum_ij nu_ij x_i^T Q x'_j, via SVD of the
// coupled cross-moment (reflections allowed; no determinant constraint).
Matrix procrustes_rotation(const Matrix& cross) {
  if (cross.rows() == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(cross,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double plan_cost_for_rotation(const DiscreteGRD& f1, const DiscreteGRD& f2,
                              const OrthogonalPair& q, TransportPlan& plan) {
  const DiscreteGRD rotated = f2.transformed(q);
  plan = wasserstein(f1, rotated);
  return plan.cost;
}

}  // namespace

OwResult orthogonal_wasserstein(const DiscreteGRD& f1, const DiscreteGRD& f2,
                                int restarts, double tol, std::uint64_t seed) {
  if (restarts < 1)
    throw std::invalid_argument("orthogonal_wasserstein: restarts must be >= 1");
  const int p1 = std::max(f1.p1(), f2.p1());
  const int p2 = std::max(f1.p2(), f2.p2());
  const DiscreteGRD a = pad_grd(f1, p1, p2);
  const DiscreteGRD b = pad_grd(f2, p1, p2);

  std::vector<OrthogonalPair> inits;
  inits.push_back(OrthogonalPair::identity(p1, p2));

  // Canonicalization-matched starts: rotate b's canonical frame onto a's.
  // Coordinate signs stay ambiguous, so small instances enumerate them.
  {
    const auto ca = canonicalize(a);
    const auto cb = canonicalize(b);
    const bool enumerate =
        p1 <= 4 && p2 <= 4 &&
        static_cast<long>(a.size()) * b.size() <= 250000;
    const int sp1 = enumerate ? (1 << p1) : 1;
    const int sp2 = enumerate ? (1 << p2) : 1;
    for (int sp = 0; sp < sp1; ++sp) {
      for (int sn = 0; sn < sp2; ++sn) {
        Vector dp = Vector::Ones(p1), dn = Vector::Ones(p2);
        for (int t = 0; t < p1; ++t)
          if (sp >> t & 1) dp[t] = -1.0;
        for (int t = 0; t < p2; ++t)
          if (sn >> t & 1) dn[t] = -1.0;
        inits.push_back(
            {ca.rotation.q_pos.transpose() * dp.asDiagonal() *
                 cb.rotation.q_pos,
             ca.rotation.q_neg.transpose() * dn.asDiagonal() *
                 cb.rotation.q_neg});
      }
    }
  }

  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, CounterRng::Stream::restart, r);
    inits.push_back({rng.random_orthogonal(p1), rng.random_orthogonal(p2)});
  }

  OwResult best;
  best.value = kInf;
  best.restarts_used = static_cast<int>(inits.size());
  // Each alternation solves an exact transport problem; large instances
  // get a shorter leash.
  const int max_alternations =
      static_cast<long>(a.size()) * b.size() > 250000 ? 10 : 60;

  for (const auto& init : inits) {
    OrthogonalPair q = init;
    TransportPlan plan;
    double prev = kInf;
    for (int it = 0; it < max_alternations; ++it) {
      const double value = plan_cost_for_rotation(a, b, q, plan);
      if (value < best.value) {
        best.value = value;
        best.rotation = q;
        best.plan = plan;
      }
      if (prev - value <= tol * std::max(1.0, value)) break;
      prev = value;
      // Blockwise Procrustes on the coupled clouds (squared surrogate).
      Matrix cross_pos = Matrix::Zero(p1, p1);
      Matrix cross_neg = Matrix::Zero(p2, p2);
      for (const auto& e : plan.entries) {
        cross_pos.noalias() +=
            e.mass * a.atom(e.i).pos * b.atom(e.j).pos.transpose();
        cross_neg.noalias() +=
            e.mass * a.atom(e.i).neg * b.atom(e.j).neg.transpose();
      }
      const Matrix qp = procrustes_rotation(cross_pos);
      const Matrix qn = procrustes_rotation(cross_neg);
      if (qp.size() == 0 && qn.size() == 0) break;
      OrthogonalPair next{qp.size() ? qp : q.q_pos, qn.size() ? qn : q.q_neg};
      if ((next.q_pos - q.q_pos).cwiseAbs().maxCoeff() +
              (p2 > 0 ? (next.q_neg - q.q_neg).cwiseAbs().maxCoeff() : 0.0) <
          1e-14)
        break;
      q = next;
    }
  }
  return best;
}

double orthogonal_wasserstein_distance(const DiscreteGRD& f1,
                                       const DiscreteGRD& f2, int restarts,
                                       double tol) {
  return orthogonal_wasserstein(f1, f2, restarts, tol).value;
}

double cut_norm_step(const StepGraphon& w1, const StepGraphon& w2) {
  StepGraphon r1 = w1, r2 = w2;
  if (w1.blocks() != w2.blocks() ||
      (w1.cumulative() - w2.cumulative()).cwiseAbs().maxCoeff() > 1e-12) {
    auto refined = common_refinement(w1, w2);
    r1 = std::move(refined.first);
    r2 = std::move(refined.second);
  }
  const int k = r1.blocks();
  if (k > 20)
    throw std::invalid_argument(
        "cut_norm_step: more than 20 refined blocks (got " +
        std::to_string(k) + ")");
  const Vector& mu = r1.measures();
  Matrix d(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      d(i, j) = mu[i] * mu[j] * (r1.values()(i, j) - r2.values()(i, j));

  // Enumerate row subsets in Gray-code order; for a fixed subset the best
  // column subset takes exactly the positive (or negative) column sums.
  Vector t = Vector::Zero(k);
  double best = 0.0;
  std::uint32_t prev_mask = 0;
  const std::uint32_t total = 1u << k;
  for (std::uint32_t g = 1; g < total; ++g) {
    const std::uint32_t mask = g ^ (g >> 1);
    const std::uint32_t changed = mask ^ prev_mask;
    const int bit = std::countr_zero(changed);
    if (mask & changed)
      t += d.row(bit).transpose();
    else
      t -= d.row(bit).transpose();
    prev_mask = mask;
    double plus = 0.0, minus = 0.0;
    for (int j = 0; j < k; ++j) {
      if (t[j] > 0)
        plus += t[j];
      else
        minus -= t[j];
    }
    best = std::max({best, plus, minus});
  }
  return best;
}

StepGraphon graphon_of_grd(const DiscreteGRD& f) {
  const int k = f.size();
  Matrix values(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j)
      values(i, j) = values(j, i) =
          truncate_prob(krein_inner(f.atom(i), f.atom(j)));
  return StepGraphon(std::move(values), f.weights());
}

std::string CutBoundReport::to_json() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"lhs\": %.12g, \"rhs\": %.12g, \"margin\": %.12g, "
                "\"atoms_1\": %d, \"atoms_2\": %d}",
                lhs, rhs, margin, atoms_1, atoms_2);
  return buf;
}

CutBoundReport check_cut_bound(const DiscreteGRD& f1, const DiscreteGRD& f2) {
  if (f1.size() + f2.size() > 20)
    throw std::invalid_argument("check_cut_bound: more than 20 atoms total");
  const TransportPlan plan = wasserstein(f1, f2);

  // Blocks of the common alignment are the coupling's support cells; the
  // two induced graphons then live on the same partition.
  std::vector<TransportEntry> cells;
  for (const auto& e : plan.entries)
    if (e.mass > 1e-12) cells.push_back(e);
  const int k = static_cast<int>(cells.size());
  Vector mu(k);
  for (int c = 0; c < k; ++c) mu[c] = cells[c].mass;
  Matrix v1(k, k), v2(k, k);
  for (int c = 0; c < k; ++c) {
    for (int d = 0; d < k; ++d) {
      v1(c, d) = truncate_prob(
          krein_inner(f1.atom(cells[c].i), f1.atom(cells[d].i)));
      v2(c, d) = truncate_prob(
          krein_inner(f2.atom(cells[c].j), f2.atom(cells[d].j)));
    }
  }
  mu /= mu.sum();
  CutBoundReport report;
  report.lhs = cut_norm_step(StepGraphon(v1, mu), StepGraphon(v2, mu));
  report.rhs = (f1.mean_norm() + f2.mean_norm()) * plan.cost;
  report.margin = report.rhs - report.lhs;
  report.atoms_1 = f1.size();
  report.atoms_2 = f2.size();
  return report;
}

}  // namespace grd
