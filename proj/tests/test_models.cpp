#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "grd/errors.hpp"
#include "grd/models.hpp"
#include "grd/rng.hpp"
#include "grd/transport.hpp"
#include "oracles.hpp"

using namespace grd;

namespace {

SBMSpec sbm_22() {
  Vector pi(3);
  pi << 0.3, 0.3, 0.4;
  Matrix b(3, 3);
  b << 0.25, 0.5, 0.5, 0.5, 0.25, 0.5, 0.5, 0.5, 0.25;
  return SBMSpec(pi, b);
}

Matrix b_51() {
  Matrix b(3, 3);
  b << 0.25, 0.5, 0.25, 0.5, 0.25, 0.25, 0.25, 0.25, 1.0 / 6.0;
  return b;
}

// Best per-coordinate global sign alignment, then the worst coordinate
// error over atoms (atom order fixed by weights).
double aligned_atom_error(const DiscreteGRD& f,
                          const std::vector<std::vector<double>>& target) {
  const int p1 = f.p1(), p2 = f.p2();
  double best = std::numeric_limits<double>::infinity();
  for (int sp = 0; sp < (1 << p1); ++sp) {
    for (int sn = 0; sn < (1 << p2); ++sn) {
      double worst = 0.0;
      for (int i = 0; i < f.size(); ++i) {
        for (int j = 0; j < p1; ++j) {
          const double s = (sp >> j & 1) ? -1.0 : 1.0;
          worst = std::max(worst,
                           std::abs(s * f.atom(i).pos[j] - target[i][j]));
        }
        for (int j = 0; j < p2; ++j) {
          const double s = (sn >> j & 1) ? -1.0 : 1.0;
          worst = std::max(
              worst, std::abs(s * f.atom(i).neg[j] - target[i][p1 + j]));
        }
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("spec validation") {
  Vector pi(2);
  pi << 0.5, 0.6;
  Matrix b = Matrix::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(SBMSpec(pi, b), std::invalid_argument);
  pi << 0.5, 0.5;
  b(0, 1) = 1.2;
  b(1, 0) = 1.2;
  CHECK_THROWS_AS(SBMSpec(pi, b), std::invalid_argument);

  // Theta support violating the edge probability bound.
  b = Matrix::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(DCBMSpec(SBMSpec(pi, b), ThetaDesc::unif(0.5, 1.5)),
                  std::invalid_argument);
  CHECK_NOTHROW(DCBMSpec(SBMSpec(pi, b), ThetaDesc::unif(0.7, 1.4)));

  Vector a(2);
  a << 1.0, 0.0;
  CHECK_THROWS_AS(MMBMSpec(b, a), std::invalid_argument);
}

TEST_CASE("constant graphon factorizes to a single positive atom") {
  Matrix v(1, 1);
  v << 0.36;
  Vector mu(1);
  mu << 1.0;
  const auto [f, s] = spectral_factorize(StepGraphon(v, mu));
  REQUIRE(f.size() == 1);
  CHECK(f.p1() == 1);
  CHECK(f.p2() == 0);
  CHECK(f.atom(0).pos[0] == doctest::Approx(0.6));
  CHECK(f.canonical());
}

TEST_CASE("three-block SBM reproduces the printed atoms") {
  const DiscreteGRD f = grd_from_sbm(sbm_22());
  REQUIRE(f.size() == 3);
  REQUIRE(f.p1() == 1);
  REQUIRE(f.p2() == 2);
  CHECK(f.weights()[0] == doctest::Approx(0.3));
  CHECK(f.weights()[2] == doctest::Approx(0.4));
  const std::vector<std::vector<double>> printed = {
      {0.65, 0.41, 0.0}, {0.65, -0.20, -0.35}, {0.65, -0.20, 0.35}};
  CHECK(aligned_atom_error(f, printed) < 0.005);
  // Gram reproduction is exact regardless of the printed rounding.
  CHECK((gram_matrix(f.atoms()) - sbm_22().B).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rank structure of the simulation block matrix") {
  Vector pi(3);
  pi << 0.3, 0.3, 0.4;
  const auto [f, s] = spectral_factorize(StepGraphon(b_51(), pi));
  CHECK(s.n_pos() == 1);
  CHECK(s.n_neg() == 1);
  // The dropped third eigenvalue is numerically zero.
  Vector sq = pi.cwiseSqrt();
  const Matrix m = sq.asDiagonal() * b_51() * sq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  double third = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    third = std::min(third, std::abs(es.eigenvalues()[i]));
  CHECK(third < 1e-12);
}

TEST_CASE("factorization round-trip over random block models") {
  CounterRng rng(41, CounterRng::Stream::generic, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_u64() % 5);
    const StepGraphon w = oracle::random_step_graphon(rng, k);
    const auto [f, s] = spectral_factorize(w);
    CHECK((gram_matrix(f.atoms()) - w.values()).cwiseAbs().maxCoeff() <=
          1e-8);
    CHECK(f.pair_validity(1e-9));
    // Canonical by construction: block moments diagonal with eigenvalues.
    const Matrix mp = f.second_moment_pos();
    for (int i = 0; i < mp.rows(); ++i)
      for (int j = 0; j < mp.cols(); ++j)
        if (i != j) CHECK(std::abs(mp(i, j)) < 1e-10);
  }
}

TEST_CASE("truncation monotonicity of the induced graphon") {
  CounterRng rng(42, CounterRng::Stream::generic, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_u64() % 5);
    const StepGraphon w = oracle::random_step_graphon(rng, k);
    const auto [f, s] = spectral_factorize(w);
    const int rank = std::max(s.n_pos(), s.n_neg());
    double prev = std::numeric_limits<double>::infinity();
    for (int nn = 0; nn <= rank; ++nn) {
      const DiscreteGRD t =
          truncate_grd(f, std::min(nn, f.p1()), std::min(nn, f.p2()));
      const double dist = graphon_l2_distance(w, graphon_of_grd(t));
      CHECK(dist <= prev + 1e-12);
      prev = dist;
    }
    CHECK(prev <= 1e-10);  // exact at the numerical rank
  }
}

TEST_CASE("l2 distance to the rank-(1,0) truncation matches a double sum") {
  const auto [f, s] = spectral_factorize(sbm_graphon(sbm_22()));
  const StepGraphon w = sbm_graphon(sbm_22());
  const StepGraphon w10 = graphon_of_grd(truncate_grd(f, 1, 0));
  // Oracle: direct summation over the 3x3 blocks.
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double d = w.values()(i, j) - w10.values()(i, j);
      acc += w.measures()[i] * w.measures()[j] * d * d;
    }
  CHECK(graphon_l2_distance(w, w10) == doctest::Approx(std::sqrt(acc)));
}

TEST_CASE("dcbm sampler draws lie on the segments") {
  // Degenerate theta reproduces the SBM point masses.
  const DCBMSpec degen(sbm_22(), ThetaDesc::point(1.0));
  const GRDSampler sampler = grd_sampler_from_dcbm(degen);
  const DiscreteGRD base = grd_from_sbm(sbm_22());
  CounterRng rng(43, CounterRng::Stream::generic, 0);
  for (int i = 0; i < 100; ++i) {
    int label = -1;
    const KreinVector z = sampler.draw(rng, &label);
    REQUIRE(label >= 0);
    CHECK(krein_distance(z, base.atom(label)) < 1e-15);
  }

  // Unif(0,1) activeness: nonnegative multiples <= 1 of the atoms.
  const DCBMSpec unif(sbm_22(), ThetaDesc::unif(0.0, 1.0));
  const GRDSampler s2 = grd_sampler_from_dcbm(unif);
  for (int i = 0; i < 1000; ++i) {
    int label = -1;
    const KreinVector z = s2.draw(rng, &label);
    const KreinVector& v = base.atom(label);
    const double theta = z.norm() / v.norm();
    CHECK(theta <= 1.0 + 1e-12);
    CHECK(theta >= 0.0);
    // Colinearity: z - theta * v vanishes.
    CHECK(krein_distance(z, KreinVector(theta * v.pos, theta * v.neg)) <
          1e-12);
  }
}

TEST_CASE("dcbm activeness range carries to the sample norms") {
  Vector pi(3);
  pi << 0.3, 0.3, 0.4;
  const DCBMSpec spec(SBMSpec(pi, b_51()), ThetaDesc::unif(0.7, 1.4));
  const GRDSampler sampler = grd_sampler_from_dcbm(spec);
  const DiscreteGRD base = grd_from_sbm(spec.sbm);
  CounterRng rng(44, CounterRng::Stream::generic, 0);
  double lo = 10.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    int label = -1;
    const KreinVector z = sampler.draw(rng, &label);
    const double ratio = z.norm() / base.atom(label).norm();
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(lo >= 0.7);
  CHECK(hi <= 1.4);
  CHECK(lo < 0.72);  // the range is actually filled
  CHECK(hi > 1.38);
}

TEST_CASE("mmbm sampler stays on the polytope with exact inner products") {
  MMBMSpec spec(sbm_22().B, Vector::Constant(3, 1.0));
  const GRDSampler sampler =
      grd_sampler_from_mmbm(spec, Vector::Constant(3, 1.0 / 3.0));
  CounterRng rng(45, CounterRng::Stream::generic, 0);
  CounterRng rng2(46, CounterRng::Stream::generic, 1);
  // Exactness: <Z(g), Z(g')> = g' B g'' for recovered mixtures; recover g
  // by projecting on the vertex gram (vertices are affinely independent).
  const auto& verts = sampler.vertex_atoms();
  for (int i = 0; i < 200; ++i) {
    const KreinVector z = sampler.draw(rng);
    const KreinVector z2 = sampler.draw(rng2);
    // Inner products against vertices determine the mixture coefficients.
    Matrix g(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) g(r, c) = krein_inner(verts[r], verts[c]);
    Vector rhs(3), rhs2(3);
    for (int r = 0; r < 3; ++r) {
      rhs[r] = krein_inner(verts[r], z);
      rhs2[r] = krein_inner(verts[r], z2);
    }
    const Vector gz = g.colPivHouseholderQr().solve(rhs);
    const Vector gz2 = g.colPivHouseholderQr().solve(rhs2);
    CHECK(std::abs(gz.sum() - 1.0) < 1e-8);
    CHECK(gz.minCoeff() > -1e-8);
    const double expected = gz.transpose() * spec.B * gz2;
    CHECK(krein_inner(z, z2) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("mmbm concentration for large dirichlet parameters") {
  MMBMSpec spec(sbm_22().B, Vector::Constant(3, 100.0));
  const GRDSampler sampler =
      grd_sampler_from_mmbm(spec, Vector::Constant(3, 1.0 / 3.0));
  // Barycenter of the vertex atoms.
  const auto& verts = sampler.vertex_atoms();
  Vector bx = (verts[0].pos + verts[1].pos + verts[2].pos) / 3.0;
  Vector by = (verts[0].neg + verts[1].neg + verts[2].neg) / 3.0;
  const KreinVector bary(bx, by);
  CounterRng rng(47, CounterRng::Stream::generic, 0);
  double var = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const KreinVector z = sampler.draw(rng);
    const double d = krein_distance(z, bary);
    var += d * d;
  }
  CHECK(var / n < 0.01);
}

TEST_CASE("single-vertex mmbm collapses to a point") {
  Matrix b(1, 1);
  b << 0.49;
  MMBMSpec spec(b, Vector::Constant(1, 2.0));
  const GRDSampler sampler =
      grd_sampler_from_mmbm(spec, Vector::Constant(1, 1.0));
  CounterRng rng(48, CounterRng::Stream::generic, 0);
  for (int i = 0; i < 10; ++i) {
    const KreinVector z = sampler.draw(rng);
    CHECK(z.pos[0] == doctest::Approx(0.7));
  }
}

TEST_CASE("sampler pair validity over drawn pairs") {
  Vector pi(3);
  pi << 0.3, 0.3, 0.4;
  const std::vector<GRDSampler> samplers = {
      grd_sampler_from_sbm(SBMSpec(pi, b_51())),
      grd_sampler_from_dcbm(DCBMSpec(SBMSpec(pi, b_51()),
                                     ThetaDesc::unif(0.7, 1.4))),
      grd_sampler_from_mmbm(MMBMSpec(b_51(), Vector::Constant(3, 0.5)),
                            pi)};
  int which = 0;
  for (const auto& sampler : samplers) {
    CounterRng rng(49 + which++, CounterRng::Stream::generic, 0);
    KreinVector prev = sampler.draw(rng);
    for (int i = 0; i < 10000; ++i) {
      const KreinVector z = sampler.draw(rng);
      const double ip = truncate_prob(krein_inner(prev, z));
      CHECK(ip >= 0.0);
      CHECK(ip <= 1.0);
      const double raw = krein_inner(prev, z);
      CHECK(raw >= -1e-9);
      CHECK(raw <= 1.0 + 1e-9);
      prev = z;
    }
  }
}

TEST_CASE("model config parsing") {
  const std::string good = R"({
    "model": "dcbm",
    "pi": [0.3, 0.3, 0.4],
    "B": [0.25, 0.5, 0.25, 0.5, 0.25, 0.25, 0.25, 0.25, 0.16666666666666666],
    "theta": {"kind": "uniform", "lo": 0.7, "hi": 1.4}
  })";
  const ModelConfig cfg = parse_model_config(good);
  CHECK(cfg.model == "dcbm");
  CHECK(cfg.theta->hi == doctest::Approx(1.4));
  CHECK_NOTHROW(cfg.make_sampler());

  CHECK_THROWS_AS(parse_model_config(R"({"model": "sbm"})"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_model_config(
          R"({"model": "sbm", "pi": [1.0], "B": [0.5], "extra": 1})"),
      doctest::Contains("extra"), ConfigError);
  CHECK_THROWS_AS(
      parse_model_config(
          R"({"model": "sbm", "pi": [0.4, 0.6], "B": [0.5, 0.5, 0.5]})"),
      ConfigError);
  CHECK_THROWS_AS(parse_model_config("not json"), ConfigError);
  // mmbm without pi is fine (uniform vertex weighting).
  const ModelConfig mmbm = parse_model_config(
      R"({"model": "mmbm", "B": [0.25, 0.5, 0.5, 0.25], "a": [0.5, 0.5]})");
  CHECK_NOTHROW(mmbm.make_sampler());
}
