#include "grd/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace grd {

namespace philox {

namespace {

constexpr uint32_t kMulA = 0xD2511F53u;
constexpr uint32_t kMulB = 0xCD9E8D57u;
constexpr uint32_t kWeylA = 0x9E3779B9u;
constexpr uint32_t kWeylB = 0xBB67AE85u;

}  // namespace

std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                              std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t prod0 = static_cast<uint64_t>(kMulA) * ctr[0];
    const uint64_t prod1 = static_cast<uint64_t>(kMulB) * ctr[2];
    ctr = {static_cast<uint32_t>(prod1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<uint32_t>(prod1),
           static_cast<uint32_t>(prod0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<uint32_t>(prod0)};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

}  // namespace philox

uint64_t CounterRng::next_u64() {
  if (buffered_ < 2) {
    buffer_ = philox::block({static_cast<uint32_t>(draw_),
                             static_cast<uint32_t>(draw_ >> 32), id_lo_,
                             id_hi_},
                            key_);
    ++draw_;
    buffered_ = 4;
  }
  buffered_ -= 2;
  return static_cast<uint64_t>(buffer_[buffered_]) << 32 |
         buffer_[buffered_ + 1];
}

double CounterRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

bool CounterRng::bernoulli(double p) { return next_double() < p; }

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double CounterRng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    const double u = next_double();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

int CounterRng::discrete(const Eigen::VectorXd& cumulative) {
  const double u = next_double();
  const int k = static_cast<int>(cumulative.size());
  for (int i = 0; i < k - 1; ++i) {
    if (u < cumulative[i]) return i;
  }
  return k - 1;
}

void CounterRng::dirichlet(const Eigen::VectorXd& alpha, Eigen::VectorXd& out) {
  out.resize(alpha.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    out[i] = gamma(alpha[i]);
    total += out[i];
  }
  if (total <= 0.0) {
    // All gammas underflowed (possible for tiny alpha); fall back to a vertex.
    out.setZero();
    out[discrete(Eigen::VectorXd::LinSpaced(alpha.size(), 1.0 / alpha.size(),
                                            1.0))] = 1.0;
    return;
  }
  out /= total;
}

Eigen::MatrixXd CounterRng::random_orthogonal(int dim) {
  if (dim == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace grd
