#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace grd {

// Philox4x32-10 keyed counter generator (Salmon et al., SC 2011).
// Each 128-bit counter block maps to four 32-bit words; a draw is a pure
// function of (key, counter), so independent streams are free and the
// values never depend on sampling order.
namespace philox {

std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                              std::array<uint32_t, 2> key);

}  // namespace philox

// One uniform stream identified by (seed, tag, id). Node draws use
// tag=node with id=node index, edge draws tag=edge with id=pair index,
// so sampling is order-independent and parallelizable.
class CounterRng {
 public:
  enum class Stream : uint32_t {
    node = 1,
    edge = 2,
    restart = 3,
    reference = 4,
    generic = 5,
  };

  CounterRng(uint64_t seed, Stream tag, uint64_t id)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        id_lo_(static_cast<uint32_t>(id)),
        id_hi_(static_cast<uint32_t>(id >> 32) ^
               (static_cast<uint32_t>(tag) << 28)) {}

  uint64_t next_u64();

  // Uniform on [0, 1), 53-bit mantissa.
  double next_double();
  double uniform(double lo, double hi);
  bool bernoulli(double p);

  // Standard normal via Box-Muller (one spare cached per stream).
  double normal();

  // Marsaglia-Tsang; the alpha < 1 case uses the boost G(a) = G(a+1) U^{1/a}.
  double gamma(double shape);

  // Index draw from cumulative weights (last entry treated as 1).
  int discrete(const Eigen::VectorXd& cumulative);

  void dirichlet(const Eigen::VectorXd& alpha, Eigen::VectorXd& out);

  // Haar-like random orthogonal matrix: QR of a Gaussian matrix with the
  // R-diagonal sign fix.
  Eigen::MatrixXd random_orthogonal(int dim);

 private:
  std::array<uint32_t, 2> key_;
  uint32_t id_lo_, id_hi_;
  uint64_t draw_ = 0;
  std::array<uint32_t, 4> buffer_{};
  int buffered_ = 0;  // number of unread 32-bit words in buffer_
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace grd
