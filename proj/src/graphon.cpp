#include "grd/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace grd {

StepGraphon::StepGraphon(Eigen::MatrixXd block_values,
                         Eigen::VectorXd block_measures)
    : values_(std::move(block_values)), measures_(std::move(block_measures)) {
  const int k = static_cast<int>(measures_.size());
  if (k == 0) throw std::invalid_argument("StepGraphon: empty partition");
  if (values_.rows() != k || values_.cols() != k)
    throw std::invalid_argument("StepGraphon: values must be k x k");
  for (int i = 0; i < k; ++i) {
    if (!(measures_[i] >= 0.0) || !std::isfinite(measures_[i]))
      throw std::invalid_argument("StepGraphon: measures must be >= 0");
    for (int j = 0; j < k; ++j) {
      if (!std::isfinite(values_(i, j)) || values_(i, j) < -1e-12 ||
          values_(i, j) > 1.0 + 1e-12)
        throw std::invalid_argument("StepGraphon: values must lie in [0,1]");
      if (std::abs(values_(i, j) - values_(j, i)) > 1e-12)
        throw std::invalid_argument("StepGraphon: values must be symmetric");
    }
  }
  const double total = measures_.sum();
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("StepGraphon: measures must sum to 1");
  measures_ /= total;
  cumulative_.resize(k);
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += measures_[i];
    cumulative_[i] = acc;
  }
  cumulative_[k - 1] = 1.0;
}

int StepGraphon::block_of(double s) const {
  if (s < 0.0 || s > 1.0)
    throw std::invalid_argument("StepGraphon: point outside [0,1]");
  const int k = blocks();
  for (int i = 0; i < k - 1; ++i) {
    if (s < cumulative_[i]) return i;
  }
  return k - 1;
}

double StepGraphon::average() const {
  return measures_.dot(values_ * measures_);
}

double graphon_eval(const StepGraphon& w, double s, double t) {
  return w.values()(w.block_of(s), w.block_of(t));
}

std::pair<StepGraphon, StepGraphon> common_refinement(const StepGraphon& w1,
                                                      const StepGraphon& w2) {
  std::vector<double> cuts;
  for (int i = 0; i < w1.blocks(); ++i) cuts.push_back(w1.cumulative()[i]);
  for (int i = 0; i < w2.blocks(); ++i) cuts.push_back(w2.cumulative()[i]);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return b - a <= 1e-12; }),
             cuts.end());
  if (!cuts.empty() && cuts.back() < 1.0) cuts.back() = 1.0;

  std::vector<double> measures;
  std::vector<int> idx1, idx2;
  double prev = 0.0;
  for (const double c : cuts) {
    const double len = c - prev;
    if (len <= 1e-15) {
      prev = c;
      continue;
    }
    const double mid = 0.5 * (prev + c);
    measures.push_back(len);
    idx1.push_back(w1.block_of(mid));
    idx2.push_back(w2.block_of(mid));
    prev = c;
  }
  const int m = static_cast<int>(measures.size());
  Eigen::VectorXd mu = Eigen::Map<Eigen::VectorXd>(measures.data(), m);
  Eigen::MatrixXd v1(m, m), v2(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      v1(i, j) = w1.values()(idx1[i], idx1[j]);
      v2(i, j) = w2.values()(idx2[i], idx2[j]);
    }
  }
  return {StepGraphon(std::move(v1), mu), StepGraphon(std::move(v2), mu)};
}

double graphon_l2_distance(const StepGraphon& w1, const StepGraphon& w2) {
  const auto [r1, r2] = common_refinement(w1, w2);
  const Eigen::VectorXd& mu = r1.measures();
  double s = 0.0;
  for (int i = 0; i < r1.blocks(); ++i) {
    for (int j = 0; j < r1.blocks(); ++j) {
      const double d = r1.values()(i, j) - r2.values()(i, j);
      s += mu[i] * mu[j] * d * d;
    }
  }
  return std::sqrt(s);
}

}  // namespace grd
