#pragma once

#include <utility>

#include <Eigen/Dense>

namespace grd {

// A k x k step graphon: symmetric block values in [0,1] with block
// measures summing to 1.
class StepGraphon {
 public:
  StepGraphon(Eigen::MatrixXd block_values, Eigen::VectorXd block_measures);

  int blocks() const { return static_cast<int>(measures_.size()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::VectorXd& measures() const { return measures_; }
  const Eigen::VectorXd& cumulative() const { return cumulative_; }

  // Block index of s in [0,1]; boundaries are right-continuous, s = 1
  // belongs to the last block.
  int block_of(double s) const;

  // Integral of W over [0,1]^2 (the average edge probability).
  double average() const;

 private:
  Eigen::MatrixXd values_;
  Eigen::VectorXd measures_;
  Eigen::VectorXd cumulative_;
};

double graphon_eval(const StepGraphon& w, double s, double t);

// Rewrite both graphons on the merged partition. Values are unchanged;
// only the block structure is refined.
std::pair<StepGraphon, StepGraphon> common_refinement(const StepGraphon& w1,
                                                      const StepGraphon& w2);

// sqrt( sum_ij pi_i pi_j (W1_ij - W2_ij)^2 ) on the common refinement.
double graphon_l2_distance(const StepGraphon& w1, const StepGraphon& w2);

}  // namespace grd
