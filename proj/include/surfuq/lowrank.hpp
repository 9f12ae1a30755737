// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_LOWRANK_HPP_
#define SURFUQ_LOWRANK_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "surfuq/types.hpp"

namespace surfuq {

// Streaming low-rank representation of the space-time correlation
// (1/l) sum_s u(xi_s, t_i) u(xi_s, t_j)^T of solution coefficient vectors.
//
// Per snapshot time it tracks an orthonormal basis U(t_i) and singular
// values Sigma(t_i) of the sample matrix, and per ordered time pair
// (i <= j) a coupling matrix L(t_i, t_j) absorbing the right singular
// factors, so that
//   C(t_i, t_j) ~ U(t_i) Sigma(t_i) L(t_i, t_j) Sigma(t_j)^T U(t_j)^T.
// Each new sample rotates the factors through the SVD of a small padded
// matrix; ranks are capped at max_rank by discarding the trailing columns.
//
// The accumulator is a single-owner sequential consumer: samples may be
// produced in parallel but must be applied in ascending sample order.
class LowRankCorrelation {
 public:
  LowRankCorrelation(int n_dof, int num_times, int max_rank);

  // Consumes the next sample; snapshots has one column per snapshot time.
  // The first call initializes the factors.
  void update(const Eigen::MatrixXd& snapshots);

  int n_dof() const { return n_dof_; }
  int num_times() const { return num_times_; }
  int max_rank() const { return max_rank_; }
  int sample_count() const { return count_; }
  int rank(int time) const { return static_cast<int>(sigma_.at(time).size()); }

  const Eigen::MatrixXd& basis(int time) const { return basis_.at(time); }
  const Eigen::VectorXd& singular_values(int time) const { return sigma_.at(time); }
  // L(t_i, t_j); the transpose of the stored block for i > j.
  Eigen::MatrixXd coupling(int i, int j) const;

  // Dense correlation block C~(t_i, t_j).
  Eigen::MatrixXd reconstruct(int i, int j) const;

  // Leading n_pc x n_pc block of U(t_i)^T C~(t_i,t_j) U(t_j), scaled so that
  // same-time diagonal blocks become the identity.
  Eigen::MatrixXd principal_correlation(int i, int j, int n_pc) const;

  // Mean over snapshot times of |C - C~|_F / |C|_F on the diagonal blocks.
  std::vector<double> frobenius_errors(
      const std::vector<Eigen::MatrixXd>& diagonal_blocks) const;
  double frobenius_error(const std::vector<Eigen::MatrixXd>& diagonal_blocks) const;

  // Mean relative projection error |u - U U^T u| / |u| of fresh samples onto
  // the learned bases, per time and averaged.
  std::vector<double> generalization_errors(
      const std::vector<Eigen::MatrixXd>& fresh_samples) const;
  double generalization_error(const std::vector<Eigen::MatrixXd>& fresh_samples) const;

  // Number of stored scalars across U, Sigma, and L.
  std::size_t storage_scalars() const;

  void save(const std::string& path) const;
  static LowRankCorrelation load(const std::string& path);

 private:
  int pair_offset(int i, int j) const {
    return i * num_times_ - i * (i - 1) / 2 + (j - i);
  }

  int n_dof_;
  int num_times_;
  int max_rank_;
  int count_ = 0;
  std::vector<Eigen::MatrixXd> basis_;
  std::vector<Eigen::VectorXd> sigma_;
  std::vector<Eigen::MatrixXd> coupling_;  // upper-triangular pairs i <= j
};

}  // namespace surfuq

#endif  // SURFUQ_LOWRANK_HPP_
