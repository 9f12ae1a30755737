// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_TIMESTEP_HPP_
#define SURFUQ_TIMESTEP_HPP_

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <functional>
#include <vector>

#include "surfuq/types.hpp"

namespace surfuq {

// One-parameter time discretization of M u' + A u = f; theta = 1/2 is
// Crank-Nicolson, theta = 1 backward Euler.
struct ThetaScheme {
  double theta = 0.5;
  double dt = 1e-3;
  double t_final = 1.0;
  int snapshot_count = 10;

  // T/dt, validated to be integral.
  int num_steps() const;
  // Uniform snapshot times t_i = T*i/snapshot_count, i = 1..snapshot_count;
  // all lie on the step grid and the final one is T.
  std::vector<double> snapshot_times() const;
  std::vector<int> snapshot_steps() const;
};

struct SolveConfig {
  double rel_tol = 1e-12;
  int max_iterations = 5000;
};

// Trajectory of one sample: coefficient vectors recorded at snapshot times.
struct SampleTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd snapshots;  // N_dof x N_t
};

// Linear solver for (M + dt*theta*A) u_{i+1} = (M - dt*(1-theta)*A) u_i
//                                      + dt*(1-theta) f_i + dt*theta f_{i+1},
// factored once per sample and reused across time steps. The solve is
// diagonal-preconditioned conjugate gradients, warm-started from u_i.
class ThetaSolver {
 public:
  ThetaSolver(const SparseMatrix& mass, const SparseMatrix& stiffness,
              double theta, double dt, SolveConfig config = {});

  Eigen::VectorXd step(const Eigen::VectorXd& u, const Eigen::VectorXd& f_now,
                       const Eigen::VectorXd& f_next) const;

 private:
  SparseMatrix implicit_part_;
  SparseMatrix explicit_part_;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> solver_;
  double theta_;
  double dt_;
};

// Single theta step with a one-off factorization.
Eigen::VectorXd theta_step(const SparseMatrix& mass, const SparseMatrix& stiffness,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& f_now,
                           const Eigen::VectorXd& f_next, double theta, double dt,
                           const SolveConfig& config = {});

using LoadFunction = std::function<Eigen::VectorXd(double)>;

SampleTrajectory evolve(const SparseMatrix& mass, const SparseMatrix& stiffness,
                        const Eigen::VectorXd& initial, const LoadFunction& load,
                        const ThetaScheme& scheme, const SolveConfig& config = {});

// Time-independent load.
SampleTrajectory evolve(const SparseMatrix& mass, const SparseMatrix& stiffness,
                        const Eigen::VectorXd& initial, const Eigen::VectorXd& load,
                        const ThetaScheme& scheme, const SolveConfig& config = {});

}  // namespace surfuq

#endif  // SURFUQ_TIMESTEP_HPP_
