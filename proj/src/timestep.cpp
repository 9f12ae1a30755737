// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/timestep.hpp"

#include <cmath>
#include <sstream>

namespace surfuq {

int ThetaScheme::num_steps() const {
  if (!(dt > 0.0) || !(t_final > 0.0))
    throw UsageError("theta scheme: dt and T must be positive");
  if (theta < 0.0 || theta > 1.0)
    throw UsageError("theta scheme: theta must lie in [0,1]");
  const double steps = t_final / dt;
  const int rounded = static_cast<int>(std::llround(steps));
  if (rounded < 1 || std::abs(rounded * dt - t_final) > 1e-9 * std::max(1.0, t_final))
    throw UsageError("theta scheme: T must be an integer multiple of dt");
  return rounded;
}

std::vector<double> ThetaScheme::snapshot_times() const {
  if (snapshot_count < 1)
    throw UsageError("theta scheme: need at least one snapshot");
  std::vector<double> times(snapshot_count);
  for (int i = 1; i <= snapshot_count; ++i)
    times[i - 1] = t_final * i / snapshot_count;
  return times;
}

std::vector<int> ThetaScheme::snapshot_steps() const {
  const int steps = num_steps();
  std::vector<int> indices(snapshot_count);
  for (int i = 1; i <= snapshot_count; ++i) {
    const double t = t_final * i / snapshot_count;
    const int step = static_cast<int>(std::llround(t / dt));
    if (step < 1 || step > steps ||
        std::abs(step * dt - t) > 1e-9 * std::max(1.0, t_final))
      throw UsageError("theta scheme: snapshot times must lie on the step grid");
    indices[i - 1] = step;
  }
  return indices;
}

ThetaSolver::ThetaSolver(const SparseMatrix& mass, const SparseMatrix& stiffness,
                         double theta, double dt, SolveConfig config)
    : theta_(theta), dt_(dt) {
  if (mass.rows() != stiffness.rows() || mass.cols() != stiffness.cols())
    throw UsageError("theta solver: operator dimensions disagree");
  if (!(config.rel_tol > 0.0))
    throw UsageError("theta solver: tolerance must be positive");
  implicit_part_ = mass + dt * theta * stiffness;
  explicit_part_ = mass - dt * (1.0 - theta) * stiffness;
  solver_.setTolerance(config.rel_tol);
  solver_.setMaxIterations(config.max_iterations);
  solver_.compute(implicit_part_);
  if (solver_.info() != Eigen::Success)
    throw NumericalError("theta solver: factorization failed");
}

Eigen::VectorXd ThetaSolver::step(const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& f_now,
                                  const Eigen::VectorXd& f_next) const {
  Eigen::VectorXd rhs = explicit_part_ * u;
  rhs.noalias() += dt_ * (1.0 - theta_) * f_now;
  rhs.noalias() += dt_ * theta_ * f_next;
  const Eigen::VectorXd next = solver_.solveWithGuess(rhs, u);
  if (solver_.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "conjugate gradients did not converge: " << solver_.iterations()
        << " iterations, residual " << solver_.error();
    throw NumericalError(msg.str());
  }
  return next;
}

Eigen::VectorXd theta_step(const SparseMatrix& mass, const SparseMatrix& stiffness,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& f_now,
                           const Eigen::VectorXd& f_next, double theta, double dt,
                           const SolveConfig& config) {
  return ThetaSolver(mass, stiffness, theta, dt, config).step(u, f_now, f_next);
}

SampleTrajectory evolve(const SparseMatrix& mass, const SparseMatrix& stiffness,
                        const Eigen::VectorXd& initial, const LoadFunction& load,
                        const ThetaScheme& scheme, const SolveConfig& config) {
  const int steps = scheme.num_steps();
  const auto snapshot_steps = scheme.snapshot_steps();
  const ThetaSolver solver(mass, stiffness, scheme.theta, scheme.dt, config);

  SampleTrajectory trajectory;
  trajectory.times = scheme.snapshot_times();
  trajectory.snapshots.resize(initial.size(), scheme.snapshot_count);

  Eigen::VectorXd u = initial;
  Eigen::VectorXd f_now = load(0.0);
  std::size_t cursor = 0;
  for (int i = 0; i < steps; ++i) {
    Eigen::VectorXd f_next = load((i + 1) * scheme.dt);
    u = solver.step(u, f_now, f_next);
    f_now = std::move(f_next);
    if (cursor < snapshot_steps.size() && snapshot_steps[cursor] == i + 1) {
      trajectory.snapshots.col(cursor) = u;
      ++cursor;
    }
  }
  return trajectory;
}

SampleTrajectory evolve(const SparseMatrix& mass, const SparseMatrix& stiffness,
                        const Eigen::VectorXd& initial, const Eigen::VectorXd& load,
                        const ThetaScheme& scheme, const SolveConfig& config) {
  return evolve(mass, stiffness, initial,
                [&load](double) { return load; }, scheme, config);
}

}  // namespace surfuq
