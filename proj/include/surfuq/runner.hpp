// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_RUNNER_HPP_
#define SURFUQ_RUNNER_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "surfuq/qoi.hpp"
#include "surfuq/types.hpp"

namespace surfuq {

struct KernelConfig {
  double sigma2 = 1e-2;
  double gamma_diag = 50.0;
  double gamma_cross = 0.5;
  double cross_scale = 1e-4;
};

// Full run configuration; defaults mirror the desk-scale experiment setup.
struct RunConfig {
  std::string geometry = "sphere";  // builtin name ("sphere", "pipe") or file
  int degree = 2;
  int level = 3;
  double theta = 0.5;
  double dt = 1e-3;
  double t_final = 1.0;
  int snapshots = 10;
  std::string sampler = "mc";  // "mc" | "halton"
  std::uint64_t seed = 0;
  int num_samples = 64;
  double kl_tol = 1e-4;
  double alpha = 1.0;
  std::vector<int> ranks = {64};
  std::vector<double> alphas = {1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
  std::vector<int> levels = {1, 2, 3};
  std::vector<int> degrees;          // empty: use `degree` only
  std::vector<double> dt_study;      // nonempty: temporal convergence study
  double dt_reference = 0.0;         // reference step for the dt study
  std::string out_dir = ".";
  int workers = 1;
  KernelConfig kernel;
  std::string oracle = "auto";  // "auto" | "on" | "off" correlation oracle
  double solver_tol = 1e-12;

  void validate() const;
};

struct ConvergenceRow {
  int degree = 0;
  int level = 0;
  double dt = 0.0;
  double error = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
};

struct UqResult {
  int n_dof = 0;
  int kl_modes = 0;
  int rejected = 0;
  std::vector<int> ranks;
  std::vector<double> e_frobenius;  // NaN when the oracle is off
  std::vector<double> e_l2;
  Eigen::MatrixXd expectation;        // N_dof x N_t
  Eigen::MatrixXd stddev;             // point values at dofs, N_dof x N_t
  std::vector<double> snapshot_times;
  // Principal-correlation blocks at the largest rank, keyed by time pair.
  std::map<std::pair<int, int>, Eigen::MatrixXd> principal;
};

struct StabilityRow {
  double alpha = 0.0;
  double e_frobenius = std::numeric_limits<double>::quiet_NaN();
  double e_l2 = 0.0;
  double max_displacement = 0.0;  // relative to the surface diameter
};

struct StabilityResult {
  std::vector<StabilityRow> rows;
};

// Deterministic spatial/temporal convergence study on the undeformed
// geometry; writes l2_error.csv (or dt_error.csv for the dt study).
ConvergenceResult run_convergence(const RunConfig& config);

// Full uncertainty-quantification pipeline: KL build, sampled trajectories
// across workers, expectation/std fields, low-rank errors per requested
// rank, and principal-correlation tables. Writes convergence.csv,
// generalization.csv, principal_correlation.csv, expectation.vtk,
// stddev.vtk, and summary.txt.
UqResult run_uq(const RunConfig& config);

// Repeats the uq metrics per deformation amplitude at the largest requested
// rank; writes stability_cov.csv, stability_gen.csv, stability_disp.csv.
StabilityResult run_stability(const RunConfig& config);

// Prints geometry and discretization facts.
void run_info(const RunConfig& config, std::ostream& out);

// Key=value configuration file (one pair per line, '#' comments).
void apply_config_file(const std::string& path,
                       const std::map<std::string, std::string>& overrides,
                       RunConfig& config);
RunConfig parse_config(const std::map<std::string, std::string>& pairs,
                       RunConfig base = {});

// Legacy-ASCII unstructured-mesh file of a coefficient field sampled on a
// dense per-patch grid.
void write_vtk_field(const std::string& path, const MultipatchSurface& surface,
                     const SplineSpace2D& space, const DofMap& dofmap,
                     const Eigen::VectorXd& coeffs, const std::string& name,
                     int samples_per_patch = 17);

}  // namespace surfuq

#endif  // SURFUQ_RUNNER_HPP_
