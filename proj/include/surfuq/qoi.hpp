// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_QOI_HPP_
#define SURFUQ_QOI_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "surfuq/assembly.hpp"
#include "surfuq/geometry.hpp"
#include "surfuq/lowrank.hpp"
#include "surfuq/types.hpp"

namespace surfuq {

// Running mean of coefficient vectors, one column per snapshot time. Because
// the basis coefficients coincide in material and spatial coordinates, this
// is the coefficient vector of the expectation field on the reference
// surface.
class ExpectationField {
 public:
  ExpectationField(int n_dof, int num_times);
  void add(const Eigen::MatrixXd& snapshots);
  int sample_count() const { return count_; }
  int num_times() const { return static_cast<int>(sum_.cols()); }
  Eigen::MatrixXd mean() const;

 private:
  Eigen::MatrixXd sum_;
  int count_ = 0;
};

// Sparse evaluation operator: row g holds the basis values at the Greville
// image of global dof g, so matrix() * coeffs gives field values at the
// dof points.
class PointEvaluator {
 public:
  PointEvaluator(const MultipatchSurface& surface, const SplineSpace2D& space,
                 const DofMap& dofmap);
  const SparseMatrix& matrix() const { return matrix_; }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& coeffs) const {
    return matrix_ * coeffs;
  }

 private:
  SparseMatrix matrix_;
};

// Pointwise standard deviation at the dof points, one column per snapshot
// time: sqrt(max(0, diag(C~(t,t)) - mean^2)) with both terms evaluated at
// the points.
Eigen::MatrixXd std_field(const ExpectationField& expectation,
                          const LowRankCorrelation& correlation,
                          const PointEvaluator& evaluator);

// Spline coefficients whose Greville interpolant matches the given values at
// the dof points (used to visualize point-data such as standard deviations).
Eigen::VectorXd interpolate_point_values(const MultipatchSurface& surface,
                                         const SplineSpace2D& space,
                                         const DofMap& dofmap,
                                         const Eigen::VectorXd& point_values);

// Value of the discrete field sum_g coeffs[g] phi_g at a parametric point.
double evaluate_field(const SplineSpace2D& space, const DofMap& dofmap,
                      const Eigen::VectorXd& coeffs, int patch, double u,
                      double v);

// Field evaluated at spatial surface points, for L2 error integrands.
using SpatialField = std::function<double(const Vec3&)>;
// Field evaluated in patch parameters, e.g. another discrete solution.
using ParametricField = std::function<double(int patch, double u, double v)>;

// sqrt( int_S (u_h - ref)^2 dsigma ) by element quadrature.
double l2_error(const MultipatchSurface& surface, const SplineSpace2D& space,
                const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                const SpatialField& reference, const QuadratureRule& quad);
double l2_error(const MultipatchSurface& surface, const SplineSpace2D& space,
                const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                const ParametricField& reference, const QuadratureRule& quad);

struct ErrorReport {
  double e_frobenius = std::numeric_limits<double>::quiet_NaN();
  double e_l2 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> per_time_frobenius;
  std::vector<double> per_time_l2;
  // Run metadata.
  int max_rank = 0;
  std::string sampler;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  int num_samples = 0;
};

}  // namespace surfuq

#endif  // SURFUQ_QOI_HPP_
