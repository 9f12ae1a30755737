// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_RANDFIELD_HPP_
#define SURFUQ_RANDFIELD_HPP_

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "surfuq/geometry.hpp"
#include "surfuq/splines.hpp"
#include "surfuq/types.hpp"

namespace surfuq {

// Matrix-valued covariance function on the reference surface.
class CovarianceKernel {
 public:
  using Fn = std::function<Eigen::Matrix3d(const Vec3&, const Vec3&)>;

  // Gaussian kernel with a weak cross coupling between the first and third
  // component,
  //   sigma2 * [ g   0   c*G ]
  //            [ 0   g   0   ]      g = exp(-gamma_diag  * r^2)
  //            [ c*G 0   g   ],     G = exp(-gamma_cross * r^2),
  // with r the Euclidean distance of the two points.
  static CovarianceKernel gaussian(double sigma2 = 1e-2, double gamma_diag = 50.0,
                                   double gamma_cross = 0.5,
                                   double cross_scale = 1e-4);
  static CovarianceKernel zero();
  static CovarianceKernel user(Fn fn);

  Eigen::Matrix3d operator()(const Vec3& x, const Vec3& y) const {
    return fn_(x, y);
  }

 private:
  explicit CovarianceKernel(Fn fn) : fn_(std::move(fn)) {}
  Fn fn_;
};

// Symmetric matrix exposed through lazily evaluated columns, so that large
// kernel matrices never have to be formed densely.
class MatrixAccessor {
 public:
  virtual ~MatrixAccessor() = default;
  virtual Eigen::Index dimension() const = 0;
  virtual Eigen::VectorXd diagonal() const = 0;
  virtual Eigen::VectorXd column(Eigen::Index j) const = 0;
};

// Point-set covariance matrix with one 3x3 kernel block per point pair; row
// and column indices are 3*point + component.
class KernelMatrixAccessor final : public MatrixAccessor {
 public:
  KernelMatrixAccessor(std::vector<Vec3> points, CovarianceKernel kernel);
  Eigen::Index dimension() const override;
  Eigen::VectorXd diagonal() const override;
  Eigen::VectorXd column(Eigen::Index j) const override;

 private:
  std::vector<Vec3> points_;
  CovarianceKernel kernel_;
};

class DenseMatrixAccessor final : public MatrixAccessor {
 public:
  explicit DenseMatrixAccessor(Eigen::MatrixXd matrix);
  Eigen::Index dimension() const override;
  Eigen::VectorXd diagonal() const override;
  Eigen::VectorXd column(Eigen::Index j) const override;

 private:
  Eigen::MatrixXd matrix_;
};

struct PivotedCholeskyResult {
  Eigen::MatrixXd factor;  // dimension x rank, rank columns in pivot order
  std::vector<Eigen::Index> pivots;
  double initial_trace = 0.0;
  double trace_residual = 0.0;
  int rank() const { return static_cast<int>(factor.cols()); }
};

// Greedy low-rank factorization L L^T ~ K with trace(K - L L^T) <= tol *
// trace(K), pivoting on the largest remaining diagonal entry.
PivotedCholeskyResult pivoted_cholesky(const MatrixAccessor& matrix, double tol);
PivotedCholeskyResult pivoted_cholesky(const Eigen::MatrixXd& matrix, double tol);

// Truncated Karhunen-Loeve expansion of the deformation field, sampled at
// the deduplicated Greville images of all patches. Column k of modes() holds
// sqrt(lambda_k) * chi_k stacked over the points.
class KLExpansion {
 public:
  int num_modes() const { return static_cast<int>(modes_.cols()); }
  int num_points() const { return static_cast<int>(points_.size()); }
  const std::vector<Vec3>& points() const { return points_; }
  const Eigen::MatrixXd& modes() const { return modes_; }
  const SplineSpace2D& space() const { return space_; }
  const DofMap& dofmap() const { return *dofmap_; }

  double amplitude() const { return amplitude_; }
  void set_amplitude(double alpha);
  double tolerance() const { return tolerance_; }
  double trace_residual() const { return trace_residual_; }
  double initial_trace() const { return initial_trace_; }

  // Displacement alpha * (mean offset + modes * y), three entries per point.
  Eigen::VectorXd displacement(const Eigen::VectorXd& y) const;
  double max_relative_displacement(const Eigen::VectorXd& y,
                                   double diameter) const;

  // Binary export of the mode matrix: point count, m, then row-major doubles.
  void save_modes(const std::string& path) const;

  friend KLExpansion build_kl(const MultipatchSurface&, const SplineSpace2D&,
                              const DofMap&, const CovarianceKernel&, double);
  friend KLExpansion load_kl(const std::string&, const MultipatchSurface&,
                             const SplineSpace2D&, const DofMap&);

 private:
  KLExpansion(SplineSpace2D space, DofMap dofmap, std::vector<Vec3> points)
      : space_(std::move(space)),
        dofmap_(std::make_shared<DofMap>(std::move(dofmap))),
        points_(std::move(points)) {}

  SplineSpace2D space_;
  std::shared_ptr<const DofMap> dofmap_;
  std::vector<Vec3> points_;
  Eigen::VectorXd mean_offset_;  // zero for the identity mean field
  Eigen::MatrixXd modes_;
  double amplitude_ = 1.0;
  double tolerance_ = 0.0;
  double trace_residual_ = 0.0;
  double initial_trace_ = 0.0;
};

KLExpansion build_kl(const MultipatchSurface& surface, const SplineSpace2D& space,
                     const DofMap& dofmap, const CovarianceKernel& kernel,
                     double tolerance);

// Rebuilds an expansion from a mode file written by save_modes; the surface,
// space, and dofmap must match the ones used at build time.
KLExpansion load_kl(const std::string& path, const MultipatchSurface& surface,
                    const SplineSpace2D& space, const DofMap& dofmap);

// Deformed copy of the reference surface: the displacement is interpolated
// patchwise into the geometry space, so shared edges stay conforming.
MultipatchSurface deform(const KLExpansion& kl, const Eigen::VectorXd& y,
                         const MultipatchSurface& reference);

}  // namespace surfuq

#endif  // SURFUQ_RANDFIELD_HPP_
