// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/randfield.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace surfuq {

CovarianceKernel CovarianceKernel::gaussian(double sigma2, double gamma_diag,
                                            double gamma_cross,
                                            double cross_scale) {
  return CovarianceKernel(
      [=](const Vec3& x, const Vec3& y) -> Eigen::Matrix3d {
        const double r2 = (x - y).squaredNorm();
        const double g = std::exp(-gamma_diag * r2);
        const double cross = cross_scale * std::exp(-gamma_cross * r2);
        Eigen::Matrix3d block;
        block << g, 0.0, cross,
                 0.0, g, 0.0,
                 cross, 0.0, g;
        return sigma2 * block;
      });
}

CovarianceKernel CovarianceKernel::zero() {
  return CovarianceKernel(
      [](const Vec3&, const Vec3&) { return Eigen::Matrix3d::Zero().eval(); });
}

CovarianceKernel CovarianceKernel::user(Fn fn) {
  return CovarianceKernel(std::move(fn));
}

KernelMatrixAccessor::KernelMatrixAccessor(std::vector<Vec3> points,
                                           CovarianceKernel kernel)
    : points_(std::move(points)), kernel_(std::move(kernel)) {}

Eigen::Index KernelMatrixAccessor::dimension() const {
  return 3 * static_cast<Eigen::Index>(points_.size());
}

Eigen::VectorXd KernelMatrixAccessor::diagonal() const {
  Eigen::VectorXd diag(dimension());
  for (std::size_t q = 0; q < points_.size(); ++q)
    diag.segment<3>(3 * q) = kernel_(points_[q], points_[q]).diagonal();
  return diag;
}

Eigen::VectorXd KernelMatrixAccessor::column(Eigen::Index j) const {
  const Eigen::Index point = j / 3;
  const Eigen::Index component = j % 3;
  Eigen::VectorXd col(dimension());
  for (std::size_t q = 0; q < points_.size(); ++q)
    col.segment<3>(3 * q) = kernel_(points_[q], points_[point]).col(component);
  return col;
}

DenseMatrixAccessor::DenseMatrixAccessor(Eigen::MatrixXd matrix)
    : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols())
    throw UsageError("pivoted Cholesky requires a square matrix");
}

Eigen::Index DenseMatrixAccessor::dimension() const { return matrix_.rows(); }
Eigen::VectorXd DenseMatrixAccessor::diagonal() const { return matrix_.diagonal(); }
Eigen::VectorXd DenseMatrixAccessor::column(Eigen::Index j) const {
  return matrix_.col(j);
}

PivotedCholeskyResult pivoted_cholesky(const MatrixAccessor& matrix, double tol) {
  if (tol < 0.0) throw UsageError("pivoted Cholesky tolerance must be >= 0");
  const Eigen::Index dim = matrix.dimension();
  PivotedCholeskyResult result;

  Eigen::VectorXd diag = matrix.diagonal();
  result.initial_trace = diag.sum();
  const double negative_floor = -1e-12 * std::max(1.0, result.initial_trace);
  if (diag.minCoeff() < negative_floor)
    throw NumericalError("pivoted Cholesky: matrix is not positive semidefinite");

  const double target = tol * result.initial_trace;
  double trace = result.initial_trace;
  constexpr Eigen::Index kBlock = 64;
  Eigen::MatrixXd factor(dim, std::min(kBlock, dim));
  Eigen::Index step = 0;
  while (step < dim && trace > target) {
    Eigen::Index pivot = 0;
    const double largest = diag.maxCoeff(&pivot);
    if (largest <= 0.0) break;  // remaining trace is round-off
    if (step == factor.cols())
      factor.conservativeResize(Eigen::NoChange, std::min(dim, step + kBlock));
    factor.col(step) = matrix.column(pivot);
    if (step > 0)
      factor.col(step).noalias() -=
          factor.leftCols(step) * factor.row(pivot).head(step).transpose();
    factor.col(step) /= std::sqrt(factor(pivot, step));
    diag -= factor.col(step).cwiseAbs2();
    if (diag.minCoeff() < negative_floor)
      throw NumericalError("pivoted Cholesky: matrix is not positive semidefinite");
    trace = diag.sum();
    result.pivots.push_back(pivot);
    ++step;
  }
  // A complete factorization leaves only round-off in the trace; anything
  // larger at full rank means the tolerance was unreachable.
  if (trace > target && tol > 0.0 && step == dim &&
      trace > 1e-10 * result.initial_trace)
    throw NumericalError(
        "pivoted Cholesky: tolerance unreachable within the matrix dimension");
  result.factor = factor.leftCols(step);
  result.trace_residual = std::max(trace, 0.0);
  return result;
}

PivotedCholeskyResult pivoted_cholesky(const Eigen::MatrixXd& matrix, double tol) {
  return pivoted_cholesky(DenseMatrixAccessor(matrix), tol);
}

void KLExpansion::set_amplitude(double alpha) {
  if (alpha < 0.0) throw UsageError("deformation amplitude must be >= 0");
  amplitude_ = alpha;
}

Eigen::VectorXd KLExpansion::displacement(const Eigen::VectorXd& y) const {
  if (y.size() != num_modes())
    throw UsageError("parameter vector dimension does not match the expansion");
  Eigen::VectorXd disp = mean_offset_;
  if (num_modes() > 0) disp.noalias() += modes_ * y;
  return amplitude_ * disp;
}

double KLExpansion::max_relative_displacement(const Eigen::VectorXd& y,
                                              double diameter) const {
  const Eigen::VectorXd disp = displacement(y);
  double worst = 0.0;
  for (int q = 0; q < num_points(); ++q)
    worst = std::max(worst, disp.segment<3>(3 * q).norm());
  return worst / diameter;
}

void KLExpansion::save_modes(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write KL mode file: " + path);
  const std::int64_t header[2] = {num_points(), num_modes()};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (Eigen::Index r = 0; r < modes_.rows(); ++r)
    for (Eigen::Index c = 0; c < modes_.cols(); ++c) {
      const double value = modes_(r, c);
      out.write(reinterpret_cast<const char*>(&value), sizeof(value));
    }
  if (!out) throw UsageError("failed writing KL mode file: " + path);
}

KLExpansion build_kl(const MultipatchSurface& surface, const SplineSpace2D& space,
                     const DofMap& dofmap, const CovarianceKernel& kernel,
                     double tolerance) {
  KLExpansion kl(space, dofmap, dof_points(surface, space, dofmap));
  const auto factorization = pivoted_cholesky(
      KernelMatrixAccessor(kl.points_, kernel), tolerance);
  kl.mean_offset_ = Eigen::VectorXd::Zero(3 * kl.num_points());
  kl.modes_ = factorization.factor;
  kl.tolerance_ = tolerance;
  kl.trace_residual_ = factorization.trace_residual;
  kl.initial_trace_ = factorization.initial_trace;
  return kl;
}

KLExpansion load_kl(const std::string& path, const MultipatchSurface& surface,
                    const SplineSpace2D& space, const DofMap& dofmap) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open KL mode file: " + path);
  std::int64_t header[2] = {0, 0};
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) throw UsageError("truncated KL mode file: " + path);

  KLExpansion kl(space, dofmap, dof_points(surface, space, dofmap));
  if (header[0] != kl.num_points())
    throw UsageError("KL mode file does not match the surface discretization");
  kl.mean_offset_ = Eigen::VectorXd::Zero(3 * kl.num_points());
  kl.modes_.resize(3 * header[0], header[1]);
  for (Eigen::Index r = 0; r < kl.modes_.rows(); ++r)
    for (Eigen::Index c = 0; c < kl.modes_.cols(); ++c) {
      double value = 0.0;
      in.read(reinterpret_cast<char*>(&value), sizeof(value));
      kl.modes_(r, c) = value;
    }
  if (!in) throw UsageError("truncated KL mode file: " + path);
  return kl;
}

MultipatchSurface deform(const KLExpansion& kl, const Eigen::VectorXd& y,
                         const MultipatchSurface& reference) {
  const DofMap& dofmap = kl.dofmap();
  if (reference.num_patches() != dofmap.num_patches())
    throw UsageError("deform: surface does not match the expansion");
  const Eigen::VectorXd disp = kl.displacement(y);

  const SplineSpace2D& space = kl.space();
  const GrevilleInterpolator interpolator(space);
  const int k = space.per_direction();
  std::vector<std::shared_ptr<const Patch>> patches;
  patches.reserve(reference.num_patches());
  for (int p = 0; p < reference.num_patches(); ++p) {
    Eigen::MatrixXd samples[3] = {Eigen::MatrixXd(k, k), Eigen::MatrixXd(k, k),
                                  Eigen::MatrixXd(k, k)};
    for (int i1 = 0; i1 < k; ++i1)
      for (int i2 = 0; i2 < k; ++i2) {
        const int g = dofmap.global_index(p, space.flat_index(i1, i2));
        for (int c = 0; c < 3; ++c) samples[c](i1, i2) = disp[3 * g + c];
      }
    Eigen::MatrixX3d coeffs(space.dimension(), 3);
    for (int c = 0; c < 3; ++c) {
      const Eigen::MatrixXd grid = interpolator.interpolate(samples[c]);
      for (int i1 = 0; i1 < k; ++i1)
        for (int i2 = 0; i2 < k; ++i2)
          coeffs(space.flat_index(i1, i2), c) = grid(i1, i2);
    }
    patches.push_back(std::make_shared<DisplacedPatch>(
        reference.patch_ptr(p), space, std::move(coeffs)));
  }
  return MultipatchSurface(std::move(patches), reference.interfaces());
}

}  // namespace surfuq
