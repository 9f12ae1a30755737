// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_SPLINES_HPP_
#define SURFUQ_SPLINES_HPP_

#include <Eigen/Dense>
#include <vector>

#include "surfuq/types.hpp"

namespace surfuq {

// Locally quasi-uniform p-open knot vector on [0,1] carrying k = num_basis()
// B-spline basis functions of degree p. The first and last knots repeat p+1
// times; interior knots are strictly increasing.
class KnotVector {
 public:
  KnotVector(std::vector<double> knots, int degree);

  // Open knot vector with 2^level uniform interior spans, k = 2^level + p.
  static KnotVector uniform(int degree, int level);

  int degree() const { return degree_; }
  int num_basis() const { return num_basis_; }
  const std::vector<double>& knots() const { return knots_; }
  // Largest ratio between adjacent interior spans.
  double quasi_uniformity() const { return theta_; }
  int num_spans() const { return num_basis_ - degree_; }

  // Index s of the span [knot_s, knot_{s+1}) containing x, with x = 1 mapped
  // to the last nonempty span so that evaluation is right-closed.
  int find_span(double x) const;

  // b_j^p(x) via the Cox-de Boor recursion.
  double evaluate(int j, double x) const;
  // d/dx b_j^p(x), one-sided at knot lines.
  double evaluate_derivative(int j, double x) const;

  // Values of the p+1 basis functions b_{s-p..s} that are nonzero on span s.
  void basis_on_span(int span, double x, double* values) const;
  // Values and first derivatives on span s.
  void basis_and_derivative_on_span(int span, double x, double* values,
                                    double* derivatives) const;

  // Greville abscissae (knot averages); requires p >= 1.
  std::vector<double> greville() const;

  // Knot vector with all interior span midpoints inserted.
  KnotVector refined_dyadic() const;

 private:
  std::vector<double> knots_;
  int degree_;
  int num_basis_;
  double theta_;
};

// Boehm insertion of the single knot x; writes the refined knot vector to
// *refined when given and returns the refined coefficients.
Eigen::VectorXd insert_knot(const KnotVector& kv, const Eigen::VectorXd& coeffs,
                            double x, KnotVector* refined = nullptr);

// Coefficients of the same spline function on a refined knot vector whose
// knots contain those of `from`.
Eigen::VectorXd refine_coefficients(const KnotVector& from, const KnotVector& to,
                                    const Eigen::VectorXd& coeffs);

// Tensor-product spline space S^p(Xi) x S^p(Xi) on the parameter square.
class SplineSpace2D {
 public:
  explicit SplineSpace2D(KnotVector kv);
  static SplineSpace2D uniform(int degree, int level) {
    return SplineSpace2D(KnotVector::uniform(degree, level));
  }

  const KnotVector& knots() const { return kv_; }
  int degree() const { return kv_.degree(); }
  int per_direction() const { return kv_.num_basis(); }
  int dimension() const { return kv_.num_basis() * kv_.num_basis(); }
  int flat_index(int i1, int i2) const { return i1 * kv_.num_basis() + i2; }

  double evaluate(int flat, double u, double v) const;

 private:
  KnotVector kv_;
};

// Collocation at the tensor Greville grid, factorized once for reuse across
// many right-hand sides (per-sample geometry deformation interpolates three
// displacement components on every patch).
class GrevilleInterpolator {
 public:
  explicit GrevilleInterpolator(const SplineSpace2D& space);

  // samples(q1, q2) given at (node[q1], node[q2]); returns coefficients c with
  // sum_{i1,i2} c(i1,i2) b_{i1}(x) b_{i2}(y) matching all samples.
  Eigen::MatrixXd interpolate(const Eigen::MatrixXd& samples) const;
  Eigen::VectorXd interpolate_univariate(const Eigen::VectorXd& samples) const;

  const std::vector<double>& nodes() const { return nodes_; }

 private:
  std::vector<double> nodes_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

// One-shot tensor Greville interpolation on a single patch.
Eigen::MatrixXd interpolate_on_patch(const SplineSpace2D& space,
                                     const Eigen::MatrixXd& samples);

}  // namespace surfuq

#endif  // SURFUQ_SPLINES_HPP_
