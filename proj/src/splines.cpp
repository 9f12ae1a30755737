// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/splines.hpp"

#include <algorithm>
#include <cmath>

namespace surfuq {

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0) throw UsageError("knot vector: degree must be nonnegative");
  const int n = static_cast<int>(knots_.size());
  num_basis_ = n - degree_ - 1;
  if (num_basis_ <= degree_)
    throw UsageError("knot vector: requires k > p basis functions");
  for (int i = 0; i + 1 < n; ++i)
    if (knots_[i] > knots_[i + 1])
      throw UsageError("knot vector: knots must be nondecreasing");
  for (int i = 0; i <= degree_; ++i)
    if (knots_[i] != 0.0 || knots_[n - 1 - i] != 1.0)
      throw UsageError("knot vector: not p-open on [0,1]");
  // Local quasi-uniformity rules out repeated interior knots.
  theta_ = 1.0;
  for (int j = degree_; j < num_basis_; ++j) {
    const double h = knots_[j + 1] - knots_[j];
    if (h <= 0.0)
      throw UsageError("knot vector: interior knots must be strictly increasing");
    if (j > degree_) {
      const double ratio = (knots_[j] - knots_[j - 1]) / h;
      theta_ = std::max({theta_, ratio, 1.0 / ratio});
    }
  }
}

KnotVector KnotVector::uniform(int degree, int level) {
  if (degree < 0 || level < 0)
    throw UsageError("knot vector: degree and level must be nonnegative");
  const int spans = 1 << level;
  std::vector<double> knots;
  knots.reserve(2 * (degree + 1) + spans - 1);
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (int i = 1; i < spans; ++i)
    knots.push_back(static_cast<double>(i) / static_cast<double>(spans));
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
  return KnotVector(std::move(knots), degree);
}

int KnotVector::find_span(double x) const {
  if (x < 0.0 || x > 1.0)
    throw UsageError("spline evaluation point outside [0,1]");
  if (x >= 1.0) return num_basis_ - 1;
  // Last span index s with knot_s <= x; spans run from p to k-1.
  int lo = degree_, hi = num_basis_ - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (knots_[mid] <= x)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

void KnotVector::basis_on_span(int span, double x, double* values) const {
  values[0] = 1.0;
  std::vector<double> left(degree_ + 1), right(degree_ + 1);
  for (int r = 1; r <= degree_; ++r) {
    left[r] = x - knots_[span + 1 - r];
    right[r] = knots_[span + r] - x;
    double saved = 0.0;
    for (int j = 0; j < r; ++j) {
      const double temp = values[j] / (right[j + 1] + left[r - j]);
      values[j] = saved + right[j + 1] * temp;
      saved = left[r - j] * temp;
    }
    values[r] = saved;
  }
}

void KnotVector::basis_and_derivative_on_span(int span, double x, double* values,
                                              double* derivatives) const {
  const int p = degree_;
  if (p == 0) {
    values[0] = 1.0;
    derivatives[0] = 0.0;
    return;
  }
  // Triangle up to degree p-1, kept for the degree-lowering formula.
  std::vector<double> lower(p, 0.0);
  values[0] = 1.0;
  std::vector<double> left(p + 1), right(p + 1);
  for (int r = 1; r <= p; ++r) {
    if (r == p) std::copy(values, values + p, lower.begin());
    left[r] = x - knots_[span + 1 - r];
    right[r] = knots_[span + r] - x;
    double saved = 0.0;
    for (int j = 0; j < r; ++j) {
      const double temp = values[j] / (right[j + 1] + left[r - j]);
      values[j] = saved + right[j + 1] * temp;
      saved = left[r - j] * temp;
    }
    values[r] = saved;
  }
  // lower[j] = b_{span-p+1+j}^{p-1}(x) for j = 0..p-1.
  for (int i = 0; i <= p; ++i) {
    double d = 0.0;
    if (i > 0) {
      const double den = knots_[span + i] - knots_[span + i - p];
      if (den > 0.0) d += lower[i - 1] / den;
    }
    if (i < p) {
      const double den = knots_[span + i + 1] - knots_[span + i + 1 - p];
      if (den > 0.0) d -= lower[i] / den;
    }
    derivatives[i] = p * d;
  }
}

double KnotVector::evaluate(int j, double x) const {
  if (j < 0 || j >= num_basis_)
    throw UsageError("basis index out of range");
  const int span = find_span(x);
  if (j < span - degree_ || j > span) return 0.0;
  std::vector<double> values(degree_ + 1);
  basis_on_span(span, x, values.data());
  return values[j - (span - degree_)];
}

double KnotVector::evaluate_derivative(int j, double x) const {
  if (j < 0 || j >= num_basis_)
    throw UsageError("basis index out of range");
  const int span = find_span(x);
  if (j < span - degree_ || j > span) return 0.0;
  std::vector<double> values(degree_ + 1), derivatives(degree_ + 1);
  basis_and_derivative_on_span(span, x, values.data(), derivatives.data());
  return derivatives[j - (span - degree_)];
}

std::vector<double> KnotVector::greville() const {
  if (degree_ == 0)
    throw UsageError("Greville points are undefined for degree 0");
  std::vector<double> points(num_basis_);
  for (int j = 0; j < num_basis_; ++j) {
    double sum = 0.0;
    for (int r = 1; r <= degree_; ++r) sum += knots_[j + r];
    points[j] = sum / degree_;
  }
  points.front() = 0.0;
  points.back() = 1.0;
  return points;
}

KnotVector KnotVector::refined_dyadic() const {
  std::vector<double> knots;
  knots.reserve(knots_.size() + num_spans());
  for (int i = 0; i <= degree_; ++i) knots.push_back(0.0);
  for (int j = degree_; j < num_basis_; ++j) {
    if (j > degree_) knots.push_back(knots_[j]);
    knots.push_back(0.5 * (knots_[j] + knots_[j + 1]));
  }
  for (int i = 0; i <= degree_; ++i) knots.push_back(1.0);
  return KnotVector(std::move(knots), degree_);
}

Eigen::VectorXd insert_knot(const KnotVector& kv, const Eigen::VectorXd& coeffs,
                            double x, KnotVector* refined) {
  if (coeffs.size() != kv.num_basis())
    throw UsageError("insert_knot: coefficient count mismatch");
  if (x <= 0.0 || x >= 1.0)
    throw UsageError("insert_knot: knot must be interior");
  const int p = kv.degree();
  const int s = kv.find_span(x);
  const auto& xi = kv.knots();
  Eigen::VectorXd out(coeffs.size() + 1);
  for (int i = 0; i <= s - p; ++i) out[i] = coeffs[i];
  for (int i = s - p + 1; i <= s; ++i) {
    const double a = (x - xi[i]) / (xi[i + p] - xi[i]);
    out[i] = a * coeffs[i] + (1.0 - a) * coeffs[i - 1];
  }
  for (int i = s + 1; i < out.size(); ++i) out[i] = coeffs[i - 1];
  if (refined != nullptr) {
    std::vector<double> knots = xi;
    knots.insert(knots.begin() + s + 1, x);
    *refined = KnotVector(std::move(knots), p);
  }
  return out;
}

Eigen::VectorXd refine_coefficients(const KnotVector& from, const KnotVector& to,
                                    const Eigen::VectorXd& coeffs) {
  if (from.degree() != to.degree())
    throw UsageError("refine_coefficients: degree mismatch");
  KnotVector current = from;
  Eigen::VectorXd result = coeffs;
  std::vector<double> missing;
  {
    const auto& a = current.knots();
    const auto& b = to.knots();
    std::size_t ia = 0;
    for (double value : b) {
      if (ia < a.size() && a[ia] == value)
        ++ia;
      else
        missing.push_back(value);
    }
    if (ia != a.size())
      throw UsageError("refine_coefficients: target does not contain source knots");
  }
  for (double x : missing) {
    KnotVector next = current;
    result = insert_knot(current, result, x, &next);
    current = next;
  }
  return result;
}

SplineSpace2D::SplineSpace2D(KnotVector kv) : kv_(std::move(kv)) {}

double SplineSpace2D::evaluate(int flat, double u, double v) const {
  const int k = kv_.num_basis();
  if (flat < 0 || flat >= k * k) throw UsageError("basis index out of range");
  return kv_.evaluate(flat / k, u) * kv_.evaluate(flat % k, v);
}

GrevilleInterpolator::GrevilleInterpolator(const SplineSpace2D& space)
    : nodes_(space.knots().greville()) {
  const auto& kv = space.knots();
  const int k = kv.num_basis();
  Eigen::MatrixXd collocation = Eigen::MatrixXd::Zero(k, k);
  std::vector<double> values(kv.degree() + 1);
  for (int q = 0; q < k; ++q) {
    const int span = kv.find_span(nodes_[q]);
    kv.basis_on_span(span, nodes_[q], values.data());
    for (int r = 0; r <= kv.degree(); ++r)
      collocation(q, span - kv.degree() + r) = values[r];
  }
  qr_.compute(collocation);
  if (!qr_.isInvertible())
    throw NumericalError("Greville collocation matrix is singular");
}

Eigen::MatrixXd GrevilleInterpolator::interpolate(
    const Eigen::MatrixXd& samples) const {
  const int k = static_cast<int>(nodes_.size());
  if (samples.rows() != k || samples.cols() != k)
    throw UsageError("interpolate: sample grid size mismatch");
  // B C B^T = S  =>  C = B^{-1} S B^{-T}, two banded collocation solves.
  const Eigen::MatrixXd half = qr_.solve(samples);
  return qr_.solve(half.transpose()).transpose();
}

Eigen::VectorXd GrevilleInterpolator::interpolate_univariate(
    const Eigen::VectorXd& samples) const {
  if (samples.size() != static_cast<Eigen::Index>(nodes_.size()))
    throw UsageError("interpolate: sample count mismatch");
  return qr_.solve(samples);
}

Eigen::MatrixXd interpolate_on_patch(const SplineSpace2D& space,
                                     const Eigen::MatrixXd& samples) {
  return GrevilleInterpolator(space).interpolate(samples);
}

}  // namespace surfuq
