// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/qoi.hpp"

#include <cmath>

namespace surfuq {

ExpectationField::ExpectationField(int n_dof, int num_times)
    : sum_(Eigen::MatrixXd::Zero(n_dof, num_times)) {
  if (n_dof < 1 || num_times < 1)
    throw UsageError("expectation field: dimensions must be positive");
}

void ExpectationField::add(const Eigen::MatrixXd& snapshots) {
  if (snapshots.rows() != sum_.rows() || snapshots.cols() != sum_.cols())
    throw UsageError("expectation field: snapshot matrix has wrong shape");
  sum_ += snapshots;
  ++count_;
}

Eigen::MatrixXd ExpectationField::mean() const {
  if (count_ == 0) throw UsageError("expectation field: no samples");
  return sum_ / static_cast<double>(count_);
}

PointEvaluator::PointEvaluator(const MultipatchSurface& surface,
                               const SplineSpace2D& space, const DofMap& dofmap) {
  (void)surface;
  const KnotVector& kv = space.knots();
  const auto greville = kv.greville();
  const int p = kv.degree();
  const int k = kv.num_basis();
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> bu(p + 1), bv(p + 1);
  for (int g = 0; g < dofmap.dimension(); ++g) {
    const auto [patch, flat] = dofmap.representative(g);
    const double u = greville[flat / k], v = greville[flat % k];
    const int su = kv.find_span(u), sv = kv.find_span(v);
    kv.basis_on_span(su, u, bu.data());
    kv.basis_on_span(sv, v, bv.data());
    for (int a = 0; a <= p; ++a)
      for (int b = 0; b <= p; ++b) {
        const int column =
            dofmap.global_index(patch, space.flat_index(su - p + a, sv - p + b));
        const double value = bu[a] * bv[b];
        if (value != 0.0) triplets.emplace_back(g, column, value);
      }
  }
  matrix_.resize(dofmap.dimension(), dofmap.dimension());
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
}

Eigen::MatrixXd std_field(const ExpectationField& expectation,
                          const LowRankCorrelation& correlation,
                          const PointEvaluator& evaluator) {
  if (expectation.num_times() != correlation.num_times())
    throw UsageError("std field: expectation and correlation disagree on times");
  if (correlation.sample_count() == 0)
    throw UsageError("std field: correlation state holds no samples");
  const Eigen::MatrixXd mean_values = evaluator.matrix() * expectation.mean();
  Eigen::MatrixXd result(mean_values.rows(), mean_values.cols());
  for (int i = 0; i < correlation.num_times(); ++i) {
    Eigen::VectorXd second_moment =
        Eigen::VectorXd::Zero(evaluator.matrix().rows());
    if (correlation.rank(i) > 0) {
      const Eigen::MatrixXd projected =
          evaluator.matrix() * correlation.basis(i);
      const Eigen::MatrixXd weighted = correlation.singular_values(i).asDiagonal() *
                                       correlation.coupling(i, i) *
                                       correlation.singular_values(i).asDiagonal();
      second_moment =
          (projected * weighted).cwiseProduct(projected).rowwise().sum();
    }
    result.col(i) = (second_moment - mean_values.col(i).cwiseAbs2())
                        .cwiseMax(0.0)
                        .cwiseSqrt();
  }
  return result;
}

Eigen::VectorXd interpolate_point_values(const MultipatchSurface& surface,
                                         const SplineSpace2D& space,
                                         const DofMap& dofmap,
                                         const Eigen::VectorXd& point_values) {
  if (point_values.size() != dofmap.dimension())
    throw UsageError("interpolate_point_values: one value per dof required");
  const GrevilleInterpolator interpolator(space);
  const int k = space.per_direction();
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(dofmap.dimension());
  std::vector<bool> written(dofmap.dimension(), false);
  for (int patch = 0; patch < surface.num_patches(); ++patch) {
    Eigen::MatrixXd samples(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        samples(a, b) =
            point_values[dofmap.global_index(patch, space.flat_index(a, b))];
    const Eigen::MatrixXd local = interpolator.interpolate(samples);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const int g = dofmap.global_index(patch, space.flat_index(a, b));
        if (!written[g]) {
          coeffs[g] = local(a, b);
          written[g] = true;
        }
      }
  }
  return coeffs;
}

double evaluate_field(const SplineSpace2D& space, const DofMap& dofmap,
                      const Eigen::VectorXd& coeffs, int patch, double u,
                      double v) {
  const KnotVector& kv = space.knots();
  const int p = kv.degree();
  const int su = kv.find_span(u), sv = kv.find_span(v);
  std::vector<double> bu(p + 1), bv(p + 1);
  kv.basis_on_span(su, u, bu.data());
  kv.basis_on_span(sv, v, bv.data());
  double value = 0.0;
  for (int a = 0; a <= p; ++a)
    for (int b = 0; b <= p; ++b)
      value += coeffs[dofmap.global_index(
                   patch, space.flat_index(su - p + a, sv - p + b))] *
               bu[a] * bv[b];
  return value;
}

namespace {

template <typename Reference>
double l2_error_impl(const MultipatchSurface& surface, const SplineSpace2D& space,
                     const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                     const Reference& reference, const QuadratureRule& quad) {
  if (coeffs.size() != dofmap.dimension())
    throw UsageError("l2_error: coefficient count mismatch");
  const KnotVector& kv = space.knots();
  const auto tables = tabulate_spans(kv, quad);
  const int p = kv.degree();
  const int ng = quad.size();
  double total = 0.0;
  for (int patch = 0; patch < surface.num_patches(); ++patch) {
    for (std::size_t eu = 0; eu < tables.size(); ++eu) {
      for (std::size_t ev = 0; ev < tables.size(); ++ev) {
        const SpanTable& tu = tables[eu];
        const SpanTable& tv = tables[ev];
        for (int gu = 0; gu < ng; ++gu) {
          for (int gv = 0; gv < ng; ++gv) {
            double value = 0.0;
            for (int a = 0; a <= p; ++a)
              for (int b = 0; b <= p; ++b) {
                const int g = dofmap.global_index(
                    patch, space.flat_index(static_cast<int>(eu) + a,
                                            static_cast<int>(ev) + b));
                value += coeffs[g] * tu.values(gu, a) * tv.values(gv, b);
              }
            const SurfaceSample sample =
                surface.sample(patch, tu.points[gu], tv.points[gv]);
            const double ref = reference(sample);
            const double diff = value - ref;
            total += tu.weights[gu] * tv.weights[gv] * sample.area_element *
                     diff * diff;
          }
        }
      }
    }
  }
  return std::sqrt(total);
}

}  // namespace

double l2_error(const MultipatchSurface& surface, const SplineSpace2D& space,
                const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                const SpatialField& reference, const QuadratureRule& quad) {
  return l2_error_impl(surface, space, dofmap, coeffs,
                       [&](const SurfaceSample& s) { return reference(s.position); },
                       quad);
}

double l2_error(const MultipatchSurface& surface, const SplineSpace2D& space,
                const DofMap& dofmap, const Eigen::VectorXd& coeffs,
                const ParametricField& reference, const QuadratureRule& quad) {
  return l2_error_impl(
      surface, space, dofmap, coeffs,
      [&](const SurfaceSample& s) { return reference(s.patch, s.u, s.v); }, quad);
}

}  // namespace surfuq
