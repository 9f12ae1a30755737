// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/assembly.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace surfuq {

QuadratureRule::QuadratureRule(int points_per_direction) {
  const int n = points_per_direction;
  if (n < 1) throw UsageError("quadrature rule needs at least one point");
  // Golub-Welsch: nodes and weights from the Jacobi matrix of the Legendre
  // three-term recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = beta;
    jacobi(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes_[i] = 0.5 * (solver.eigenvalues()[i] + 1.0);
    const double first = solver.eigenvectors()(0, i);
    weights_[i] = first * first;  // 2 * first^2, halved by the [0,1] map
  }
}

std::vector<SpanTable> tabulate_spans(const KnotVector& kv,
                                      const QuadratureRule& quad) {
  const int p = kv.degree();
  const int ng = quad.size();
  std::vector<SpanTable> tables;
  tables.reserve(kv.num_spans());
  std::vector<double> values(p + 1), derivatives(p + 1);
  for (int span = p; span < kv.num_basis(); ++span) {
    SpanTable table;
    table.points.resize(ng);
    table.weights.resize(ng);
    table.values.resize(ng, p + 1);
    table.derivatives.resize(ng, p + 1);
    const double left = kv.knots()[span];
    const double width = kv.knots()[span + 1] - left;
    for (int g = 0; g < ng; ++g) {
      const double x = left + width * quad.nodes()[g];
      table.points[g] = x;
      table.weights[g] = width * quad.weights()[g];
      kv.basis_and_derivative_on_span(span, x, values.data(), derivatives.data());
      for (int a = 0; a <= p; ++a) {
        table.values(g, a) = values[a];
        table.derivatives(g, a) = derivatives[a];
      }
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

namespace {

// Shared element sweep: calls the cell visitor with the local basis data and
// the surface sample at every quadrature point, in a fixed deterministic
// order over patches, elements, and points.
template <typename Visitor>
void sweep(const MultipatchSurface& surface, const SplineSpace2D& space,
           const QuadratureRule& quad, Visitor&& visit) {
  const KnotVector& kv = space.knots();
  const auto tables = tabulate_spans(kv, quad);
  const int p = kv.degree();
  const int ng = quad.size();
  const int local = (p + 1) * (p + 1);

  Eigen::VectorXd value(local);
  Eigen::MatrixXd grad(2, local);
  for (int patch = 0; patch < surface.num_patches(); ++patch) {
    for (std::size_t eu = 0; eu < tables.size(); ++eu) {
      for (std::size_t ev = 0; ev < tables.size(); ++ev) {
        const SpanTable& tu = tables[eu];
        const SpanTable& tv = tables[ev];
        for (int gu = 0; gu < ng; ++gu) {
          for (int gv = 0; gv < ng; ++gv) {
            const double weight = tu.weights[gu] * tv.weights[gv];
            for (int a = 0; a <= p; ++a) {
              for (int b = 0; b <= p; ++b) {
                const int i = a * (p + 1) + b;
                value[i] = tu.values(gu, a) * tv.values(gv, b);
                grad(0, i) = tu.derivatives(gu, a) * tv.values(gv, b);
                grad(1, i) = tu.values(gu, a) * tv.derivatives(gv, b);
              }
            }
            const SurfaceSample sample =
                surface.sample(patch, tu.points[gu], tv.points[gv]);
            visit(patch, static_cast<int>(eu), static_cast<int>(ev), weight,
                  sample, value, grad);
          }
        }
      }
    }
  }
}

// Global indices of the (p+1)^2 basis functions supported on an element.
void element_dofs(const SplineSpace2D& space, const DofMap& dofmap, int patch,
                  int span_u, int span_v, std::vector<int>& dofs) {
  const int p = space.degree();
  dofs.resize((p + 1) * (p + 1));
  for (int a = 0; a <= p; ++a)
    for (int b = 0; b <= p; ++b)
      dofs[a * (p + 1) + b] =
          dofmap.global_index(patch, space.flat_index(span_u + a, span_v + b));
}

}  // namespace

MassStiffness assemble_operators(const MultipatchSurface& surface,
                                 const SplineSpace2D& space, const DofMap& dofmap,
                                 const QuadratureRule& quad) {
  const int p = space.degree();
  const int local = (p + 1) * (p + 1);
  std::vector<Eigen::Triplet<double>> mass_triplets, stiffness_triplets;
  const std::size_t guess = static_cast<std::size_t>(surface.num_patches()) *
                            space.knots().num_spans() * space.knots().num_spans() *
                            local * local;
  mass_triplets.reserve(guess);
  stiffness_triplets.reserve(guess);

  std::vector<int> dofs;
  int current_patch = -1, current_eu = -1, current_ev = -1;
  Eigen::MatrixXd local_mass(local, local), local_stiffness(local, local);

  auto flush = [&]() {
    if (current_patch < 0) return;
    for (int i = 0; i < local; ++i)
      for (int j = 0; j < local; ++j) {
        mass_triplets.emplace_back(dofs[i], dofs[j], local_mass(i, j));
        stiffness_triplets.emplace_back(dofs[i], dofs[j], local_stiffness(i, j));
      }
  };

  sweep(surface, space, quad,
        [&](int patch, int eu, int ev, double weight, const SurfaceSample& sample,
            const Eigen::VectorXd& value, const Eigen::MatrixXd& grad) {
          if (patch != current_patch || eu != current_eu || ev != current_ev) {
            flush();
            current_patch = patch;
            current_eu = eu;
            current_ev = ev;
            element_dofs(space, dofmap, patch, eu, ev, dofs);
            local_mass.setZero();
            local_stiffness.setZero();
          }
          const double dA = weight * sample.area_element;
          local_mass.noalias() += dA * value * value.transpose();
          // Surface gradient pullback through the first fundamental form.
          const Eigen::Matrix2d inv = sample.first_fundamental.inverse();
          local_stiffness.noalias() += dA * grad.transpose() * inv * grad;
        });
  flush();

  MassStiffness result;
  result.mass.resize(dofmap.dimension(), dofmap.dimension());
  result.stiffness.resize(dofmap.dimension(), dofmap.dimension());
  result.mass.setFromTriplets(mass_triplets.begin(), mass_triplets.end());
  result.stiffness.setFromTriplets(stiffness_triplets.begin(),
                                   stiffness_triplets.end());
  return result;
}

SparseMatrix assemble_mass(const MultipatchSurface& surface,
                           const SplineSpace2D& space, const DofMap& dofmap,
                           const QuadratureRule& quad) {
  return assemble_operators(surface, space, dofmap, quad).mass;
}

SparseMatrix assemble_stiffness(const MultipatchSurface& surface,
                                const SplineSpace2D& space, const DofMap& dofmap,
                                const QuadratureRule& quad) {
  return assemble_operators(surface, space, dofmap, quad).stiffness;
}

Eigen::VectorXd assemble_load(const MultipatchSurface& surface,
                              const SplineSpace2D& space, const DofMap& dofmap,
                              const QuadratureRule& quad,
                              const ScalarField& source) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofmap.dimension());
  std::vector<int> dofs;
  int current_patch = -1, current_eu = -1, current_ev = -1;
  sweep(surface, space, quad,
        [&](int patch, int eu, int ev, double weight, const SurfaceSample& sample,
            const Eigen::VectorXd& value, const Eigen::MatrixXd&) {
          if (patch != current_patch || eu != current_eu || ev != current_ev) {
            current_patch = patch;
            current_eu = eu;
            current_ev = ev;
            element_dofs(space, dofmap, patch, eu, ev, dofs);
          }
          const Vec3 material =
              surface.patch(patch).material_point(sample.u, sample.v);
          const double f = source(material);
          const double dA = weight * sample.area_element;
          for (std::size_t i = 0; i < dofs.size(); ++i)
            load[dofs[i]] += dA * f * value[i];
        });
  return load;
}

Eigen::VectorXd project_initial(const MultipatchSurface& surface,
                                const SplineSpace2D& space, const DofMap& dofmap,
                                const ScalarField& initial) {
  const GrevilleInterpolator interpolator(space);
  const auto& nodes = interpolator.nodes();
  const int k = space.per_direction();
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(dofmap.dimension());
  std::vector<bool> written(dofmap.dimension(), false);
  for (int patch = 0; patch < surface.num_patches(); ++patch) {
    Eigen::MatrixXd samples(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        samples(a, b) =
            initial(surface.patch(patch).material_point(nodes[a], nodes[b]));
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

}  // namespace surfuq
