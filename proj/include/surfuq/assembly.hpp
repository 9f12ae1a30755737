// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_ASSEMBLY_HPP_
#define SURFUQ_ASSEMBLY_HPP_

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>
#include <vector>

#include "surfuq/geometry.hpp"
#include "surfuq/splines.hpp"
#include "surfuq/types.hpp"

namespace surfuq {

// Scalar data in material coordinates, evaluated at reference-surface points.
using ScalarField = std::function<double(const Vec3&)>;

// Tensor Gauss-Legendre rule with n points per direction on [0,1].
class QuadratureRule {
 public:
  explicit QuadratureRule(int points_per_direction);
  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

// Basis values and derivatives tabulated at the quadrature points of one
// knot span; weights include the span width.
struct SpanTable {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
  Eigen::MatrixXd values;       // n_g x (p+1)
  Eigen::MatrixXd derivatives;  // n_g x (p+1)
};

std::vector<SpanTable> tabulate_spans(const KnotVector& kv,
                                      const QuadratureRule& quad);

struct MassStiffness {
  SparseMatrix mass;
  SparseMatrix stiffness;
};

// Galerkin matrices of the Laplace-Beltrami weak form on the (possibly
// deformed) surface, scattered through the conforming dof map. Entries are
// accumulated in a fixed patch/element order, so results are deterministic.
SparseMatrix assemble_mass(const MultipatchSurface& surface,
                           const SplineSpace2D& space, const DofMap& dofmap,
                           const QuadratureRule& quad);
SparseMatrix assemble_stiffness(const MultipatchSurface& surface,
                                const SplineSpace2D& space, const DofMap& dofmap,
                                const QuadratureRule& quad);
MassStiffness assemble_operators(const MultipatchSurface& surface,
                                 const SplineSpace2D& space, const DofMap& dofmap,
                                 const QuadratureRule& quad);

// Load vector of a source given in material coordinates: the source is
// evaluated at reference positions while the surface measure comes from the
// (deformed) surface.
Eigen::VectorXd assemble_load(const MultipatchSurface& surface,
                              const SplineSpace2D& space, const DofMap& dofmap,
                              const QuadratureRule& quad,
                              const ScalarField& source);

// Greville interpolation of initial data given in material coordinates,
// merged through the dof map.
Eigen::VectorXd project_initial(const MultipatchSurface& surface,
                                const SplineSpace2D& space, const DofMap& dofmap,
                                const ScalarField& initial);

}  // namespace surfuq

#endif  // SURFUQ_ASSEMBLY_HPP_
