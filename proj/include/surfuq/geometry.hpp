// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_GEOMETRY_HPP_
#define SURFUQ_GEOMETRY_HPP_

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "surfuq/splines.hpp"
#include "surfuq/types.hpp"

namespace surfuq {

// Point on a patch together with the first-order geometry data needed for
// surface integrals.
struct SurfaceSample {
  int patch = 0;
  double u = 0.0;
  double v = 0.0;
  Vec3 position = Vec3::Zero();
  Matrix32 jacobian = Matrix32::Zero();
  Eigen::Matrix2d first_fundamental = Eigen::Matrix2d::Zero();
  double area_element = 0.0;  // sqrt(det G)
};

// One chart of the surface, mapping the parameter square into R^3.
class Patch {
 public:
  virtual ~Patch() = default;
  virtual Vec3 evaluate(double u, double v) const = 0;
  virtual Matrix32 jacobian(double u, double v) const = 0;
  virtual void evaluate_with_jacobian(double u, double v, Vec3& position,
                                      Matrix32& jac) const {
    position = evaluate(u, v);
    jac = jacobian(u, v);
  }
  // Position on the reference surface (identity unless the patch carries a
  // deformation); data given in material coordinates is evaluated here.
  virtual Vec3 material_point(double u, double v) const { return evaluate(u, v); }
};

// Analytic chart of the unit sphere: one face of the cube [-1,1]^3 mapped by
// q -> q/|q|. Faces are ordered +x, -x, +y, -y, +z, -z.
class SphereFacePatch : public Patch {
 public:
  explicit SphereFacePatch(int face);
  Vec3 evaluate(double u, double v) const override;
  Matrix32 jacobian(double u, double v) const override;

 private:
  Vec3 cube_point(double u, double v) const;
  int face_;
};

// Analytic chart of a closed capped cylinder along the x-axis with length
// `length` and radius `radius`. Pieces 0 and 1 are the end caps (disks via
// the elliptical square-to-disk map), pieces 2..5 wrap the lateral surface.
class PipePatch : public Patch {
 public:
  PipePatch(int piece, double length, double radius);
  Vec3 evaluate(double u, double v) const override;
  Matrix32 jacobian(double u, double v) const override;

 private:
  int piece_;
  double length_;
  double radius_;
};

// Tensor-product NURBS patch with strictly positive weights.
class NurbsPatch : public Patch {
 public:
  // control is row-major over (i1, i2) with i1 along u; one Vec3 per point.
  NurbsPatch(KnotVector knots_u, KnotVector knots_v, std::vector<Vec3> control,
             std::vector<double> weights);

  Vec3 evaluate(double u, double v) const override;
  Matrix32 jacobian(double u, double v) const override;
  void evaluate_with_jacobian(double u, double v, Vec3& position,
                              Matrix32& jac) const override;

  const KnotVector& knots_u() const { return knots_u_; }
  const KnotVector& knots_v() const { return knots_v_; }
  const std::vector<Vec3>& control() const { return control_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  KnotVector knots_u_;
  KnotVector knots_v_;
  std::vector<Vec3> control_;
  std::vector<double> weights_;
};

// Reference patch plus a spline displacement field in the given space.
class DisplacedPatch : public Patch {
 public:
  // displacement holds one k*k coefficient grid per component, flattened
  // row-major to a (k*k) x 3 matrix.
  DisplacedPatch(std::shared_ptr<const Patch> base, SplineSpace2D space,
                 Eigen::MatrixX3d displacement);

  Vec3 evaluate(double u, double v) const override;
  Matrix32 jacobian(double u, double v) const override;
  void evaluate_with_jacobian(double u, double v, Vec3& position,
                              Matrix32& jac) const override;
  Vec3 material_point(double u, double v) const override {
    return base_->material_point(u, v);
  }

 private:
  void displacement_at(double u, double v, Vec3* value, Matrix32* jac) const;
  std::shared_ptr<const Patch> base_;
  SplineSpace2D space_;
  Eigen::MatrixX3d displacement_;
};

// Edge numbering on the parameter square, each edge parametrized by t in [0,1]:
//   0: v=0, t=u    1: u=1, t=v    2: v=1, t=u    3: u=0, t=v
Vec2 edge_param(int edge, double t);

struct InterfaceRecord {
  int patch_a = 0;
  int edge_a = 0;
  int patch_b = 0;
  int edge_b = 0;
  bool same_orientation = true;
};

// Discovers interface records by sampling patch edges and matching them
// pointwise (forward or reversed) within the tolerance.
std::vector<InterfaceRecord> match_interfaces(
    const std::vector<std::shared_ptr<const Patch>>& patches,
    double tolerance = 1e-8);

class MultipatchSurface {
 public:
  MultipatchSurface(std::vector<std::shared_ptr<const Patch>> patches,
                    std::vector<InterfaceRecord> interfaces);
  static MultipatchSurface from_patches(
      std::vector<std::shared_ptr<const Patch>> patches,
      double tolerance = 1e-8);

  int num_patches() const { return static_cast<int>(patches_.size()); }
  const Patch& patch(int i) const { return *patches_.at(i); }
  std::shared_ptr<const Patch> patch_ptr(int i) const { return patches_.at(i); }
  const std::vector<InterfaceRecord>& interfaces() const { return interfaces_; }

  // True when every patch edge appears in exactly one interface record.
  bool is_closed() const;

  SurfaceSample sample(int patch, double u, double v) const;

  Eigen::AlignedBox3d bounding_box(int samples_per_direction = 33) const;
  double diameter() const { return bounding_box().diagonal().norm(); }

 private:
  std::vector<std::shared_ptr<const Patch>> patches_;
  std::vector<InterfaceRecord> interfaces_;
};

// Largest pointwise mismatch over all interface records, sampled at
// `samples` parameters per edge; zero for a perfectly conforming surface.
double max_interface_mismatch(const MultipatchSurface& surface, int samples = 50);

MultipatchSurface builtin_sphere();
MultipatchSurface builtin_pipe();

// Spline approximation of an arbitrary surface: every patch is interpolated
// at the tensor Greville grid of `space` and stored as a unit-weight NURBS
// patch. Interface records carry over unchanged.
MultipatchSurface approximate_nurbs(const MultipatchSurface& surface,
                                    const SplineSpace2D& space);

// Structured-text geometry file; see README for the format.
MultipatchSurface load_geometry(const std::string& path);
void save_geometry(const MultipatchSurface& surface, const std::string& path);

// C0-conforming global numbering of the tensor-product basis over all
// patches. Basis functions meeting along interfaces (and at corners, closed
// via union-find) share one global index.
class DofMap {
 public:
  DofMap(const MultipatchSurface& surface, const SplineSpace2D& space);

  int dimension() const { return dimension_; }
  int num_patches() const { return num_patches_; }
  int local_dimension() const { return local_dimension_; }
  int global_index(int patch, int flat_local) const {
    return global_[patch * local_dimension_ + flat_local];
  }
  // First (patch, local index) owning the global dof.
  std::pair<int, int> representative(int global_dof) const {
    const int packed = representative_.at(global_dof);
    return {packed / local_dimension_, packed % local_dimension_};
  }

 private:
  int num_patches_;
  int local_dimension_;
  int dimension_;
  std::vector<int> global_;
  std::vector<int> representative_;
};

// Greville images of all global dofs on the surface, indexed by global dof.
std::vector<Vec3> dof_points(const MultipatchSurface& surface,
                             const SplineSpace2D& space, const DofMap& dofmap);

}  // namespace surfuq

#endif  // SURFUQ_GEOMETRY_HPP_
