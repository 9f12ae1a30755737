// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace surfuq {

namespace {

// Directions spanned by the two face parameters (a, b) for each cube face,
// ordered +x, -x, +y, -y, +z, -z.
struct FaceFrame {
  Vec3 origin;
  Vec3 axis_a;
  Vec3 axis_b;
};

FaceFrame cube_face(int face) {
  switch (face) {
    case 0: return {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    case 1: return {Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    case 2: return {Vec3(0, 1, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)};
    case 3: return {Vec3(0, -1, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)};
    case 4: return {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    case 5: return {Vec3(0, 0, -1), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    default: throw UsageError("sphere face index out of range");
  }
}

struct UnionFind {
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> parent;
};

// Local flat index of the j-th basis function along an edge, walking in the
// edge's t-direction; k basis functions per direction, flat = i1*k + i2.
int edge_local_index(int edge, int j, int k) {
  switch (edge) {
    case 0: return j * k;            // v = 0
    case 1: return (k - 1) * k + j;  // u = 1
    case 2: return j * k + (k - 1);  // v = 1
    case 3: return j;                // u = 0
    default: throw UsageError("edge index out of range");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Analytic charts

SphereFacePatch::SphereFacePatch(int face) : face_(face) {
  cube_face(face);  // validates
}

Vec3 SphereFacePatch::cube_point(double u, double v) const {
  const FaceFrame f = cube_face(face_);
  return f.origin + (2.0 * u - 1.0) * f.axis_a + (2.0 * v - 1.0) * f.axis_b;
}

Vec3 SphereFacePatch::evaluate(double u, double v) const {
  const Vec3 q = cube_point(u, v);
  return q / q.norm();
}

Matrix32 SphereFacePatch::jacobian(double u, double v) const {
  const FaceFrame f = cube_face(face_);
  const Vec3 q = cube_point(u, v);
  const double r = q.norm();
  const Vec3 n = q / r;
  Matrix32 jac;
  jac.col(0) = 2.0 * (f.axis_a - n * n.dot(f.axis_a)) / r;
  jac.col(1) = 2.0 * (f.axis_b - n * n.dot(f.axis_b)) / r;
  return jac;
}

namespace {

// Elliptical square-to-disk map and its partials.
inline double shrink(double t) { return std::sqrt(1.0 - 0.5 * t * t); }
inline double shrink_d(double t) { return -0.5 * t / shrink(t); }

inline Vec2 disk_map(double a, double b) {
  return Vec2(a * shrink(b), b * shrink(a));
}
inline Vec2 disk_map_da(double a, double b) {
  return Vec2(shrink(b), b * shrink_d(a));
}
inline Vec2 disk_map_db(double a, double b) {
  return Vec2(a * shrink_d(b), shrink(a));
}

// Cross-section boundary curves traced by the four square edges; piece
// indices 2..5 of the pipe correspond to b=+1, a=+1, b=-1, a=-1.
inline Vec2 rim(int piece, double t) {
  switch (piece) {
    case 2: return disk_map(t, 1.0);
    case 3: return disk_map(1.0, t);
    case 4: return disk_map(t, -1.0);
    default: return disk_map(-1.0, t);
  }
}
inline Vec2 rim_d(int piece, double t) {
  switch (piece) {
    case 2: return disk_map_da(t, 1.0);
    case 3: return disk_map_db(1.0, t);
    case 4: return disk_map_da(t, -1.0);
    default: return disk_map_db(-1.0, t);
  }
}

}  // namespace

PipePatch::PipePatch(int piece, double length, double radius)
    : piece_(piece), length_(length), radius_(radius) {
  if (piece < 0 || piece > 5) throw UsageError("pipe piece index out of range");
}

Vec3 PipePatch::evaluate(double u, double v) const {
  if (piece_ <= 1) {
    const Vec2 d = radius_ * disk_map(2.0 * u - 1.0, 2.0 * v - 1.0);
    return Vec3(piece_ == 0 ? 0.0 : length_, d.x(), d.y());
  }
  const Vec2 c = radius_ * rim(piece_, 2.0 * v - 1.0);
  return Vec3(length_ * u, c.x(), c.y());
}

Matrix32 PipePatch::jacobian(double u, double v) const {
  Matrix32 jac;
  if (piece_ <= 1) {
    const double a = 2.0 * u - 1.0, b = 2.0 * v - 1.0;
    const Vec2 da = 2.0 * radius_ * disk_map_da(a, b);
    const Vec2 db = 2.0 * radius_ * disk_map_db(a, b);
    jac.col(0) = Vec3(0.0, da.x(), da.y());
    jac.col(1) = Vec3(0.0, db.x(), db.y());
  } else {
    const Vec2 dc = 2.0 * radius_ * rim_d(piece_, 2.0 * v - 1.0);
    jac.col(0) = Vec3(length_, 0.0, 0.0);
    jac.col(1) = Vec3(0.0, dc.x(), dc.y());
  }
  return jac;
}

// ---------------------------------------------------------------------------
// NURBS patches

NurbsPatch::NurbsPatch(KnotVector knots_u, KnotVector knots_v,
                       std::vector<Vec3> control, std::vector<double> weights)
    : knots_u_(std::move(knots_u)),
      knots_v_(std::move(knots_v)),
      control_(std::move(control)),
      weights_(std::move(weights)) {
  const std::size_t expected =
      static_cast<std::size_t>(knots_u_.num_basis()) * knots_v_.num_basis();
  if (control_.size() != expected || weights_.size() != expected)
    throw UsageError("NURBS patch: control net size mismatch");
  for (double w : weights_)
    if (!(w > 0.0)) throw UsageError("NURBS patch: nonpositive weight");
}

void NurbsPatch::evaluate_with_jacobian(double u, double v, Vec3& position,
                                        Matrix32& jac) const {
  const int pu = knots_u_.degree(), pv = knots_v_.degree();
  const int k2 = knots_v_.num_basis();
  const int su = knots_u_.find_span(u), sv = knots_v_.find_span(v);
  std::vector<double> nu(pu + 1), dnu(pu + 1), nv(pv + 1), dnv(pv + 1);
  knots_u_.basis_and_derivative_on_span(su, u, nu.data(), dnu.data());
  knots_v_.basis_and_derivative_on_span(sv, v, nv.data(), dnv.data());

  Eigen::Vector4d hom = Eigen::Vector4d::Zero();
  Eigen::Vector4d hom_u = Eigen::Vector4d::Zero();
  Eigen::Vector4d hom_v = Eigen::Vector4d::Zero();
  for (int a = 0; a <= pu; ++a) {
    const int i1 = su - pu + a;
    for (int b = 0; b <= pv; ++b) {
      const int i2 = sv - pv + b;
      const int idx = i1 * k2 + i2;
      Eigen::Vector4d point;
      point << control_[idx] * weights_[idx], weights_[idx];
      hom += nu[a] * nv[b] * point;
      hom_u += dnu[a] * nv[b] * point;
      hom_v += nu[a] * dnv[b] * point;
    }
  }
  const double w = hom[3];
  position = hom.head<3>() / w;
  jac.col(0) = (hom_u.head<3>() - position * hom_u[3]) / w;
  jac.col(1) = (hom_v.head<3>() - position * hom_v[3]) / w;
}

Vec3 NurbsPatch::evaluate(double u, double v) const {
  Vec3 x;
  Matrix32 jac;
  evaluate_with_jacobian(u, v, x, jac);
  return x;
}

Matrix32 NurbsPatch::jacobian(double u, double v) const {
  Vec3 x;
  Matrix32 jac;
  evaluate_with_jacobian(u, v, x, jac);
  return jac;
}

// ---------------------------------------------------------------------------
// Displaced patches

DisplacedPatch::DisplacedPatch(std::shared_ptr<const Patch> base,
                               SplineSpace2D space, Eigen::MatrixX3d displacement)
    : base_(std::move(base)),
      space_(std::move(space)),
      displacement_(std::move(displacement)) {
  if (displacement_.rows() != space_.dimension())
    throw UsageError("displaced patch: coefficient count mismatch");
}

void DisplacedPatch::displacement_at(double u, double v, Vec3* value,
                                     Matrix32* jac) const {
  const KnotVector& kv = space_.knots();
  const int p = kv.degree(), k = kv.num_basis();
  const int su = kv.find_span(u), sv = kv.find_span(v);
  std::vector<double> nu(p + 1), dnu(p + 1), nv(p + 1), dnv(p + 1);
  kv.basis_and_derivative_on_span(su, u, nu.data(), dnu.data());
  kv.basis_and_derivative_on_span(sv, v, nv.data(), dnv.data());
  if (value != nullptr) value->setZero();
  if (jac != nullptr) jac->setZero();
  for (int a = 0; a <= p; ++a) {
    const int i1 = su - p + a;
    for (int b = 0; b <= p; ++b) {
      const int i2 = sv - p + b;
      const Vec3 c = displacement_.row(i1 * k + i2).transpose();
      if (value != nullptr) *value += nu[a] * nv[b] * c;
      if (jac != nullptr) {
        jac->col(0) += dnu[a] * nv[b] * c;
        jac->col(1) += nu[a] * dnv[b] * c;
      }
    }
  }
}

Vec3 DisplacedPatch::evaluate(double u, double v) const {
  Vec3 d;
  displacement_at(u, v, &d, nullptr);
  return base_->evaluate(u, v) + d;
}

Matrix32 DisplacedPatch::jacobian(double u, double v) const {
  Matrix32 d;
  displacement_at(u, v, nullptr, &d);
  return base_->jacobian(u, v) + d;
}

void DisplacedPatch::evaluate_with_jacobian(double u, double v, Vec3& position,
                                            Matrix32& jac) const {
  Vec3 d;
  Matrix32 dj;
  displacement_at(u, v, &d, &dj);
  base_->evaluate_with_jacobian(u, v, position, jac);
  position += d;
  jac += dj;
}

// ---------------------------------------------------------------------------
// Multipatch surfaces

Vec2 edge_param(int edge, double t) {
  switch (edge) {
    case 0: return Vec2(t, 0.0);
    case 1: return Vec2(1.0, t);
    case 2: return Vec2(t, 1.0);
    case 3: return Vec2(0.0, t);
    default: throw UsageError("edge index out of range");
  }
}

std::vector<InterfaceRecord> match_interfaces(
    const std::vector<std::shared_ptr<const Patch>>& patches, double tolerance) {
  constexpr int kSamples = 9;
  const int num_patches = static_cast<int>(patches.size());
  std::vector<std::array<Vec3, kSamples>> edge_points(num_patches * 4);
  for (int p = 0; p < num_patches; ++p)
    for (int e = 0; e < 4; ++e)
      for (int s = 0; s < kSamples; ++s) {
        const Vec2 uv = edge_param(e, static_cast<double>(s) / (kSamples - 1));
        edge_points[p * 4 + e][s] = patches[p]->evaluate(uv.x(), uv.y());
      }

  auto matches = [&](int ea, int eb, bool forward) {
    double worst = 0.0;
    for (int s = 0; s < kSamples; ++s) {
      const Vec3& a = edge_points[ea][s];
      const Vec3& b = edge_points[eb][forward ? s : kSamples - 1 - s];
      worst = std::max(worst, (a - b).norm());
    }
    return worst <= tolerance;
  };

  std::vector<bool> used(num_patches * 4, false);
  std::vector<InterfaceRecord> records;
  for (int a = 0; a < num_patches * 4; ++a) {
    if (used[a]) continue;
    for (int b = a + 1; b < num_patches * 4; ++b) {
      if (used[b]) continue;
      const bool forward = matches(a, b, true);
      const bool reversed = !forward && matches(a, b, false);
      if (!forward && !reversed) continue;
      if (used[a])
        throw UsageError("interface matching: edge matches more than one partner");
      records.push_back({a / 4, a % 4, b / 4, b % 4, forward});
      used[a] = used[b] = true;
    }
  }
  return records;
}

MultipatchSurface::MultipatchSurface(
    std::vector<std::shared_ptr<const Patch>> patches,
    std::vector<InterfaceRecord> interfaces)
    : patches_(std::move(patches)), interfaces_(std::move(interfaces)) {
  if (patches_.empty()) throw UsageError("surface requires at least one patch");
  std::vector<bool> used(patches_.size() * 4, false);
  for (const auto& rec : interfaces_) {
    for (const auto [p, e] : {std::pair{rec.patch_a, rec.edge_a},
                              std::pair{rec.patch_b, rec.edge_b}}) {
      if (p < 0 || p >= num_patches() || e < 0 || e > 3)
        throw UsageError("interface record out of range");
      if (used[p * 4 + e])
        throw UsageError("patch edge appears in more than one interface record");
      used[p * 4 + e] = true;
    }
  }
}

MultipatchSurface MultipatchSurface::from_patches(
    std::vector<std::shared_ptr<const Patch>> patches, double tolerance) {
  auto records = match_interfaces(patches, tolerance);
  return MultipatchSurface(std::move(patches), std::move(records));
}

bool MultipatchSurface::is_closed() const {
  return static_cast<int>(interfaces_.size()) * 2 == num_patches() * 4;
}

SurfaceSample MultipatchSurface::sample(int patch, double u, double v) const {
  SurfaceSample result;
  result.patch = patch;
  result.u = u;
  result.v = v;
  patches_.at(patch)->evaluate_with_jacobian(u, v, result.position,
                                             result.jacobian);
  result.first_fundamental =
      result.jacobian.transpose() * result.jacobian;
  const double det = result.first_fundamental.determinant();
  if (!(det >= 1e-28)) {
    std::ostringstream msg;
    msg << "degenerate surface Jacobian on patch " << patch << " at (" << u
        << ", " << v << ")";
    throw NumericalError(msg.str());
  }
  result.area_element = std::sqrt(det);
  return result;
}

Eigen::AlignedBox3d MultipatchSurface::bounding_box(
    int samples_per_direction) const {
  Eigen::AlignedBox3d box;
  const int n = samples_per_direction;
  for (const auto& patch : patches_)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        box.extend(patch->evaluate(static_cast<double>(i) / (n - 1),
                                   static_cast<double>(j) / (n - 1)));
  return box;
}

double max_interface_mismatch(const MultipatchSurface& surface, int samples) {
  double worst = 0.0;
  for (const auto& rec : surface.interfaces()) {
    for (int s = 0; s < samples; ++s) {
      const double t = static_cast<double>(s) / (samples - 1);
      const Vec2 a = edge_param(rec.edge_a, t);
      const Vec2 b = edge_param(rec.edge_b, rec.same_orientation ? t : 1.0 - t);
      const Vec3 xa = surface.patch(rec.patch_a).evaluate(a.x(), a.y());
      const Vec3 xb = surface.patch(rec.patch_b).evaluate(b.x(), b.y());
      worst = std::max(worst, (xa - xb).norm());
    }
  }
  return worst;
}

MultipatchSurface builtin_sphere() {
  std::vector<std::shared_ptr<const Patch>> patches;
  for (int face = 0; face < 6; ++face)
    patches.push_back(std::make_shared<SphereFacePatch>(face));
  return MultipatchSurface::from_patches(std::move(patches));
}

MultipatchSurface builtin_pipe() {
  std::vector<std::shared_ptr<const Patch>> patches;
  for (int piece = 0; piece < 6; ++piece)
    patches.push_back(std::make_shared<PipePatch>(piece, 2.4, 0.3));
  return MultipatchSurface::from_patches(std::move(patches));
}

MultipatchSurface approximate_nurbs(const MultipatchSurface& surface,
                                    const SplineSpace2D& space) {
  const GrevilleInterpolator interpolator(space);
  const auto& nodes = interpolator.nodes();
  const int k = space.per_direction();
  std::vector<std::shared_ptr<const Patch>> patches;
  for (int p = 0; p < surface.num_patches(); ++p) {
    Eigen::MatrixXd sx(k, k), sy(k, k), sz(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const Vec3 x = surface.patch(p).evaluate(nodes[a], nodes[b]);
        sx(a, b) = x.x();
        sy(a, b) = x.y();
        sz(a, b) = x.z();
      }
    const Eigen::MatrixXd cx = interpolator.interpolate(sx);
    const Eigen::MatrixXd cy = interpolator.interpolate(sy);
    const Eigen::MatrixXd cz = interpolator.interpolate(sz);
    std::vector<Vec3> control(k * k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        control[a * k + b] = Vec3(cx(a, b), cy(a, b), cz(a, b));
    patches.push_back(std::make_shared<NurbsPatch>(
        space.knots(), space.knots(), std::move(control),
        std::vector<double>(k * k, 1.0)));
  }
  return MultipatchSurface(std::move(patches), surface.interfaces());
}

// ---------------------------------------------------------------------------
// Geometry files

namespace {

std::string expect_token(std::istream& in, const std::string& expected) {
  std::string token;
  if (!(in >> token) || token != expected)
    throw UsageError("geometry file: expected '" + expected + "', got '" +
                     token + "'");
  return token;
}

KnotVector read_knots(std::istream& in, const std::string& key, int degree) {
  expect_token(in, key);
  int count = 0;
  if (!(in >> count) || count <= 0)
    throw UsageError("geometry file: bad knot count");
  std::vector<double> knots(count);
  for (double& v : knots)
    if (!(in >> v)) throw UsageError("geometry file: truncated knot vector");
  return KnotVector(std::move(knots), degree);
}

// Control polygon of an edge as (point, weight) pairs in t-order.
std::vector<Eigen::Vector4d> edge_polygon(const NurbsPatch& patch, int edge) {
  const int k1 = patch.knots_u().num_basis();
  const int k2 = patch.knots_v().num_basis();
  const int count = (edge == 0 || edge == 2) ? k1 : k2;
  std::vector<Eigen::Vector4d> polygon(count);
  for (int j = 0; j < count; ++j) {
    int i1 = 0, i2 = 0;
    switch (edge) {
      case 0: i1 = j; i2 = 0; break;
      case 1: i1 = k1 - 1; i2 = j; break;
      case 2: i1 = j; i2 = k2 - 1; break;
      default: i1 = 0; i2 = j; break;
    }
    const int idx = i1 * k2 + i2;
    polygon[j] << patch.control()[idx], patch.weights()[idx];
  }
  return polygon;
}

std::vector<InterfaceRecord> match_control_polygons(
    const std::vector<std::shared_ptr<const NurbsPatch>>& patches,
    double tolerance) {
  const int n = static_cast<int>(patches.size());
  std::vector<std::vector<Eigen::Vector4d>> polygons(n * 4);
  for (int p = 0; p < n; ++p)
    for (int e = 0; e < 4; ++e) polygons[p * 4 + e] = edge_polygon(*patches[p], e);

  auto matches = [&](int a, int b, bool forward) {
    const auto& pa = polygons[a];
    const auto& pb = polygons[b];
    if (pa.size() != pb.size()) return false;
    for (std::size_t s = 0; s < pa.size(); ++s) {
      const auto& other = pb[forward ? s : pa.size() - 1 - s];
      if ((pa[s] - other).norm() > tolerance) return false;
    }
    return true;
  };

  std::vector<bool> used(n * 4, false);
  std::vector<InterfaceRecord> records;
  for (int a = 0; a < n * 4; ++a) {
    if (used[a]) continue;
    for (int b = a + 1; b < n * 4; ++b) {
      if (used[b]) continue;
      const bool forward = matches(a, b, true);
      const bool reversed = !forward && matches(a, b, false);
      if (!forward && !reversed) continue;
      records.push_back({a / 4, a % 4, b / 4, b % 4, forward});
      used[a] = used[b] = true;
      break;
    }
  }
  return records;
}

std::uint64_t record_key(const InterfaceRecord& rec) {
  int pa = rec.patch_a, ea = rec.edge_a, pb = rec.patch_b, eb = rec.edge_b;
  if (pa > pb || (pa == pb && ea > eb)) {
    std::swap(pa, pb);
    std::swap(ea, eb);
  }
  return ((static_cast<std::uint64_t>(pa) * 4 + ea) << 32) |
         (static_cast<std::uint64_t>(pb) * 4 + eb);
}

}  // namespace

MultipatchSurface load_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open geometry file: " + path);

  expect_token(in, "patches");
  int num_patches = 0;
  if (!(in >> num_patches) || num_patches <= 0)
    throw UsageError("geometry file: bad patch count");

  std::vector<std::shared_ptr<const NurbsPatch>> patches;
  for (int p = 0; p < num_patches; ++p) {
    expect_token(in, "patch");
    int index = 0;
    in >> index;
    expect_token(in, "degree");
    int pu = 0, pv = 0;
    if (!(in >> pu >> pv)) throw UsageError("geometry file: bad degree");
    KnotVector ku = read_knots(in, "knots_u", pu);
    KnotVector kvv = read_knots(in, "knots_v", pv);
    expect_token(in, "size");
    int k1 = 0, k2 = 0;
    if (!(in >> k1 >> k2) || k1 != ku.num_basis() || k2 != kvv.num_basis())
      throw UsageError("geometry file: control net size inconsistent with knots");
    std::vector<Vec3> control(k1 * k2);
    std::vector<double> weights(k1 * k2);
    for (int i = 0; i < k1 * k2; ++i) {
      double x, y, z, w;
      if (!(in >> x >> y >> z >> w))
        throw UsageError("geometry file: truncated control net");
      control[i] = Vec3(x, y, z);
      weights[i] = w;
    }
    patches.push_back(std::make_shared<NurbsPatch>(
        std::move(ku), std::move(kvv), std::move(control), std::move(weights)));
  }

  std::vector<InterfaceRecord> file_records;
  std::string token;
  if (in >> token) {
    if (token != "interfaces")
      throw UsageError("geometry file: expected 'interfaces', got '" + token + "'");
    int count = 0;
    in >> count;
    for (int i = 0; i < count; ++i) {
      InterfaceRecord rec;
      int orientation = 0;
      if (!(in >> rec.patch_a >> rec.edge_a >> rec.patch_b >> rec.edge_b >>
            orientation))
        throw UsageError("geometry file: truncated interface record");
      rec.same_orientation = orientation != 0;
      file_records.push_back(rec);
    }
  }

  auto rebuilt = match_control_polygons(patches, 1e-8);
  if (!file_records.empty()) {
    std::vector<std::uint64_t> a, b;
    for (const auto& rec : rebuilt) a.push_back(record_key(rec));
    for (const auto& rec : file_records) b.push_back(record_key(rec));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b)
      throw UsageError(
          "geometry file: interface records do not match the control nets "
          "(non-matching edges beyond tolerance)");
  }

  std::vector<std::shared_ptr<const Patch>> base(patches.begin(), patches.end());
  return MultipatchSurface(std::move(base), std::move(rebuilt));
}

void save_geometry(const MultipatchSurface& surface, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write geometry file: " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);

  out << "patches " << surface.num_patches() << "\n";
  for (int p = 0; p < surface.num_patches(); ++p) {
    const auto* patch = dynamic_cast<const NurbsPatch*>(&surface.patch(p));
    if (patch == nullptr)
      throw UsageError("save_geometry: only NURBS surfaces can be saved");
    out << "patch " << p << "\n";
    out << "degree " << patch->knots_u().degree() << " "
        << patch->knots_v().degree() << "\n";
    for (const auto& [key, kv] :
         {std::pair{"knots_u", &patch->knots_u()},
          std::pair{"knots_v", &patch->knots_v()}}) {
      out << key << " " << kv->knots().size();
      for (double x : kv->knots()) out << " " << x;
      out << "\n";
    }
    const int k1 = patch->knots_u().num_basis();
    const int k2 = patch->knots_v().num_basis();
    out << "size " << k1 << " " << k2 << "\n";
    for (int i = 0; i < k1 * k2; ++i) {
      const Vec3& c = patch->control()[i];
      out << c.x() << " " << c.y() << " " << c.z() << " "
          << patch->weights()[i] << "\n";
    }
  }
  out << "interfaces " << surface.interfaces().size() << "\n";
  for (const auto& rec : surface.interfaces())
    out << rec.patch_a << " " << rec.edge_a << " " << rec.patch_b << " "
        << rec.edge_b << " " << (rec.same_orientation ? 1 : 0) << "\n";
}

// ---------------------------------------------------------------------------
// Degree-of-freedom map

DofMap::DofMap(const MultipatchSurface& surface, const SplineSpace2D& space)
    : num_patches_(surface.num_patches()),
      local_dimension_(space.dimension()) {
  const int k = space.per_direction();
  const auto greville = space.knots().greville();

  UnionFind uf(num_patches_ * local_dimension_);
  for (const auto& rec : surface.interfaces()) {
    for (int j = 0; j < k; ++j) {
      const int jb = rec.same_orientation ? j : k - 1 - j;
      // Identified basis functions must share their Greville image.
      const Vec2 a = edge_param(rec.edge_a, greville[j]);
      const Vec2 b = edge_param(rec.edge_b, greville[jb]);
      const Vec3 xa = surface.patch(rec.patch_a).evaluate(a.x(), a.y());
      const Vec3 xb = surface.patch(rec.patch_b).evaluate(b.x(), b.y());
      if ((xa - xb).norm() > 1e-8)
        throw UsageError("non-conforming interface between patches " +
                         std::to_string(rec.patch_a) + " and " +
                         std::to_string(rec.patch_b));
      uf.unite(rec.patch_a * local_dimension_ + edge_local_index(rec.edge_a, j, k),
               rec.patch_b * local_dimension_ + edge_local_index(rec.edge_b, jb, k));
    }
  }

  global_.assign(num_patches_ * local_dimension_, -1);
  std::vector<int> root_to_global(num_patches_ * local_dimension_, -1);
  representative_.clear();
  int next = 0;
  for (int i = 0; i < num_patches_ * local_dimension_; ++i) {
    const int root = uf.find(i);
    if (root_to_global[root] < 0) {
      root_to_global[root] = next++;
      representative_.push_back(i);
    }
    global_[i] = root_to_global[root];
  }
  dimension_ = next;
}

std::vector<Vec3> dof_points(const MultipatchSurface& surface,
                             const SplineSpace2D& space, const DofMap& dofmap) {
  const auto greville = space.knots().greville();
  const int k = space.per_direction();
  std::vector<Vec3> points(dofmap.dimension());
  for (int g = 0; g < dofmap.dimension(); ++g) {
    const auto [patch, flat] = dofmap.representative(g);
    points[g] = surface.patch(patch).evaluate(greville[flat / k], greville[flat % k]);
  }
  return points;
}

}  // namespace surfuq
