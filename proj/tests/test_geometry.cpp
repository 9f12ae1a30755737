// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "surfuq/assembly.hpp"
#include "surfuq/geometry.hpp"

using surfuq::DofMap;
using surfuq::KnotVector;
using surfuq::MultipatchSurface;
using surfuq::NurbsPatch;
using surfuq::SplineSpace2D;
using surfuq::Vec3;

namespace {

double surface_area(const MultipatchSurface& surface, int cells, int gauss) {
  const surfuq::QuadratureRule quad(gauss);
  double total = 0.0;
  for (int p = 0; p < surface.num_patches(); ++p)
    for (int i = 0; i < cells; ++i)
      for (int j = 0; j < cells; ++j)
        for (int gu = 0; gu < gauss; ++gu)
          for (int gv = 0; gv < gauss; ++gv) {
            const double u = (i + quad.nodes()[gu]) / cells;
            const double v = (j + quad.nodes()[gv]) / cells;
            const double w = quad.weights()[gu] * quad.weights()[gv] /
                             (static_cast<double>(cells) * cells);
            total += w * surface.sample(p, u, v).area_element;
          }
  return total;
}

// Brute-force dedup of Greville images by coordinate matching.
int geometric_dof_oracle(const MultipatchSurface& surface,
                         const SplineSpace2D& space) {
  const auto greville = space.knots().greville();
  std::vector<Vec3> unique_points;
  for (int p = 0; p < surface.num_patches(); ++p)
    for (double gu : greville)
      for (double gv : greville) {
        const Vec3 x = surface.patch(p).evaluate(gu, gv);
        bool found = false;
        for (const Vec3& q : unique_points)
          if ((x - q).norm() <= 1e-8) {
            found = true;
            break;
          }
        if (!found) unique_points.push_back(x);
      }
  return static_cast<int>(unique_points.size());
}

std::shared_ptr<const NurbsPatch> bilinear_square() {
  KnotVector kv({0.0, 0.0, 1.0, 1.0}, 1);
  std::vector<Vec3> control{Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0),
                            Vec3(1, 1, 0)};
  return std::make_shared<NurbsPatch>(kv, kv, control,
                                      std::vector<double>(4, 1.0));
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("builtin sphere charts") {
  const MultipatchSurface sphere = surfuq::builtin_sphere();
  CHECK(sphere.num_patches() == 6);
  CHECK(sphere.interfaces().size() == 12);
  CHECK(sphere.is_closed());

  // +z face center maps to the north pole.
  CHECK((sphere.patch(4).evaluate(0.5, 0.5) - Vec3(0, 0, 1)).norm() <= 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int p = static_cast<int>(rng() % 6);
    const Vec3 x = sphere.patch(p).evaluate(unit(rng), unit(rng));
    CHECK(std::abs(x.norm() - 1.0) <= 1e-15);
  }

  CHECK(surfuq::max_interface_mismatch(sphere) <= 1e-10);
  CHECK(surface_area(sphere, 16, 4) == doctest::Approx(4.0 * M_PI).epsilon(1e-6));

  SUBCASE("area element matches the normalization map") {
    for (int rep = 0; rep < 50; ++rep) {
      const double u = unit(rng), v = unit(rng);
      const double a = 2.0 * u - 1.0, b = 2.0 * v - 1.0;
      const double expected = 4.0 / std::pow(a * a + b * b + 1.0, 1.5);
      CHECK(sphere.sample(4, u, v).area_element ==
            doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(sphere.sample(4, 0.5, 0.5).area_element == doctest::Approx(4.0));
  }

  SUBCASE("quadrature area is refinement-convergent") {
    const double coarse = surface_area(sphere, 16, 4);
    const double mid = surface_area(sphere, 24, 4);
    const double fine = surface_area(sphere, 32, 4);
    CHECK(std::abs(fine - mid) < 1e-8);
    CHECK(std::abs(fine - coarse) >= std::abs(fine - mid));
  }
}

TEST_CASE("builtin pipe") {
  const MultipatchSurface pipe = surfuq::builtin_pipe();
  CHECK(pipe.num_patches() == 6);
  CHECK(pipe.is_closed());
  CHECK(pipe.interfaces().size() == 12);
  CHECK(surfuq::max_interface_mismatch(pipe) <= 1e-10);

  const auto box = pipe.bounding_box();
  CHECK(std::abs(box.min().x() - 0.0) <= 1e-9);
  CHECK(std::abs(box.max().x() - 2.4) <= 1e-9);
  CHECK(std::abs(box.min().y() + 0.3) <= 1e-9);
  CHECK(std::abs(box.max().y() - 0.3) <= 1e-9);
  CHECK(std::abs(box.min().z() + 0.3) <= 1e-9);
  CHECK(std::abs(box.max().z() - 0.3) <= 1e-9);

  SUBCASE("area element is positive everywhere") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 10000; ++rep) {
      const int p = static_cast<int>(rng() % 6);
      CHECK(pipe.sample(p, unit(rng), unit(rng)).area_element > 0.0);
    }
  }

  SUBCASE("area approaches the capped cylinder value") {
    const double exact = 2.0 * M_PI * 0.3 * 2.4 + 2.0 * M_PI * 0.3 * 0.3;
    const double coarse = surface_area(pipe, 16, 4);
    const double fine = surface_area(pipe, 32, 4);
    CHECK(fine == doctest::Approx(exact).epsilon(1e-4));
    CHECK(std::abs(fine - exact) <= std::abs(coarse - exact));
  }
}

TEST_CASE("NURBS patches") {
  SUBCASE("bilinear unit square is planar with identity metric") {
    auto patch = bilinear_square();
    MultipatchSurface surface({patch}, {});
    const auto sample = surface.sample(0, 0.3, 0.7);
    CHECK((sample.position - Vec3(0.3, 0.7, 0.0)).norm() <= 1e-15);
    CHECK((sample.jacobian.col(0) - Vec3(1, 0, 0)).norm() <= 1e-15);
    CHECK((sample.jacobian.col(1) - Vec3(0, 1, 0)).norm() <= 1e-15);
    CHECK((sample.first_fundamental - Eigen::Matrix2d::Identity()).norm() <=
          1e-15);
    CHECK(sample.area_element == doctest::Approx(1.0));
  }

  SUBCASE("unit weights reduce to the polynomial B-spline surface") {
    const KnotVector kv({0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0}, 2);
    const int k = kv.num_basis();
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec3> control(k * k);
    for (auto& c : control) c = Vec3(gauss(rng), gauss(rng), gauss(rng));
    NurbsPatch patch(kv, kv, control, std::vector<double>(k * k, 1.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
      const double u = unit(rng), v = unit(rng);
      Vec3 expected = Vec3::Zero();
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          expected += control[i * k + j] * kv.evaluate(i, u) * kv.evaluate(j, v);
      CHECK((patch.evaluate(u, v) - expected).norm() <= 1e-13);
    }
  }

  SUBCASE("nonpositive weights are rejected") {
    KnotVector kv({0.0, 0.0, 1.0, 1.0}, 1);
    std::vector<Vec3> control(4, Vec3::Zero());
    CHECK_THROWS_AS(NurbsPatch(kv, kv, control, {1.0, 1.0, 0.0, 1.0}),
                    surfuq::UsageError);
  }
}

TEST_CASE("finite-difference Jacobians") {
  const MultipatchSurface sphere = surfuq::builtin_sphere();
  const MultipatchSurface pipe = surfuq::builtin_pipe();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> interior(0.05, 0.95);
  const double h = 1e-6;
  for (const MultipatchSurface* surface : {&sphere, &pipe}) {
    for (int rep = 0; rep < 40; ++rep) {
      const int p = static_cast<int>(rng() % 6);
      const double u = interior(rng), v = interior(rng);
      const auto jac = surface->patch(p).jacobian(u, v);
      const Vec3 du = (surface->patch(p).evaluate(u + h, v) -
                       surface->patch(p).evaluate(u - h, v)) /
                      (2.0 * h);
      const Vec3 dv = (surface->patch(p).evaluate(u, v + h) -
                       surface->patch(p).evaluate(u, v - h)) /
                      (2.0 * h);
      CHECK((jac.col(0) - du).norm() <= 1e-6 * std::max(1.0, du.norm()));
      CHECK((jac.col(1) - dv).norm() <= 1e-6 * std::max(1.0, dv.norm()));
    }
  }
}

TEST_CASE("dof map") {
  const MultipatchSurface sphere = surfuq::builtin_sphere();

  SUBCASE("matches the published count at degree 2 level 4") {
    const SplineSpace2D space = SplineSpace2D::uniform(2, 4);
    const DofMap dofmap(sphere, space);
    CHECK(dofmap.dimension() == 1736);
  }

  SUBCASE("agrees with the geometric dedup oracle on levels 0-2") {
    for (int level = 0; level <= 2; ++level) {
      for (int degree = 1; degree <= 2; ++degree) {
        const SplineSpace2D space = SplineSpace2D::uniform(degree, level);
        const DofMap dofmap(sphere, space);
        CHECK(dofmap.dimension() == geometric_dof_oracle(sphere, space));
      }
    }
  }

  SUBCASE("isolated patch has no identification") {
    MultipatchSurface single({bilinear_square()}, {});
    const SplineSpace2D space = SplineSpace2D::uniform(2, 2);
    const DofMap dofmap(single, space);
    CHECK(dofmap.dimension() == space.dimension());
  }

  SUBCASE("surjective and idempotent") {
    const SplineSpace2D space = SplineSpace2D::uniform(2, 1);
    const DofMap first(sphere, space);
    const DofMap second(sphere, space);
    std::vector<bool> seen(first.dimension(), false);
    for (int p = 0; p < sphere.num_patches(); ++p)
      for (int f = 0; f < space.dimension(); ++f) {
        CHECK(first.global_index(p, f) == second.global_index(p, f));
        CHECK(first.global_index(p, f) >= 0);
        CHECK(first.global_index(p, f) < first.dimension());
        seen[first.global_index(p, f)] = true;
      }
    for (bool s : seen) CHECK(s);
  }

  SUBCASE("dof points land on the surface") {
    const SplineSpace2D space = SplineSpace2D::uniform(2, 2);
    const DofMap dofmap(sphere, space);
    const auto points = surfuq::dof_points(sphere, space, dofmap);
    CHECK(static_cast<int>(points.size()) == dofmap.dimension());
    for (const Vec3& x : points) CHECK(std::abs(x.norm() - 1.0) <= 1e-14);
  }
}

TEST_CASE("geometry files") {
  const std::string path = "sphere_roundtrip.geom";
  const SplineSpace2D space = SplineSpace2D::uniform(2, 1);
  const MultipatchSurface approx =
      surfuq::approximate_nurbs(surfuq::builtin_sphere(), space);
  CHECK(surfuq::max_interface_mismatch(approx) <= 1e-10);
  CHECK(surface_area(approx, 8, 4) == doctest::Approx(4.0 * M_PI).epsilon(0.05));

  surfuq::save_geometry(approx, path);
  const MultipatchSurface loaded = surfuq::load_geometry(path);
  REQUIRE(loaded.num_patches() == approx.num_patches());
  CHECK(loaded.interfaces().size() == approx.interfaces().size());
  for (int p = 0; p < approx.num_patches(); ++p) {
    const auto* original = dynamic_cast<const NurbsPatch*>(&approx.patch(p));
    const auto* restored = dynamic_cast<const NurbsPatch*>(&loaded.patch(p));
    REQUIRE(original != nullptr);
    REQUIRE(restored != nullptr);
    REQUIRE(original->control().size() == restored->control().size());
    for (std::size_t i = 0; i < original->control().size(); ++i) {
      CHECK(original->control()[i] == restored->control()[i]);  // bit exact
      CHECK(original->weights()[i] == restored->weights()[i]);
    }
  }
  std::remove(path.c_str());

  SUBCASE("missing file is rejected") {
    CHECK_THROWS_AS(surfuq::load_geometry("does_not_exist.geom"),
                    surfuq::UsageError);
  }

  SUBCASE("nonpositive weight is rejected") {
    const std::string bad = "bad_weight.geom";
    std::ofstream out(bad);
    out << "patches 1\npatch 0\ndegree 1 1\nknots_u 4 0 0 1 1\n"
           "knots_v 4 0 0 1 1\nsize 2 2\n"
           "0 0 0 1\n0 1 0 1\n1 0 0 -1\n1 1 0 1\ninterfaces 0\n";
    out.close();
    CHECK_THROWS_AS(surfuq::load_geometry(bad), surfuq::UsageError);
    std::remove(bad.c_str());
  }

  SUBCASE("edges beyond tolerance are rejected") {
    // Perturb one edge control point so the recorded interface cannot be
    // rebuilt from the control nets.
    surfuq::save_geometry(approx, path);
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();
    const auto pos = content.find('\n', content.find("size"));
    std::string broken = content;
    broken.replace(pos + 1, 0, "9 9 9 1\n");
    // Dropping the last control line keeps the count consistent.
    broken.erase(broken.rfind('\n', broken.find("interfaces") - 2) + 1,
                 broken.find("interfaces") - broken.rfind('\n', broken.find("interfaces") - 2) - 1);
    const std::string bad = "bad_edges.geom";
    std::ofstream out(bad);
    out << broken;
    out.close();
    CHECK_THROWS_AS(surfuq::load_geometry(bad), surfuq::UsageError);
    std::remove(bad.c_str());
    std::remove(path.c_str());
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(surfuq::SphereFacePatch(6), surfuq::UsageError);
  auto patch = bilinear_square();
  CHECK_THROWS_AS(
      MultipatchSurface({patch}, {{0, 0, 0, 0, true}}),
      surfuq::UsageError);  // edge used twice in one record

  // A collapsed patch yields a degenerate Jacobian.
  KnotVector kv({0.0, 0.0, 1.0, 1.0}, 1);
  std::vector<Vec3> control(4, Vec3(1, 2, 3));
  auto degenerate =
      std::make_shared<NurbsPatch>(kv, kv, control, std::vector<double>(4, 1.0));
  MultipatchSurface surface({degenerate}, {});
  CHECK_THROWS_AS((void)surface.sample(0, 0.5, 0.5), surfuq::NumericalError);
}

}  // TEST_SUITE
