// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "surfuq/randfield.hpp"

using surfuq::CovarianceKernel;
using surfuq::DofMap;
using surfuq::KLExpansion;
using surfuq::MultipatchSurface;
using surfuq::SplineSpace2D;
using surfuq::Vec3;

namespace {

Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_SUITE("randfield") {

TEST_CASE("pivoted Cholesky on small matrices") {
  SUBCASE("diagonal with a zero eigenvalue") {
    Eigen::MatrixXd k = Eigen::Vector3d(4.0, 1.0, 0.0).asDiagonal();
    const auto result = surfuq::pivoted_cholesky(k, 1e-12);
    CHECK(result.rank() == 2);
    REQUIRE(result.pivots.size() == 2);
    CHECK(result.pivots[0] == 0);
    CHECK(result.pivots[1] == 1);
    CHECK((result.factor * result.factor.transpose() - k).norm() <= 1e-14);
  }

  SUBCASE("rank one") {
    Eigen::VectorXd v(5);
    v << 1.0, -2.0, 0.5, 3.0, 0.25;
    Eigen::MatrixXd k = v * v.transpose();
    const auto result = surfuq::pivoted_cholesky(k, 1e-12);
    CHECK(result.rank() == 1);
    CHECK((result.factor * result.factor.transpose() - k).norm() <=
          1e-12 * k.norm());
  }

  SUBCASE("full factorization of a random SPD matrix") {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd k = random_spd(12, rng);
    const auto result = surfuq::pivoted_cholesky(k, 0.0);
    CHECK(result.rank() == 12);
    CHECK((result.factor * result.factor.transpose() - k).norm() <=
          1e-10 * k.norm());
  }

  SUBCASE("indefinite matrices are refused") {
    Eigen::MatrixXd k(2, 2);
    k << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(surfuq::pivoted_cholesky(k, 0.0), surfuq::NumericalError);
  }

  SUBCASE("trace bookkeeping") {
    std::mt19937_64 rng(19);
    const Eigen::MatrixXd k = random_spd(30, rng);
    for (double tol : {1e-1, 1e-2, 1e-4}) {
      const auto result = surfuq::pivoted_cholesky(k, tol);
      CHECK(result.trace_residual <= tol * result.initial_trace);
      const double direct = (k - result.factor * result.factor.transpose()).trace();
      CHECK(result.trace_residual == doctest::Approx(direct).epsilon(1e-8));
    }
  }
}

TEST_CASE("KL expansion on the sphere") {
  const MultipatchSurface sphere = surfuq::builtin_sphere();
  const SplineSpace2D space = SplineSpace2D::uniform(2, 2);
  const DofMap dofmap(sphere, space);

  SUBCASE("zero kernel yields the identity deformation") {
    const KLExpansion kl = surfuq::build_kl(sphere, space, dofmap,
                                            CovarianceKernel::zero(), 1e-4);
    CHECK(kl.num_modes() == 0);
    const MultipatchSurface deformed =
        surfuq::deform(kl, Eigen::VectorXd(0), sphere);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
      const int p = static_cast<int>(rng() % 6);
      const double u = unit(rng), v = unit(rng);
      CHECK((deformed.patch(p).evaluate(u, v) - sphere.patch(p).evaluate(u, v))
                .norm() <= 1e-14);
    }
  }

  const KLExpansion kl = surfuq::build_kl(
      sphere, space, dofmap, CovarianceKernel::gaussian(), 1e-4);
  REQUIRE(kl.num_modes() >= 1);
  CHECK(kl.trace_residual() <= 1e-4 * kl.initial_trace());
  CHECK(kl.num_points() == dofmap.dimension());

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd y(kl.num_modes());
  for (int i = 0; i < y.size(); ++i) y[i] = box(rng);

  SUBCASE("zero parameter vector reproduces the reference surface") {
    const MultipatchSurface deformed =
        surfuq::deform(kl, Eigen::VectorXd::Zero(kl.num_modes()), sphere);
    for (int rep = 0; rep < 50; ++rep) {
      const int p = static_cast<int>(rng() % 6);
      const double u = unit(rng), v = unit(rng);
      CHECK((deformed.patch(p).evaluate(u, v) - sphere.patch(p).evaluate(u, v))
                .norm() <= 1e-14);
    }
  }

  SUBCASE("zero amplitude reproduces the reference surface") {
    KLExpansion flat = kl;
    flat.set_amplitude(0.0);
    const MultipatchSurface deformed = surfuq::deform(flat, y, sphere);
    for (int rep = 0; rep < 50; ++rep) {
      const int p = static_cast<int>(rng() % 6);
      const double u = unit(rng), v = unit(rng);
      CHECK((deformed.patch(p).evaluate(u, v) - sphere.patch(p).evaluate(u, v))
                .norm() <= 1e-14);
    }
  }

  SUBCASE("single-mode displacement equals the stored column") {
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(kl.num_modes());
    e1[0] = 1.0;
    const Eigen::VectorXd disp = kl.displacement(e1);
    CHECK((disp - kl.modes().col(0)).norm() <= 1e-14 * kl.modes().col(0).norm());
  }

  SUBCASE("displacement is linear in the parameter vector") {
    const Eigen::VectorXd half = kl.displacement(0.5 * y);
    const Eigen::VectorXd full = kl.displacement(y);
    CHECK((2.0 * half - full).norm() <= 1e-12 * full.norm());
  }

  SUBCASE("deformed interfaces stay conforming") {
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::VectorXd sample(kl.num_modes());
      for (int i = 0; i < sample.size(); ++i) sample[i] = box(rng);
      const MultipatchSurface deformed = surfuq::deform(kl, sample, sphere);
      CHECK(surfuq::max_interface_mismatch(deformed) <= 1e-9);
    }
  }

  SUBCASE("relative displacement grows linearly in the amplitude") {
    const double diameter = sphere.diameter();
    KLExpansion scaled = kl;
    scaled.set_amplitude(1.0);
    const double base = scaled.max_relative_displacement(y, diameter);
    REQUIRE(base > 0.0);
    for (double alpha : {1.2, 1.4, 1.6, 1.8, 2.0}) {
      scaled.set_amplitude(alpha);
      const double measured = scaled.max_relative_displacement(y, diameter);
      CHECK(measured / base == doctest::Approx(alpha).epsilon(0.05));
    }
  }

  SUBCASE("deformed surface evaluates the interpolated field") {
    const MultipatchSurface deformed = surfuq::deform(kl, y, sphere);
    const Eigen::VectorXd disp = kl.displacement(y);
    // At a Greville image, the interpolant matches the prescribed value.
    const auto greville = space.knots().greville();
    const int k = space.per_direction();
    for (int rep = 0; rep < 25; ++rep) {
      const int p = static_cast<int>(rng() % 6);
      const int a = static_cast<int>(rng() % k), b = static_cast<int>(rng() % k);
      const int g = dofmap.global_index(p, space.flat_index(a, b));
      const Vec3 expected = sphere.patch(p).evaluate(greville[a], greville[b]) +
                            disp.segment<3>(3 * g);
      CHECK((deformed.patch(p).evaluate(greville[a], greville[b]) - expected)
                .norm() <= 1e-10);
    }
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(surfuq::deform(kl, Eigen::VectorXd::Zero(kl.num_modes() + 1),
                                   sphere),
                    surfuq::UsageError);
  }

  SUBCASE("mode file round trip") {
    const std::string path = "kl_modes.bin";
    kl.save_modes(path);
    const KLExpansion restored = surfuq::load_kl(path, sphere, space, dofmap);
    CHECK(restored.num_modes() == kl.num_modes());
    CHECK((restored.modes() - kl.modes()).norm() == 0.0);  // bit exact
    std::remove(path.c_str());
  }
}

TEST_CASE("default kernel rank on the level-4 sphere") {
  const MultipatchSurface sphere = surfuq::builtin_sphere();
  const SplineSpace2D space = SplineSpace2D::uniform(2, 4);
  const DofMap dofmap(sphere, space);
  REQUIRE(dofmap.dimension() == 1736);
  const KLExpansion kl = surfuq::build_kl(
      sphere, space, dofmap, CovarianceKernel::gaussian(), 1e-4);
  CHECK(kl.num_modes() >= 1);
  CHECK(kl.num_modes() <= 3 * dofmap.dimension());
  CHECK(kl.trace_residual() <= 1e-4 * kl.initial_trace());
  // The reported parameter dimension for a comparable setup is 282, but the
  // value is tied to the interpolation-point set: this kernel is close to
  // white at the Greville-image spacing, so the relative trace criterion
  // keeps almost the full point set. Recorded, not asserted.
  MESSAGE("KL modes at level 4, tol 1e-4: ", kl.num_modes());
  const bool inside_anchor_window = kl.num_modes() >= 150 && kl.num_modes() <= 450;
  WARN_MESSAGE(inside_anchor_window,
               "mode count outside the literature anchor window [150,450]: ",
               kl.num_modes());
}

}  // TEST_SUITE
