// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "surfuq/splines.hpp"

using surfuq::KnotVector;
using surfuq::SplineSpace2D;

namespace {

KnotVector random_knot_vector(std::mt19937_64& rng, int degree) {
  std::uniform_int_distribution<int> count(0, 6);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const int interior = count(rng);
  std::vector<double> values;
  while (static_cast<int>(values.size()) < interior) {
    const double candidate = unit(rng);
    bool ok = true;
    for (double v : values)
      if (std::abs(v - candidate) < 0.02) ok = false;
    if (ok) values.push_back(candidate);
  }
  std::sort(values.begin(), values.end());
  std::vector<double> knots;
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (double v : values) knots.push_back(v);
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
  return KnotVector(std::move(knots), degree);
}

double spline_value(const KnotVector& kv, const Eigen::VectorXd& coeffs, double x) {
  double sum = 0.0;
  for (int j = 0; j < kv.num_basis(); ++j) sum += coeffs[j] * kv.evaluate(j, x);
  return sum;
}

}  // namespace

TEST_SUITE("splines") {

TEST_CASE("degree zero basis is a span indicator") {
  KnotVector kv({0.0, 0.5, 1.0}, 0);
  CHECK(kv.evaluate(0, 0.25) == 1.0);
  CHECK(kv.evaluate(0, 0.5) == 0.0);
  CHECK(kv.evaluate(1, 0.5) == 1.0);
  CHECK(kv.evaluate(1, 1.0) == 1.0);  // right closure
  CHECK(kv.evaluate(0, 1.0) == 0.0);
}

TEST_CASE("linear hat function") {
  KnotVector kv({0.0, 0.0, 1.0, 1.0}, 1);
  CHECK(kv.evaluate(1, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kv.evaluate(1, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("quadratic value matches the independent recursion") {
  std::vector<double> knots{0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0};
  KnotVector kv(knots, 2);
  const double oracle = oracles::naive_bspline(knots, 2, 1, 0.25);
  CHECK(oracle == doctest::Approx(0.625).epsilon(1e-15));  // hand-unrolled
  CHECK(kv.evaluate(1, 0.25) == doctest::Approx(oracle).epsilon(1e-15));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = unit(rng);
    for (int j = 0; j < kv.num_basis(); ++j)
      CHECK(kv.evaluate(j, x) ==
            doctest::Approx(oracles::naive_bspline(knots, 2, j, x)).epsilon(1e-14));
  }
}

TEST_CASE("derivatives") {
  KnotVector linear({0.0, 0.0, 1.0, 1.0}, 1);
  CHECK(linear.evaluate_derivative(1, 0.3) == doctest::Approx(1.0));
  CHECK(linear.evaluate_derivative(1, 0.77) == doctest::Approx(1.0));

  KnotVector kv({0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0}, 2);
  SUBCASE("matches a central finite difference") {
    const double h = 1e-6;
    for (int j = 0; j < kv.num_basis(); ++j) {
      const double fd = (kv.evaluate(j, 0.25 + h) - kv.evaluate(j, 0.25 - h)) / (2 * h);
      CHECK(kv.evaluate_derivative(j, 0.25) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  SUBCASE("derivatives of a partition of unity sum to zero") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
      const double x = unit(rng);
      double sum = 0.0;
      for (int j = 0; j < kv.num_basis(); ++j) sum += kv.evaluate_derivative(j, x);
      CHECK(std::abs(sum) <= 1e-12);
    }
  }
}

TEST_CASE("Greville points are knot averages") {
  KnotVector quadratic({0.0, 0.0, 0.0, 1.0, 1.0, 1.0}, 2);
  const auto g2 = quadratic.greville();
  REQUIRE(g2.size() == 3);
  CHECK(g2[0] == 0.0);
  CHECK(g2[1] == doctest::Approx(0.5));
  CHECK(g2[2] == 1.0);

  KnotVector linear({0.0, 0.0, 0.5, 1.0, 1.0}, 1);
  const auto g1 = linear.greville();
  REQUIRE(g1.size() == 3);
  CHECK(g1[0] == 0.0);
  CHECK(g1[1] == doctest::Approx(0.5));
  CHECK(g1[2] == 1.0);

  // Direct averaging oracle on a uniform cubic vector.
  KnotVector cubic = KnotVector::uniform(3, 3);
  const auto g3 = cubic.greville();
  const auto& knots = cubic.knots();
  for (int j = 0; j < cubic.num_basis(); ++j) {
    const double avg = (knots[j + 1] + knots[j + 2] + knots[j + 3]) / 3.0;
    CHECK(g3[j] == doctest::Approx(avg).epsilon(1e-15));
  }
  CHECK(std::is_sorted(g3.begin(), g3.end()));

  KnotVector constant({0.0, 0.5, 1.0}, 0);
  CHECK_THROWS_AS((void)constant.greville(), surfuq::UsageError);
}

TEST_CASE("tensor Greville interpolation") {
  SplineSpace2D space = SplineSpace2D::uniform(2, 2);
  const auto nodes = space.knots().greville();
  const int k = space.per_direction();

  SUBCASE("constant samples give unit coefficients") {
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(k, k);
    Eigen::MatrixXd coeffs = surfuq::interpolate_on_patch(space, ones);
    CHECK((coeffs.array() - 1.0).abs().maxCoeff() <= 1e-13);
  }

  SUBCASE("reproduces polynomials of coordinate degree p") {
    auto f = [](double x, double y) {
      return (x * x - 0.25 * x + 1.0) * (2.0 * y * y + y);
    };
    Eigen::MatrixXd samples(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) samples(a, b) = f(nodes[a], nodes[b]);
    Eigen::MatrixXd coeffs = surfuq::interpolate_on_patch(space, samples);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
      const double x = unit(rng), y = unit(rng);
      double value = 0.0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          value += coeffs(a, b) * space.knots().evaluate(a, x) *
                   space.knots().evaluate(b, y);
      CHECK(value == doctest::Approx(f(x, y)).epsilon(1e-12));
    }
  }

  SUBCASE("random smooth samples are matched at the grid") {
    auto f = [](double x, double y) { return std::sin(2.0 * x + 1.0) * std::cos(3.0 * y); };
    Eigen::MatrixXd samples(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) samples(a, b) = f(nodes[a], nodes[b]);
    Eigen::MatrixXd coeffs = surfuq::interpolate_on_patch(space, samples);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        double value = 0.0;
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j)
            value += coeffs(i, j) * space.knots().evaluate(i, nodes[a]) *
                     space.knots().evaluate(j, nodes[b]);
        CHECK(value == doctest::Approx(samples(a, b)).epsilon(1e-10));
      }
  }
}

TEST_CASE("partition of unity over random admissible knot vectors") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int degree = 0; degree <= 4; ++degree) {
    for (int rep = 0; rep < 10; ++rep) {
      const KnotVector kv = random_knot_vector(rng, degree);
      for (int xrep = 0; xrep < 20; ++xrep) {
        const double x = (xrep == 0) ? 1.0 : unit(rng);
        double sum = 0.0;
        for (int j = 0; j < kv.num_basis(); ++j) sum += kv.evaluate(j, x);
        CHECK(std::abs(sum - 1.0) <= 1e-14);
      }
    }
  }
}

TEST_CASE("nonnegativity and local support") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const int degree = 1 + static_cast<int>(rng() % 4);
    const KnotVector kv = random_knot_vector(rng, degree);
    const auto& knots = kv.knots();
    for (int j = 0; j < kv.num_basis(); ++j) {
      for (int xrep = 0; xrep < 30; ++xrep) {
        const double x = unit(rng);
        const double value = kv.evaluate(j, x);
        CHECK(value >= 0.0);
        if (x < knots[j] || x > knots[j + degree + 1]) CHECK(value == 0.0);
      }
    }
  }
}

TEST_CASE("dyadic refinement by knot insertion preserves the function") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int degree = 1; degree <= 3; ++degree) {
    const KnotVector coarse = KnotVector::uniform(degree, 2);
    const KnotVector fine = coarse.refined_dyadic();
    Eigen::VectorXd coeffs(coarse.num_basis());
    for (int j = 0; j < coeffs.size(); ++j) coeffs[j] = gauss(rng);
    const Eigen::VectorXd refined = surfuq::refine_coefficients(coarse, fine, coeffs);
    REQUIRE(refined.size() == fine.num_basis());
    for (int rep = 0; rep < 50; ++rep) {
      const double x = (rep == 0) ? 1.0 : unit(rng);
      CHECK(spline_value(coarse, coeffs, x) ==
            doctest::Approx(spline_value(fine, refined, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("validation and error paths") {
  CHECK_THROWS_AS(KnotVector({0.0, 0.5, 0.4, 1.0}, 0), surfuq::UsageError);
  CHECK_THROWS_AS(KnotVector({0.0, 0.0, 1.0, 1.0}, 2), surfuq::UsageError);  // k <= p
  CHECK_THROWS_AS(KnotVector({0.0, 0.5, 0.5, 1.0}, 0), surfuq::UsageError);  // repeated interior
  KnotVector kv = KnotVector::uniform(2, 1);
  CHECK_THROWS_AS((void)kv.evaluate(-1, 0.5), surfuq::UsageError);
  CHECK_THROWS_AS((void)kv.evaluate(kv.num_basis(), 0.5), surfuq::UsageError);
  CHECK_THROWS_AS((void)kv.evaluate(0, -0.1), surfuq::UsageError);
  CHECK_THROWS_AS((void)kv.evaluate(0, 1.1), surfuq::UsageError);

  SplineSpace2D space = SplineSpace2D::uniform(2, 1);
  CHECK(space.dimension() == space.per_direction() * space.per_direction());
  CHECK(space.flat_index(1, 2) == 1 * space.per_direction() + 2);
}

}  // TEST_SUITE
