// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "surfuq/sampling.hpp"

using surfuq::HaltonSampler;
using surfuq::MonteCarloSampler;
using surfuq::SamplerSpec;

TEST_SUITE("sampling") {

TEST_CASE("radical inverse") {
  CHECK(surfuq::radical_inverse(1, 2) == 0.5);
  CHECK(surfuq::radical_inverse(3, 2) == 0.75);
  CHECK(surfuq::radical_inverse(4, 2) == 0.125);
  // 5 = (12) in base 3, reflected digits: 2/3 + 1/9.
  CHECK(surfuq::radical_inverse(5, 3) == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  CHECK(surfuq::radical_inverse(13, 3) ==
        doctest::Approx(13.0 / 27.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)surfuq::radical_inverse(0, 2), surfuq::UsageError);
  CHECK_THROWS_AS((void)surfuq::radical_inverse(1, 1), surfuq::UsageError);
}

TEST_CASE("primes") {
  CHECK(surfuq::nth_prime(0) == 2);
  CHECK(surfuq::nth_prime(1) == 3);
  CHECK(surfuq::nth_prime(4) == 11);
  CHECK(surfuq::nth_prime(99) == 541);
}

TEST_CASE("Halton stream") {
  HaltonSampler sampler(2);
  const Eigen::VectorXd first = sampler.point(1);
  CHECK(first[0] == doctest::Approx(0.0));
  CHECK(first[1] == doctest::Approx(-1.0 / 3.0));

  SUBCASE("restart consistency") {
    HaltonSampler fresh(2);
    for (int skip = 0; skip < 7; ++skip) (void)fresh.next();
    const Eigen::VectorXd streamed = fresh.next();
    CHECK((streamed - sampler.point(8)).norm() == 0.0);
  }

  SUBCASE("coordinates stay inside the cube") {
    HaltonSampler wide(25);
    for (int i = 1; i <= 500; ++i) {
      const Eigen::VectorXd point = wide.point(i);
      CHECK(point.minCoeff() >= -1.0);
      CHECK(point.maxCoeff() <= 1.0);
    }
  }

  SUBCASE("star discrepancy beats one hundred Monte Carlo streams") {
    std::vector<double> halton_points;
    HaltonSampler one(1);
    for (int i = 1; i <= 1024; ++i)
      halton_points.push_back(0.5 * (one.point(i)[0] + 1.0));
    const double halton_disc = oracles::star_discrepancy(halton_points);
    double best_mc = 1.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      MonteCarloSampler mc(seed, 1);
      std::vector<double> points;
      for (int i = 0; i < 1024; ++i) points.push_back(0.5 * (mc.next()[0] + 1.0));
      best_mc = std::min(best_mc, oracles::star_discrepancy(points));
    }
    CHECK(halton_disc < best_mc);
  }
}

TEST_CASE("Monte Carlo stream") {
  SUBCASE("fixed seeds reproduce the stream") {
    MonteCarloSampler a(42, 5), b(42, 5);
    for (int i = 0; i < 100; ++i) CHECK((a.next() - b.next()).norm() == 0.0);
    MonteCarloSampler c(43, 5);
    CHECK((MonteCarloSampler(42, 5).next() - c.next()).norm() > 0.0);
  }

  SUBCASE("coordinates stay inside the cube") {
    MonteCarloSampler sampler(7, 8);
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd point = sampler.next();
      CHECK(point.minCoeff() >= -1.0);
      CHECK(point.maxCoeff() < 1.0);
    }
  }

  SUBCASE("marginal means stay within three sigma") {
    const int draws = 100000;
    MonteCarloSampler sampler(2026, 3);
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int i = 0; i < draws; ++i) sum += sampler.next();
    const double bound = 3.0 * std::sqrt(1.0 / 3.0 / draws);
    for (int d = 0; d < 3; ++d) CHECK(std::abs(sum[d] / draws) <= bound);
  }
}

TEST_CASE("generate") {
  SamplerSpec spec;
  spec.kind = SamplerSpec::Kind::kHalton;
  spec.dimension = 3;
  spec.count = 17;
  const auto halton = surfuq::generate(spec);
  REQUIRE(halton.size() == 17);
  CHECK((halton[0] - HaltonSampler(3).point(1)).norm() == 0.0);

  spec.kind = SamplerSpec::Kind::kMonteCarlo;
  spec.seed = 11;
  const auto mc_a = surfuq::generate(spec);
  const auto mc_b = surfuq::generate(spec);
  for (std::size_t i = 0; i < mc_a.size(); ++i)
    CHECK((mc_a[i] - mc_b[i]).norm() == 0.0);

  spec.count = 0;
  CHECK_THROWS_AS((void)surfuq::generate(spec), surfuq::UsageError);
}

}  // TEST_SUITE
