// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_SAMPLING_HPP_
#define SURFUQ_SAMPLING_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <vector>

#include "surfuq/types.hpp"

namespace surfuq {

// Van der Corput radical inverse of n >= 1 in base b >= 2: the base-b digits
// of n mirrored across the radix point.
double radical_inverse(std::uint64_t n, std::uint64_t base);

// The d-th prime, zero-based: nth_prime(0) = 2.
std::uint64_t nth_prime(int d);

struct SamplerSpec {
  enum class Kind { kMonteCarlo, kHalton };
  Kind kind = Kind::kMonteCarlo;
  std::uint64_t seed = 0;
  int dimension = 1;
  int count = 1;
};

// Deterministic Halton stream on [-1,1]^m, coordinate d built from the d-th
// prime, starting at index 1, without leap, scrambling, or burn-in. Points
// are index-addressable: point(i) needs no stream state.
class HaltonSampler {
 public:
  explicit HaltonSampler(int dimension);
  Eigen::VectorXd point(std::uint64_t index) const;  // 1-based
  Eigen::VectorXd next() { return point(++cursor_); }

 private:
  std::vector<std::uint64_t> primes_;
  std::uint64_t cursor_ = 0;
};

// Seeded pseudo-random stream, i.i.d. uniform on [-1,1]^m. Backed by the
// standard mt19937_64 engine with doubles taken from the top 53 bits, so a
// fixed seed reproduces the stream bit-exactly on any platform.
class MonteCarloSampler {
 public:
  MonteCarloSampler(std::uint64_t seed, int dimension);
  Eigen::VectorXd next();

 private:
  std::mt19937_64 engine_;
  int dimension_;
};

// All `count` parameter vectors of the spec, in stream order.
std::vector<Eigen::VectorXd> generate(const SamplerSpec& spec);

}  // namespace surfuq

#endif  // SURFUQ_SAMPLING_HPP_
