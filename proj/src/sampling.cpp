// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/sampling.hpp"

namespace surfuq {

double radical_inverse(std::uint64_t n, std::uint64_t base) {
  if (n < 1) throw UsageError("radical inverse requires n >= 1");
  if (base < 2) throw UsageError("radical inverse requires base >= 2");
  const double inv = 1.0 / static_cast<double>(base);
  double factor = inv;
  double result = 0.0;
  while (n > 0) {
    result += static_cast<double>(n % base) * factor;
    n /= base;
    factor *= inv;
  }
  return result;
}

std::uint64_t nth_prime(int d) {
  if (d < 0) throw UsageError("prime index must be nonnegative");
  std::uint64_t candidate = 1;
  for (int found = 0; found <= d;) {
    ++candidate;
    bool prime = candidate >= 2;
    for (std::uint64_t q = 2; q * q <= candidate; ++q)
      if (candidate % q == 0) {
        prime = false;
        break;
      }
    if (prime) {
      if (found == d) return candidate;
      ++found;
    }
  }
  return candidate;
}

HaltonSampler::HaltonSampler(int dimension) {
  if (dimension < 1) throw UsageError("sampler dimension must be positive");
  primes_.reserve(dimension);
  std::uint64_t candidate = 1;
  while (static_cast<int>(primes_.size()) < dimension) {
    ++candidate;
    bool prime = true;
    for (std::uint64_t q : primes_) {
      if (q * q > candidate) break;
      if (candidate % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime && candidate >= 2) primes_.push_back(candidate);
  }
}

Eigen::VectorXd HaltonSampler::point(std::uint64_t index) const {
  Eigen::VectorXd result(static_cast<Eigen::Index>(primes_.size()));
  for (Eigen::Index d = 0; d < result.size(); ++d)
    result[d] = 2.0 * radical_inverse(index, primes_[d]) - 1.0;
  return result;
}

MonteCarloSampler::MonteCarloSampler(std::uint64_t seed, int dimension)
    : engine_(seed), dimension_(dimension) {
  if (dimension < 1) throw UsageError("sampler dimension must be positive");
}

Eigen::VectorXd MonteCarloSampler::next() {
  Eigen::VectorXd result(dimension_);
  for (int d = 0; d < dimension_; ++d) {
    // Top 53 bits give a uniform double in [0,1).
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    result[d] = 2.0 * unit - 1.0;
  }
  return result;
}

std::vector<Eigen::VectorXd> generate(const SamplerSpec& spec) {
  if (spec.count < 1) throw UsageError("sampler count must be positive");
  std::vector<Eigen::VectorXd> points;
  points.reserve(spec.count);
  if (spec.kind == SamplerSpec::Kind::kHalton) {
    HaltonSampler sampler(spec.dimension);
    for (int i = 0; i < spec.count; ++i) points.push_back(sampler.next());
  } else {
    MonteCarloSampler sampler(spec.seed, spec.dimension);
    for (int i = 0; i < spec.count; ++i) points.push_back(sampler.next());
  }
  return points;
}

}  // namespace surfuq
