// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#ifndef SURFUQ_TYPES_HPP_
#define SURFUQ_TYPES_HPP_

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <stdexcept>
#include <string>

namespace surfuq {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Matrix32 = Eigen::Matrix<double, 3, 2>;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Thrown when a computation fails for numerical reasons (non-convergence,
// degenerate geometry, indefinite kernel). Maps to exit code 1 in the CLI.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on invalid configuration, arguments, or I/O. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace surfuq

#endif  // SURFUQ_TYPES_HPP_
