// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
//
// Independent reference implementations used by the tests only. These are
// deliberately written from the defining formulas, not from the library code
// paths they check.
#ifndef SURFUQ_TESTS_ORACLES_HPP_
#define SURFUQ_TESTS_ORACLES_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

namespace oracles {

// Cox-de Boor recursion written verbatim, with the final span closed on the
// right so that evaluation at x = 1 is defined.
inline double naive_bspline(const std::vector<double>& xi, int p, int j,
                            double x) {
  if (p == 0) {
    if (xi[j] <= x && x < xi[j + 1]) return 1.0;
    if (x == 1.0 && xi[j] < 1.0 && xi[j + 1] == 1.0) return 1.0;
    return 0.0;
  }
  double value = 0.0;
  if (xi[j + p] > xi[j])
    value += (x - xi[j]) / (xi[j + p] - xi[j]) * naive_bspline(xi, p - 1, j, x);
  if (xi[j + p + 1] > xi[j + 1])
    value += (xi[j + p + 1] - x) / (xi[j + p + 1] - xi[j + 1]) *
             naive_bspline(xi, p - 1, j + 1, x);
  return value;
}

// Star discrepancy of points in [0,1).
inline double star_discrepancy(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  const double n = static_cast<double>(points.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double hi = (i + 1) / n - points[i];
    const double lo = points[i] - i / n;
    worst = std::max({worst, hi, lo});
  }
  return worst;
}

// Dense two-pass accumulation of the correlation blocks (1/l) W W^T.
inline Eigen::MatrixXd correlation_block(const std::vector<Eigen::MatrixXd>& snapshots,
                                         int time_a, int time_b) {
  const Eigen::Index n = snapshots.front().rows();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
  for (const auto& sample : snapshots)
    block += sample.col(time_a) * sample.col(time_b).transpose();
  return block / static_cast<double>(snapshots.size());
}

}  // namespace oracles

#endif  // SURFUQ_TESTS_ORACLES_HPP_
