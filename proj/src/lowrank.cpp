// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/lowrank.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace surfuq {

namespace {
// Remainders below this fraction of the sample norm are treated as zero and
// do not open a new direction.
constexpr double kDeflation = 1e-12;

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& matrix) {
  for (Eigen::Index r = 0; r < matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      const double value = matrix(r, c);
      out.write(reinterpret_cast<const char*>(&value), sizeof(value));
    }
}

void read_matrix(std::ifstream& in, Eigen::MatrixXd& matrix) {
  for (Eigen::Index r = 0; r < matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      double value = 0.0;
      in.read(reinterpret_cast<char*>(&value), sizeof(value));
      matrix(r, c) = value;
    }
}
}  // namespace

LowRankCorrelation::LowRankCorrelation(int n_dof, int num_times, int max_rank)
    : n_dof_(n_dof), num_times_(num_times), max_rank_(max_rank) {
  if (n_dof < 1 || num_times < 1 || max_rank < 1)
    throw UsageError("low-rank state: dimensions and cap must be positive");
  basis_.assign(num_times_, Eigen::MatrixXd(n_dof_, 0));
  sigma_.assign(num_times_, Eigen::VectorXd(0));
  coupling_.assign(num_times_ * (num_times_ + 1) / 2, Eigen::MatrixXd(0, 0));
}

void LowRankCorrelation::update(const Eigen::MatrixXd& snapshots) {
  if (snapshots.rows() != n_dof_ || snapshots.cols() != num_times_)
    throw UsageError("low-rank update: snapshot matrix has wrong shape");
  const int ell = ++count_;

  if (ell == 1) {
    for (int i = 0; i < num_times_; ++i) {
      const Eigen::VectorXd u = snapshots.col(i);
      const double norm = u.norm();
      if (norm > 0.0) {
        basis_[i] = u / norm;
        sigma_[i] = Eigen::VectorXd::Constant(1, norm);
      }
    }
    for (int i = 0; i < num_times_; ++i)
      for (int j = i; j < num_times_; ++j)
        coupling_[pair_offset(i, j)] = Eigen::MatrixXd::Ones(rank(i), rank(j));
    return;
  }

  // Per time: project, pad, and diagonalize the small core matrix.
  std::vector<Eigen::MatrixXd> rotations(num_times_);  // (r_old+1) x r_new
  for (int i = 0; i < num_times_; ++i) {
    const Eigen::VectorXd u = snapshots.col(i);
    const int r = rank(i);
    Eigen::VectorXd coeff(r);
    Eigen::VectorXd residual = u;
    if (r > 0) {
      coeff.noalias() = basis_[i].transpose() * u;
      residual.noalias() -= basis_[i] * coeff;
    }
    const double rho = residual.norm();
    const bool append = rho > kDeflation * u.norm();

    Eigen::MatrixXd core = Eigen::MatrixXd::Zero(r + (append ? 1 : 0), r + 1);
    core.topLeftCorner(r, r).diagonal() = sigma_[i];
    core.topRightCorner(r, 1) = coeff;
    if (append) core(r, r) = rho;

    if (core.rows() == 0) {
      // Zero-rank state fed a zero snapshot; drop the padding row.
      rotations[i] = Eigen::MatrixXd::Zero(1, 0);
      continue;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(core,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (append) {
      Eigen::MatrixXd padded(n_dof_, r + 1);
      padded.leftCols(r) = basis_[i];
      padded.col(r) = residual / rho;
      basis_[i] = padded * svd.matrixU();
    } else {
      basis_[i] = basis_[i] * svd.matrixU();
    }
    sigma_[i] = svd.singularValues();
    rotations[i] = svd.matrixV();
  }

  // Coupling update: pad with the new sample's unit right factor, then
  // rotate into the new singular bases.
  const double scale = static_cast<double>(ell - 1) / ell;
  for (int i = 0; i < num_times_; ++i) {
    for (int j = i; j < num_times_; ++j) {
      Eigen::MatrixXd& block = coupling_[pair_offset(i, j)];
      const Eigen::Index ri = block.rows(), rj = block.cols();
      Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(ri + 1, rj + 1);
      padded.topLeftCorner(ri, rj) = scale * block;
      padded(ri, rj) = 1.0 / ell;
      block = rotations[i].transpose() * padded * rotations[j];
    }
  }

  // Rank cap: keep the leading columns, blocks, and rows.
  for (int i = 0; i < num_times_; ++i) {
    if (rank(i) > max_rank_) {
      basis_[i] = basis_[i].leftCols(max_rank_).eval();
      sigma_[i] = sigma_[i].head(max_rank_).eval();
    }
  }
  for (int i = 0; i < num_times_; ++i)
    for (int j = i; j < num_times_; ++j) {
      Eigen::MatrixXd& block = coupling_[pair_offset(i, j)];
      const Eigen::Index rows = std::min<Eigen::Index>(block.rows(), max_rank_);
      const Eigen::Index cols = std::min<Eigen::Index>(block.cols(), max_rank_);
      if (rows != block.rows() || cols != block.cols())
        block = block.topLeftCorner(rows, cols).eval();
    }
}

Eigen::MatrixXd LowRankCorrelation::coupling(int i, int j) const {
  if (i < 0 || j < 0 || i >= num_times_ || j >= num_times_)
    throw UsageError("low-rank state: time index out of range");
  if (i <= j) return coupling_[pair_offset(i, j)];
  return coupling_[pair_offset(j, i)].transpose();
}

Eigen::MatrixXd LowRankCorrelation::reconstruct(int i, int j) const {
  if (count_ < 1)
    throw UsageError("low-rank state: no samples processed");
  if (i > j) return reconstruct(j, i).transpose().eval();
  if (rank(i) == 0 || rank(j) == 0)
    return Eigen::MatrixXd::Zero(n_dof_, n_dof_);
  return basis_[i] * (sigma_[i].asDiagonal() * coupling_[pair_offset(i, j)] *
                      sigma_[j].asDiagonal()) *
         basis_[j].transpose();
}

Eigen::MatrixXd LowRankCorrelation::principal_correlation(int i, int j,
                                                          int n_pc) const {
  if (n_pc < 1 || n_pc > rank(i) || n_pc > rank(j))
    throw NumericalError("principal correlation: rank too small");
  const Eigen::MatrixXd block_ij =
      sigma_[i].asDiagonal() * coupling(i, j) * sigma_[j].asDiagonal();
  const Eigen::MatrixXd block_ii =
      sigma_[i].asDiagonal() * coupling(i, i) * sigma_[i].asDiagonal();
  const Eigen::MatrixXd block_jj =
      sigma_[j].asDiagonal() * coupling(j, j) * sigma_[j].asDiagonal();
  Eigen::MatrixXd result(n_pc, n_pc);
  for (int a = 0; a < n_pc; ++a)
    for (int b = 0; b < n_pc; ++b) {
      const double scale = block_ii(a, a) * block_jj(b, b);
      if (!(scale > 0.0))
        throw NumericalError("principal correlation: vanishing variance");
      result(a, b) = block_ij(a, b) / std::sqrt(scale);
    }
  return result;
}

std::vector<double> LowRankCorrelation::frobenius_errors(
    const std::vector<Eigen::MatrixXd>& diagonal_blocks) const {
  if (static_cast<int>(diagonal_blocks.size()) != num_times_)
    throw UsageError("frobenius error: need one oracle block per time");
  std::vector<double> errors(num_times_);
  for (int i = 0; i < num_times_; ++i) {
    const double norm = diagonal_blocks[i].norm();
    if (!(norm > 0.0))
      throw NumericalError("frobenius error: oracle block has zero norm");
    errors[i] = (diagonal_blocks[i] - reconstruct(i, i)).norm() / norm;
  }
  return errors;
}

double LowRankCorrelation::frobenius_error(
    const std::vector<Eigen::MatrixXd>& diagonal_blocks) const {
  const auto errors = frobenius_errors(diagonal_blocks);
  double sum = 0.0;
  for (double e : errors) sum += e;
  return sum / errors.size();
}

std::vector<double> LowRankCorrelation::generalization_errors(
    const std::vector<Eigen::MatrixXd>& fresh_samples) const {
  if (fresh_samples.empty())
    throw UsageError("generalization error: no fresh samples");
  std::vector<double> errors(num_times_, 0.0);
  for (const auto& sample : fresh_samples) {
    if (sample.rows() != n_dof_ || sample.cols() != num_times_)
      throw UsageError("generalization error: sample has wrong shape");
    for (int i = 0; i < num_times_; ++i) {
      const Eigen::VectorXd u = sample.col(i);
      const double norm = u.norm();
      if (!(norm > 0.0))
        throw NumericalError("generalization error: sample has zero norm");
      if (rank(i) == 0) {
        errors[i] += 1.0;
      } else {
        const Eigen::VectorXd projected = basis_[i] * (basis_[i].transpose() * u);
        errors[i] += (u - projected).norm() / norm;
      }
    }
  }
  for (double& e : errors) e /= static_cast<double>(fresh_samples.size());
  return errors;
}

double LowRankCorrelation::generalization_error(
    const std::vector<Eigen::MatrixXd>& fresh_samples) const {
  const auto errors = generalization_errors(fresh_samples);
  double sum = 0.0;
  for (double e : errors) sum += e;
  return sum / errors.size();
}

std::size_t LowRankCorrelation::storage_scalars() const {
  std::size_t total = 0;
  for (int i = 0; i < num_times_; ++i)
    total += static_cast<std::size_t>(basis_[i].size()) + sigma_[i].size();
  for (const auto& block : coupling_) total += block.size();
  return total;
}

void LowRankCorrelation::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write low-rank state file: " + path);
  const std::int64_t header[4] = {n_dof_, num_times_, max_rank_, count_};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (int i = 0; i < num_times_; ++i) {
    const std::int64_t r = rank(i);
    out.write(reinterpret_cast<const char*>(&r), sizeof(r));
  }
  for (const auto& matrix : basis_) write_matrix(out, matrix);
  for (const auto& values : sigma_) write_matrix(out, values);
  for (const auto& block : coupling_) write_matrix(out, block);
  if (!out) throw UsageError("failed writing low-rank state file: " + path);
}

LowRankCorrelation LowRankCorrelation::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open low-rank state file: " + path);
  std::int64_t header[4] = {0, 0, 0, 0};
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) throw UsageError("truncated low-rank state file: " + path);
  LowRankCorrelation state(static_cast<int>(header[0]), static_cast<int>(header[1]),
                           static_cast<int>(header[2]));
  state.count_ = static_cast<int>(header[3]);
  std::vector<std::int64_t> ranks(state.num_times_);
  in.read(reinterpret_cast<char*>(ranks.data()),
          static_cast<std::streamsize>(ranks.size() * sizeof(std::int64_t)));
  for (int i = 0; i < state.num_times_; ++i) {
    state.basis_[i].resize(state.n_dof_, ranks[i]);
    state.sigma_[i].resize(ranks[i]);
  }
  for (auto& matrix : state.basis_) read_matrix(in, matrix);
  for (int i = 0; i < state.num_times_; ++i) {
    Eigen::MatrixXd column(ranks[i], 1);
    read_matrix(in, column);
    state.sigma_[i] = column.col(0);
  }
  for (int i = 0; i < state.num_times_; ++i)
    for (int j = i; j < state.num_times_; ++j) {
      auto& block = state.coupling_[state.pair_offset(i, j)];
      block.resize(ranks[i], ranks[j]);
      read_matrix(in, block);
    }
  if (!in) throw UsageError("truncated low-rank state file: " + path);
  return state;
}

}  // namespace surfuq
