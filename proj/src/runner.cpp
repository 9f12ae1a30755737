// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include "surfuq/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "surfuq/assembly.hpp"
#include "surfuq/geometry.hpp"
#include "surfuq/randfield.hpp"
#include "surfuq/sampling.hpp"
#include "surfuq/timestep.hpp"

namespace surfuq {

namespace {

// Offset added to the run seed for the independent test stream.
constexpr std::uint64_t kTestSeedOffset = 1000003;

// The model data of the numerical studies: initial condition x3 and the
// separable sine source, both in material coordinates.
double initial_x3(const Vec3& x) { return x.z(); }
double sine_source(const Vec3& x) {
  return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()) * std::sin(M_PI * x.z());
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write output file: " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

// Runs produce(0..count-1) on `workers` threads and feeds the results to
// consume in ascending index order, so accumulators see a fixed stream
// regardless of the worker count.
template <typename Result>
void ordered_pipeline(int count, int workers,
                      const std::function<Result(int)>& produce,
                      const std::function<void(int, Result)>& consume) {
  if (count == 0) return;
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) consume(i, produce(i));
    return;
  }
  std::mutex mutex;
  std::condition_variable ready_cv;
  std::map<int, Result> ready;
  std::atomic<int> next{0};
  std::exception_ptr failure;

  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int index = next.fetch_add(1);
        if (index >= count) break;
        try {
          Result result = produce(index);
          std::lock_guard<std::mutex> lock(mutex);
          ready.emplace(index, std::move(result));
        } catch (...) {
          std::lock_guard<std::mutex> lock(mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
        ready_cv.notify_all();
      }
    });
  }
  for (int i = 0; i < count; ++i) {
    std::unique_lock<std::mutex> lock(mutex);
    ready_cv.wait(lock, [&]() { return ready.count(i) != 0 || failure; });
    if (failure) break;
    Result result = std::move(ready.at(i));
    ready.erase(i);
    lock.unlock();
    consume(i, std::move(result));
  }
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
}

struct ExperimentSetup {
  MultipatchSurface reference;
  SplineSpace2D space;
  DofMap dofmap;
  QuadratureRule quad;
  Eigen::VectorXd initial;
  ThetaScheme scheme;
  SolveConfig solve;
};

MultipatchSurface make_geometry(const RunConfig& config) {
  if (config.geometry == "sphere") return builtin_sphere();
  if (config.geometry == "pipe") return builtin_pipe();
  MultipatchSurface surface = load_geometry(config.geometry);
  if (!surface.is_closed())
    throw UsageError("geometry file does not describe a closed surface");
  return surface;
}

ExperimentSetup make_setup(const RunConfig& config) {
  MultipatchSurface reference = make_geometry(config);
  SplineSpace2D space = SplineSpace2D::uniform(config.degree, config.level);
  DofMap dofmap(reference, space);
  QuadratureRule quad(config.degree + 1);
  Eigen::VectorXd initial = project_initial(reference, space, dofmap, initial_x3);
  ThetaScheme scheme{config.theta, config.dt, config.t_final, config.snapshots};
  SolveConfig solve{config.solver_tol, 10000};
  return {std::move(reference), std::move(space), std::move(dofmap),
          std::move(quad),      std::move(initial), scheme, solve};
}

SampleTrajectory solve_sample(const ExperimentSetup& setup, const KLExpansion* kl,
                              const Eigen::VectorXd& y) {
  const bool deformed = kl != nullptr && kl->num_modes() > 0 && kl->amplitude() > 0.0;
  const MultipatchSurface surface =
      deformed ? deform(*kl, y, setup.reference) : setup.reference;
  const MassStiffness ops =
      assemble_operators(surface, setup.space, setup.dofmap, setup.quad);
  const Eigen::VectorXd load =
      assemble_load(surface, setup.space, setup.dofmap, setup.quad, sine_source);
  return evolve(ops.mass, ops.stiffness, setup.initial, load, setup.scheme,
                setup.solve);
}

bool oracle_enabled(const RunConfig& config, int n_dof) {
  if (config.oracle == "on") return true;
  if (config.oracle == "off") return false;
  return n_dof <= 600 && config.num_samples <= 4096;
}

std::vector<Eigen::VectorXd> training_parameters(const RunConfig& config, int modes) {
  if (modes == 0)
    return std::vector<Eigen::VectorXd>(config.num_samples, Eigen::VectorXd(0));
  SamplerSpec spec;
  spec.kind = config.sampler == "halton" ? SamplerSpec::Kind::kHalton
                                         : SamplerSpec::Kind::kMonteCarlo;
  spec.seed = config.seed;
  spec.dimension = modes;
  spec.count = config.num_samples;
  return generate(spec);
}

std::vector<Eigen::VectorXd> test_parameters(const RunConfig& config, int modes) {
  if (modes == 0)
    return std::vector<Eigen::VectorXd>(config.num_samples, Eigen::VectorXd(0));
  SamplerSpec spec;
  spec.kind = SamplerSpec::Kind::kMonteCarlo;
  spec.seed = config.seed + kTestSeedOffset;
  spec.dimension = modes;
  spec.count = config.num_samples;
  return generate(spec);
}

struct StreamOutcome {
  int rejected = 0;
  std::vector<LowRankCorrelation> states;
  std::unique_ptr<ExpectationField> expectation;
  std::vector<Eigen::MatrixXd> oracle_blocks;  // empty when the oracle is off
};

// Solves the training stream and feeds every accumulator in sample order.
StreamOutcome run_training_stream(const ExperimentSetup& setup,
                                  const KLExpansion* kl,
                                  const std::vector<Eigen::VectorXd>& parameters,
                                  const std::vector<int>& ranks, bool with_oracle,
                                  int workers) {
  const int n_dof = setup.dofmap.dimension();
  const int num_times = setup.scheme.snapshot_count;
  StreamOutcome outcome;
  for (int k : ranks) outcome.states.emplace_back(n_dof, num_times, k);
  outcome.expectation = std::make_unique<ExpectationField>(n_dof, num_times);
  if (with_oracle)
    outcome.oracle_blocks.assign(num_times, Eigen::MatrixXd::Zero(n_dof, n_dof));

  using Result = std::optional<Eigen::MatrixXd>;
  ordered_pipeline<Result>(
      static_cast<int>(parameters.size()), workers,
      [&](int index) -> Result {
        try {
          return solve_sample(setup, kl, parameters[index]).snapshots;
        } catch (const NumericalError&) {
          return std::nullopt;  // degenerate realization, rejected
        }
      },
      [&](int, Result result) {
        if (!result) {
          ++outcome.rejected;
          return;
        }
        outcome.expectation->add(*result);
        for (auto& state : outcome.states) state.update(*result);
        for (std::size_t t = 0; t < outcome.oracle_blocks.size(); ++t)
          outcome.oracle_blocks[t] +=
              result->col(t) * result->col(t).transpose();
      });

  const int accepted = static_cast<int>(parameters.size()) - outcome.rejected;
  if (accepted == 0) throw NumericalError("all samples were rejected");
  if (outcome.rejected * 100 > static_cast<int>(parameters.size()))
    throw NumericalError("more than 1% of the samples were rejected (" +
                         std::to_string(outcome.rejected) + ")");
  for (auto& block : outcome.oracle_blocks) block /= accepted;
  return outcome;
}

// Solves an independent stream and returns the accepted snapshot matrices.
std::vector<Eigen::MatrixXd> solve_stream(const ExperimentSetup& setup,
                                          const KLExpansion* kl,
                                          const std::vector<Eigen::VectorXd>& parameters,
                                          int workers, int* rejected) {
  std::vector<Eigen::MatrixXd> collected;
  collected.reserve(parameters.size());
  using Result = std::optional<Eigen::MatrixXd>;
  ordered_pipeline<Result>(
      static_cast<int>(parameters.size()), workers,
      [&](int index) -> Result {
        try {
          return solve_sample(setup, kl, parameters[index]).snapshots;
        } catch (const NumericalError&) {
          return std::nullopt;
        }
      },
      [&](int, Result result) {
        if (!result) {
          ++*rejected;
          return;
        }
        collected.push_back(std::move(*result));
      });
  if (collected.empty()) throw NumericalError("all test samples were rejected");
  return collected;
}

}  // namespace

void RunConfig::validate() const {
  if (degree < 1 || degree > 4)
    throw UsageError("degree must lie in [1,4]");
  if (level < 0 || level > 6) throw UsageError("level must lie in [0,6]");
  if (theta < 0.0 || theta > 1.0) throw UsageError("theta must lie in [0,1]");
  if (!(dt > 0.0)) throw UsageError("dt must be positive");
  if (!(t_final > 0.0)) throw UsageError("t-final must be positive");
  if (snapshots < 1) throw UsageError("need at least one snapshot");
  if (sampler != "mc" && sampler != "halton")
    throw UsageError("sampler must be 'mc' or 'halton'");
  if (num_samples < 1) throw UsageError("num-samples must be positive");
  if (!(kl_tol > 0.0)) throw UsageError("kl-tol must be positive");
  if (alpha < 0.0) throw UsageError("alpha must be nonnegative");
  if (ranks.empty()) throw UsageError("at least one rank is required");
  for (int k : ranks)
    if (k < 1) throw UsageError("ranks must be positive");
  if (workers < 1) throw UsageError("workers must be positive");
  if (oracle != "auto" && oracle != "on" && oracle != "off")
    throw UsageError("oracle must be 'auto', 'on', or 'off'");
  if (!(solver_tol > 0.0)) throw UsageError("solver tolerance must be positive");
  for (int l : levels)
    if (l < 0 || l > 6) throw UsageError("levels must lie in [0,6]");
  for (int p : degrees)
    if (p < 1 || p > 4) throw UsageError("degrees must lie in [1,4]");
  for (double a : alphas)
    if (a < 0.0) throw UsageError("alphas must be nonnegative");
}

ConvergenceResult run_convergence(const RunConfig& config) {
  config.validate();
  ConvergenceResult result;

  if (!config.dt_study.empty()) {
    // Temporal study at fixed space: errors against a fine-step reference.
    if (!(config.dt_reference > 0.0))
      throw UsageError("dt study requires a positive dt-reference");
    ExperimentSetup setup = make_setup(config);
    const MassStiffness ops = assemble_operators(setup.reference, setup.space,
                                                 setup.dofmap, setup.quad);
    const Eigen::VectorXd no_load = Eigen::VectorXd::Zero(setup.initial.size());
    auto solve_at = [&](double dt) {
      ThetaScheme scheme{config.theta, dt, config.t_final, 1};
      return evolve(ops.mass, ops.stiffness, setup.initial, no_load, scheme,
                    setup.solve)
          .snapshots.col(0);
    };
    const Eigen::VectorXd reference = solve_at(config.dt_reference);
    double previous_error = 0.0, previous_dt = 0.0;
    for (double dt : config.dt_study) {
      const Eigen::VectorXd diff = solve_at(dt) - reference;
      ConvergenceRow row;
      row.degree = config.degree;
      row.level = config.level;
      row.dt = dt;
      row.error = std::sqrt(diff.dot(ops.mass * diff));
      if (previous_dt > 0.0)
        row.order = std::log(previous_error / row.error) /
                    std::log(previous_dt / dt);
      previous_error = row.error;
      previous_dt = dt;
      result.rows.push_back(row);
    }
    auto out = open_output(config.out_dir, "dt_error.csv");
    out << "degree,level,dt,l2_error,order\n";
    for (const auto& row : result.rows)
      out << row.degree << "," << row.level << "," << row.dt << "," << row.error
          << "," << row.order << "\n";
    return result;
  }

  const MultipatchSurface reference_surface = make_geometry(config);
  const bool exact_mode = config.geometry == "sphere";
  std::vector<int> degrees = config.degrees.empty()
                                 ? std::vector<int>{config.degree}
                                 : config.degrees;

  for (int degree : degrees) {
    // Ground truth for geometries without a closed-form solution: the
    // finest-level discrete solution.
    int reference_level = 0;
    SplineSpace2D reference_space = SplineSpace2D::uniform(1, 0);
    std::unique_ptr<DofMap> reference_dofmap;
    Eigen::MatrixXd reference_snapshots;
    std::vector<double> snapshot_times;
    if (!exact_mode) {
      reference_level = *std::max_element(config.levels.begin(),
                                          config.levels.end()) + 1;
      RunConfig ref = config;
      ref.degree = degree;
      ref.level = reference_level;
      ExperimentSetup setup = make_setup(ref);
      const MassStiffness ops = assemble_operators(setup.reference, setup.space,
                                                   setup.dofmap, setup.quad);
      const Eigen::VectorXd load = assemble_load(setup.reference, setup.space,
                                                 setup.dofmap, setup.quad,
                                                 sine_source);
      const SampleTrajectory traj = evolve(ops.mass, ops.stiffness,
                                           setup.initial, load, setup.scheme,
                                           setup.solve);
      reference_space = setup.space;
      reference_dofmap = std::make_unique<DofMap>(setup.reference, setup.space);
      reference_snapshots = traj.snapshots;
      snapshot_times = traj.times;
    }

    double previous_error = 0.0;
    for (std::size_t li = 0; li < config.levels.size(); ++li) {
      const int level = config.levels[li];
      RunConfig local = config;
      local.degree = degree;
      local.level = level;
      ExperimentSetup setup = make_setup(local);
      const MassStiffness ops = assemble_operators(setup.reference, setup.space,
                                                   setup.dofmap, setup.quad);
      ConvergenceRow row;
      row.degree = degree;
      row.level = level;
      row.dt = config.dt;
      if (exact_mode) {
        const Eigen::VectorXd no_load = Eigen::VectorXd::Zero(setup.initial.size());
        const SampleTrajectory traj = evolve(ops.mass, ops.stiffness,
                                             setup.initial, no_load, setup.scheme,
                                             setup.solve);
        const double decay = std::exp(-2.0 * config.t_final);
        row.error = l2_error(
            setup.reference, setup.space, setup.dofmap,
            traj.snapshots.col(setup.scheme.snapshot_count - 1),
            SpatialField([decay](const Vec3& x) { return decay * x.z(); }),
            setup.quad);
      } else {
        const Eigen::VectorXd load = assemble_load(setup.reference, setup.space,
                                                   setup.dofmap, setup.quad,
                                                   sine_source);
        const SampleTrajectory traj = evolve(ops.mass, ops.stiffness,
                                             setup.initial, load, setup.scheme,
                                             setup.solve);
        // Average L2 distance to the fine solution over the snapshot grid.
        double total = 0.0;
        const QuadratureRule fine_quad(degree + 1);
        for (int t = 0; t < setup.scheme.snapshot_count; ++t) {
          const Eigen::VectorXd coarse = traj.snapshots.col(t);
          ParametricField coarse_field = [&](int patch, double u, double v) {
            return evaluate_field(setup.space, setup.dofmap, coarse, patch, u, v);
          };
          RunConfig ref = config;
          ref.degree = degree;
          ref.level = reference_level;
          total += l2_error(make_geometry(ref), reference_space,
                            *reference_dofmap, reference_snapshots.col(t),
                            coarse_field, fine_quad);
        }
        row.error = total / setup.scheme.snapshot_count;
      }
      if (li > 0) row.order = std::log2(previous_error / row.error);
      previous_error = row.error;
      result.rows.push_back(row);
    }
  }

  auto out = open_output(config.out_dir, "l2_error.csv");
  out << "degree,level,l2_error,order\n";
  for (const auto& row : result.rows)
    out << row.degree << "," << row.level << "," << row.error << "," << row.order
        << "\n";
  return result;
}

UqResult run_uq(const RunConfig& config) {
  config.validate();
  ExperimentSetup setup = make_setup(config);
  const int n_dof = setup.dofmap.dimension();

  KLExpansion kl = build_kl(setup.reference, setup.space, setup.dofmap,
                            CovarianceKernel::gaussian(
                                config.kernel.sigma2, config.kernel.gamma_diag,
                                config.kernel.gamma_cross,
                                config.kernel.cross_scale),
                            config.kl_tol);
  kl.set_amplitude(config.alpha);

  const auto train = training_parameters(config, kl.num_modes());
  const bool with_oracle = oracle_enabled(config, n_dof);
  std::vector<int> ranks = config.ranks;
  std::sort(ranks.begin(), ranks.end());

  StreamOutcome outcome = run_training_stream(setup, &kl, train, ranks,
                                              with_oracle, config.workers);

  UqResult result;
  result.n_dof = n_dof;
  result.kl_modes = kl.num_modes();
  result.rejected = outcome.rejected;
  result.ranks = ranks;
  result.snapshot_times = setup.scheme.snapshot_times();
  result.expectation = outcome.expectation->mean();

  for (std::size_t s = 0; s < outcome.states.size(); ++s)
    result.e_frobenius.push_back(
        with_oracle ? outcome.states[s].frobenius_error(outcome.oracle_blocks)
                    : std::numeric_limits<double>::quiet_NaN());

  int test_rejected = 0;
  const auto test = test_parameters(config, kl.num_modes());
  const auto fresh = solve_stream(setup, &kl, test, config.workers, &test_rejected);
  for (auto& state : outcome.states)
    result.e_l2.push_back(state.generalization_error(fresh));

  const LowRankCorrelation& best = outcome.states.back();
  const PointEvaluator evaluator(setup.reference, setup.space, setup.dofmap);
  result.stddev = std_field(*outcome.expectation, best, evaluator);

  int n_pc = 5;
  for (int i = 0; i < best.num_times(); ++i) n_pc = std::min(n_pc, best.rank(i));
  if (n_pc >= 1)
    for (int i = 0; i < best.num_times(); ++i)
      for (int j = i; j < best.num_times(); ++j)
        result.principal[{i, j}] = best.principal_correlation(i, j, n_pc);

  // -- file emission ---------------------------------------------------------
  if (with_oracle) {
    auto out = open_output(config.out_dir, "convergence.csv");
    out << "k,e_F\n";
    for (std::size_t s = 0; s < ranks.size(); ++s)
      out << ranks[s] << "," << result.e_frobenius[s] << "\n";
  }
  {
    auto out = open_output(config.out_dir, "generalization.csv");
    out << "k,e_l2\n";
    for (std::size_t s = 0; s < ranks.size(); ++s)
      out << ranks[s] << "," << result.e_l2[s] << "\n";
  }
  if (!result.principal.empty()) {
    auto out = open_output(config.out_dir, "principal_correlation.csv");
    out << "time_i,time_j,component_a,component_b,value\n";
    for (const auto& [key, block] : result.principal)
      for (int a = 0; a < block.rows(); ++a)
        for (int b = 0; b < block.cols(); ++b)
          out << key.first << "," << key.second << "," << a << "," << b << ","
              << block(a, b) << "\n";
  }
  {
    const int last = setup.scheme.snapshot_count - 1;
    write_vtk_field(config.out_dir + "/expectation.vtk", setup.reference,
                    setup.space, setup.dofmap, result.expectation.col(last),
                    "expectation");
    const Eigen::VectorXd std_coeffs = interpolate_point_values(
        setup.reference, setup.space, setup.dofmap, result.stddev.col(last));
    write_vtk_field(config.out_dir + "/stddev.vtk", setup.reference, setup.space,
                    setup.dofmap, std_coeffs, "stddev");
  }
  {
    auto out = open_output(config.out_dir, "summary.txt");
    out << "geometry " << config.geometry << "\n"
        << "degree " << config.degree << "\n"
        << "level " << config.level << "\n"
        << "n_dof " << n_dof << "\n"
        << "kl_modes " << kl.num_modes() << "\n"
        << "kl_trace_residual " << kl.trace_residual() << "\n"
        << "sampler " << config.sampler << "\n"
        << "seed " << config.seed << "\n"
        << "num_samples " << config.num_samples << "\n"
        << "alpha " << config.alpha << "\n"
        << "rejected " << outcome.rejected << "\n"
        << "test_rejected " << test_rejected << "\n";
  }
  return result;
}

StabilityResult run_stability(const RunConfig& config) {
  config.validate();
  ExperimentSetup setup = make_setup(config);
  const int n_dof = setup.dofmap.dimension();

  KLExpansion kl = build_kl(setup.reference, setup.space, setup.dofmap,
                            CovarianceKernel::gaussian(
                                config.kernel.sigma2, config.kernel.gamma_diag,
                                config.kernel.gamma_cross,
                                config.kernel.cross_scale),
                            config.kl_tol);
  const int rank = *std::max_element(config.ranks.begin(), config.ranks.end());
  const bool with_oracle = oracle_enabled(config, n_dof);
  const double diameter = setup.reference.diameter();

  StabilityResult result;
  for (double alpha : config.alphas) {
    kl.set_amplitude(alpha);
    const auto train = training_parameters(config, kl.num_modes());
    StreamOutcome outcome = run_training_stream(setup, &kl, train, {rank},
                                                with_oracle, config.workers);
    int test_rejected = 0;
    const auto test = test_parameters(config, kl.num_modes());
    const auto fresh =
        solve_stream(setup, &kl, test, config.workers, &test_rejected);

    StabilityRow row;
    row.alpha = alpha;
    if (with_oracle)
      row.e_frobenius = outcome.states[0].frobenius_error(outcome.oracle_blocks);
    row.e_l2 = outcome.states[0].generalization_error(fresh);
    for (const auto& y : train)
      row.max_displacement =
          std::max(row.max_displacement, kl.max_relative_displacement(y, diameter));
    result.rows.push_back(row);
  }

  if (with_oracle) {
    auto out = open_output(config.out_dir, "stability_cov.csv");
    out << "alpha,e_F\n";
    for (const auto& row : result.rows)
      out << row.alpha << "," << row.e_frobenius << "\n";
  }
  {
    auto out = open_output(config.out_dir, "stability_gen.csv");
    out << "alpha,e_l2\n";
    for (const auto& row : result.rows)
      out << row.alpha << "," << row.e_l2 << "\n";
  }
  {
    auto out = open_output(config.out_dir, "stability_disp.csv");
    out << "alpha,max_relative_displacement\n";
    for (const auto& row : result.rows)
      out << row.alpha << "," << row.max_displacement << "\n";
  }
  return result;
}

void run_info(const RunConfig& config, std::ostream& out) {
  config.validate();
  const MultipatchSurface surface = make_geometry(config);
  const SplineSpace2D space = SplineSpace2D::uniform(config.degree, config.level);
  const DofMap dofmap(surface, space);
  const auto box = surface.bounding_box();
  out << "geometry: " << config.geometry << "\n"
      << "patches: " << surface.num_patches() << "\n"
      << "closed: " << (surface.is_closed() ? "yes" : "no") << "\n"
      << "bounding box: [" << box.min().transpose() << "] .. ["
      << box.max().transpose() << "]\n"
      << "degree: " << config.degree << "\n"
      << "level: " << config.level << "\n"
      << "basis per direction: " << space.per_direction() << "\n"
      << "dofs: " << dofmap.dimension() << "\n";
}

// ---------------------------------------------------------------------------
// Configuration parsing

namespace {

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int result = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return result;
  } catch (const std::exception&) {
    throw UsageError("config: bad integer for '" + key + "': " + value);
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double result = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return result;
  } catch (const std::exception&) {
    throw UsageError("config: bad number for '" + key + "': " + value);
  }
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
  std::vector<int> result;
  for (const auto& item : split_list(value)) result.push_back(to_int(key, item));
  if (result.empty()) throw UsageError("config: empty list for '" + key + "'");
  return result;
}

std::vector<double> to_double_list(const std::string& key,
                                   const std::string& value) {
  std::vector<double> result;
  for (const auto& item : split_list(value))
    result.push_back(to_double(key, item));
  if (result.empty()) throw UsageError("config: empty list for '" + key + "'");
  return result;
}

}  // namespace

RunConfig parse_config(const std::map<std::string, std::string>& pairs,
                       RunConfig base) {
  for (const auto& [key, value] : pairs) {
    if (key == "geometry") base.geometry = value;
    else if (key == "degree") base.degree = to_int(key, value);
    else if (key == "level") base.level = to_int(key, value);
    else if (key == "theta") base.theta = to_double(key, value);
    else if (key == "dt") base.dt = to_double(key, value);
    else if (key == "t_final") base.t_final = to_double(key, value);
    else if (key == "snapshots") base.snapshots = to_int(key, value);
    else if (key == "sampler") base.sampler = value;
    else if (key == "seed") base.seed = static_cast<std::uint64_t>(
        std::stoull(value));
    else if (key == "num_samples") base.num_samples = to_int(key, value);
    else if (key == "kl_tol") base.kl_tol = to_double(key, value);
    else if (key == "alpha") base.alpha = to_double(key, value);
    else if (key == "ranks") base.ranks = to_int_list(key, value);
    else if (key == "alphas") base.alphas = to_double_list(key, value);
    else if (key == "levels") base.levels = to_int_list(key, value);
    else if (key == "degrees") base.degrees = to_int_list(key, value);
    else if (key == "dt_study") base.dt_study = to_double_list(key, value);
    else if (key == "dt_reference") base.dt_reference = to_double(key, value);
    else if (key == "out") base.out_dir = value;
    else if (key == "workers") base.workers = to_int(key, value);
    else if (key == "oracle") base.oracle = value;
    else if (key == "solver_tol") base.solver_tol = to_double(key, value);
    else if (key == "kernel.sigma2") base.kernel.sigma2 = to_double(key, value);
    else if (key == "kernel.gamma_diag")
      base.kernel.gamma_diag = to_double(key, value);
    else if (key == "kernel.gamma_cross")
      base.kernel.gamma_cross = to_double(key, value);
    else if (key == "kernel.cross_scale")
      base.kernel.cross_scale = to_double(key, value);
    else
      throw UsageError("config: unknown key '" + key + "'");
  }
  return base;
}

void apply_config_file(const std::string& path,
                       const std::map<std::string, std::string>& overrides,
                       RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::map<std::string, std::string> pairs;
  std::string line;
  while (std::getline(in, line)) {
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const auto equals = line.find('=');
    if (equals == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto begin = s.find_first_not_of(" \t\r");
      const auto end = s.find_last_not_of(" \t\r");
      return begin == std::string::npos ? std::string()
                                        : s.substr(begin, end - begin + 1);
    };
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (!key.empty()) pairs[key] = value;
  }
  for (const auto& [key, value] : overrides) pairs[key] = value;
  config = parse_config(pairs, config);
}

// ---------------------------------------------------------------------------
// Field output

void write_vtk_field(const std::string& path, const MultipatchSurface& surface,
                     const SplineSpace2D& space, const DofMap& dofmap,
                     const Eigen::VectorXd& coeffs, const std::string& name,
                     int samples_per_patch) {
  const int n = samples_per_patch;
  if (n < 2) throw UsageError("vtk output needs at least two samples per patch");
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write field file: " + path);
  out << std::setprecision(9);

  const int points_per_patch = n * n;
  const int cells_per_patch = (n - 1) * (n - 1);
  const int num_points = surface.num_patches() * points_per_patch;
  const int num_cells = surface.num_patches() * cells_per_patch;

  out << "# vtk DataFile Version 3.0\n"
      << name << "\nASCII\nDATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << num_points << " double\n";
  for (int p = 0; p < surface.num_patches(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec3 x = surface.patch(p).evaluate(
            static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1));
        out << x.x() << " " << x.y() << " " << x.z() << "\n";
      }
  out << "CELLS " << num_cells << " " << 5 * num_cells << "\n";
  for (int p = 0; p < surface.num_patches(); ++p) {
    const int base = p * points_per_patch;
    for (int i = 0; i + 1 < n; ++i)
      for (int j = 0; j + 1 < n; ++j)
        out << "4 " << base + i * n + j << " " << base + (i + 1) * n + j << " "
            << base + (i + 1) * n + j + 1 << " " << base + i * n + j + 1 << "\n";
  }
  out << "CELL_TYPES " << num_cells << "\n";
  for (int c = 0; c < num_cells; ++c) out << "9\n";
  out << "POINT_DATA " << num_points << "\nSCALARS " << name
      << " double 1\nLOOKUP_TABLE default\n";
  for (int p = 0; p < surface.num_patches(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out << evaluate_field(space, dofmap, coeffs, p,
                              static_cast<double>(i) / (n - 1),
                              static_cast<double>(j) / (n - 1))
            << "\n";
}

}  // namespace surfuq
