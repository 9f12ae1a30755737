// This file is part of surfuq, a solver for diffusion problems on randomly
// deformed multipatch spline surfaces. Distributed under the Apache License,
// Version 2.0; see <http://www.apache.org/licenses/LICENSE-2.0>.
#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>

#include "surfuq/runner.hpp"

namespace {

// Flags are collected as strings; only flags the user actually set override
// the config file, which in turn overrides the built-in defaults.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::string config_path;

  void add_common(CLI::App* cmd) {
    auto capture = [this](const std::string& key) {
      return [this, key](const std::string& value) { values[key] = value; };
    };
    cmd->add_option_function<std::string>("--geometry", capture("geometry"),
                                          "builtin name (sphere, pipe) or geometry file");
    cmd->add_option_function<std::string>("--degree", capture("degree"),
                                          "spline degree p");
    cmd->add_option_function<std::string>("--level", capture("level"),
                                          "refinement level j");
    cmd->add_option_function<std::string>("--theta", capture("theta"),
                                          "time scheme parameter");
    cmd->add_option_function<std::string>("--dt", capture("dt"), "time step");
    cmd->add_option_function<std::string>("--t-final", capture("t_final"),
                                          "final time T");
    cmd->add_option_function<std::string>("--snapshots", capture("snapshots"),
                                          "number of snapshot times");
    cmd->add_option_function<std::string>("--sampler", capture("sampler"),
                                          "mc or halton");
    cmd->add_option_function<std::string>("--seed", capture("seed"),
                                          "Monte Carlo seed");
    cmd->add_option_function<std::string>("--num-samples", capture("num_samples"),
                                          "sample count N_q");
    cmd->add_option_function<std::string>("--kl-tol", capture("kl_tol"),
                                          "pivoted Cholesky tolerance");
    cmd->add_option_function<std::string>("--alpha", capture("alpha"),
                                          "deformation amplitude");
    cmd->add_option_function<std::string>("--rank", capture("ranks"),
                                          "rank cap(s), comma separated");
    cmd->add_option_function<std::string>("--alphas", capture("alphas"),
                                          "amplitude grid for stability runs");
    cmd->add_option_function<std::string>("--levels", capture("levels"),
                                          "level list for convergence runs");
    cmd->add_option_function<std::string>("--degrees", capture("degrees"),
                                          "degree list for convergence runs");
    cmd->add_option_function<std::string>("--dt-study", capture("dt_study"),
                                          "dt list for the temporal study");
    cmd->add_option_function<std::string>("--dt-reference", capture("dt_reference"),
                                          "reference dt for the temporal study");
    cmd->add_option_function<std::string>("--out", capture("out"),
                                          "output directory");
    cmd->add_option_function<std::string>("--workers", capture("workers"),
                                          "worker thread count");
    cmd->add_option_function<std::string>("--oracle", capture("oracle"),
                                          "dense correlation oracle: auto, on, off");
    cmd->add_option_function<std::string>("--solver-tol", capture("solver_tol"),
                                          "CG relative tolerance");
    cmd->add_option_function<std::string>("--kernel-sigma2",
                                          capture("kernel.sigma2"),
                                          "covariance scale sigma^2");
    cmd->add_option_function<std::string>("--kernel-gamma-diag",
                                          capture("kernel.gamma_diag"),
                                          "diagonal Gaussian decay rate");
    cmd->add_option_function<std::string>("--kernel-gamma-cross",
                                          capture("kernel.gamma_cross"),
                                          "cross-coupling decay rate");
    cmd->add_option_function<std::string>("--kernel-cross-scale",
                                          capture("kernel.cross_scale"),
                                          "cross-coupling scale");
    cmd->add_option("--config", config_path, "key=value configuration file");
  }

  surfuq::RunConfig build() const {
    surfuq::RunConfig config;
    if (!config_path.empty())
      surfuq::apply_config_file(config_path, values, config);
    else
      config = surfuq::parse_config(values, config);
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffusion on randomly deformed multipatch spline surfaces"};
  app.require_subcommand(1);

  FlagSet convergence_flags, uq_flags, stability_flags, info_flags;
  CLI::App* convergence =
      app.add_subcommand("convergence", "deterministic convergence studies");
  convergence_flags.add_common(convergence);
  CLI::App* uq = app.add_subcommand(
      "uq", "sampled expectation, deviation, and low-rank correlation");
  uq_flags.add_common(uq);
  CLI::App* stability =
      app.add_subcommand("stability", "metrics over a deformation amplitude grid");
  stability_flags.add_common(stability);
  CLI::App* info = app.add_subcommand("info", "geometry and discretization facts");
  info_flags.add_common(info);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (convergence->parsed())
      surfuq::run_convergence(convergence_flags.build());
    else if (uq->parsed())
      surfuq::run_uq(uq_flags.build());
    else if (stability->parsed())
      surfuq::run_stability(stability_flags.build());
    else if (info->parsed())
      surfuq::run_info(info_flags.build(), std::cout);
  } catch (const surfuq::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const surfuq::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
