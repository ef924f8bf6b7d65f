#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "divclust/runner.hpp"
#include "divclust/synth.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kDivergence = 3, kIo = 4 };

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "divclust: " << kind << ": " << e.what() << "\n";
  return code;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    return kOk;
  } catch (const divclust::DivergenceError& e) {
    return report("divergence", e, kDivergence);
  } catch (const divclust::ConfigError& e) {
    return report("config error", e, kConfig);
  } catch (const divclust::InfeasibleError& e) {
    return report("config error", e, kConfig);
  } catch (const divclust::IoError& e) {
    return report("io error", e, kIo);
  } catch (const divclust::ParseError& e) {
    return report("parse error", e, kIo);
  } catch (const divclust::Error& e) {
    return report("error", e, kOther);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diverse multiple clusterings of multi-view data with missing views"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file; keys of 'run' go in a [run] section, flags win");

  divclust::RunSpec spec;
  std::string data;
  std::string synth;
  std::string sweep = "none";
  std::string step_rule = "backtracking";
  int hidden = 0;
  bool no_standardize = false;

  auto* run = app.add_subcommand("run", "fit, cluster and evaluate; writes per-run JSON and aggregate.csv");
  run->add_option("--data", data, "dataset directory (view_<v>.csv, mask.csv, meta.json)");
  run->add_option("--synth", synth, "planted dataset N,Ka,Kb,d1:d2:...,sigma");
  run->add_option("--missing-rate", spec.missing_rate, "fraction of (view, instance) cells to erase");
  run->add_option("--lambda", spec.train.lambda, "diversity weight")->capture_default_str();
  run->add_option("--alpha", spec.train.alpha, "l1 sparsity weight")->capture_default_str();
  run->add_option("--subspaces", spec.train.subspaces, "number of subspaces / clusterings")->capture_default_str();
  run->add_option("--dim", spec.train.dim, "subspace dimension")->capture_default_str();
  run->add_option("--clusters", spec.train.clusters, "clusters per clustering")->capture_default_str();
  run->add_option("--lr", spec.train.learning_rate, "step size (first trial step for line searches)")
      ->capture_default_str();
  run->add_option("--epochs", spec.train.max_epochs, "maximum epochs")->capture_default_str();
  run->add_option("--tol", spec.train.tol, "relative loss change treated as converged")->capture_default_str();
  run->add_option("--seed", spec.train.seed, "base seed")->capture_default_str();
  run->add_option("--repeats", spec.repeats, "runs per sweep point")->capture_default_str();
  run->add_option("--sweep", sweep, "none, or lambda=..., subspaces=..., missing-rate=...")
      ->capture_default_str();
  run->add_option("--out", spec.out_dir, "output directory")->capture_default_str();
  run->add_option("--step-rule", step_rule, "fixed, backtracking or quasi-newton")
      ->check(CLI::IsMember({"fixed", "backtracking", "quasi-newton"}))
      ->capture_default_str();
  run->add_option("--inner-steps", spec.train.inner_steps, "steps per block per epoch")->capture_default_str();
  run->add_option("--hidden", hidden, "decoder hidden width (0 = max(dim, ceil(d_v / 2)))");
  run->add_option("--init-scale", spec.train.init_scale, "std of initial subspace entries")
      ->capture_default_str();
  run->add_option("--restarts", spec.train.kmeans_restarts, "k-means restarts")->capture_default_str();
  run->add_flag("--no-standardize", no_standardize, "skip per-view z-scoring");

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot-data", "print (sweep value, mean SC, mean 1-NMI) CSV for a run directory");
  plot->add_option("run_dir", plot_dir, "directory written by 'run'")->required();

  std::string synth_out;
  std::string synth_params = "200,3,2,10:12,0.05";
  std::uint64_t synth_seed = 0;
  auto* gen = app.add_subcommand("synth", "write a planted dual-structure dataset directory");
  gen->add_option("--params", synth_params, "N,Ka,Kb,d1:d2:...,sigma")->capture_default_str();
  gen->add_option("--seed", synth_seed, "seed")->capture_default_str();
  gen->add_option("--out", synth_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*run) {
    return guarded([&] {
      if (!data.empty()) spec.data_path = data;
      if (!synth.empty()) {
        spec.synth = divclust::parse_synth(synth);
        spec.synth->seed = spec.train.seed;
      }
      spec.sweep = divclust::parse_sweep(sweep);
      spec.standardize = !no_standardize;
      if (hidden > 0) spec.train.hidden_dim = hidden;
      static const std::map<std::string, divclust::StepRule> rules{
          {"fixed", divclust::StepRule::fixed},
          {"backtracking", divclust::StepRule::backtracking},
          {"quasi-newton", divclust::StepRule::quasi_newton}};
      spec.train.step_rule = rules.at(step_rule);
      const auto summary = divclust::run(spec);
      std::cout << summary.run_files.size() << " runs; aggregate written to "
                << summary.aggregate_csv.string() << "\n";
    });
  }
  if (*plot) {
    return guarded([&] { std::cout << divclust::report_plot_data(plot_dir); });
  }
  return guarded([&] {
    auto params = divclust::parse_synth(synth_params);
    params.seed = synth_seed;
    divclust::save_planted(synth_out, divclust::make_dual_structure(params));
  });
}
