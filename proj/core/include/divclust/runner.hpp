#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divclust/objective.hpp"
#include "divclust/synth.hpp"

namespace divclust {

enum class SweepAxis { none, lambda, subspaces, missing_rate };

std::string_view to_string(SweepAxis axis);

struct Sweep {
  SweepAxis axis = SweepAxis::none;
  std::vector<double> values;
};

struct RunSpec {
  // Exactly one of the two sources.
  std::optional<std::filesystem::path> data_path;
  std::optional<DualStructureParams> synth;

  double missing_rate = 0.0;  // erasure target; 0 leaves the mask as loaded
  bool standardize = true;
  TrainConfig train;
  std::filesystem::path out_dir = "divclust-out";
  Sweep sweep;
  int repeats = 1;

  /// Throws ConfigError.
  void validate() const;
};

/// "N,Ka,Kb,d1:d2:...,sigma", e.g. "200,3,2,10:12,0.05".
DualStructureParams parse_synth(std::string_view text);

/// "none", or "<axis>=v1,v2,..." with axis one of lambda, subspaces,
/// missing-rate. Values are kept in the given order.
Sweep parse_sweep(std::string_view text);

struct RunSummary {
  std::filesystem::path aggregate_csv;
  std::vector<std::filesystem::path> run_files;
};

/// For every sweep point and repeat: build the dataset, erase, standardize,
/// fit, cluster, evaluate. Writes runs/point<p>_rep<r>.json and rewrites
/// aggregate.csv after each completed point, so an error part-way leaves
/// the finished points on disk. Errors propagate after that.
RunSummary run(const RunSpec& spec);

/// Reads <run_dir>/runs/*.json and returns CSV text with one row per sweep
/// value, ascending: value, mean silhouette, mean (1 - NMI).
/// Throws IoError if there are no run files.
std::string report_plot_data(const std::filesystem::path& run_dir);

}  // namespace divclust
