#include "divclust/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "divclust/clustering.hpp"
#include "divclust/metrics.hpp"
#include "divclust/trainer.hpp"
#include "text_io.hpp"

namespace divclust {

using nlohmann::json;

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::subspaces: return "subspaces";
    case SweepAxis::missing_rate: return "missing-rate";
  }
  return "none";
}

void RunSpec::validate() const {
  if (data_path.has_value() == synth.has_value())
    throw ConfigError("give exactly one data source (a dataset directory or synthetic parameters)");
  if (synth) synth->validate();
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ConfigError("missing rate must lie in [0, 1)");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (sweep.axis != SweepAxis::none && sweep.values.empty())
    throw ConfigError("sweep over " + std::string(to_string(sweep.axis)) + " has no values");
  if (sweep.axis == SweepAxis::none && !sweep.values.empty())
    throw ConfigError("sweep values given without an axis");
  for (double x : sweep.values) {
    if (!std::isfinite(x)) throw ConfigError("sweep values must be finite");
    if (sweep.axis == SweepAxis::subspaces && (x < 1 || x != std::floor(x)))
      throw ConfigError("subspace sweep values must be positive integers");
    if (sweep.axis == SweepAxis::lambda && x < 0) throw ConfigError("lambda sweep values must be >= 0");
    if (sweep.axis == SweepAxis::missing_rate && !(x >= 0 && x < 1))
      throw ConfigError("missing-rate sweep values must lie in [0, 1)");
  }
  train.validate();
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(detail::trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view field, std::string_view what) {
  T value{};
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size())
    throw ConfigError(std::string(what) + ": cannot parse '" + std::string(field) + "'");
  return value;
}

}  // namespace

DualStructureParams parse_synth(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 5)
    throw ConfigError("synthetic spec must be N,Ka,Kb,d1:d2:...,sigma, got '" + std::string(text) + "'");
  DualStructureParams p;
  p.instances = parse_number<Index>(parts[0], "synthetic N");
  p.clusters_a = parse_number<int>(parts[1], "synthetic Ka");
  p.clusters_b = parse_number<int>(parts[2], "synthetic Kb");
  p.view_dims.clear();
  for (auto d : split(parts[3], ':')) p.view_dims.push_back(parse_number<Index>(d, "synthetic view dimension"));
  p.sigma = parse_number<double>(parts[4], "synthetic sigma");
  p.validate();
  return p;
}

Sweep parse_sweep(std::string_view text) {
  text = detail::trim(text);
  if (text.empty() || text == "none") return {};
  const std::size_t eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("sweep must look like axis=v1,v2,...");
  const std::string_view name = detail::trim(text.substr(0, eq));
  Sweep sweep;
  if (name == "lambda") {
    sweep.axis = SweepAxis::lambda;
  } else if (name == "subspaces") {
    sweep.axis = SweepAxis::subspaces;
  } else if (name == "missing-rate") {
    sweep.axis = SweepAxis::missing_rate;
  } else {
    throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
  }
  for (auto v : split(text.substr(eq + 1), ',')) sweep.values.push_back(parse_number<double>(v, "sweep value"));
  return sweep;
}

namespace {

struct Point {
  std::optional<double> value;
  TrainConfig train;
  double missing_rate;
};

std::vector<Point> sweep_points(const RunSpec& spec) {
  if (spec.sweep.axis == SweepAxis::none) return {{std::nullopt, spec.train, spec.missing_rate}};
  std::vector<Point> points;
  for (double x : spec.sweep.values) {
    Point p{x, spec.train, spec.missing_rate};
    switch (spec.sweep.axis) {
      case SweepAxis::lambda: p.train.lambda = x; break;
      case SweepAxis::subspaces: p.train.subspaces = static_cast<Index>(x); break;
      case SweepAxis::missing_rate: p.missing_rate = x; break;
      case SweepAxis::none: break;
    }
    points.push_back(p);
  }
  return points;
}

json config_json(const TrainConfig& c) {
  json j{{"lambda", c.lambda},
         {"alpha", c.alpha},
         {"subspaces", c.subspaces},
         {"dim", c.dim},
         {"learning_rate", c.learning_rate},
         {"max_epochs", c.max_epochs},
         {"tol", c.tol},
         {"seed", c.seed},
         {"clusters", c.clusters},
         {"kmeans_restarts", c.kmeans_restarts},
         {"inner_steps", c.inner_steps},
         {"init_scale", c.init_scale}};
  j["hidden_dim"] = c.hidden_dim ? json(*c.hidden_dim) : json(nullptr);
  j["step_rule"] = c.step_rule == StepRule::fixed          ? "fixed"
                   : c.step_rule == StepRule::backtracking ? "backtracking"
                                                           : "quasi_newton";
  return j;
}

struct Stats {
  std::vector<double> xs;
  void add(double x) { xs.push_back(x); }
  double mean() const {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  }
  // Sample standard deviation; 0 for a single run.
  double stddev() const {
    if (xs.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
  }
};

struct PointStats {
  std::optional<double> value;
  int runs = 0;
  Stats sc, di, nmi, jc, rate, epochs;
};

void append_field(std::string& out, const Stats& s, bool with_std) {
  out += ',';
  if (!s.xs.empty()) detail::append_number(out, s.mean());
  if (!with_std) return;
  out += ',';
  if (!s.xs.empty()) detail::append_number(out, s.stddev());
}

std::string aggregate_csv(SweepAxis axis, const std::vector<PointStats>& points) {
  std::string out =
      "axis,value,runs,sc_mean,sc_std,di_mean,di_std,nmi_mean,nmi_std,jc_mean,jc_std,"
      "missing_rate_mean,epochs_mean\n";
  for (const PointStats& p : points) {
    out += to_string(axis);
    out += ',';
    if (p.value) detail::append_number(out, *p.value);
    out += ',' + std::to_string(p.runs);
    append_field(out, p.sc, true);
    append_field(out, p.di, true);
    append_field(out, p.nmi, true);
    append_field(out, p.jc, true);
    append_field(out, p.rate, false);
    append_field(out, p.epochs, false);
    out += '\n';
  }
  return out;
}

MultiViewDataset base_dataset(const RunSpec& spec) {
  if (spec.data_path) return load_dataset(*spec.data_path, {.standardize = false});
  return make_dual_structure(*spec.synth).dataset;
}

}  // namespace

RunSummary run(const RunSpec& spec) {
  spec.validate();
  const MultiViewDataset raw = base_dataset(spec);
  const auto points = sweep_points(spec);
  for (const Point& p : points) p.train.validate();

  const std::filesystem::path runs_dir = spec.out_dir / "runs";
  std::error_code ec;
  std::filesystem::create_directories(runs_dir, ec);
  if (ec) throw IoError("cannot create " + runs_dir.string() + ": " + ec.message());

  RunSummary summary;
  summary.aggregate_csv = spec.out_dir / "aggregate.csv";
  std::vector<PointStats> stats;

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Point& point = points[pi];
    PointStats ps;
    ps.value = point.value;
    for (int r = 0; r < spec.repeats; ++r) {
      // Repeats share seeds across sweep points, so points differ only in the swept value.
      const std::uint64_t run_seed = derive_seed(spec.train.seed, static_cast<std::uint64_t>(r));
      TrainConfig config = point.train;
      config.seed = run_seed;

      MultiViewDataset data = point.missing_rate > 0.0
                                  ? erase_views(raw, point.missing_rate, derive_seed(run_seed, 1))
                                  : raw;
      if (spec.standardize) data = standardize(data);

      const TrainState state = fit(data, config);
      const auto labelings = generate_clusterings(state.subspaces, static_cast<int>(config.clusters),
                                                  derive_seed(run_seed, 2),
                                                  KMeansOptions{.restarts = config.kmeans_restarts});
      const MetricsReport report = evaluate(state.subspaces, labelings);
      const double achieved = missing_rate(data.mask());

      json j;
      j["sweep"] = {{"axis", to_string(spec.sweep.axis)},
                    {"value", point.value ? json(*point.value) : json(nullptr)}};
      j["repeat"] = r;
      j["config"] = config_json(config);
      j["target_missing_rate"] = point.missing_rate;
      j["achieved_missing_rate"] = achieved;
      j["epochs"] = state.epoch;
      j["converged"] = state.converged;
      j["initial_loss"] = state.initial_loss;
      j["loss_history"] = state.loss_history;
      j["metrics"] = json::parse(to_json(report));
      json labels = json::array();
      for (const Labeling& l : labelings) labels.push_back(l.labels);
      j["labelings"] = labels;
      json mask = json::array();
      for (Index v = 0; v < data.view_count(); ++v) {
        std::vector<int> row(static_cast<std::size_t>(data.instance_count()));
        for (Index i = 0; i < data.instance_count(); ++i) row[static_cast<std::size_t>(i)] = data.observed(v, i);
        mask.push_back(row);
      }
      j["mask"] = mask;

      const auto file = runs_dir / ("point" + std::to_string(pi) + "_rep" + std::to_string(r) + ".json");
      detail::write_text_atomic(file, j.dump(2) + "\n");
      summary.run_files.push_back(file);

      ++ps.runs;
      ps.sc.add(report.mean_silhouette);
      ps.di.add(report.mean_dunn);
      if (report.mean_nmi) ps.nmi.add(*report.mean_nmi);
      if (report.mean_jaccard) ps.jc.add(*report.mean_jaccard);
      ps.rate.add(achieved);
      ps.epochs.add(state.epoch);
    }
    stats.push_back(std::move(ps));
    detail::write_text_atomic(summary.aggregate_csv, aggregate_csv(spec.sweep.axis, stats));
  }
  return summary;
}

std::string report_plot_data(const std::filesystem::path& run_dir) {
  const std::filesystem::path runs_dir = run_dir / "runs";
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (std::filesystem::directory_iterator it(runs_dir, ec), end; !ec && it != end; it.increment(ec))
    if (it->path().extension() == ".json") files.push_back(it->path());
  if (files.empty()) throw IoError("no run reports under " + runs_dir.string());
  std::sort(files.begin(), files.end());

  // Rows without a sweep value (single-point runs) sort first.
  std::map<std::optional<double>, std::pair<Stats, Stats>> groups;
  for (const auto& file : files) {
    json j;
    try {
      j = json::parse(detail::read_text(file));
      const json& value = j.at("sweep").at("value");
      const std::optional<double> key = value.is_null() ? std::nullopt : std::optional(value.get<double>());
      const json& metrics = j.at("metrics");
      auto& [sc, div] = groups[key];
      sc.add(metrics.at("mean_silhouette").get<double>());
      if (!metrics.at("mean_nmi").is_null()) div.add(1.0 - metrics.at("mean_nmi").get<double>());
    } catch (const json::exception& e) {
      throw ParseError(file.string() + ": " + e.what());
    }
  }

  std::string out = "value,sc_mean,diversity_mean\n";
  for (const auto& [key, s] : groups) {
    if (key) detail::append_number(out, *key);
    append_field(out, s.first, false);
    append_field(out, s.second, false);
    out += '\n';
  }
  return out;
}

}  // namespace divclust
