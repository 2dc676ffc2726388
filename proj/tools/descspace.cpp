#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "descspace/errors.hpp"
#include "descspace/infotheory.hpp"
#include "descspace/io.hpp"
#include "descspace/numeric.hpp"
#include "descspace/sampling.hpp"
#include "descspace/svg.hpp"
#include "descspace/trainer.hpp"

namespace fs = std::filesystem;
using descspace::Error;
using descspace::io::Json;

namespace {

std::string bits4(double v) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "%.4f", v);
  return buffer;
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  return (fs::path(out_dir) / name).string();
}

descspace::io::Snapshot make_snapshot(
    const std::vector<descspace::channels::SoftEncoder>& encoders,
    double iin_target_bits, long step,
    const descspace::trainer::EvalResult& eval) {
  descspace::io::Snapshot snapshot;
  snapshot.encoders = encoders;
  snapshot.iin_target_bits = iin_target_bits;
  snapshot.step = step;
  snapshot.iin_bits = eval.iin_bits;
  snapshot.iin_se_bits = eval.iin_se_bits;
  snapshot.quantity_bits = eval.quantity_bits;
  snapshot.quantity_se_bits = eval.quantity_se_bits;
  return snapshot;
}

struct TrainArgs {
  std::string system_path;
  std::string objective_path;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int repeats = 0;
  bool repeats_given = false;
  long samples = 0;
  bool samples_given = false;
  double iin = 0.0;
  bool iin_given = false;
};

struct LoadedRun {
  descspace::JointTable table;
  descspace::objective::CheckedObjective objective;
  descspace::trainer::TrainConfig config;
  int repeats = 1;
};

LoadedRun load_run(const TrainArgs& args) {
  descspace::io::LoadedSystem system = descspace::io::load_system(args.system_path);
  descspace::trainer::TrainConfig config;
  if (!args.config_path.empty()) {
    config = descspace::io::load_config(args.config_path);
  }
  if (args.seed_given) config.seed = args.seed;
  if (args.samples_given) config.eval_samples = args.samples;

  const Json raw = descspace::io::load_json(args.objective_path);
  descspace::objective::ObjectiveSpec spec =
      descspace::objective::objective_from_json(raw);
  if (args.iin_given) spec.iin_bits = args.iin;

  LoadedRun run{std::move(system.table), {}, config, 1};
  run.objective = descspace::objective::validate(spec, run.table.n_components());
  run.repeats = args.repeats_given ? args.repeats : config.repeats;
  if (run.repeats < 1) throw Error("repeats must be positive");
  return run;
}

descspace::io::RunManifest make_train_manifest(const std::string& command,
                                               const TrainArgs& args,
                                               const LoadedRun& run) {
  descspace::io::RunManifest manifest;
  manifest.command = command;
  manifest.system_path = args.system_path;
  manifest.objective_path = args.objective_path;
  manifest.config_path = args.config_path;
  manifest.seed = run.config.seed;
  manifest.out_dir = args.out_dir;
  manifest.args["repeats"] = run.repeats;
  manifest.args["eval_samples"] = run.config.eval_samples;
  if (args.iin_given) manifest.args["iin"] = args.iin;
  return manifest;
}

int cmd_scan(const TrainArgs& args) {
  LoadedRun run = load_run(args);
  descspace::io::write_manifest(make_train_manifest("scan", args, run));

  descspace::trainer::ScanResult scan;
  std::vector<double> repeat_quantities;
  int chosen = 0;
  if (run.repeats == 1) {
    scan = descspace::trainer::run_scan(run.table, run.objective, run.config);
  } else {
    descspace::trainer::BestOfScans best = descspace::trainer::best_of_scans(
        run.table, run.objective, run.config, run.repeats);
    scan = std::move(best.best);
    repeat_quantities = best.quantities_bits;
    chosen = best.chosen;
  }

  std::vector<std::string> snapshot_paths;
  for (std::size_t j = 0; j < scan.records.size(); ++j) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshots/checkpoint_%04zu.json", j);
    snapshot_paths.emplace_back(name);
    const descspace::trainer::ScanRecord& record = scan.records[j];
    descspace::io::write_snapshot(
        out_path(args.out_dir, name),
        make_snapshot(record.encoders, record.iin_target_bits, record.step,
                      record.eval));
  }
  descspace::io::atomic_write_text(
      out_path(args.out_dir, "scan.csv"),
      descspace::io::scan_csv(run.objective, scan.records, snapshot_paths));
  if (!repeat_quantities.empty()) {
    descspace::io::atomic_write_text(
        out_path(args.out_dir, "repeats.csv"),
        descspace::io::repeats_csv(repeat_quantities, chosen));
  }

  if (!scan.records.empty()) {
    const descspace::trainer::ScanRecord& last = scan.records.back();
    std::cout << "scan: " << scan.records.size() << " checkpoints, endpoint "
              << "I_in " << bits4(last.eval.iin_bits) << " bits, quantity "
              << bits4(last.eval.quantity_bits) << " bits\n";
  }
  return 0;
}

int cmd_point(const TrainArgs& args) {
  LoadedRun run = load_run(args);
  descspace::io::write_manifest(make_train_manifest("point", args, run));

  descspace::trainer::RunResult result;
  std::vector<double> repeat_quantities;
  int chosen = 0;
  if (run.repeats == 1) {
    result = descspace::trainer::run_point(run.table, run.objective, run.config);
  } else {
    descspace::trainer::BestOfPoints best = descspace::trainer::best_of_points(
        run.table, run.objective, run.config, run.repeats);
    result = std::move(best.best);
    repeat_quantities = best.quantities_bits;
    chosen = best.chosen;
  }

  const std::string snapshot_rel = "snapshots/best.json";
  descspace::io::write_snapshot(
      out_path(args.out_dir, snapshot_rel),
      make_snapshot(result.encoders, result.iin_target_bits, result.steps_run,
                    result.eval));
  descspace::io::atomic_write_text(
      out_path(args.out_dir, "point.csv"),
      descspace::io::point_csv(run.objective, result, chosen, snapshot_rel));
  if (!repeat_quantities.empty()) {
    descspace::io::atomic_write_text(
        out_path(args.out_dir, "repeats.csv"),
        descspace::io::repeats_csv(repeat_quantities, chosen));
  }

  std::cout << "point: I_in " << bits4(result.eval.iin_bits) << " bits (target "
            << bits4(result.iin_target_bits) << "), quantity "
            << bits4(result.eval.quantity_bits) << " +/- "
            << bits4(result.eval.quantity_se_bits) << " bits, repeat " << chosen
            << "\n";
  return 0;
}

struct HardenArgs {
  std::string system_path;
  std::string snapshot_path;
  std::string out_dir;
};

int cmd_harden(const HardenArgs& args) {
  descspace::io::LoadedSystem system = descspace::io::load_system(args.system_path);
  descspace::io::Snapshot snapshot =
      descspace::io::load_snapshot(args.snapshot_path);
  const int n = system.table.n_components();
  if (static_cast<int>(snapshot.encoders.size()) != n) {
    throw Error("snapshot component count does not match system");
  }
  for (int c = 0; c < n; ++c) {
    if (snapshot.encoders[c].outcomes() != system.table.alphabet_sizes()[c]) {
      throw Error("snapshot arity does not match component " +
                  std::to_string(c));
    }
  }

  descspace::io::RunManifest manifest;
  manifest.command = "harden";
  manifest.system_path = args.system_path;
  manifest.out_dir = args.out_dir;
  manifest.args["snapshot"] = args.snapshot_path;
  descspace::io::write_manifest(manifest);

  descspace::channels::HardenOutcome hardened =
      descspace::channels::harden(snapshot.encoders);

  std::vector<descspace::channels::DiscreteChannel> description;
  for (const descspace::channels::HardChannel& ch : hardened.channels) {
    description.push_back(descspace::channels::to_discrete(ch));
  }
  const descspace::JointTable joint =
      descspace::infotheory::description_joint(system.table, description);
  descspace::NeumaierAccumulator sum_info;
  for (double h : descspace::infotheory::component_entropies(joint)) {
    sum_info.add(h);
  }
  const double tc = descspace::infotheory::total_correlation(joint);
  const double o =
      n >= 3 ? descspace::infotheory::o_information(joint) : 0.0;

  Json report;
  Json partitions = Json::array();
  for (const descspace::channels::HardChannel& ch : hardened.channels) {
    partitions.push_back(ch.labels);
  }
  report["partitions"] = std::move(partitions);
  report["sum_info_bits"] = sum_info.total();
  report["tc_bits"] = tc;
  report["o_bits"] = o;
  report["soft_iin_bits"] = snapshot.iin_bits;
  report["soft_iin_se_bits"] = snapshot.iin_se_bits;
  report["steps"] = hardened.steps;
  report["worst_residual"] = hardened.worst_residual;
  Json conflicts = Json::array();
  for (const descspace::channels::MergeConflict& c : hardened.conflicts) {
    Json row;
    row["component"] = c.component;
    row["outcome_a"] = c.outcome_a;
    row["outcome_b"] = c.outcome_b;
    row["coefficient"] = c.coefficient;
    conflicts.push_back(std::move(row));
  }
  report["conflicts"] = std::move(conflicts);
  descspace::io::atomic_write_text(out_path(args.out_dir, "hardened.json"),
                                   report.dump(2) + "\n");

  descspace::io::atomic_write_text(
      out_path(args.out_dir, "pointwise_tc.csv"),
      descspace::io::pointwise_csv(descspace::infotheory::pointwise_tc(joint)));
  if (n >= 3) {
    descspace::io::atomic_write_text(
        out_path(args.out_dir, "pointwise_o.csv"),
        descspace::io::pointwise_csv(descspace::infotheory::pointwise_o(joint)));
  }

  std::cout << "harden: sum info " << bits4(sum_info.total())
            << " bits (soft estimate " << bits4(snapshot.iin_bits) << "), TC "
            << bits4(tc) << " bits, O " << bits4(o) << " bits, "
            << hardened.conflicts.size() << " conflicts\n";
  return 0;
}

struct SampleArgs {
  std::string system_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  long samples = 10000;
  double band_lo = 0.0;
  double band_hi = 0.0;
  bool band_given = false;
  bool bsc = false;
};

int cmd_sample(const SampleArgs& args) {
  if (args.bsc == args.band_given) {
    throw Error("pass either --bsc or a band (--band-lo/--band-hi)");
  }
  descspace::io::LoadedSystem system = descspace::io::load_system(args.system_path);

  descspace::io::RunManifest manifest;
  manifest.command = "sample";
  manifest.system_path = args.system_path;
  manifest.seed = args.seed;
  manifest.out_dir = args.out_dir;
  manifest.args["samples"] = args.samples;
  if (args.bsc) {
    manifest.args["bsc"] = true;
  } else {
    manifest.args["band_lo"] = args.band_lo;
    manifest.args["band_hi"] = args.band_hi;
  }
  descspace::io::write_manifest(manifest);

  std::vector<double> tc_values, o_values;
  Json summary;
  summary["n"] = args.samples;
  if (args.bsc) {
    const std::vector<descspace::sampling::BscSurveyPoint> points =
        descspace::sampling::random_bsc_survey(system.table, args.samples,
                                               args.seed);
    descspace::io::atomic_write_text(
        out_path(args.out_dir, "samples.csv"),
        descspace::io::bsc_survey_csv(points, system.table.n_components()));
    for (const auto& p : points) {
      tc_values.push_back(p.tc_bits);
      o_values.push_back(p.o_bits);
    }
  } else {
    const descspace::sampling::HardSampleResult result =
        descspace::sampling::rejection_sample_hard(
            system.table, {args.band_lo, args.band_hi}, args.samples,
            args.seed);
    descspace::io::atomic_write_text(
        out_path(args.out_dir, "samples.csv"),
        descspace::io::hard_samples_csv(result.samples,
                                        system.table.alphabet_sizes()));
    for (const auto& s : result.samples) {
      tc_values.push_back(s.tc_bits);
      o_values.push_back(s.o_bits);
    }
    summary["draws"] = result.draws;
    summary["acceptance_rate"] = result.acceptance_rate;
    summary["band_lo_bits"] = args.band_lo;
    summary["band_hi_bits"] = args.band_hi;
  }

  const auto moments = [](const std::vector<double>& v) {
    descspace::NeumaierAccumulator sum;
    for (double x : v) sum.add(x);
    const double mean = v.empty() ? 0.0 : sum.total() / v.size();
    descspace::NeumaierAccumulator sq;
    for (double x : v) sq.add((x - mean) * (x - mean));
    const double sd =
        v.size() > 1 ? std::sqrt(sq.total() / (v.size() - 1.0)) : 0.0;
    return std::pair<double, double>(mean, sd);
  };
  const auto [tc_mean, tc_sd] = moments(tc_values);
  const auto [o_mean, o_sd] = moments(o_values);
  summary["tc_mean_bits"] = tc_mean;
  summary["tc_sd_bits"] = tc_sd;
  summary["o_mean_bits"] = o_mean;
  summary["o_sd_bits"] = o_sd;
  descspace::io::atomic_write_text(out_path(args.out_dir, "summary.json"),
                                   summary.dump(2) + "\n");

  descspace::io::atomic_write_text(out_path(args.out_dir, "hist_tc.csv"),
                                   descspace::io::histogram_csv(tc_values, 0.05));
  descspace::io::atomic_write_text(out_path(args.out_dir, "hist_o.csv"),
                                   descspace::io::histogram_csv(o_values, 0.05));

  std::cout << "sample: " << tc_values.size() << " descriptions, TC "
            << bits4(tc_mean) << " +/- " << bits4(tc_sd) << " bits, O "
            << bits4(o_mean) << " +/- " << bits4(o_sd) << " bits\n";
  return 0;
}

struct SubsystemsArgs {
  std::string system_path;
  std::string out_dir;
  std::string quantity = "tc";
};

int cmd_subsystems(const SubsystemsArgs& args) {
  descspace::io::LoadedSystem system = descspace::io::load_system(args.system_path);

  descspace::io::RunManifest manifest;
  manifest.command = "subsystems";
  manifest.system_path = args.system_path;
  manifest.out_dir = args.out_dir;
  manifest.args["quantity"] = args.quantity;
  descspace::io::write_manifest(manifest);

  const descspace::infotheory::Quantity quantity =
      args.quantity == "o" ? descspace::infotheory::Quantity::OInformation
                           : descspace::infotheory::Quantity::TotalCorrelation;
  const std::vector<descspace::infotheory::SubsystemPoint> points =
      descspace::infotheory::subsystem_points(system.table, quantity);
  descspace::io::atomic_write_text(out_path(args.out_dir, "subsystems.csv"),
                                   descspace::io::subsystems_csv(points));

  std::cout << "subsystems: " << points.size() << " subsets\n";
  return 0;
}

struct PlotArgs {
  std::string out_dir;
  std::string scan_path;
  std::string points_path;
  std::string subsystems_path;
  std::string hist_path;
  std::string quantity = "tc";
  std::vector<double> marks;
  std::string title;
};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& path) {
  const std::string text = descspace::io::read_text(path);
  Csv csv;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t f = 0;
    while (true) {
      const std::size_t comma = line.find(',', f);
      fields.push_back(line.substr(f, comma - f));
      if (comma == std::string::npos) break;
      f = comma + 1;
    }
    if (first) {
      csv.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != csv.header.size()) {
        throw Error(path + ": ragged CSV row");
      }
      csv.rows.push_back(std::move(fields));
    }
  }
  if (first) throw Error(path + ": empty CSV");
  return csv;
}

int csv_column(const Csv& csv, const std::string& name,
               const std::string& path) {
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    if (csv.header[i] == name) return static_cast<int>(i);
  }
  throw Error(path + ": missing column " + name);
}

double csv_number(const std::string& field, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw Error(path + ": malformed number \"" + field + "\"");
  }
  return v;
}

int cmd_plot(const PlotArgs& args) {
  descspace::io::RunManifest manifest;
  manifest.command = "plot";
  manifest.out_dir = args.out_dir;
  manifest.args["scan"] = args.scan_path;
  manifest.args["points"] = args.points_path;
  manifest.args["subsystems"] = args.subsystems_path;
  manifest.args["hist"] = args.hist_path;
  manifest.args["quantity"] = args.quantity;
  manifest.args["marks"] = args.marks;
  descspace::io::write_manifest(manifest);

  const std::string quantity_col =
      args.quantity == "o" ? "o_bits" : "tc_bits";
  const std::string quantity_name =
      args.quantity == "o" ? "O-information" : "total correlation";

  descspace::svg::Chart chart;
  chart.title = args.title;
  chart.marks = args.marks;

  if (!args.hist_path.empty()) {
    const Csv csv = parse_csv(args.hist_path);
    const int lo = csv_column(csv, "bin_lo_bits", args.hist_path);
    const int count = csv_column(csv, "count", args.hist_path);
    for (const auto& row : csv.rows) {
      chart.bar_lo.push_back(csv_number(row[lo], args.hist_path));
      chart.bar_count.push_back(csv_number(row[count], args.hist_path));
    }
    chart.bar_width = 0.05;
    chart.x_label = quantity_name + " (bits)";
    chart.y_label = "count";
  } else {
    chart.x_label = "component information (bits)";
    chart.y_label = quantity_name + " (bits)";
  }

  if (!args.scan_path.empty()) {
    const Csv csv = parse_csv(args.scan_path);
    const int x = csv_column(csv, "iin_target_bits", args.scan_path);
    const int y = csv_column(csv, "quantity_bits", args.scan_path);
    for (const auto& row : csv.rows) {
      chart.line.x.push_back(csv_number(row[x], args.scan_path));
      chart.line.y.push_back(csv_number(row[y], args.scan_path));
    }
  }
  if (!args.points_path.empty()) {
    const Csv csv = parse_csv(args.points_path);
    const int x = csv_column(csv, "sum_info_bits", args.points_path);
    const int y = csv_column(csv, quantity_col, args.points_path);
    for (const auto& row : csv.rows) {
      chart.scatter.x.push_back(csv_number(row[x], args.points_path));
      chart.scatter.y.push_back(csv_number(row[y], args.points_path));
    }
  }
  if (!args.subsystems_path.empty()) {
    const Csv csv = parse_csv(args.subsystems_path);
    const int x = csv_column(csv, "sum_info_bits", args.subsystems_path);
    const int y = csv_column(csv, "quantity_bits", args.subsystems_path);
    for (const auto& row : csv.rows) {
      chart.circles.x.push_back(csv_number(row[x], args.subsystems_path));
      chart.circles.y.push_back(csv_number(row[y], args.subsystems_path));
    }
  }

  descspace::io::atomic_write_text(out_path(args.out_dir, "chart.svg"),
                                   descspace::svg::render(chart));
  std::cout << "plot: wrote " << out_path(args.out_dir, "chart.svg") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Description-space toolkit: optimize, survey and chart "
               "per-component compressions of small discrete systems"};
  app.require_subcommand(1);
  std::function<int()> action;

  TrainArgs scan_args;
  CLI::App* scan = app.add_subcommand(
      "scan", "Train across the full information range and dump checkpoints");
  TrainArgs point_args;
  CLI::App* point = app.add_subcommand(
      "point", "Train at a fixed information target (optionally best-of-N)");
  for (auto& [sub, args] : {std::pair<CLI::App*, TrainArgs*>{scan, &scan_args},
                            {point, &point_args}}) {
    sub->add_option("--system", args->system_path, "System spec JSON")
        ->required();
    sub->add_option("--objective", args->objective_path, "Objective JSON")
        ->required();
    sub->add_option("--config", args->config_path, "Training config JSON");
    sub->add_option("--out", args->out_dir, "Output directory")->required();
    sub->add_option("--seed", args->seed, "Master seed")
        ->each([args](const std::string&) { args->seed_given = true; });
    sub->add_option("--repeats", args->repeats, "Independent repeats")
        ->each([args](const std::string&) { args->repeats_given = true; });
    sub->add_option("--samples", args->samples, "Evaluation sample count")
        ->each([args](const std::string&) { args->samples_given = true; });
  }
  point->add_option("--iin", point_args.iin,
                    "Information target in bits (overrides the objective)")
      ->each([&point_args](const std::string&) { point_args.iin_given = true; });
  scan->callback([&] { action = [&] { return cmd_scan(scan_args); }; });
  point->callback([&] { action = [&] { return cmd_point(point_args); }; });

  HardenArgs harden_args;
  CLI::App* harden = app.add_subcommand(
      "harden", "Collapse a soft snapshot to partitions and report exact "
                "quantities");
  harden->add_option("--system", harden_args.system_path, "System spec JSON")
      ->required();
  harden->add_option("--snapshot", harden_args.snapshot_path,
                     "Encoder snapshot JSON")
      ->required();
  harden->add_option("--out", harden_args.out_dir, "Output directory")
      ->required();
  harden->callback([&] { action = [&] { return cmd_harden(harden_args); }; });

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand(
      "sample", "Survey random descriptions (hard rejection or BSC)");
  sample->add_option("--system", sample_args.system_path, "System spec JSON")
      ->required();
  sample->add_option("--out", sample_args.out_dir, "Output directory")
      ->required();
  sample->add_option("--seed", sample_args.seed, "Master seed");
  sample->add_option("--samples", sample_args.samples,
                     "Accepted samples (hard) or draws (BSC)");
  CLI::Option* band_lo = sample->add_option(
      "--band-lo", sample_args.band_lo, "Band lower edge, bits");
  CLI::Option* band_hi = sample->add_option(
      "--band-hi", sample_args.band_hi, "Band upper edge, bits");
  band_lo->needs(band_hi);
  band_hi->needs(band_lo);
  band_hi->each(
      [&sample_args](const std::string&) { sample_args.band_given = true; });
  sample->add_flag("--bsc", sample_args.bsc,
                   "Survey binary symmetric channels instead");
  sample->callback([&] { action = [&] { return cmd_sample(sample_args); }; });

  SubsystemsArgs subsystems_args;
  CLI::App* subsystems = app.add_subcommand(
      "subsystems", "Exact quantities of every discrete subsystem");
  subsystems
      ->add_option("--system", subsystems_args.system_path, "System spec JSON")
      ->required();
  subsystems->add_option("--out", subsystems_args.out_dir, "Output directory")
      ->required();
  subsystems
      ->add_option("--quantity", subsystems_args.quantity,
                   "Summary quantity: tc or o")
      ->check(CLI::IsMember({"tc", "o"}));
  subsystems->callback(
      [&] { action = [&] { return cmd_subsystems(subsystems_args); }; });

  PlotArgs plot_args;
  CLI::App* plot =
      app.add_subcommand("plot", "Render CSV outputs to a deterministic SVG");
  plot->add_option("--out", plot_args.out_dir, "Output directory")->required();
  plot->add_option("--scan", plot_args.scan_path, "Scan CSV (blue trace)");
  plot->add_option("--points", plot_args.points_path,
                   "Sample CSV (gray scatter)");
  plot->add_option("--subsystems", plot_args.subsystems_path,
                   "Subsystems CSV (black circles)");
  plot->add_option("--hist", plot_args.hist_path,
                   "Histogram CSV (bars; excludes scatter axes)");
  plot->add_option("--quantity", plot_args.quantity,
                   "Summary quantity: tc or o")
      ->check(CLI::IsMember({"tc", "o"}));
  plot->add_option("--mark", plot_args.marks,
                   "Dashed vertical reference line (repeatable)");
  plot->add_option("--title", plot_args.title, "Chart title");
  plot->callback([&] { action = [&] { return cmd_plot(plot_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return action();
  } catch (const descspace::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const descspace::HardenError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
