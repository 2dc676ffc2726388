#include "descspace/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "descspace/errors.hpp"
#include "descspace/systems.hpp"

namespace descspace::io {

namespace fs = std::filesystem;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("failed reading " + path);
  return buffer.str();
}

Json load_json(const std::string& path) {
  const std::string text = read_text(path);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("malformed JSON in " + path);
  return j;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error("cannot create directory " +
                        target.parent_path().string());
  }
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + temp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) throw Error("cannot rename " + temp.string() + " to " + path);
}

namespace {

const Json& require_key(const Json& j, const std::string& key,
                        const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(where + " is missing key \"" + key + "\"");
  return *it;
}

std::string resolve_relative(const std::string& spec_path,
                             const std::string& reference) {
  const fs::path ref(reference);
  if (ref.is_absolute()) return reference;
  return (fs::path(spec_path).parent_path() / ref).string();
}

}  // namespace

LoadedSystem load_system(const std::string& path) {
  const Json j = load_json(path);
  if (!j.is_object()) throw Error(path + " must hold a JSON object");
  const std::string type = require_key(j, "type", path).get<std::string>();
  if (type == "ising") {
    const Json& rows = require_key(j, "J", path);
    const int n = static_cast<int>(rows.size());
    systems::IsingSpec spec;
    spec.coupling = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      if (static_cast<int>(rows[r].size()) != n) {
        throw Error(path + ": J matrix must be square");
      }
      for (int c = 0; c < n; ++c) spec.coupling(r, c) = rows[r][c].get<double>();
    }
    spec.kT = require_key(j, "kT", path).get<double>();
    return {systems::build_ising(spec), type};
  }
  if (type == "sudoku") {
    if (j.contains("catalog")) {
      const std::string catalog =
          resolve_relative(path, j["catalog"].get<std::string>());
      return {systems::load_sudoku_catalog(catalog), type};
    }
    return {systems::build_sudoku(systems::generate_boards()), type};
  }
  if (type == "ngrams") {
    systems::NgramSpec spec;
    spec.word_length = require_key(j, "length", path).get<int>();
    const std::string window =
        require_key(j, "window", path).get<std::string>();
    if (window == "first") {
      spec.window = systems::NgramWindow::First;
    } else if (window == "second") {
      spec.window = systems::NgramWindow::Second;
    } else if (window == "whole") {
      spec.window = systems::NgramWindow::Whole;
    } else {
      throw Error(path + ": window must be first, second or whole");
    }
    if (j.contains("max_rank")) spec.max_rank = j["max_rank"].get<int>();
    const std::string counts =
        resolve_relative(path, require_key(j, "file", path).get<std::string>());
    return {systems::load_ngrams(counts, spec), type};
  }
  if (type == "table") {
    const std::vector<int> sizes =
        require_key(j, "alphabet_sizes", path).get<std::vector<int>>();
    std::vector<Outcome> outcomes;
    for (const Json& row : require_key(j, "outcomes", path)) {
      outcomes.push_back(row.get<Outcome>());
    }
    const std::vector<double> masses =
        require_key(j, "masses", path).get<std::vector<double>>();
    return {systems::build_table(sizes, outcomes, masses), type};
  }
  throw Error(path + ": unknown system type \"" + type + "\"");
}

objective::CheckedObjective load_objective(const std::string& path,
                                           int n_components) {
  const Json j = load_json(path);
  return objective::validate(objective::objective_from_json(j), n_components);
}

trainer::TrainConfig config_from_json(const Json& j,
                                      const trainer::TrainConfig& base) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  trainer::TrainConfig config = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "latent_dim") {
      config.latent_dim = value.get<int>();
    } else if (key == "critic_hidden") {
      config.critic_hidden = value.get<std::vector<int>>();
    } else if (key == "embed_dim") {
      config.embed_dim = value.get<int>();
    } else if (key == "tau") {
      config.tau = value.get<double>();
    } else if (key == "batch") {
      config.batch = value.get<int>();
    } else if (key == "steps") {
      config.steps = value.get<long>();
    } else if (key == "extra_critic_steps") {
      config.extra_critic_steps = value.get<long>();
    } else if (key == "encoder_lr") {
      config.encoder_lr = value.get<double>();
    } else if (key == "critic_lr") {
      config.critic_lr = value.get<double>();
    } else if (key == "adam_beta1") {
      config.adam_beta1 = value.get<double>();
    } else if (key == "adam_beta2") {
      config.adam_beta2 = value.get<double>();
    } else if (key == "adam_eps") {
      config.adam_eps = value.get<double>();
    } else if (key == "gamma_start") {
      config.gamma.start = value.get<double>();
    } else if (key == "gamma_end") {
      config.gamma.end = value.get<double>();
    } else if (key == "init_mu_scale") {
      config.init_mu_scale = value.get<double>();
    } else if (key == "eval_samples") {
      config.eval_samples = value.get<long>();
    } else if (key == "checkpoints") {
      config.checkpoints = value.get<int>();
    } else if (key == "repeats") {
      config.repeats = value.get<int>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else if (key == "guard_slack_bits") {
      config.guard_slack_bits = value.get<double>();
    } else if (key == "guard_patience") {
      config.guard_patience = value.get<long>();
    } else {
      throw Error("unknown config key \"" + key + "\"");
    }
  }
  return config;
}

trainer::TrainConfig load_config(const std::string& path,
                                 const trainer::TrainConfig& base) {
  return config_from_json(load_json(path), base);
}

Json config_to_json(const trainer::TrainConfig& config) {
  Json j;
  j["latent_dim"] = config.latent_dim;
  j["critic_hidden"] = config.critic_hidden;
  j["embed_dim"] = config.embed_dim;
  j["tau"] = config.tau;
  j["batch"] = config.batch;
  j["steps"] = config.steps;
  j["extra_critic_steps"] = config.extra_critic_steps;
  j["encoder_lr"] = config.encoder_lr;
  j["critic_lr"] = config.critic_lr;
  j["adam_beta1"] = config.adam_beta1;
  j["adam_beta2"] = config.adam_beta2;
  j["adam_eps"] = config.adam_eps;
  j["gamma_start"] = config.gamma.start;
  j["gamma_end"] = config.gamma.end;
  j["init_mu_scale"] = config.init_mu_scale;
  j["eval_samples"] = config.eval_samples;
  j["checkpoints"] = config.checkpoints;
  j["repeats"] = config.repeats;
  j["seed"] = config.seed;
  j["guard_slack_bits"] = config.guard_slack_bits;
  j["guard_patience"] = config.guard_patience;
  return j;
}

namespace {

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(where + " must be a 2d array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw Error(where + " rows have inconsistent lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

Json snapshot_to_json(const Snapshot& snapshot) {
  Json j;
  j["step"] = snapshot.step;
  j["iin_target_bits"] = snapshot.iin_target_bits;
  j["iin_bits"] = snapshot.iin_bits;
  j["iin_se_bits"] = snapshot.iin_se_bits;
  j["quantity_bits"] = snapshot.quantity_bits;
  j["quantity_se_bits"] = snapshot.quantity_se_bits;
  Json encoders = Json::array();
  for (const channels::SoftEncoder& enc : snapshot.encoders) {
    Json e;
    e["mu"] = matrix_to_json(enc.mu);
    e["log_sigma"] = matrix_to_json(enc.log_sigma);
    encoders.push_back(std::move(e));
  }
  j["encoders"] = std::move(encoders);
  return j;
}

Snapshot snapshot_from_json(const Json& j) {
  Snapshot snapshot;
  snapshot.step = require_key(j, "step", "snapshot").get<long>();
  snapshot.iin_target_bits =
      require_key(j, "iin_target_bits", "snapshot").get<double>();
  snapshot.iin_bits = require_key(j, "iin_bits", "snapshot").get<double>();
  snapshot.iin_se_bits =
      require_key(j, "iin_se_bits", "snapshot").get<double>();
  snapshot.quantity_bits =
      require_key(j, "quantity_bits", "snapshot").get<double>();
  snapshot.quantity_se_bits =
      require_key(j, "quantity_se_bits", "snapshot").get<double>();
  for (const Json& e : require_key(j, "encoders", "snapshot")) {
    channels::SoftEncoder enc;
    enc.mu = matrix_from_json(require_key(e, "mu", "snapshot"), "mu");
    enc.log_sigma =
        matrix_from_json(require_key(e, "log_sigma", "snapshot"), "log_sigma");
    if (enc.log_sigma.rows() != enc.mu.rows() ||
        enc.log_sigma.cols() != enc.mu.cols()) {
      throw Error("snapshot mu/log_sigma shapes disagree");
    }
    snapshot.encoders.push_back(std::move(enc));
  }
  return snapshot;
}

void write_snapshot(const std::string& path, const Snapshot& snapshot) {
  atomic_write_text(path, snapshot_to_json(snapshot).dump(2) + "\n");
}

Snapshot load_snapshot(const std::string& path) {
  return snapshot_from_json(load_json(path));
}

Json manifest_to_json(const RunManifest& manifest) {
  Json j;
  j["command"] = manifest.command;
  j["system"] = manifest.system_path;
  j["objective"] = manifest.objective_path;
  j["config"] = manifest.config_path;
  j["seed"] = manifest.seed;
  j["out"] = manifest.out_dir;
  j["tool_version"] = manifest.tool_version;
  j["args"] = manifest.args;
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest manifest;
  manifest.command = require_key(j, "command", "manifest").get<std::string>();
  manifest.system_path = require_key(j, "system", "manifest").get<std::string>();
  manifest.objective_path =
      require_key(j, "objective", "manifest").get<std::string>();
  manifest.config_path = require_key(j, "config", "manifest").get<std::string>();
  manifest.seed = require_key(j, "seed", "manifest").get<std::uint64_t>();
  manifest.out_dir = require_key(j, "out", "manifest").get<std::string>();
  manifest.tool_version =
      require_key(j, "tool_version", "manifest").get<std::string>();
  manifest.args = require_key(j, "args", "manifest");
  return manifest;
}

void write_manifest(const RunManifest& manifest) {
  const fs::path path = fs::path(manifest.out_dir) / "manifest.json";
  atomic_write_text(path.string(), manifest_to_json(manifest).dump(2) + "\n");
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string term_label(const Subset& term) {
  std::string label;
  for (std::size_t i = 0; i < term.size(); ++i) {
    if (i) label += '.';
    label += std::to_string(term[i]);
  }
  return label;
}

namespace {

void append_eval_header(std::string& out,
                        const objective::CheckedObjective& objective) {
  for (const Subset& term : objective.terms) {
    const std::string label = term_label(term);
    out += ",I_" + label + "_bits,I_" + label + "_se_bits";
  }
  out += ",quantity_bits,quantity_se_bits";
}

void append_eval_row(std::string& out, const trainer::EvalResult& eval) {
  for (const trainer::TermEstimate& term : eval.terms) {
    out += ',' + format_double(term.bits) + ',' + format_double(term.se_bits);
  }
  out += ',' + format_double(eval.quantity_bits) + ',' +
         format_double(eval.quantity_se_bits);
}

}  // namespace

std::string scan_csv(const objective::CheckedObjective& objective,
                     const std::vector<trainer::ScanRecord>& records,
                     const std::vector<std::string>& snapshot_paths) {
  if (records.size() != snapshot_paths.size()) {
    throw Error("one snapshot path per scan record required");
  }
  std::string out = "iin_target_bits";
  append_eval_header(out, objective);
  out += ",snapshot_path\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out += format_double(records[i].iin_target_bits);
    append_eval_row(out, records[i].eval);
    out += ',' + snapshot_paths[i] + '\n';
  }
  return out;
}

std::string point_csv(const objective::CheckedObjective& objective,
                      const trainer::RunResult& result, int chosen,
                      const std::string& snapshot_path) {
  std::string out = "repeat,iin_target_bits";
  append_eval_header(out, objective);
  out += ",snapshot_path\n";
  out += std::to_string(chosen) + ',' + format_double(result.iin_target_bits);
  append_eval_row(out, result.eval);
  out += ',' + snapshot_path + '\n';
  return out;
}

std::string repeats_csv(const std::vector<double>& quantities_bits,
                        int chosen) {
  std::string out = "repeat,quantity_bits,chosen\n";
  for (std::size_t r = 0; r < quantities_bits.size(); ++r) {
    out += std::to_string(r) + ',' + format_double(quantities_bits[r]) + ',' +
           (static_cast<int>(r) == chosen ? "1" : "0") + '\n';
  }
  return out;
}

std::string hard_samples_csv(const std::vector<sampling::HardSample>& samples,
                             const std::vector<int>& alphabet_sizes) {
  const int n = static_cast<int>(alphabet_sizes.size());
  std::string out;
  for (int c = 0; c < n; ++c) {
    out += "partition_" + std::to_string(c) + ',';
  }
  out += "sum_info_bits,tc_bits,o_bits\n";
  std::vector<std::vector<std::string>> labels(n);
  for (int c = 0; c < n; ++c) {
    for (const sampling::Partition& p : sampling::enumerate_partitions(
             alphabet_sizes[c])) {
      std::string label;
      for (int v : p) label += static_cast<char>('0' + v);
      labels[c].push_back(std::move(label));
    }
  }
  for (const sampling::HardSample& sample : samples) {
    if (static_cast<int>(sample.partition_index.size()) != n) {
      throw Error("sample arity does not match component count");
    }
    for (int c = 0; c < n; ++c) {
      out += labels[c][sample.partition_index[c]] + ',';
    }
    out += format_double(sample.sum_info_bits) + ',' +
           format_double(sample.tc_bits) + ',' + format_double(sample.o_bits) +
           '\n';
  }
  return out;
}

std::string bsc_survey_csv(const std::vector<sampling::BscSurveyPoint>& points,
                           int n_components) {
  std::string out;
  for (int c = 0; c < n_components; ++c) {
    out += "flip_" + std::to_string(c) + ',';
  }
  out += "sum_info_bits,tc_bits,o_bits\n";
  for (const sampling::BscSurveyPoint& point : points) {
    if (static_cast<int>(point.flip.size()) != n_components) {
      throw Error("survey arity does not match component count");
    }
    for (double e : point.flip) out += format_double(e) + ',';
    out += format_double(point.sum_info_bits) + ',' +
           format_double(point.tc_bits) + ',' + format_double(point.o_bits) +
           '\n';
  }
  return out;
}

std::string histogram_csv(const std::vector<double>& values_bits,
                          double bin_width_bits) {
  if (!(bin_width_bits > 0.0)) throw Error("bin width must be positive");
  std::string out = "bin_lo_bits,count\n";
  if (values_bits.empty()) return out;
  long lo = 0, hi = 0;
  std::vector<long> bins;
  bool first = true;
  for (double v : values_bits) {
    const long k = static_cast<long>(std::floor(v / bin_width_bits));
    if (first) {
      lo = hi = k;
      bins.assign(1, 0);
      first = false;
    } else if (k < lo) {
      bins.insert(bins.begin(), static_cast<std::size_t>(lo - k), 0);
      lo = k;
    } else if (k > hi) {
      bins.insert(bins.end(), static_cast<std::size_t>(k - hi), 0);
      hi = k;
    }
    ++bins[static_cast<std::size_t>(k - lo)];
  }
  for (std::size_t i = 0; i < bins.size(); ++i) {
    out += format_double((lo + static_cast<long>(i)) * bin_width_bits) + ',' +
           std::to_string(bins[i]) + '\n';
  }
  return out;
}

std::string subsystems_csv(
    const std::vector<infotheory::SubsystemPoint>& points) {
  std::string out =
      "components,size,sum_info_bits,system_info_bits,quantity_bits\n";
  for (const infotheory::SubsystemPoint& p : points) {
    out += (p.subset.empty() ? std::string("-") : term_label(p.subset)) + ',' +
           std::to_string(p.subset.size()) + ',' +
           format_double(p.component_info_bits) + ',' +
           format_double(p.system_info_bits) + ',' +
           format_double(p.quantity_bits) + '\n';
  }
  return out;
}

std::string pointwise_csv(
    const std::vector<infotheory::PointwiseReport>& reports) {
  std::string out = "outcome,mass,local_bits,contribution_bits\n";
  for (const infotheory::PointwiseReport& r : reports) {
    out += format_outcome(r.code) + ',' + format_double(r.mass) + ',' +
           format_double(r.local_bits) + ',' +
           format_double(r.contribution_bits) + '\n';
  }
  return out;
}

}  // namespace descspace::io
