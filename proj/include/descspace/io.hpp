#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "descspace/channels.hpp"
#include "descspace/infotheory.hpp"
#include "descspace/objective.hpp"
#include "descspace/sampling.hpp"
#include "descspace/table.hpp"
#include "descspace/trainer.hpp"

namespace descspace::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Reads and parses a JSON file; throws descspace::Error with the path in
/// the message when the file is missing or malformed.
Json load_json(const std::string& path);

std::string read_text(const std::string& path);

/// Writes via a temporary file in the same directory plus an atomic rename,
/// so readers never observe a partial file.  Creates parent directories.
void atomic_write_text(const std::string& path, const std::string& content);

/// Builds the joint table described by a system spec file.  The spec is a
/// JSON object whose "type" selects the builder:
///   {"type":"ising","J":[[..]],"kT":..}
///   {"type":"sudoku","catalog":"boards.txt"}          (omit catalog to use
///                                                      the generated 288)
///   {"type":"ngrams","file":"list.txt","length":..,
///    "window":"first"|"second"|"whole","max_rank":..}
///   {"type":"table","alphabet_sizes":[..],"outcomes":[[..]],"masses":[..]}
/// Relative file references resolve against the spec file's directory.
struct LoadedSystem {
  JointTable table;
  std::string type;
};

LoadedSystem load_system(const std::string& path);

/// Reads an objective spec file and validates it against the system.
objective::CheckedObjective load_objective(const std::string& path,
                                           int n_components);

/// Applies a config file's overrides on top of defaults.  Unknown keys are
/// rejected so typos do not silently fall back to defaults.
trainer::TrainConfig config_from_json(const Json& j,
                                      const trainer::TrainConfig& base = {});
trainer::TrainConfig load_config(const std::string& path,
                                 const trainer::TrainConfig& base = {});
Json config_to_json(const trainer::TrainConfig& config);

/// Encoder snapshot: the per-component Gaussian tables plus the evaluation
/// summary needed to interpret them later.
struct Snapshot {
  std::vector<channels::SoftEncoder> encoders;
  double iin_target_bits = 0.0;
  long step = 0;
  double iin_bits = 0.0;
  double iin_se_bits = 0.0;
  double quantity_bits = 0.0;
  double quantity_se_bits = 0.0;
};

Json snapshot_to_json(const Snapshot& snapshot);
Snapshot snapshot_from_json(const Json& j);
void write_snapshot(const std::string& path, const Snapshot& snapshot);
Snapshot load_snapshot(const std::string& path);

/// Record of one CLI invocation, written to <out>/manifest.json before any
/// work begins; a command is reproducible from its manifest alone.
struct RunManifest {
  std::string command;
  std::string system_path;
  std::string objective_path;  // empty when the command takes none
  std::string config_path;     // empty when defaults were used
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string tool_version = kToolVersion;
  Json args = Json::object();  // remaining flags, command specific
};

Json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const Json& j);
void write_manifest(const RunManifest& manifest);

/// Full-precision float formatting shared by every CSV writer.
std::string format_double(double value);

/// Component indices joined with '.', e.g. "0.2.3"; the per-term CSV column
/// label is built from this.
std::string term_label(const Subset& term);

std::string scan_csv(const objective::CheckedObjective& objective,
                     const std::vector<trainer::ScanRecord>& records,
                     const std::vector<std::string>& snapshot_paths);

std::string point_csv(const objective::CheckedObjective& objective,
                      const trainer::RunResult& result, int chosen,
                      const std::string& snapshot_path);

std::string repeats_csv(const std::vector<double>& quantities_bits,
                        int chosen);

/// Partition columns hold restricted-growth labels as digit strings
/// ("0010" groups outcomes 0, 1 and 3 of a 4-letter alphabet).
std::string hard_samples_csv(const std::vector<sampling::HardSample>& samples,
                             const std::vector<int>& alphabet_sizes);

std::string bsc_survey_csv(const std::vector<sampling::BscSurveyPoint>& points,
                           int n_components);

/// Bins values at the given width (bin k covers [k*width, (k+1)*width));
/// rows are "bin_lo_bits,count" over the closed range of observed bins.
std::string histogram_csv(const std::vector<double>& values_bits,
                          double bin_width_bits);

std::string subsystems_csv(const std::vector<infotheory::SubsystemPoint>& points);

std::string pointwise_csv(const std::vector<infotheory::PointwiseReport>& reports);

}  // namespace descspace::io
