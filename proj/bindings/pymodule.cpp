#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "descspace/channels.hpp"
#include "descspace/errors.hpp"
#include "descspace/infotheory.hpp"
#include "descspace/io.hpp"
#include "descspace/objective.hpp"
#include "descspace/sampling.hpp"
#include "descspace/systems.hpp"
#include "descspace/table.hpp"
#include "descspace/trainer.hpp"

namespace py = pybind11;
using namespace descspace;

namespace {

objective::CheckedObjective parse_objective(const std::string& text, int n) {
  const io::Json j = io::Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("malformed objective JSON");
  return objective::validate(objective::objective_from_json(j), n);
}

trainer::TrainConfig parse_config(const std::string& text) {
  const io::Json j = io::Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("malformed config JSON");
  return io::config_from_json(j);
}

py::dict eval_to_dict(const trainer::EvalResult& eval) {
  py::list terms;
  for (const trainer::TermEstimate& t : eval.terms) {
    py::dict row;
    row["term"] = t.term;
    row["bits"] = t.bits;
    row["se_bits"] = t.se_bits;
    terms.append(row);
  }
  py::dict out;
  out["terms"] = terms;
  out["iin_bits"] = eval.iin_bits;
  out["iin_se_bits"] = eval.iin_se_bits;
  out["quantity_bits"] = eval.quantity_bits;
  out["quantity_se_bits"] = eval.quantity_se_bits;
  return out;
}

py::dict run_result_to_dict(const trainer::RunResult& result) {
  py::dict out;
  out["eval"] = eval_to_dict(result.eval);
  out["encoders"] = result.encoders;
  out["iin_target_bits"] = result.iin_target_bits;
  out["steps_run"] = result.steps_run;
  return out;
}

std::vector<channels::DiscreteChannel> hard_description(
    const std::vector<std::vector<int>>& partitions) {
  std::vector<channels::DiscreteChannel> description;
  for (const std::vector<int>& labels : partitions) {
    description.push_back(channels::to_discrete(channels::HardChannel{labels}));
  }
  return description;
}

py::list pointwise_to_list(const std::vector<infotheory::PointwiseReport>& reports) {
  py::list out;
  for (const infotheory::PointwiseReport& r : reports) {
    py::dict row;
    row["outcome"] = r.code;
    row["mass"] = r.mass;
    row["local_bits"] = r.local_bits;
    row["contribution_bits"] = r.contribution_bits;
    out.append(row);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Description-space analysis of small discrete systems";

  py::register_exception<Error>(m, "DescspaceError");

  py::class_<JointTable>(m, "Table")
      .def_property_readonly("n_components", &JointTable::n_components)
      .def_property_readonly("alphabet_sizes", &JointTable::alphabet_sizes)
      .def_property_readonly("outcomes", &JointTable::outcomes)
      .def_property_readonly("masses", &JointTable::masses)
      .def("__len__", &JointTable::size)
      .def("marginal", &JointTable::marginal, py::arg("subset"))
      .def("component_marginal", &JointTable::component_marginal,
           py::arg("component"));

  py::class_<channels::SoftEncoder>(m, "Encoder")
      .def(py::init([](Eigen::MatrixXd mu, Eigen::MatrixXd log_sigma) {
             if (mu.rows() != log_sigma.rows() || mu.cols() != log_sigma.cols()) {
               throw Error("mu and log_sigma shapes disagree");
             }
             channels::SoftEncoder enc;
             enc.mu = std::move(mu);
             enc.log_sigma = std::move(log_sigma);
             return enc;
           }),
           py::arg("mu"), py::arg("log_sigma"))
      .def_readwrite("mu", &channels::SoftEncoder::mu)
      .def_readwrite("log_sigma", &channels::SoftEncoder::log_sigma);

  m.def(
      "build_table",
      [](const std::vector<int>& sizes, const std::vector<Outcome>& outcomes,
         const std::vector<double>& masses) {
        return systems::build_table(sizes, outcomes, masses);
      },
      py::arg("alphabet_sizes"), py::arg("outcomes"), py::arg("masses"));
  m.def(
      "build_ising",
      [](const Eigen::MatrixXd& coupling, double kT) {
        return systems::build_ising({coupling, kT});
      },
      py::arg("coupling"), py::arg("kT"));
  m.def("generate_boards", &systems::generate_boards);
  m.def(
      "build_sudoku",
      [](const std::vector<std::string>& boards) {
        return systems::build_sudoku(boards);
      },
      py::arg("boards"));
  m.def(
      "load_ngrams",
      [](const std::string& path, int word_length, const std::string& window,
         int max_rank) {
        systems::NgramSpec spec;
        spec.word_length = word_length;
        spec.max_rank = max_rank;
        if (window == "first") {
          spec.window = systems::NgramWindow::First;
        } else if (window == "second") {
          spec.window = systems::NgramWindow::Second;
        } else if (window == "whole") {
          spec.window = systems::NgramWindow::Whole;
        } else {
          throw Error("window must be first, second or whole");
        }
        return systems::load_ngrams(path, spec);
      },
      py::arg("path"), py::arg("word_length"), py::arg("window") = "whole",
      py::arg("max_rank") = 10000);
  m.def("load_system", [](const std::string& path) {
    return io::load_system(path).table;
  });

  m.def(
      "entropy",
      [](const JointTable& table, const std::optional<Subset>& subset) {
        return subset ? infotheory::entropy(table, *subset)
                      : infotheory::entropy(table);
      },
      py::arg("table"), py::arg("subset") = std::nullopt);
  m.def("component_entropies", &infotheory::component_entropies);
  m.def("total_correlation", &infotheory::total_correlation);
  m.def("o_information", &infotheory::o_information);
  m.def("pointwise_tc", [](const JointTable& t) {
    return pointwise_to_list(infotheory::pointwise_tc(t));
  });
  m.def("pointwise_o", [](const JointTable& t) {
    return pointwise_to_list(infotheory::pointwise_o(t));
  });
  m.def(
      "subsystem_points",
      [](const JointTable& table, const std::string& quantity) {
        const auto q = quantity == "o" ? infotheory::Quantity::OInformation
                                       : infotheory::Quantity::TotalCorrelation;
        py::list out;
        for (const infotheory::SubsystemPoint& p :
             infotheory::subsystem_points(table, q)) {
          py::dict row;
          row["subset"] = p.subset;
          row["sum_info_bits"] = p.component_info_bits;
          row["system_info_bits"] = p.system_info_bits;
          row["quantity_bits"] = p.quantity_bits;
          out.append(row);
        }
        return out;
      },
      py::arg("table"), py::arg("quantity") = "tc");

  m.def(
      "description_joint",
      [](const JointTable& table, const std::vector<std::vector<int>>& partitions) {
        return infotheory::description_joint(table, hard_description(partitions));
      },
      py::arg("table"), py::arg("partitions"));
  m.def(
      "description_tc",
      [](const JointTable& table, const std::vector<std::vector<int>>& partitions) {
        return infotheory::description_tc(table, hard_description(partitions));
      },
      py::arg("table"), py::arg("partitions"));
  m.def(
      "description_o",
      [](const JointTable& table, const std::vector<std::vector<int>>& partitions) {
        return infotheory::description_o(table, hard_description(partitions));
      },
      py::arg("table"), py::arg("partitions"));

  m.def("bell_number", &sampling::bell_number, py::arg("m"));
  m.def("enumerate_partitions", &sampling::enumerate_partitions, py::arg("m"));
  m.def(
      "random_bsc_survey",
      [](const JointTable& table, long n_draws, std::uint64_t seed) {
        py::list out;
        for (const sampling::BscSurveyPoint& p :
             sampling::random_bsc_survey(table, n_draws, seed)) {
          py::dict row;
          row["flip"] = p.flip;
          row["sum_info_bits"] = p.sum_info_bits;
          row["tc_bits"] = p.tc_bits;
          row["o_bits"] = p.o_bits;
          out.append(row);
        }
        return out;
      },
      py::arg("table"), py::arg("n_draws"), py::arg("seed") = 0);
  m.def(
      "rejection_sample_hard",
      [](const JointTable& table, double lo_bits, double hi_bits,
         long n_accepted, std::uint64_t seed) {
        const sampling::HardSampleResult result =
            sampling::rejection_sample_hard(table, {lo_bits, hi_bits},
                                            n_accepted, seed);
        py::list samples;
        for (const sampling::HardSample& s : result.samples) {
          py::dict row;
          row["partition_index"] = s.partition_index;
          row["sum_info_bits"] = s.sum_info_bits;
          row["tc_bits"] = s.tc_bits;
          row["o_bits"] = s.o_bits;
          samples.append(row);
        }
        py::dict out;
        out["samples"] = samples;
        out["draws"] = result.draws;
        out["acceptance_rate"] = result.acceptance_rate;
        return out;
      },
      py::arg("table"), py::arg("lo_bits"), py::arg("hi_bits"),
      py::arg("n_accepted"), py::arg("seed") = 0);

  m.def(
      "mc_mutual_information",
      [](const JointTable& table, const std::vector<channels::SoftEncoder>& encoders,
         const Subset& subset, long n_samples, std::uint64_t seed) {
        channels::Description description;
        for (const auto& enc : encoders) description.push_back(enc);
        const channels::McEstimate est = channels::mc_mutual_information(
            description, table, subset, n_samples, seed);
        py::dict out;
        out["bits"] = est.bits;
        out["se_bits"] = est.se_bits;
        out["n"] = est.n;
        return out;
      },
      py::arg("table"), py::arg("encoders"), py::arg("subset"),
      py::arg("n_samples") = 200000, py::arg("seed") = 0);

  m.def(
      "harden",
      [](const std::vector<channels::SoftEncoder>& encoders) {
        const channels::HardenOutcome outcome = channels::harden(encoders);
        py::list labels;
        for (const channels::HardChannel& ch : outcome.channels) {
          labels.append(ch.labels);
        }
        py::list conflicts;
        for (const channels::MergeConflict& c : outcome.conflicts) {
          py::dict row;
          row["component"] = c.component;
          row["outcome_a"] = c.outcome_a;
          row["outcome_b"] = c.outcome_b;
          row["coefficient"] = c.coefficient;
          conflicts.append(row);
        }
        py::dict out;
        out["partitions"] = labels;
        out["steps"] = outcome.steps;
        out["worst_residual"] = outcome.worst_residual;
        out["conflicts"] = conflicts;
        return out;
      },
      py::arg("encoders"));

  m.def(
      "tc_objective_json",
      [](int n, const std::string& direction, double iin_bits) {
        return objective::objective_to_json(
                   objective::tc_objective(
                       n, objective::direction_from_string(direction), iin_bits))
            .dump();
      },
      py::arg("n_components"), py::arg("direction"), py::arg("iin_bits"));
  m.def(
      "o_objective_json",
      [](int n, const std::string& direction, double iin_bits) {
        return objective::objective_to_json(
                   objective::o_objective(
                       n, objective::direction_from_string(direction), iin_bits))
            .dump();
      },
      py::arg("n_components"), py::arg("direction"), py::arg("iin_bits"));

  m.def(
      "evaluate",
      [](const JointTable& table, const std::string& objective_json,
         const std::vector<channels::SoftEncoder>& encoders, long n_samples,
         std::uint64_t seed) {
        return eval_to_dict(trainer::evaluate(
            table, parse_objective(objective_json, table.n_components()),
            encoders, n_samples, seed));
      },
      py::arg("table"), py::arg("objective_json"), py::arg("encoders"),
      py::arg("n_samples") = 200000, py::arg("seed") = 0);
  m.def(
      "run_point",
      [](const JointTable& table, const std::string& objective_json,
         const std::string& config_json) {
        return run_result_to_dict(trainer::run_point(
            table, parse_objective(objective_json, table.n_components()),
            parse_config(config_json)));
      },
      py::arg("table"), py::arg("objective_json"), py::arg("config_json"));
  m.def(
      "run_scan",
      [](const JointTable& table, const std::string& objective_json,
         const std::string& config_json) {
        const trainer::ScanResult scan = trainer::run_scan(
            table, parse_objective(objective_json, table.n_components()),
            parse_config(config_json));
        py::list out;
        for (const trainer::ScanRecord& record : scan.records) {
          py::dict row;
          row["step"] = record.step;
          row["iin_target_bits"] = record.iin_target_bits;
          row["eval"] = eval_to_dict(record.eval);
          row["encoders"] = record.encoders;
          out.append(row);
        }
        return out;
      },
      py::arg("table"), py::arg("objective_json"), py::arg("config_json"));
  m.def(
      "best_of_points",
      [](const JointTable& table, const std::string& objective_json,
         const std::string& config_json, int repeats) {
        const trainer::BestOfPoints best = trainer::best_of_points(
            table, parse_objective(objective_json, table.n_components()),
            parse_config(config_json), repeats);
        py::dict out;
        out["best"] = run_result_to_dict(best.best);
        out["chosen"] = best.chosen;
        out["quantities_bits"] = best.quantities_bits;
        return out;
      },
      py::arg("table"), py::arg("objective_json"), py::arg("config_json"),
      py::arg("repeats"));

  m.attr("__version__") = io::kToolVersion;
}
