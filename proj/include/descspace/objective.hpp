#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "descspace/table.hpp"

namespace descspace::objective {

using Json = nlohmann::ordered_json;

enum class Direction { Minimize, Maximize };

Direction direction_from_string(const std::string& name);
std::string to_string(Direction direction);

/// Raw objective as written by the user: the terms of a summary quantity,
/// their weights in that quantity, which way to push it, and the information
/// budget for the component channels.
struct ObjectiveSpec {
  std::vector<Subset> terms;
  std::vector<double> weights;
  Direction direction = Direction::Minimize;
  double iin_bits = 0.0;
};

/// Validated, canonicalized objective.  The first n_components terms are the
/// singletons in component order (the constraint set); the remaining terms
/// are deduplicated multi-component subsets.  Ascent weights are the
/// quantity weights oriented so that gradient ascent on Σ v_k I_k moves the
/// quantity the requested way; multi-component terms with v_k > 0 take the
/// direct contrastive bound and terms with v_k < 0 take the adversarial
/// arrangement.
struct CheckedObjective {
  int n_components = 0;
  std::vector<Subset> terms;
  std::vector<double> quantity_weights;
  std::vector<double> ascent_weights;
  Direction direction = Direction::Minimize;
  double iin_bits = 0.0;
  std::vector<std::size_t> multi_terms;  // indices into `terms`
};

/// Checks an objective against a system's component count.  Throws
/// descspace::Error on malformed terms, missing singleton prefix, weight
/// count mismatch, non-finite weights or a negative information budget.
/// Duplicate multi-component terms are merged by summing their weights.
CheckedObjective validate(const ObjectiveSpec& spec, int n_components);

/// Total-correlation objective: singleton terms plus the full set with
/// weight -1 (quantity form Σ_i I(U_i;X_i) - I(U;X)).
ObjectiveSpec tc_objective(int n_components, Direction direction,
                           double iin_bits);

/// O-information objective: singletons with weight +1, each leave-one-out
/// set with weight -1, and the full set with weight n - 2.  Needs n >= 3.
ObjectiveSpec o_objective(int n_components, Direction direction,
                          double iin_bits);

ObjectiveSpec objective_from_json(const Json& j);
Json objective_to_json(const ObjectiveSpec& spec);

}  // namespace descspace::objective
