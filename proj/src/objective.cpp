#include "descspace/objective.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "descspace/errors.hpp"

namespace descspace::objective {

Direction direction_from_string(const std::string& name) {
  if (name == "minimize") return Direction::Minimize;
  if (name == "maximize") return Direction::Maximize;
  throw Error("direction must be 'minimize' or 'maximize', got '" + name +
              "'");
}

std::string to_string(Direction direction) {
  return direction == Direction::Minimize ? "minimize" : "maximize";
}

CheckedObjective validate(const ObjectiveSpec& spec, int n_components) {
  if (n_components < 1) throw Error("component count must be positive");
  if (spec.terms.size() != spec.weights.size()) {
    throw Error("objective has " + std::to_string(spec.terms.size()) +
                " terms but " + std::to_string(spec.weights.size()) +
                " weights");
  }
  if (spec.terms.size() < static_cast<std::size_t>(n_components)) {
    throw Error("objective must list every singleton term first");
  }
  if (!std::isfinite(spec.iin_bits) || spec.iin_bits < 0.0) {
    throw Error("information budget must be finite and non-negative");
  }

  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const Subset& term = spec.terms[k];
    if (term.empty()) throw Error("objective terms must be non-empty");
    int prev = -1;
    for (int c : term) {
      if (c < 0 || c >= n_components) {
        throw Error("term component " + std::to_string(c) + " out of range");
      }
      if (c <= prev) throw Error("term indices must be strictly ascending");
      prev = c;
    }
    if (!std::isfinite(spec.weights[k])) {
      throw Error("objective weights must be finite");
    }
  }
  for (int i = 0; i < n_components; ++i) {
    if (spec.terms[i] != Subset{i}) {
      throw Error("term " + std::to_string(i) + " must be the singleton [" +
                  std::to_string(i) + "]");
    }
  }

  CheckedObjective checked;
  checked.n_components = n_components;
  checked.direction = spec.direction;
  checked.iin_bits = spec.iin_bits;
  for (int i = 0; i < n_components; ++i) {
    checked.terms.push_back(spec.terms[i]);
    checked.quantity_weights.push_back(spec.weights[i]);
  }

  // Merge duplicate multi-component terms, preserving first appearance.
  std::map<Subset, std::size_t> seen;
  for (std::size_t k = n_components; k < spec.terms.size(); ++k) {
    const Subset& term = spec.terms[k];
    if (term.size() == 1) {
      throw Error("singleton terms may appear only in the leading block");
    }
    const auto it = seen.find(term);
    if (it != seen.end()) {
      checked.quantity_weights[it->second] += spec.weights[k];
      continue;
    }
    seen.emplace(term, checked.terms.size());
    checked.multi_terms.push_back(checked.terms.size());
    checked.terms.push_back(term);
    checked.quantity_weights.push_back(spec.weights[k]);
  }

  const double sign = spec.direction == Direction::Maximize ? 1.0 : -1.0;
  checked.ascent_weights.reserve(checked.quantity_weights.size());
  for (double w : checked.quantity_weights) {
    checked.ascent_weights.push_back(sign * w);
  }
  return checked;
}

ObjectiveSpec tc_objective(int n_components, Direction direction,
                           double iin_bits) {
  if (n_components < 2) {
    throw Error("total correlation needs at least two components");
  }
  ObjectiveSpec spec;
  spec.direction = direction;
  spec.iin_bits = iin_bits;
  Subset full;
  for (int i = 0; i < n_components; ++i) {
    spec.terms.push_back({i});
    spec.weights.push_back(1.0);
    full.push_back(i);
  }
  spec.terms.push_back(full);
  spec.weights.push_back(-1.0);
  return spec;
}

ObjectiveSpec o_objective(int n_components, Direction direction,
                          double iin_bits) {
  if (n_components < 3) {
    throw Error("o-information needs at least three components");
  }
  ObjectiveSpec spec;
  spec.direction = direction;
  spec.iin_bits = iin_bits;
  Subset full;
  for (int i = 0; i < n_components; ++i) {
    spec.terms.push_back({i});
    spec.weights.push_back(1.0);
    full.push_back(i);
  }
  for (int i = 0; i < n_components; ++i) {
    Subset rest;
    for (int c = 0; c < n_components; ++c) {
      if (c != i) rest.push_back(c);
    }
    spec.terms.push_back(std::move(rest));
    spec.weights.push_back(-1.0);
  }
  spec.terms.push_back(full);
  spec.weights.push_back(static_cast<double>(n_components - 2));
  return spec;
}

ObjectiveSpec objective_from_json(const Json& j) {
  ObjectiveSpec spec;
  if (!j.is_object()) throw Error("objective JSON must be an object");
  if (!j.contains("terms") || !j.contains("weights")) {
    throw Error("objective JSON needs 'terms' and 'weights'");
  }
  for (const auto& term : j.at("terms")) {
    Subset s;
    for (const auto& c : term) s.push_back(c.get<int>());
    spec.terms.push_back(std::move(s));
  }
  for (const auto& w : j.at("weights")) {
    spec.weights.push_back(w.get<double>());
  }
  if (j.contains("direction")) {
    spec.direction = direction_from_string(j.at("direction").get<std::string>());
  }
  if (j.contains("iin_bits")) {
    spec.iin_bits = j.at("iin_bits").get<double>();
  }
  return spec;
}

Json objective_to_json(const ObjectiveSpec& spec) {
  Json j;
  j["terms"] = spec.terms;
  j["weights"] = spec.weights;
  j["direction"] = to_string(spec.direction);
  j["iin_bits"] = spec.iin_bits;
  return j;
}

}  // namespace descspace::objective
