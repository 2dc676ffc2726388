#pragma once

#include <vector>

#include "descspace/channels.hpp"
#include "descspace/table.hpp"

namespace descspace::infotheory {

/// Shannon entropy of the marginal on `subset`, in bits.  The empty subset
/// has entropy 0.
double entropy(const JointTable& table, const Subset& subset);

/// Entropy of the full joint, in bits.
double entropy(const JointTable& table);

/// Entropies of every single component, in bits.
std::vector<double> component_entropies(const JointTable& table);

/// Total correlation Σ_i H(X_i) - H(X), in bits.  Zero for one component.
double total_correlation(const JointTable& table);

/// O-information (N-2) H(X) + Σ_i [H(X_i) - H(X_{\i})], in bits.
/// Requires at least three components.
double o_information(const JointTable& table);

/// I(U_S ; X_S) in bits for a per-component discrete description applied to
/// the subset S.  Conditional independence of the components makes the
/// conditional entropy split per component; the output entropy is evaluated
/// on the sparse mixture over the subset marginal.
double channel_mutual_information(
    const JointTable& table,
    const std::vector<channels::DiscreteChannel>& description,
    const Subset& subset);

/// Pushforward joint table of U = channels(X): alphabet sizes become the
/// channel output arities, masses are Σ_x p(x) Π_i q_i(u_i | x_i).
JointTable description_joint(
    const JointTable& table,
    const std::vector<channels::DiscreteChannel>& description);

/// Description-level total correlation Σ_i I(U_i ; X_i) - I(U ; X), in bits,
/// assembled term by term.  Agrees with total_correlation(description_joint)
/// for per-component channels.
double description_tc(const JointTable& table,
                      const std::vector<channels::DiscreteChannel>& description);

/// Description-level O-information (N-2) I(U;X) + Σ_i [I(U_i;X_i) -
/// I(U_{\i};X_{\i})], in bits, assembled term by term.  Agrees with
/// o_information(description_joint) for per-component channels.
double description_o(const JointTable& table,
                     const std::vector<channels::DiscreteChannel>& description);

/// One outcome's share of a summary quantity.  `local_bits` is the pointwise
/// value; `contribution_bits` = mass * local_bits.  Contributions over a
/// table sum back to the summary quantity.
struct PointwiseReport {
  Outcome code;
  double mass = 0.0;
  double local_bits = 0.0;
  double contribution_bits = 0.0;
};

/// Pointwise total correlation log2[p(x) / Π p_i(x_i)] per outcome, sorted by
/// contribution descending (ties by outcome).
std::vector<PointwiseReport> pointwise_tc(const JointTable& table);

/// Pointwise O-information per outcome, same layout and ordering rules.
/// Requires at least three components.
std::vector<PointwiseReport> pointwise_o(const JointTable& table);

enum class Quantity { TotalCorrelation, OInformation };

/// One subsystem's coordinates under the identity description: the sum of
/// its component entropies, its joint entropy, and its summary quantity.
struct SubsystemPoint {
  Subset subset;
  double component_info_bits = 0.0;
  double system_info_bits = 0.0;
  double quantity_bits = 0.0;
};

/// Evaluates every subset of components (including the empty one), in
/// ascending bitmask order.  Limited to 16 components.
std::vector<SubsystemPoint> subsystem_points(const JointTable& table,
                                             Quantity quantity);

}  // namespace descspace::infotheory
