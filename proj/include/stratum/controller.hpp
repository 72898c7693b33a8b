#pragma once

// Threshold/hysteresis elasticity policy. Each component is judged on its
// own utilization history; actions are scale_out, scale_in, migrate (move
// to another node with one extra replica) or a saturated event when no
// node can absorb the extra replica.

#include "stratum/placement.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stratum {

struct PolicyConfig {
    Quantity high_util{4, 5};
    Quantity low_util{3, 10};
    int high_window = 3;
    int low_window = 10;
    int cooldown = 5;
    int min_replicas = 1;

    /// Throws std::invalid_argument when thresholds or windows are out of range.
    void check() const;
};

enum class ActionKind { scale_out, scale_in, migrate, saturated };

std::string_view to_string(ActionKind kind);

struct Action {
    int tick = 0;
    std::string component;
    ActionKind kind = ActionKind::scale_out;
    std::string detail;  // new replica count, destination node, or saturation reason

    /// "t=<tick> <component> <kind> <detail>"
    std::string render() const;
    bool operator==(const Action&) const = default;
};

/// [component source index][tick] utilization samples, oldest first.
using UtilizationHistory = std::vector<std::vector<Quantity>>;

/// Tick of the last action per component (any kind), nullopt if none yet.
using CooldownLedger = std::vector<std::optional<int>>;

/// Evaluates every component in source order against `deployment`, applying
/// each emitted action to a working copy so later components see the
/// capacity it consumed. At most one action per component.
std::vector<Action> decide(const UtilizationHistory& history, const PlacementPlan& deployment,
                           const CooldownLedger& last_action, const PipelineSpec& spec,
                           const ResourceTopology& topology, const PolicyConfig& policy, int tick);

/// Applies a single action to a deployment. saturated leaves it unchanged.
void apply_action(PlacementPlan& deployment, const Action& action, const PipelineSpec& spec,
                  const ResourceTopology& topology);

}  // namespace stratum
