#pragma once

// Component-to-node placement: a feasibility checker, an exhaustive
// cost-minimal solver and a greedy heuristic for large instances.
//
// All replicas of a component share one node. A gpu-required component
// consumes one GPU per replica. tier_hint other than "any" is binding.

#include "stratum/spec_lang.hpp"
#include "stratum/topology.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stratum {

enum class PlanMode { exact, heuristic };

std::string_view to_string(PlanMode mode);

struct PlacementPlan {
    std::map<std::string, std::string> assignments;  // component -> node
    std::map<std::string, int> replicas;
    Quantity cost_per_hour = 0;
    PlanMode mode = PlanMode::exact;

    bool operator==(const PlacementPlan&) const = default;
};

enum class Rule { cap_cpu, cap_mem, cap_gpu, tier, latency, unreachable };

std::string_view to_string(Rule rule);

struct Violation {
    Rule rule;
    std::string subject;  // node id for CAP_*, component for TIER, "src->dst" for flows

    bool operator==(const Violation&) const = default;
};

struct FeasibilityVerdict {
    std::vector<Violation> violations;

    bool feasible() const { return violations.empty(); }
    bool has(Rule rule) const;
};

/// Raised when a plan names components or nodes that do not exist, or
/// leaves a component unassigned.
class PlanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool tier_allows(TierHint hint, Tier tier);

/// Sum over components of replicas x cpu x cost_per_core_hour(host).
Quantity plan_cost(const PipelineSpec& spec, const ResourceTopology& topology, const PlacementPlan& plan);

FeasibilityVerdict check_feasible(const PipelineSpec& spec, const ResourceTopology& topology,
                                  const PlacementPlan& plan);

/// Builds a plan from per-component node ids (component source order),
/// replicas taken from the pipeline.
PlacementPlan make_plan(const PipelineSpec& spec, const ResourceTopology& topology,
                        const std::vector<std::string>& nodes, PlanMode mode);

/// |nodes|^|components|, saturating at UINT64_MAX.
std::uint64_t assignment_count(const PipelineSpec& spec, const ResourceTopology& topology);

inline constexpr std::uint64_t exact_search_limit = 1'000'000;

/// Minimum-cost feasible plan over all assignments. Ties go to the
/// lexicographically smallest assignment taken in component source order
/// with node ids ascending. nullopt means proven infeasible.
std::optional<PlacementPlan> plan_exact(const PipelineSpec& spec, const ResourceTopology& topology);

/// Greedy placement by descending replicas x cpu, cheapest feasible node
/// first, no backtracking. nullopt does not prove infeasibility.
std::optional<PlacementPlan> plan_heuristic(const PipelineSpec& spec, const ResourceTopology& topology);

/// {"assignments","cost_per_hour","mode","replicas"}, keys sorted.
std::string plan_to_json(const PlacementPlan& plan);
/// Throws std::invalid_argument on malformed input.
PlacementPlan plan_from_json(std::string_view text);

}  // namespace stratum
