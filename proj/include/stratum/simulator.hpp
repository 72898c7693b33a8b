#pragma once

// Deterministic fluid simulation with a 1 s tick. Components are processed
// in topological order, so messages can cross the whole pipeline within one
// tick; a component's completions are split evenly over its outgoing flows.

#include "stratum/controller.hpp"
#include "stratum/placement.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stratum {

struct RateOverride {
    std::string component;
    int tick = 0;
    Quantity rate = 0;
};

struct SimConfig {
    int ticks = 1;
    std::vector<RateOverride> overrides;
};

struct ComponentState {
    Quantity queue = 0;
    Quantity rate = 0;       // current arrival rate, ingestion only
    Quantity generated = 0;  // cumulative arrivals created at this component
    Quantity completed = 0;  // cumulative completions
};

struct SimState {
    PlacementPlan deployment;                // hosts and replica counts
    std::vector<ComponentState> components;  // component source order
};

struct ComponentTick {
    int tick;
    std::string component;
    std::string host;
    int replicas;
    Quantity in_rate;
    Quantity utilization;
    Quantity queue;  // end of tick
    Quantity completions;
};

struct FlowTick {
    int tick;
    std::string src;
    std::string dst;
    std::optional<Quantity> latency_ms;  // nullopt: hosts not linked
    bool violation;
};

struct TickMetrics {
    std::vector<ComponentTick> components;  // component source order
    std::vector<FlowTick> flows;            // flow declaration order
};

struct Conservation {
    Quantity generated = 0;
    Quantity sink_completions = 0;
    Quantity final_queues = 0;

    bool balanced() const { return generated == sink_completions + final_queues; }
};

struct SimReport {
    std::vector<TickMetrics> ticks;
    std::vector<Action> actions;
    Conservation conservation;

    std::string metrics_csv() const;
    std::string flows_csv() const;
    std::string action_log() const;
};

SimState initial_state(const PipelineSpec& spec, const PlacementPlan& plan);

struct StepResult {
    SimState next;
    TickMetrics metrics;
};

StepResult step(const SimState& state, const PipelineSpec& spec, const ResourceTopology& topology, int tick);

Conservation conservation_of(const SimState& state, const PipelineSpec& spec);

/// Runs `config.ticks` steps. With a policy, decide() runs after each tick
/// and its actions (stamped tick + 1) take effect before the next tick.
/// Throws std::invalid_argument for an infeasible plan or bad overrides.
SimReport run(const PipelineSpec& spec, const ResourceTopology& topology, const PlacementPlan& plan,
              const SimConfig& config, const std::optional<PolicyConfig>& policy);

}  // namespace stratum
