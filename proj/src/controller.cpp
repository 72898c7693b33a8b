#include "stratum/controller.hpp"

#include <algorithm>
#include <stdexcept>

namespace stratum {

void PolicyConfig::check() const {
    if (high_util <= 0 || high_util > 1) throw std::invalid_argument("high_util must be in (0, 1]");
    if (low_util < 0 || low_util >= 1) throw std::invalid_argument("low_util must be in [0, 1)");
    if (low_util >= high_util) throw std::invalid_argument("low_util must be below high_util");
    if (high_window < 1 || low_window < 1) throw std::invalid_argument("windows must be >= 1");
    if (cooldown < 0) throw std::invalid_argument("cooldown must be >= 0");
    if (min_replicas < 1) throw std::invalid_argument("min_replicas must be >= 1");
}

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::scale_out: return "scale_out";
        case ActionKind::scale_in: return "scale_in";
        case ActionKind::migrate: return "migrate";
        case ActionKind::saturated: return "saturated";
    }
    return "?";
}

std::string Action::render() const {
    return "t=" + std::to_string(tick) + " " + component + " " + std::string(to_string(kind)) + " " + detail;
}

namespace {

bool window_exceeds(const std::vector<Quantity>& samples, int window, const Quantity& threshold) {
    if (static_cast<int>(samples.size()) < window) return false;
    return std::all_of(samples.end() - window, samples.end(), [&](const Quantity& u) { return u > threshold; });
}

bool window_below(const std::vector<Quantity>& samples, int window, const Quantity& threshold) {
    // Missing history counts as utilization 0.
    const int have = std::min<int>(window, static_cast<int>(samples.size()));
    if (have < window && !(Quantity(0) < threshold)) return false;
    return std::all_of(samples.end() - have, samples.end(), [&](const Quantity& u) { return u < threshold; });
}

struct NodeUse {
    Quantity cpu = 0;
    std::int64_t mem = 0;
    std::int64_t gpus = 0;
};

// Load on `node` from every component except `skip`.
NodeUse load_without(const PlacementPlan& deployment, const PipelineSpec& spec, const std::string& node,
                     const std::string& skip) {
    NodeUse use;
    for (const auto& c : spec.components) {
        if (c.name == skip || deployment.assignments.at(c.name) != node) continue;
        const int r = deployment.replicas.at(c.name);
        use.cpu += r * c.cpu;
        use.mem += r * c.mem_mb;
        if (c.needs_gpu()) use.gpus += r;
    }
    return use;
}

// First exhausted resource when `replicas` copies of `c` join `node`,
// checked gpu, cpu, mem; nullopt if everything fits.
std::optional<std::string> shortfall(const PlacementPlan& deployment, const PipelineSpec& spec, const NodeDesc& node,
                                     const Component& c, int replicas) {
    const NodeUse use = load_without(deployment, spec, node.id, c.name);
    if (c.needs_gpu() && use.gpus + replicas > node.gpus) return "gpu";
    if (use.cpu + replicas * c.cpu > node.cpu_cores) return "cpu";
    if (use.mem + replicas * c.mem_mb > node.mem_mb) return "mem";
    return std::nullopt;
}

bool latency_ok_on(const PlacementPlan& deployment, const PipelineSpec& spec, const ResourceTopology& topology,
                   const Component& c, const std::string& candidate) {
    for (const auto& f : spec.flows) {
        if (!f.max_latency_ms || (f.src != c.name && f.dst != c.name)) continue;
        const std::string& other = f.src == c.name ? f.dst : f.src;
        const auto latency = topology.latency(candidate, deployment.assignments.at(other));
        if (!latency || *latency > *f.max_latency_ms) return false;
    }
    return true;
}

std::optional<std::string> migration_target(const PlacementPlan& deployment, const PipelineSpec& spec,
                                             const ResourceTopology& topology, const Component& c, int replicas) {
    std::vector<const NodeDesc*> candidates;
    for (const auto& n : topology.nodes()) candidates.push_back(&n);
    std::sort(candidates.begin(), candidates.end(), [](const NodeDesc* a, const NodeDesc* b) {
        if (a->cost_per_core_hour != b->cost_per_core_hour) return a->cost_per_core_hour < b->cost_per_core_hour;
        return a->id < b->id;
    });
    const std::string& current = deployment.assignments.at(c.name);
    for (const auto* n : candidates) {
        if (n->id == current || !tier_allows(c.tier_hint, n->tier)) continue;
        if (shortfall(deployment, spec, *n, c, replicas)) continue;
        if (!latency_ok_on(deployment, spec, topology, c, n->id)) continue;
        return n->id;
    }
    return std::nullopt;
}

}  // namespace

void apply_action(PlacementPlan& deployment, const Action& action, const PipelineSpec& spec,
                  const ResourceTopology& topology) {
    auto& replicas = deployment.replicas.at(action.component);
    switch (action.kind) {
        case ActionKind::scale_out: ++replicas; break;
        case ActionKind::scale_in: --replicas; break;
        case ActionKind::migrate:
            deployment.assignments.at(action.component) = action.detail;
            ++replicas;
            break;
        case ActionKind::saturated: return;
    }
    deployment.cost_per_hour = plan_cost(spec, topology, deployment);
}

std::vector<Action> decide(const UtilizationHistory& history, const PlacementPlan& deployment,
                           const CooldownLedger& last_action, const PipelineSpec& spec,
                           const ResourceTopology& topology, const PolicyConfig& policy, int tick) {
    std::vector<Action> actions;
    PlacementPlan working = deployment;
    static const std::vector<Quantity> no_samples;

    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const Component& c = spec.components[i];
        const auto& samples = i < history.size() ? history[i] : no_samples;
        const bool cooled = i >= last_action.size() || !last_action[i] || tick - *last_action[i] >= policy.cooldown;
        if (!cooled) continue;

        const int replicas = working.replicas.at(c.name);
        std::optional<Action> action;
        if (window_exceeds(samples, policy.high_window, policy.high_util)) {
            const NodeDesc& host = topology.node(working.assignments.at(c.name));
            const auto missing = shortfall(working, spec, host, c, replicas + 1);
            if (!missing) {
                action = Action{tick, c.name, ActionKind::scale_out, std::to_string(replicas + 1)};
            } else if (auto target = migration_target(working, spec, topology, c, replicas + 1)) {
                action = Action{tick, c.name, ActionKind::migrate, *target};
            } else {
                action = Action{tick, c.name, ActionKind::saturated, *missing};
            }
        } else if (replicas > policy.min_replicas && window_below(samples, policy.low_window, policy.low_util)) {
            action = Action{tick, c.name, ActionKind::scale_in, std::to_string(replicas - 1)};
        }

        if (action) {
            apply_action(working, *action, spec, topology);
            actions.push_back(std::move(*action));
        }
    }
    return actions;
}

}  // namespace stratum
