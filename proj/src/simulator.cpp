#include "stratum/simulator.hpp"

#include "stratum/validator.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace stratum {

SimState initial_state(const PipelineSpec& spec, const PlacementPlan& plan) {
    SimState state;
    state.deployment = plan;
    for (const auto& c : spec.components) {
        ComponentState cs;
        if (c.kind == ComponentKind::ingestion) cs.rate = c.rate;
        state.components.push_back(cs);
    }
    return state;
}

StepResult step(const SimState& state, const PipelineSpec& spec, const ResourceTopology& topology, int tick) {
    StepResult result{state, {}};
    SimState& next = result.next;
    const std::size_t count = spec.components.size();

    std::vector<std::size_t> fanout(count, 0);
    std::vector<std::vector<std::size_t>> upstream(count);
    for (const auto& f : spec.flows) {
        const std::size_t s = *spec.index_of(f.src);
        const std::size_t d = *spec.index_of(f.dst);
        ++fanout[s];
        upstream[d].push_back(s);
    }

    std::vector<Quantity> completions(count, 0);
    std::vector<ComponentTick> rows(count);
    std::vector<Quantity> capacity(count, 0);
    for (std::size_t i : topological_order(spec)) {
        const Component& c = spec.components[i];
        ComponentState& cs = next.components[i];

        Quantity in = 0;
        if (c.kind == ComponentKind::ingestion) {
            in += cs.rate;
            cs.generated += cs.rate;
        }
        for (std::size_t u : upstream[i]) in += completions[u] / fanout[u];

        const int replicas = next.deployment.replicas.at(c.name);
        capacity[i] = replicas * c.service_rate;
        const Quantity offered = cs.queue + in;
        completions[i] = std::min(offered, capacity[i]);
        cs.queue = offered - completions[i];
        cs.completed += completions[i];

        rows[i] = ComponentTick{tick,
                                c.name,
                                next.deployment.assignments.at(c.name),
                                replicas,
                                in,
                                std::min<Quantity>(Quantity(1), offered / capacity[i]),
                                cs.queue,
                                completions[i]};
    }
    result.metrics.components = std::move(rows);

    for (const auto& f : spec.flows) {
        const std::size_t d = *spec.index_of(f.dst);
        auto link = topology.latency(next.deployment.assignments.at(f.src), next.deployment.assignments.at(f.dst));
        std::optional<Quantity> estimate;
        if (link) estimate = *link + 1000 * next.components[d].queue / capacity[d];
        const bool violation = f.max_latency_ms && (!estimate || *estimate > *f.max_latency_ms);
        result.metrics.flows.push_back(FlowTick{tick, f.src, f.dst, estimate, violation});
    }
    return result;
}

Conservation conservation_of(const SimState& state, const PipelineSpec& spec) {
    Conservation totals;
    std::vector<bool> has_output(spec.components.size(), false);
    for (const auto& f : spec.flows) has_output[*spec.index_of(f.src)] = true;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto& cs = state.components[i];
        totals.generated += cs.generated;
        totals.final_queues += cs.queue;
        if (!has_output[i]) totals.sink_completions += cs.completed;
    }
    return totals;
}

SimReport run(const PipelineSpec& spec, const ResourceTopology& topology, const PlacementPlan& plan,
              const SimConfig& config, const std::optional<PolicyConfig>& policy) {
    if (config.ticks < 1) throw std::invalid_argument("ticks must be >= 1");
    for (const auto& o : config.overrides) {
        const Component* c = spec.find(o.component);
        if (!c) throw std::invalid_argument("override names unknown component '" + o.component + "'");
        if (c->kind != ComponentKind::ingestion) {
            throw std::invalid_argument("override target '" + o.component + "' is not an ingestion component");
        }
        if (o.tick < 0 || o.tick >= config.ticks) throw std::invalid_argument("override tick out of range");
        if (o.rate < 0) throw std::invalid_argument("override rate must be >= 0");
    }
    if (!check_feasible(spec, topology, plan).feasible()) throw std::invalid_argument("plan is infeasible");
    if (policy) policy->check();

    SimReport report;
    SimState state = initial_state(spec, plan);
    UtilizationHistory history(spec.components.size());
    CooldownLedger last_action(spec.components.size());

    for (int t = 0; t < config.ticks; ++t) {
        for (const auto& o : config.overrides) {
            if (o.tick == t) state.components[*spec.index_of(o.component)].rate = o.rate;
        }
        StepResult result = step(state, spec, topology, t);
        state = std::move(result.next);
        for (std::size_t i = 0; i < spec.components.size(); ++i) {
            history[i].push_back(result.metrics.components[i].utilization);
        }
        report.ticks.push_back(std::move(result.metrics));

        if (!policy) continue;
        const int stamp = t + 1;
        for (auto& action : decide(history, state.deployment, last_action, spec, topology, *policy, stamp)) {
            apply_action(state.deployment, action, spec, topology);
            last_action[*spec.index_of(action.component)] = stamp;
            report.actions.push_back(std::move(action));
        }
    }
    report.conservation = conservation_of(state, spec);
    return report;
}

std::string SimReport::metrics_csv() const {
    std::ostringstream out;
    out << "tick,component,host,replicas,in_rate,utilization,queue,completions\n";
    for (const auto& tick : ticks) {
        for (const auto& r : tick.components) {
            out << r.tick << ',' << r.component << ',' << r.host << ',' << r.replicas << ','
                << format_decimal(r.in_rate) << ',' << format_decimal(r.utilization) << ','
                << format_decimal(r.queue) << ',' << format_decimal(r.completions) << '\n';
        }
    }
    return out.str();
}

std::string SimReport::flows_csv() const {
    std::ostringstream out;
    out << "tick,src,dst,latency_ms,violation\n";
    for (const auto& tick : ticks) {
        for (const auto& f : tick.flows) {
            out << f.tick << ',' << f.src << ',' << f.dst << ','
                << (f.latency_ms ? format_decimal(*f.latency_ms) : "inf") << ',' << (f.violation ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string SimReport::action_log() const {
    std::string out;
    for (const auto& a : actions) out += a.render() + "\n";
    return out;
}

}  // namespace stratum
