#include "stratum/placement.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace stratum {

using nlohmann::json;

std::string_view to_string(PlanMode mode) {
    return mode == PlanMode::exact ? "exact" : "heuristic";
}

std::string_view to_string(Rule rule) {
    switch (rule) {
        case Rule::cap_cpu: return "CAP_CPU";
        case Rule::cap_mem: return "CAP_MEM";
        case Rule::cap_gpu: return "CAP_GPU";
        case Rule::tier: return "TIER";
        case Rule::latency: return "LATENCY";
        case Rule::unreachable: return "UNREACHABLE";
    }
    return "?";
}

bool FeasibilityVerdict::has(Rule rule) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

bool tier_allows(TierHint hint, Tier tier) {
    switch (hint) {
        case TierHint::any: return true;
        case TierHint::edge: return tier == Tier::edge;
        case TierHint::fog: return tier == Tier::fog;
        case TierHint::cloud: return tier == Tier::cloud;
    }
    return false;
}

namespace {

struct Placed {
    const NodeDesc* node;
    int replicas;
};

std::vector<Placed> resolve_plan(const PipelineSpec& spec, const ResourceTopology& topology,
                                 const PlacementPlan& plan) {
    for (const auto& [component, node] : plan.assignments) {
        if (!spec.find(component)) throw PlanError("plan assigns unknown component '" + component + "'");
        if (!topology.find(node)) throw PlanError("plan uses unknown node '" + node + "'");
    }
    std::vector<Placed> placed;
    placed.reserve(spec.components.size());
    for (const auto& c : spec.components) {
        auto a = plan.assignments.find(c.name);
        if (a == plan.assignments.end()) throw PlanError("component '" + c.name + "' is not assigned");
        auto r = plan.replicas.find(c.name);
        if (r == plan.replicas.end()) throw PlanError("component '" + c.name + "' has no replica count");
        if (r->second < 1) throw PlanError("component '" + c.name + "' has fewer than one replica");
        placed.push_back({topology.find(a->second), r->second});
    }
    return placed;
}

}  // namespace

Quantity plan_cost(const PipelineSpec& spec, const ResourceTopology& topology, const PlacementPlan& plan) {
    const auto placed = resolve_plan(spec, topology, plan);
    Quantity cost = 0;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        cost += placed[i].replicas * spec.components[i].cpu * placed[i].node->cost_per_core_hour;
    }
    return cost;
}

FeasibilityVerdict check_feasible(const PipelineSpec& spec, const ResourceTopology& topology,
                                  const PlacementPlan& plan) {
    const auto placed = resolve_plan(spec, topology, plan);
    FeasibilityVerdict verdict;

    for (const auto& node : topology.nodes()) {
        Quantity cpu = 0;
        std::int64_t mem = 0;
        std::int64_t gpus = 0;
        for (std::size_t i = 0; i < spec.components.size(); ++i) {
            if (placed[i].node != &node) continue;
            const auto& c = spec.components[i];
            cpu += placed[i].replicas * c.cpu;
            mem += placed[i].replicas * c.mem_mb;
            if (c.needs_gpu()) gpus += placed[i].replicas;
        }
        if (cpu > node.cpu_cores) verdict.violations.push_back({Rule::cap_cpu, node.id});
        if (mem > node.mem_mb) verdict.violations.push_back({Rule::cap_mem, node.id});
        if (gpus > node.gpus) verdict.violations.push_back({Rule::cap_gpu, node.id});
    }

    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        if (!tier_allows(spec.components[i].tier_hint, placed[i].node->tier)) {
            verdict.violations.push_back({Rule::tier, spec.components[i].name});
        }
    }

    for (const auto& f : spec.flows) {
        if (!f.max_latency_ms) continue;
        const auto latency = topology.latency(plan.assignments.at(f.src), plan.assignments.at(f.dst));
        if (!latency) {
            verdict.violations.push_back({Rule::unreachable, f.src + "->" + f.dst});
        } else if (*latency > *f.max_latency_ms) {
            verdict.violations.push_back({Rule::latency, f.src + "->" + f.dst});
        }
    }
    return verdict;
}

PlacementPlan make_plan(const PipelineSpec& spec, const ResourceTopology& topology,
                        const std::vector<std::string>& nodes, PlanMode mode) {
    if (nodes.size() != spec.components.size()) throw PlanError("assignment size mismatch");
    PlacementPlan plan;
    plan.mode = mode;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        plan.assignments[spec.components[i].name] = nodes[i];
        plan.replicas[spec.components[i].name] = spec.components[i].replicas;
    }
    plan.cost_per_hour = plan_cost(spec, topology, plan);
    return plan;
}

std::uint64_t assignment_count(const PipelineSpec& spec, const ResourceTopology& topology) {
    const std::uint64_t base = topology.nodes().size();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        if (base == 0) return 0;
        if (total > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
        total *= base;
    }
    return total;
}

namespace {

// Placement problem flattened to indices: components in source order,
// nodes in id-ascending order.
struct Instance {
    struct Demand {
        Quantity cpu;        // replicas x cpu
        std::int64_t mem;    // replicas x mem
        std::int64_t gpus;   // replicas if gpu-required
        TierHint tier;
    };
    struct Bound {
        std::size_t a;
        std::size_t b;
        Quantity max_latency_ms;
    };

    std::vector<Demand> demand;
    std::vector<const NodeDesc*> nodes;
    std::vector<std::vector<Quantity>> cost;                        // [component][node]
    std::vector<std::vector<std::optional<Quantity>>> latency;      // [node][node]
    std::vector<Bound> bounds;

    Instance(const PipelineSpec& spec, const ResourceTopology& topology) {
        for (const auto& id : topology.sorted_ids()) nodes.push_back(&topology.node(id));
        for (const auto& c : spec.components) {
            demand.push_back({c.replicas * c.cpu, c.replicas * c.mem_mb, c.needs_gpu() ? c.replicas : 0,
                              c.tier_hint});
            std::vector<Quantity> row;
            for (const auto* n : nodes) row.push_back(c.replicas * c.cpu * n->cost_per_core_hour);
            cost.push_back(std::move(row));
        }
        latency.assign(nodes.size(), std::vector<std::optional<Quantity>>(nodes.size()));
        for (std::size_t x = 0; x < nodes.size(); ++x) {
            for (std::size_t y = 0; y < nodes.size(); ++y) latency[x][y] = topology.latency(nodes[x]->id, nodes[y]->id);
        }
        for (const auto& f : spec.flows) {
            if (!f.max_latency_ms) continue;
            bounds.push_back({*spec.index_of(f.src), *spec.index_of(f.dst), *f.max_latency_ms});
        }
    }

    bool within_bound(const Bound& bound, std::size_t node_a, std::size_t node_b) const {
        const auto& l = latency[node_a][node_b];
        return l && *l <= bound.max_latency_ms;
    }
};

struct Load {
    std::vector<Quantity> cpu;
    std::vector<std::int64_t> mem;
    std::vector<std::int64_t> gpus;

    explicit Load(std::size_t n) : cpu(n, 0), mem(n, 0), gpus(n, 0) {}

    bool fits(const Instance& inst, std::size_t c, std::size_t n) const {
        const auto& d = inst.demand[c];
        const auto* node = inst.nodes[n];
        return cpu[n] + d.cpu <= node->cpu_cores && mem[n] + d.mem <= node->mem_mb && gpus[n] + d.gpus <= node->gpus;
    }
    void add(const Instance& inst, std::size_t c, std::size_t n, int sign) {
        const auto& d = inst.demand[c];
        cpu[n] += sign * d.cpu;
        mem[n] += sign * d.mem;
        gpus[n] += sign * d.gpus;
    }
};

class ExactSearch {
public:
    explicit ExactSearch(const Instance& inst)
        : inst_(inst), load_(inst.nodes.size()), current_(inst.demand.size()) {
        for (std::size_t c = 0; c < inst.demand.size(); ++c) {
            std::vector<const Instance::Bound*> mine;
            for (const auto& b : inst.bounds) {
                if (std::max(b.a, b.b) == c) mine.push_back(&b);
            }
            closing_bounds_.push_back(std::move(mine));
        }
    }

    std::optional<std::vector<std::size_t>> run() {
        descend(0, 0);
        return best_;
    }

private:
    void descend(std::size_t c, const Quantity& partial) {
        if (best_ && partial >= best_cost_) return;
        if (c == inst_.demand.size()) {
            best_ = current_;
            best_cost_ = partial;
            return;
        }
        for (std::size_t n = 0; n < inst_.nodes.size(); ++n) {
            if (!tier_allows(inst_.demand[c].tier, inst_.nodes[n]->tier)) continue;
            if (!load_.fits(inst_, c, n)) continue;
            current_[c] = n;
            bool latency_ok = true;
            for (const auto* b : closing_bounds_[c]) {
                if (!inst_.within_bound(*b, current_[b->a], current_[b->b])) {
                    latency_ok = false;
                    break;
                }
            }
            if (!latency_ok) continue;
            load_.add(inst_, c, n, +1);
            descend(c + 1, partial + inst_.cost[c][n]);
            load_.add(inst_, c, n, -1);
        }
    }

    const Instance& inst_;
    Load load_;
    std::vector<std::size_t> current_;
    std::vector<std::vector<const Instance::Bound*>> closing_bounds_;
    std::optional<std::vector<std::size_t>> best_;
    Quantity best_cost_ = 0;
};

PlacementPlan to_plan(const PipelineSpec& spec, const ResourceTopology& topology, const Instance& inst,
                      const std::vector<std::size_t>& choice, PlanMode mode) {
    std::vector<std::string> nodes;
    nodes.reserve(choice.size());
    for (std::size_t n : choice) nodes.push_back(inst.nodes[n]->id);
    return make_plan(spec, topology, nodes, mode);
}

}  // namespace

std::optional<PlacementPlan> plan_exact(const PipelineSpec& spec, const ResourceTopology& topology) {
    const Instance inst(spec, topology);
    auto choice = ExactSearch(inst).run();
    if (!choice) return std::nullopt;
    return to_plan(spec, topology, inst, *choice, PlanMode::exact);
}

std::optional<PlacementPlan> plan_heuristic(const PipelineSpec& spec, const ResourceTopology& topology) {
    const Instance inst(spec, topology);
    const std::size_t count = inst.demand.size();

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return inst.demand[a].cpu > inst.demand[b].cpu; });

    Load load(inst.nodes.size());
    std::vector<std::optional<std::size_t>> where(count);
    for (std::size_t c : order) {
        std::optional<std::size_t> pick;
        for (std::size_t n = 0; n < inst.nodes.size(); ++n) {
            if (!tier_allows(inst.demand[c].tier, inst.nodes[n]->tier)) continue;
            if (!load.fits(inst, c, n)) continue;
            bool latency_ok = true;
            for (const auto& b : inst.bounds) {
                if (b.a != c && b.b != c) continue;
                const std::size_t other = b.a == c ? b.b : b.a;
                if (!where[other]) continue;
                const std::size_t na = b.a == c ? n : *where[other];
                const std::size_t nb = b.b == c ? n : *where[other];
                if (!inst.within_bound(b, na, nb)) {
                    latency_ok = false;
                    break;
                }
            }
            if (!latency_ok) continue;
            if (!pick || inst.cost[c][n] < inst.cost[c][*pick]) pick = n;
        }
        if (!pick) return std::nullopt;
        where[c] = *pick;
        load.add(inst, c, *pick, +1);
    }

    std::vector<std::size_t> choice;
    choice.reserve(count);
    for (const auto& w : where) choice.push_back(*w);
    return to_plan(spec, topology, inst, choice, PlanMode::heuristic);
}

std::string plan_to_json(const PlacementPlan& plan) {
    json doc;
    doc["mode"] = std::string(to_string(plan.mode));
    doc["cost_per_hour"] = to_double(plan.cost_per_hour);
    doc["assignments"] = plan.assignments;
    doc["replicas"] = plan.replicas;
    return doc.dump(2) + "\n";
}

PlacementPlan plan_from_json(std::string_view text) {
    PlacementPlan plan;
    try {
        const json doc = json::parse(text);
        const std::string mode = doc.at("mode").get<std::string>();
        if (mode == "exact") {
            plan.mode = PlanMode::exact;
        } else if (mode == "heuristic") {
            plan.mode = PlanMode::heuristic;
        } else {
            throw std::invalid_argument("unknown plan mode '" + mode + "'");
        }
        plan.cost_per_hour = from_double(doc.at("cost_per_hour").get<double>());
        plan.assignments = doc.at("assignments").get<std::map<std::string, std::string>>();
        plan.replicas = doc.at("replicas").get<std::map<std::string, int>>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed plan: ") + e.what());
    }
    return plan;
}

}  // namespace stratum
