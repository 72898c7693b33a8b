#include "stratum/validator.hpp"

#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stratum {

std::string_view to_string(ValidationCode code) {
    switch (code) {
        case ValidationCode::empty: return "E_EMPTY";
        case ValidationCode::duplicate: return "E_DUPLICATE";
        case ValidationCode::unknown_component: return "E_UNKNOWN_COMPONENT";
        case ValidationCode::cycle: return "E_CYCLE";
        case ValidationCode::missing_model: return "E_MISSING_MODEL";
        case ValidationCode::unexpected_model: return "E_UNEXPECTED_MODEL";
        case ValidationCode::unreachable: return "E_UNREACHABLE";
        case ValidationCode::self_loop: return "E_SELF_LOOP";
        case ValidationCode::range: return "E_RANGE";
    }
    return "E_?";
}

bool ValidationReport::has(ValidationCode code) const {
    for (const auto& e : errors) {
        if (e.code == code) return true;
    }
    return false;
}

std::string ValidationReport::render() const {
    std::ostringstream out;
    for (const auto& e : errors) out << to_string(e.code) << " " << e.subject << ": " << e.message << "\n";
    return out.str();
}

namespace {

using Adjacency = std::vector<std::vector<std::size_t>>;

// Edges between known, distinct components; first occurrence of a name wins.
Adjacency build_graph(const PipelineSpec& spec, const std::map<std::string, std::size_t>& index) {
    Adjacency out(spec.components.size());
    for (const auto& f : spec.flows) {
        auto s = index.find(f.src);
        auto d = index.find(f.dst);
        if (s == index.end() || d == index.end() || s->second == d->second) continue;
        out[s->second].push_back(d->second);
    }
    return out;
}

bool reaches(const Adjacency& graph, std::size_t from, std::size_t target) {
    std::vector<bool> seen(graph.size(), false);
    std::vector<std::size_t> stack(graph[from].begin(), graph[from].end());
    while (!stack.empty()) {
        const std::size_t n = stack.back();
        stack.pop_back();
        if (n == target) return true;
        if (seen[n]) continue;
        seen[n] = true;
        for (std::size_t m : graph[n]) stack.push_back(m);
    }
    return false;
}

void check_ranges(const Component& c, std::vector<ValidationError>& errors) {
    auto range = [&](const std::string& what) {
        errors.push_back({ValidationCode::range, c.name, what});
    };
    if (!is_identifier(c.name)) range("component name is not an identifier");
    if (c.replicas < 1) range("replicas must be >= 1");
    if (c.cpu <= 0) range("cpu must be > 0");
    if (c.mem_mb <= 0) range("mem must be > 0");
    if (c.rate < 0) range("rate must be >= 0");
    if (c.service_rate <= 0) range("service_rate must be > 0");
}

}  // namespace

ValidationReport validate(const PipelineSpec& spec) {
    ValidationReport report;
    auto& errors = report.errors;

    if (spec.components.empty()) {
        errors.push_back({ValidationCode::empty, spec.name, "pipeline declares no components"});
    }

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto& c = spec.components[i];
        if (!index.emplace(c.name, i).second) {
            errors.push_back({ValidationCode::duplicate, c.name, "component declared more than once"});
        }
        check_ranges(c, errors);
        if (c.kind == ComponentKind::inference && !c.model) {
            errors.push_back({ValidationCode::missing_model, c.name, "inference component has no model"});
        }
        if (c.kind != ComponentKind::inference && c.model) {
            errors.push_back({ValidationCode::unexpected_model, c.name,
                              "model given on a " + std::string(to_string(c.kind)) + " component"});
        }
    }

    for (const auto& f : spec.flows) {
        if (f.src == f.dst) {
            errors.push_back({ValidationCode::self_loop, f.src, "flow connects a component to itself"});
            continue;
        }
        for (const auto* endpoint : {&f.src, &f.dst}) {
            if (!index.count(*endpoint)) {
                errors.push_back({ValidationCode::unknown_component, *endpoint,
                                  "flow " + f.src + " -> " + f.dst + " references an undeclared component"});
            }
        }
        if (f.max_latency_ms && *f.max_latency_ms <= 0) {
            errors.push_back({ValidationCode::range, f.src + "->" + f.dst, "max_latency_ms must be > 0"});
        }
    }

    const Adjacency graph = build_graph(spec, index);
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        if (index.at(spec.components[i].name) != i) continue;
        if (reaches(graph, i, i)) {
            errors.push_back({ValidationCode::cycle, spec.components[i].name, "component lies on a flow cycle"});
            break;
        }
    }

    std::vector<bool> from_ingestion(spec.components.size(), false);
    std::vector<bool> has_input(spec.components.size(), false);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        if (spec.components[i].kind == ComponentKind::ingestion) stack.push_back(i);
        for (std::size_t m : graph[i]) has_input[m] = true;
    }
    while (!stack.empty()) {
        const std::size_t n = stack.back();
        stack.pop_back();
        if (from_ingestion[n]) continue;
        from_ingestion[n] = true;
        for (std::size_t m : graph[n]) stack.push_back(m);
    }
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto& c = spec.components[i];
        if (c.kind == ComponentKind::ingestion || from_ingestion[i]) continue;
        const bool terminal_kind = c.kind == ComponentKind::batch || c.kind == ComponentKind::visualization;
        if (terminal_kind && has_input[i]) continue;
        errors.push_back({ValidationCode::unreachable, c.name, "not reachable from any ingestion component"});
    }
    return report;
}

std::vector<std::size_t> topological_order(const PipelineSpec& spec) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.components.size(); ++i) index.emplace(spec.components[i].name, i);
    const Adjacency graph = build_graph(spec, index);

    std::vector<int> indegree(spec.components.size(), 0);
    for (const auto& edges : graph) {
        for (std::size_t m : edges) ++indegree[m];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < indegree.size(); ++i) {
        if (indegree[i] == 0) ready.push(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        const std::size_t n = ready.top();
        ready.pop();
        order.push_back(n);
        for (std::size_t m : graph[n]) {
            if (--indegree[m] == 0) ready.push(m);
        }
    }
    if (order.size() != spec.components.size()) throw std::invalid_argument("flow graph has a cycle");
    return order;
}

}  // namespace stratum
