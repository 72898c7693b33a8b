#include "stratum/codegen.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace stratum {

namespace {

constexpr const char* header = "# generated by stratum; do not edit\n";

}  // namespace

std::string DeploymentManifest::render() const {
    std::ostringstream out;
    out << header;
    out << "node: " << node_id << "\n";
    out << "tier: " << to_string(tier) << "\n";
    out << "units:\n";
    for (const auto& u : units) {
        out << "  - component: " << u.component << "\n";
        out << "    kind: " << to_string(u.kind) << "\n";
        out << "    replicas: " << u.replicas << "\n";
        out << "    cpu: " << format_decimal(u.cpu) << "\n";
        out << "    mem_mb: " << u.mem_mb << "\n";
        out << "    gpu: " << (u.gpu ? "true" : "false") << "\n";
        out << "    model: " << (u.model ? *u.model : "none") << "\n";
    }
    if (wiring.empty()) {
        out << "wiring: []\n";
    } else {
        out << "wiring:\n";
        for (const auto& w : wiring) {
            out << "  - src: " << w.src << "@" << w.src_node << "\n";
            out << "    dst: " << w.dst << "@" << w.dst_node << "\n";
            out << "    latency_ms: " << (w.latency_ms ? format_decimal(*w.latency_ms) : "unreachable") << "\n";
            out << "    max_latency_ms: " << (w.max_latency_ms ? format_decimal(*w.max_latency_ms) : "none") << "\n";
        }
    }
    return out.str();
}

std::vector<DeploymentManifest> generate(const PipelineSpec& spec, const ResourceTopology& topology,
                                         const PlacementPlan& plan, const ModelRegistry& registry,
                                         const EvalStrategy& strategy) {
    using Kind = CodegenError::Kind;
    FeasibilityVerdict verdict;
    try {
        verdict = check_feasible(spec, topology, plan);
    } catch (const PlanError& e) {
        throw CodegenError(Kind::plan_mismatch, e.what());
    }
    if (plan.assignments.size() != spec.components.size()) {
        throw CodegenError(Kind::plan_mismatch, "plan does not cover exactly the pipeline's components");
    }
    if (!verdict.feasible()) {
        const auto& v = verdict.violations.front();
        throw CodegenError(Kind::infeasible_plan, "plan is infeasible: " + std::string(to_string(v.rule)) + " " +
                                                      v.subject);
    }

    std::map<std::string, DeploymentManifest> by_node;
    for (const auto& c : spec.components) {
        const std::string& node = plan.assignments.at(c.name);
        auto [it, inserted] = by_node.try_emplace(node);
        if (inserted) {
            it->second.node_id = node;
            it->second.tier = topology.node(node).tier;
        }
        DeployUnit unit{c.name, c.kind, plan.replicas.at(c.name), c.cpu, c.mem_mb, c.needs_gpu(), std::nullopt};
        if (c.model) {
            try {
                unit.model = registry.resolve(*c.model, strategy).ref();
            } catch (const RegistryError& e) {
                throw CodegenError(Kind::unresolvable_model,
                                   "cannot resolve model " + c.model->str() + " for '" + c.name + "': " + e.what());
            }
        }
        it->second.units.push_back(std::move(unit));
    }

    for (const auto& f : spec.flows) {
        const std::string& src_node = plan.assignments.at(f.src);
        const std::string& dst_node = plan.assignments.at(f.dst);
        by_node.at(src_node).wiring.push_back(
            {f.src, src_node, f.dst, dst_node, topology.latency(src_node, dst_node), f.max_latency_ms});
    }

    std::vector<DeploymentManifest> manifests;
    for (auto& [node, manifest] : by_node) {
        std::sort(manifest.units.begin(), manifest.units.end(),
                  [](const DeployUnit& a, const DeployUnit& b) { return a.component < b.component; });
        std::stable_sort(manifest.wiring.begin(), manifest.wiring.end(), [](const WiringEntry& a, const WiringEntry& b) {
            return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
        });
        manifests.push_back(std::move(manifest));
    }
    return manifests;
}

std::string render_index(const PipelineSpec& spec, const PlacementPlan& plan,
                         const std::vector<DeploymentManifest>& manifests) {
    std::ostringstream out;
    out << header;
    out << "pipeline: " << spec.name << "\n";
    out << "plan_mode: " << to_string(plan.mode) << "\n";
    out << "cost_per_hour: " << format_decimal(plan.cost_per_hour) << "\n";
    out << "manifests:\n";
    for (const auto& m : manifests) out << "  - " << m.file_name() << "\n";
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void write_manifests(const std::filesystem::path& out_dir, const PipelineSpec& spec, const PlacementPlan& plan,
                     const std::vector<DeploymentManifest>& manifests) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "index.yaml", render_index(spec, plan, manifests));
    for (const auto& m : manifests) write_file(out_dir / m.file_name(), m.render());
}

}  // namespace stratum
