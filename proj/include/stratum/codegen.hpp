#pragma once

// Deployment manifests: one YAML-style document per hosting node plus an
// index. Output is byte-deterministic; format reference in docs/manifest-format.md.

#include "stratum/placement.hpp"
#include "stratum/registry.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratum {

struct DeployUnit {
    std::string component;
    ComponentKind kind;
    int replicas;
    Quantity cpu;
    std::int64_t mem_mb;
    bool gpu;
    std::optional<std::string> model;  // pinned name@version

    bool operator==(const DeployUnit&) const = default;
};

struct WiringEntry {
    std::string src;
    std::string src_node;
    std::string dst;
    std::string dst_node;
    std::optional<Quantity> latency_ms;  // nullopt when the hosts are not linked
    std::optional<Quantity> max_latency_ms;

    bool operator==(const WiringEntry&) const = default;
};

struct DeploymentManifest {
    std::string node_id;
    Tier tier;
    std::vector<DeployUnit> units;     // sorted by component name
    std::vector<WiringEntry> wiring;   // flows leaving this node's units, sorted by (src, dst)

    std::string file_name() const { return node_id + ".deploy.yaml"; }
    std::string render() const;
};

class CodegenError : public std::runtime_error {
public:
    enum class Kind { infeasible_plan, unresolvable_model, plan_mismatch };

    CodegenError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Manifests sorted by node id, one per node hosting at least one component.
std::vector<DeploymentManifest> generate(const PipelineSpec& spec, const ResourceTopology& topology,
                                         const PlacementPlan& plan, const ModelRegistry& registry,
                                         const EvalStrategy& strategy);

std::string render_index(const PipelineSpec& spec, const PlacementPlan& plan,
                         const std::vector<DeploymentManifest>& manifests);

/// Writes index.yaml and every manifest into `out_dir` (created if absent).
/// Throws std::filesystem::filesystem_error / std::runtime_error on I/O failure.
void write_manifests(const std::filesystem::path& out_dir, const PipelineSpec& spec, const PlacementPlan& plan,
                     const std::vector<DeploymentManifest>& manifests);

}  // namespace stratum
