#pragma once

#include "stratum/number.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stratum {

enum class Tier { edge, fog, cloud };

std::string_view to_string(Tier tier);
std::optional<Tier> parse_tier(std::string_view text);

struct NodeDesc {
    std::string id;
    Tier tier = Tier::edge;
    Quantity cpu_cores = 1;
    std::int64_t mem_mb = 1;
    int gpus = 0;
    Quantity cost_per_core_hour = 0;

    bool operator==(const NodeDesc&) const = default;
};

struct LinkDesc {
    std::string a;
    std::string b;
    Quantity latency_ms = 0;
    Quantity bandwidth_mbps = 1;  // loaded and reported, not constrained

    bool operator==(const LinkDesc&) const = default;
};

/// Error raised while loading a topology; `path` is a JSON-path-style
/// location such as "$.nodes[2].cpu_cores".
class TopologyError : public std::runtime_error {
public:
    TopologyError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class ResourceTopology {
public:
    ResourceTopology() = default;
    /// Enforces id uniqueness, link endpoint existence, no self links and at
    /// most one link per unordered pair. Throws TopologyError.
    ResourceTopology(std::vector<NodeDesc> nodes, std::vector<LinkDesc> links);

    const std::vector<NodeDesc>& nodes() const { return nodes_; }
    const std::vector<LinkDesc>& links() const { return links_; }

    const NodeDesc* find(std::string_view id) const;
    const NodeDesc& node(std::string_view id) const;
    /// Node ids in ascending lexicographic order.
    std::vector<std::string> sorted_ids() const;

    /// Single-hop latency: 0 for x == y, the link latency if linked,
    /// nullopt (unreachable) otherwise. Throws std::out_of_range on unknown ids.
    std::optional<Quantity> latency(std::string_view x, std::string_view y) const;

    bool operator==(const ResourceTopology&) const = default;

private:
    std::vector<NodeDesc> nodes_;
    std::vector<LinkDesc> links_;
};

ResourceTopology load_topology(std::string_view json_text);
/// Canonical JSON (sorted keys, two-space indent, declaration order kept).
std::string serialize_topology(const ResourceTopology& topology);

}  // namespace stratum
