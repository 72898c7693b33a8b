#include "stratum/topology.hpp"

#include "stratum/spec_lang.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace stratum {

using nlohmann::json;

std::string_view to_string(Tier tier) {
    switch (tier) {
        case Tier::edge: return "edge";
        case Tier::fog: return "fog";
        case Tier::cloud: return "cloud";
    }
    return "?";
}

std::optional<Tier> parse_tier(std::string_view text) {
    for (auto tier : {Tier::edge, Tier::fog, Tier::cloud}) {
        if (to_string(tier) == text) return tier;
    }
    return std::nullopt;
}

ResourceTopology::ResourceTopology(std::vector<NodeDesc> nodes, std::vector<LinkDesc> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        const std::string at = "$.nodes[" + std::to_string(i) + "]";
        if (!is_identifier(n.id)) throw TopologyError(at + ".id", "node id must be an identifier");
        if (!ids.insert(n.id).second) throw TopologyError(at + ".id", "duplicate node id '" + n.id + "'");
        if (n.cpu_cores <= 0) throw TopologyError(at + ".cpu_cores", "must be > 0");
        if (n.mem_mb <= 0) throw TopologyError(at + ".mem_mb", "must be > 0");
        if (n.gpus < 0) throw TopologyError(at + ".gpus", "must be >= 0");
        if (n.cost_per_core_hour < 0) throw TopologyError(at + ".cost_per_core_hour", "must be >= 0");
    }
    std::set<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const auto& l = links_[i];
        const std::string at = "$.links[" + std::to_string(i) + "]";
        if (!ids.count(l.a)) throw TopologyError(at + ".a", "unknown node '" + l.a + "'");
        if (!ids.count(l.b)) throw TopologyError(at + ".b", "unknown node '" + l.b + "'");
        if (l.a == l.b) throw TopologyError(at, "self link on '" + l.a + "'");
        if (l.latency_ms < 0) throw TopologyError(at + ".latency_ms", "must be >= 0");
        if (l.bandwidth_mbps <= 0) throw TopologyError(at + ".bandwidth_mbps", "must be > 0");
        if (!pairs.insert(std::minmax(l.a, l.b)).second) {
            throw TopologyError(at, "duplicate link between '" + l.a + "' and '" + l.b + "'");
        }
    }
}

const NodeDesc* ResourceTopology::find(std::string_view id) const {
    for (const auto& n : nodes_) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

const NodeDesc& ResourceTopology::node(std::string_view id) const {
    const NodeDesc* n = find(id);
    if (!n) throw std::out_of_range("unknown node '" + std::string(id) + "'");
    return *n;
}

std::vector<std::string> ResourceTopology::sorted_ids() const {
    std::vector<std::string> ids;
    ids.reserve(nodes_.size());
    for (const auto& n : nodes_) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::optional<Quantity> ResourceTopology::latency(std::string_view x, std::string_view y) const {
    node(x);
    node(y);
    if (x == y) return Quantity(0);
    for (const auto& l : links_) {
        if ((l.a == x && l.b == y) || (l.a == y && l.b == x)) return l.latency_ms;
    }
    return std::nullopt;
}

namespace {

void reject_unknown_keys(const json& object, const std::string& at, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : object.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
            throw TopologyError(at + "." + key, "unknown key");
        }
    }
}

const json& field(const json& object, const std::string& at, const char* key) {
    auto it = object.find(key);
    if (it == object.end()) throw TopologyError(at + "." + key, "missing required key");
    return *it;
}

std::string string_field(const json& object, const std::string& at, const char* key) {
    const json& v = field(object, at, key);
    if (!v.is_string()) throw TopologyError(at + "." + key, "expected a string");
    return v.get<std::string>();
}

Quantity number_field(const json& object, const std::string& at, const char* key) {
    const json& v = field(object, at, key);
    if (v.is_number_integer()) return Quantity(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return Quantity(v.get<std::uint64_t>());
    if (v.is_number_float()) return from_double(v.get<double>());
    throw TopologyError(at + "." + key, "expected a number");
}

std::int64_t integer_field(const json& object, const std::string& at, const char* key) {
    const json& v = field(object, at, key);
    if (!v.is_number_integer()) throw TopologyError(at + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

json number_json(const Quantity& q) {
    if (is_integer(q)) return json(static_cast<std::int64_t>(boost::multiprecision::numerator(q)));
    return json(to_double(q));
}

}  // namespace

ResourceTopology load_topology(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw TopologyError("$", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw TopologyError("$", "expected an object");
    reject_unknown_keys(doc, "$", {"nodes", "links"});

    std::vector<NodeDesc> nodes;
    const json& jnodes = field(doc, "$", "nodes");
    if (!jnodes.is_array()) throw TopologyError("$.nodes", "expected an array");
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
        const std::string at = "$.nodes[" + std::to_string(i) + "]";
        const json& jn = jnodes[i];
        if (!jn.is_object()) throw TopologyError(at, "expected an object");
        reject_unknown_keys(jn, at, {"id", "tier", "cpu_cores", "mem_mb", "gpus", "cost_per_core_hour"});
        NodeDesc n;
        n.id = string_field(jn, at, "id");
        const std::string tier = string_field(jn, at, "tier");
        auto parsed = parse_tier(tier);
        if (!parsed) throw TopologyError(at + ".tier", "expected edge, fog or cloud");
        n.tier = *parsed;
        n.cpu_cores = number_field(jn, at, "cpu_cores");
        n.mem_mb = integer_field(jn, at, "mem_mb");
        const std::int64_t gpus = integer_field(jn, at, "gpus");
        if (gpus < 0 || gpus > 1'000'000) throw TopologyError(at + ".gpus", "must be >= 0");
        n.gpus = static_cast<int>(gpus);
        n.cost_per_core_hour = number_field(jn, at, "cost_per_core_hour");
        nodes.push_back(std::move(n));
    }

    std::vector<LinkDesc> links;
    if (doc.contains("links")) {
        const json& jlinks = doc["links"];
        if (!jlinks.is_array()) throw TopologyError("$.links", "expected an array");
        for (std::size_t i = 0; i < jlinks.size(); ++i) {
            const std::string at = "$.links[" + std::to_string(i) + "]";
            const json& jl = jlinks[i];
            if (!jl.is_object()) throw TopologyError(at, "expected an object");
            reject_unknown_keys(jl, at, {"a", "b", "latency_ms", "bandwidth_mbps"});
            LinkDesc l;
            l.a = string_field(jl, at, "a");
            l.b = string_field(jl, at, "b");
            l.latency_ms = number_field(jl, at, "latency_ms");
            l.bandwidth_mbps = number_field(jl, at, "bandwidth_mbps");
            links.push_back(std::move(l));
        }
    }
    return ResourceTopology(std::move(nodes), std::move(links));
}

std::string serialize_topology(const ResourceTopology& topology) {
    json doc;
    doc["nodes"] = json::array();
    for (const auto& n : topology.nodes()) {
        doc["nodes"].push_back({{"id", n.id},
                                {"tier", std::string(to_string(n.tier))},
                                {"cpu_cores", number_json(n.cpu_cores)},
                                {"mem_mb", n.mem_mb},
                                {"gpus", n.gpus},
                                {"cost_per_core_hour", number_json(n.cost_per_core_hour)}});
    }
    doc["links"] = json::array();
    for (const auto& l : topology.links()) {
        doc["links"].push_back({{"a", l.a},
                                {"b", l.b},
                                {"latency_ms", number_json(l.latency_ms)},
                                {"bandwidth_mbps", number_json(l.bandwidth_mbps)}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace stratum
