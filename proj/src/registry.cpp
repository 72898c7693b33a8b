#include "stratum/registry.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

namespace stratum {

using nlohmann::json;

EvalStrategy EvalStrategy::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("strategy must look like maximize:<metric> or minimize:<metric>");
    }
    const std::string_view direction = text.substr(0, colon);
    EvalStrategy s;
    if (direction == "maximize") {
        s.direction = Direction::maximize;
    } else if (direction == "minimize") {
        s.direction = Direction::minimize;
    } else {
        throw std::invalid_argument("unknown strategy direction '" + std::string(direction) + "'");
    }
    s.metric = std::string(text.substr(colon + 1));
    if (!is_identifier(s.metric)) throw std::invalid_argument("strategy metric must be an identifier");
    return s;
}

std::string EvalStrategy::str() const {
    return (direction == Direction::maximize ? "maximize:" : "minimize:") + metric;
}

namespace {

void check_record(const ModelRecord& r) {
    using Kind = RegistryError::Kind;
    if (!is_identifier(r.name)) throw RegistryError(Kind::invalid_record, "model name must be an identifier");
    if (!is_version(r.version) || r.version == "latest") {
        throw RegistryError(Kind::invalid_record, "invalid model version '" + r.version + "'");
    }
    if (!(r.size_mb > 0) || !std::isfinite(r.size_mb)) {
        throw RegistryError(Kind::invalid_record, "size_mb must be > 0");
    }
    for (const auto& [metric, value] : r.metrics) {
        if (!is_identifier(metric)) throw RegistryError(Kind::invalid_record, "metric name must be an identifier");
        if (!std::isfinite(value)) throw RegistryError(Kind::invalid_record, "metric values must be finite");
    }
}

}  // namespace

ModelRegistry ModelRegistry::from_json(std::string_view text) {
    using Kind = RegistryError::Kind;
    ModelRegistry registry;
    try {
        const json doc = json::parse(text);
        for (const auto& jr : doc.at("models")) {
            ModelRecord r;
            r.name = jr.at("name").get<std::string>();
            r.version = jr.at("version").get<std::string>();
            r.metrics = jr.at("metrics").get<std::map<std::string, double>>();
            r.size_mb = jr.at("size_mb").get<double>();
            r.gpu_required = jr.at("gpu_required").get<bool>();
            r.created_seq = jr.at("created_seq").get<std::int64_t>();
            check_record(r);
            for (const auto& existing : registry.records_) {
                if (existing.name == r.name && existing.version == r.version) {
                    throw RegistryError(Kind::duplicate, "duplicate model " + r.ref());
                }
                if (existing.created_seq == r.created_seq) {
                    throw RegistryError(Kind::format, "duplicate created_seq " + std::to_string(r.created_seq));
                }
            }
            if (r.created_seq < 0) throw RegistryError(Kind::format, "created_seq must be >= 0");
            registry.records_.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw RegistryError(Kind::format, std::string("malformed registry: ") + e.what());
    }
    return registry;
}

std::string ModelRegistry::to_json() const {
    json models = json::array();
    for (const auto& r : records_) {
        models.push_back({{"name", r.name},
                          {"version", r.version},
                          {"metrics", r.metrics},
                          {"size_mb", r.size_mb},
                          {"gpu_required", r.gpu_required},
                          {"created_seq", r.created_seq}});
    }
    return json{{"models", models}}.dump(2) + "\n";
}

ModelRegistry ModelRegistry::load(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return {};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read registry " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void ModelRegistry::save(const std::filesystem::path& path) const {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write registry " + tmp.string());
        out << to_json();
        out.flush();
        if (!out) throw std::runtime_error("cannot write registry " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

const ModelRecord& ModelRegistry::add(ModelRecord record) {
    check_record(record);
    std::int64_t next_seq = 0;
    for (const auto& r : records_) {
        if (r.name == record.name && r.version == record.version) {
            throw RegistryError(RegistryError::Kind::duplicate, "model " + record.ref() + " is already registered");
        }
        next_seq = std::max(next_seq, r.created_seq + 1);
    }
    record.created_seq = next_seq;
    records_.push_back(std::move(record));
    return records_.back();
}

ModelRecord ModelRegistry::select_best(std::string_view name, const EvalStrategy& strategy) const {
    using Kind = RegistryError::Kind;
    const ModelRecord* best = nullptr;
    bool any_named = false;
    for (const auto& r : records_) {
        if (r.name != name) continue;
        any_named = true;
        auto it = r.metrics.find(strategy.metric);
        if (it == r.metrics.end()) continue;
        if (!best) {
            best = &r;
            continue;
        }
        const double current = best->metrics.at(strategy.metric);
        const bool better = strategy.direction == Direction::maximize ? it->second > current : it->second < current;
        const bool tie_older = it->second == current && r.created_seq < best->created_seq;
        if (better || tie_older) best = &r;
    }
    if (!any_named) throw RegistryError(Kind::unknown_name, "no model named '" + std::string(name) + "'");
    if (!best) {
        throw RegistryError(Kind::metric_absent,
                            "no version of '" + std::string(name) + "' records metric '" + strategy.metric + "'");
    }
    return *best;
}

ModelRecord ModelRegistry::resolve(const ModelRef& ref, const EvalStrategy& strategy) const {
    using Kind = RegistryError::Kind;
    if (ref.is_latest()) return select_best(ref.name, strategy);
    bool any_named = false;
    for (const auto& r : records_) {
        if (r.name != ref.name) continue;
        any_named = true;
        if (r.version == ref.version) return r;
    }
    if (!any_named) throw RegistryError(Kind::unknown_name, "no model named '" + ref.name + "'");
    throw RegistryError(Kind::unknown_version, "model " + ref.str() + " is not registered");
}

}  // namespace stratum
