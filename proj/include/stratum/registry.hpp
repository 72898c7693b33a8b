#pragma once

// File-backed model registry. Selection compares recorded metrics under a
// user-chosen strategy; "latest" references resolve through that selection.

#include "stratum/spec_lang.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stratum {

struct ModelRecord {
    std::string name;
    std::string version;
    std::map<std::string, double> metrics;
    double size_mb = 1;
    bool gpu_required = false;
    std::int64_t created_seq = 0;

    std::string ref() const { return name + "@" + version; }
    bool operator==(const ModelRecord&) const = default;
};

enum class Direction { maximize, minimize };

struct EvalStrategy {
    Direction direction = Direction::maximize;
    std::string metric;

    /// Parses "maximize:accuracy" / "minimize:latency_ms".
    static EvalStrategy parse(std::string_view text);
    std::string str() const;
};

class RegistryError : public std::runtime_error {
public:
    enum class Kind { duplicate, unknown_name, unknown_version, metric_absent, invalid_record, format };

    RegistryError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class ModelRegistry {
public:
    ModelRegistry() = default;

    static ModelRegistry from_json(std::string_view text);
    std::string to_json() const;

    /// Missing file yields an empty registry.
    static ModelRegistry load(const std::filesystem::path& path);
    /// Writes a sibling temp file and renames it over `path`.
    void save(const std::filesystem::path& path) const;

    /// Assigns created_seq = previous max + 1 (0 for the first record) and
    /// returns the stored record.
    const ModelRecord& add(ModelRecord record);

    const std::vector<ModelRecord>& records() const { return records_; }

    ModelRecord select_best(std::string_view name, const EvalStrategy& strategy) const;
    ModelRecord resolve(const ModelRef& ref, const EvalStrategy& strategy) const;

private:
    std::vector<ModelRecord> records_;
};

}  // namespace stratum
