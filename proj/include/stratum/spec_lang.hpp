#pragma once

// Pipeline specification language: domain types, parser and canonical printer.
//
//   spec      := "pipeline" IDENT "{" item* "}"
//   item      := component | flow
//   component := "component" IDENT "{" prop* "}"
//   flow      := "flow" IDENT "->" IDENT [ "{" prop* "}" ]
//   prop      := KEY ":" VALUE
//
// "#" starts a comment that runs to end of line. See docs/spec-language.md.

#include "stratum/number.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stratum {

enum class ComponentKind { ingestion, stream, batch, inference, visualization };
enum class GpuNeed { none, required };
enum class TierHint { edge, fog, cloud, any };

std::string_view to_string(ComponentKind kind);
std::string_view to_string(GpuNeed gpu);
std::string_view to_string(TierHint tier);
std::optional<ComponentKind> parse_component_kind(std::string_view text);
std::optional<TierHint> parse_tier_hint(std::string_view text);

bool is_identifier(std::string_view text);
/// Model versions are identifiers, plain version numbers ("2", "1.0") or "latest".
bool is_version(std::string_view text);

struct ModelRef {
    std::string name;
    std::string version;

    bool is_latest() const { return version == "latest"; }
    std::string str() const { return name + "@" + version; }
    bool operator==(const ModelRef&) const = default;
};

struct Component {
    std::string name;
    ComponentKind kind = ComponentKind::stream;
    Quantity cpu = 1;            // cores
    std::int64_t mem_mb = 1;
    GpuNeed gpu = GpuNeed::none;
    TierHint tier_hint = TierHint::any;
    int replicas = 1;
    Quantity rate = 0;           // msg/s, ingestion only
    Quantity service_rate = 10;  // msg/s per replica
    std::optional<ModelRef> model;

    bool needs_gpu() const { return gpu == GpuNeed::required; }
    bool operator==(const Component&) const = default;
};

struct Flow {
    std::string src;
    std::string dst;
    std::optional<Quantity> max_latency_ms;

    bool operator==(const Flow&) const = default;
};

struct PipelineSpec {
    std::string name;
    std::vector<Component> components;
    std::vector<Flow> flows;

    const Component* find(std::string_view component) const;
    std::optional<std::size_t> index_of(std::string_view component) const;
    bool operator==(const PipelineSpec&) const = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, std::string message);

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

/// Parses source text; throws ParseError at the first offending position.
PipelineSpec parse_spec(std::string_view source);

/// Canonical text: fixed property order, two-space indent, defaults omitted,
/// components before flows.
std::string pretty_print(const PipelineSpec& spec);

}  // namespace stratum
