#pragma once

#include "stratum/spec_lang.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace stratum {

enum class ValidationCode {
    empty,                // E_EMPTY: no components
    duplicate,            // E_DUPLICATE
    unknown_component,    // E_UNKNOWN_COMPONENT
    cycle,                // E_CYCLE
    missing_model,        // E_MISSING_MODEL
    unexpected_model,     // E_UNEXPECTED_MODEL
    unreachable,          // E_UNREACHABLE
    self_loop,            // E_SELF_LOOP
    range,                // E_RANGE
};

std::string_view to_string(ValidationCode code);

struct ValidationError {
    ValidationCode code;
    std::string subject;
    std::string message;

    bool operator==(const ValidationError&) const = default;
};

struct ValidationReport {
    std::vector<ValidationError> errors;

    bool ok() const { return errors.empty(); }
    bool has(ValidationCode code) const;
    /// One "CODE subject: message" line per error.
    std::string render() const;
};

/// Collects every rule violation. Order: component-scoped errors in
/// component order, then flow errors in flow order, then the cycle report,
/// then reachability errors in component order.
ValidationReport validate(const PipelineSpec& spec);

/// Kahn order over the flow graph, ties broken by component source order.
/// Requires a spec that validates.
std::vector<std::size_t> topological_order(const PipelineSpec& spec);

}  // namespace stratum
