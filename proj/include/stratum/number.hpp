#pragma once

// Exact decimal arithmetic shared by every module. Costs, capacities, rates
// and queue lengths are all exact rationals so that tie-breaks and the
// conservation checks never depend on floating-point rounding.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace stratum {

using Quantity = boost::multiprecision::cpp_rational;

/// Parses an optionally signed decimal literal such as "12", "-0.5" or
/// "3.25e2". Returns nullopt if the text is not a decimal number.
std::optional<Quantity> parse_decimal(std::string_view text);

/// Exact decimal rendering when the value terminates ("3.45", "-2", "0.125");
/// otherwise the shortest round-trip form of the nearest double.
std::string format_decimal(const Quantity& value);

/// True if `value` has a finite decimal expansion.
bool is_terminating(const Quantity& value);

bool is_integer(const Quantity& value);

double to_double(const Quantity& value);

/// Converts a double to the exact decimal it prints as (shortest
/// round-trip form), so 0.05 becomes 1/20 rather than its binary expansion.
Quantity from_double(double value);

}  // namespace stratum
