#include "stratum/number.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace stratum {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(unsigned exponent) {
    cpp_int result = 1;
    for (unsigned i = 0; i < exponent; ++i) result *= 10;
    return result;
}

}  // namespace

std::optional<Quantity> parse_decimal(std::string_view text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }

    cpp_int digits = 0;
    int scale = 0;
    bool any_digit = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        digits = digits * 10 + (text[pos] - '0');
        any_digit = true;
        ++pos;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        bool fraction_digit = false;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            digits = digits * 10 + (text[pos] - '0');
            ++scale;
            fraction_digit = true;
            ++pos;
        }
        if (!fraction_digit) return std::nullopt;
        any_digit = true;
    }
    if (!any_digit) return std::nullopt;

    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_negative = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            exp_negative = text[pos] == '-';
            ++pos;
        }
        int exponent = 0;
        bool exp_digit = false;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            exponent = exponent * 10 + (text[pos] - '0');
            if (exponent > 400) return std::nullopt;
            exp_digit = true;
            ++pos;
        }
        if (!exp_digit) return std::nullopt;
        scale += exp_negative ? exponent : -exponent;
    }
    if (pos != text.size()) return std::nullopt;

    Quantity value = scale >= 0 ? Quantity(digits, pow10(static_cast<unsigned>(scale)))
                                : Quantity(digits * pow10(static_cast<unsigned>(-scale)));
    return negative ? Quantity(-value) : value;
}

bool is_terminating(const Quantity& value) {
    cpp_int den = boost::multiprecision::denominator(value);
    while (den % 2 == 0) den /= 2;
    while (den % 5 == 0) den /= 5;
    return den == 1;
}

bool is_integer(const Quantity& value) {
    return boost::multiprecision::denominator(value) == 1;
}

double to_double(const Quantity& value) {
    return value.convert_to<double>();
}

Quantity from_double(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite number");
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::invalid_argument("number formatting failed");
    auto parsed = parse_decimal(std::string_view(buf.data(), static_cast<std::size_t>(end - buf.data())));
    if (!parsed) throw std::invalid_argument("number formatting failed");
    return *parsed;
}

std::string format_decimal(const Quantity& value) {
    if (!is_terminating(value)) {
        std::array<char, 64> buf{};
        auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), to_double(value));
        (void)ec;
        return std::string(buf.data(), end);
    }

    cpp_int num = boost::multiprecision::numerator(value);
    cpp_int den = boost::multiprecision::denominator(value);
    const bool negative = num < 0;
    if (negative) num = -num;

    // Scale to den = 10^k.
    unsigned k = 0;
    cpp_int scaled_den = 1;
    while (scaled_den % den != 0) {
        scaled_den *= 10;
        ++k;
    }
    cpp_int scaled = num * (scaled_den / den);

    std::string digits = scaled.str();
    if (k > 0) {
        if (digits.size() <= k) digits.insert(0, k - digits.size() + 1, '0');
        digits.insert(digits.size() - k, ".");
    }
    return negative ? "-" + digits : digits;
}

}  // namespace stratum
