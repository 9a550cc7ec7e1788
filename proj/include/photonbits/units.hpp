#pragma once

#include <cstdint>
#include <string_view>

// Parsing of command-line quantities with SI suffixes. All functions throw
// ConfigError naming `what` (usually the flag) on malformed input.
namespace photonbits::units {

/// "25ns", "1.5us", "2e-7", "2e-7s" -> seconds. Bare numbers are seconds.
double parse_duration(std::string_view text, std::string_view what);

/// "48MHz", "2e6", "2e6Hz", "1.2GHz" -> hertz.
double parse_frequency(std::string_view text, std::string_view what);

/// "1e6", "10000000", "2.5e3" -> exact non-negative integer.
std::uint64_t parse_count(std::string_view text, std::string_view what);

/// Plain floating point value, no suffix.
double parse_number(std::string_view text, std::string_view what);

}  // namespace photonbits::units
