#include "photonbits/units.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "photonbits/error.hpp"

namespace photonbits::units {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::string_view what, std::string_view text, std::string_view why) {
  throw ConfigError(std::string(what) + ": cannot parse '" + std::string(text) + "' (" +
                    std::string(why) + ")");
}

// Splits "12.5ns" into (12.5, "ns").
std::pair<double, std::string_view> split_number(std::string_view text, std::string_view what) {
  auto s = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr == s.data()) fail(what, text, "expected a number");
  if (!std::isfinite(value)) fail(what, text, "not finite");
  return {value, trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr)))};
}

}  // namespace

double parse_duration(std::string_view text, std::string_view what) {
  auto [v, suffix] = split_number(text, what);
  if (suffix.empty() || suffix == "s") return v;
  if (suffix == "ms") return v * 1e-3;
  if (suffix == "us" || suffix == "\xC2\xB5s") return v * 1e-6;
  if (suffix == "ns") return v * 1e-9;
  if (suffix == "ps") return v * 1e-12;
  if (suffix == "fs") return v * 1e-15;
  fail(what, text, "unknown time unit");
}

double parse_frequency(std::string_view text, std::string_view what) {
  auto [v, suffix] = split_number(text, what);
  if (suffix.empty() || suffix == "Hz") return v;
  if (suffix == "kHz") return v * 1e3;
  if (suffix == "MHz") return v * 1e6;
  if (suffix == "GHz") return v * 1e9;
  fail(what, text, "unknown frequency unit");
}

std::uint64_t parse_count(std::string_view text, std::string_view what) {
  auto s = trim(text);
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec == std::errc{} && ptr == s.data() + s.size()) return n;
  auto [v, suffix] = split_number(text, what);
  if (!suffix.empty()) fail(what, text, "counts take no unit");
  if (v < 0) fail(what, text, "must be non-negative");
  if (v >= 18446744073709551616.0) fail(what, text, "too large");
  if (std::floor(v) != v) fail(what, text, "not an integer");
  return static_cast<std::uint64_t>(v);
}

double parse_number(std::string_view text, std::string_view what) {
  auto [v, suffix] = split_number(text, what);
  if (!suffix.empty()) fail(what, text, "unexpected suffix");
  return v;
}

}  // namespace photonbits::units
