#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "photonbits/error.hpp"
#include "photonbits/event_source.hpp"
#include "photonbits/file_io.hpp"

namespace photonbits {
namespace {

StreamMeta file_meta(const std::string& origin) {
  StreamMeta m;
  m.origin = origin;
  return m;
}

}  // namespace

TimestampFormat parse_timestamp_format(const std::string& name) {
  if (name == "bin" || name == "binary" || name == "u64ns") return TimestampFormat::binary_ns;
  if (name == "csv") return TimestampFormat::csv_seconds;
  throw ConfigError("unknown timestamp format '" + name + "' (expected bin or csv)");
}

EventStream parse_binary_timestamps(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.empty()) throw DataError("timestamp file is empty");
  if (bytes.size() % 8 != 0) {
    throw DataError("record " + std::to_string(bytes.size() / 8 + 1) + ": truncated (file size " +
                        std::to_string(bytes.size()) + " is not a multiple of 8)",
                    bytes.size() / 8 + 1);
  }
  std::vector<double> times(bytes.size() / 8);
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::uint64_t ns = 0;
    for (int b = 7; b >= 0; --b) ns = (ns << 8) | bytes[8 * i + static_cast<std::size_t>(b)];
    if (i > 0 && ns <= prev) {
      throw DataError("record " + std::to_string(i + 1) + ": timestamp " + std::to_string(ns) +
                          " ns is not after " + std::to_string(prev) + " ns",
                      i + 1);
    }
    prev = ns;
    times[i] = static_cast<double>(ns) / 1e9;
  }
  return EventStream(std::move(times), file_meta(origin));
}

EventStream parse_csv_timestamps(const std::string& text, const std::string& origin) {
  std::vector<double> times;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v(line);
    while (!v.empty() && (v.back() == '\r' || v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    if (v.empty() || v.front() == '#') continue;
    const std::size_t record = times.size() + 1;
    double t = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), t);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(t)) {
      throw DataError("record " + std::to_string(record) + " (line " + std::to_string(line_no) +
                          "): cannot parse '" + std::string(v) + "'",
                      record);
    }
    if (!times.empty() && !(t > times.back())) {
      throw DataError("record " + std::to_string(record) + " (line " + std::to_string(line_no) +
                          "): timestamp is not after the previous record",
                      record);
    }
    times.push_back(t);
  }
  if (times.empty()) throw DataError("timestamp file has no records");
  return EventStream(std::move(times), file_meta(origin));
}

EventStream ingest_timestamps(const std::filesystem::path& path, TimestampFormat format) {
  const auto bytes = read_file(path);
  const std::string origin = "file:" + path.string();
  if (format == TimestampFormat::binary_ns) return parse_binary_timestamps(bytes, origin);
  return parse_csv_timestamps(std::string(bytes.begin(), bytes.end()), origin);
}

std::vector<std::uint8_t> encode_binary_timestamps(const EventStream& s, ExportSummary* summary) {
  std::vector<std::uint8_t> out(8 * s.size());
  ExportSummary sum;
  sum.records = s.size();
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s[i];
    if (t < 0.0 || t * 1e9 >= 1.8e19) {
      throw DataError("record " + std::to_string(i + 1) + ": time outside the u64 nanosecond range", i + 1);
    }
    auto ns = static_cast<std::uint64_t>(std::llround(t * 1e9));
    if (i > 0 && ns <= prev) {
      ns = prev + 1;
      ++sum.adjusted;
    }
    prev = ns;
    for (int b = 0; b < 8; ++b) out[8 * i + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(ns >> (8 * b));
  }
  if (summary) *summary = sum;
  return out;
}

std::string encode_csv_timestamps(const EventStream& s) {
  std::string out;
  out.reserve(s.size() * 24);
  char buf[40];
  for (double t : s.times()) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g\n", t);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

ExportSummary export_timestamps(const EventStream& s, const std::filesystem::path& path,
                                TimestampFormat format) {
  ExportSummary sum;
  if (format == TimestampFormat::binary_ns) {
    const auto bytes = encode_binary_timestamps(s, &sum);
    write_file(path, bytes.data(), bytes.size());
  } else {
    const auto text = encode_csv_timestamps(s);
    write_file(path, text.data(), text.size());
    sum.records = s.size();
  }
  return sum;
}

std::string histogram_csv(const IntervalHistogram& h) {
  std::string out = "bin_lo_s,bin_hi_s,count\n";
  char buf[96];
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const int n = std::snprintf(buf, sizeof buf, "%.9g,%.9g,%llu\n", h.bin_edges[b], h.bin_edges[b + 1],
                                static_cast<unsigned long long>(h.counts[b]));
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace photonbits
