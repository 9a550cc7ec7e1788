#pragma once

// JSON and text renderings of reports, bit files and their sidecars.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "photonbits/analysis.hpp"
#include "photonbits/bit_buffer.hpp"
#include "photonbits/event_source.hpp"
#include "photonbits/extractor.hpp"

namespace photonbits {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const AnalysisReport& r);
Json to_json(const ExtractionStats& s);
Json to_json(const ClockConfig& c);
Json to_json(const StreamMeta& m);

/// Plain-text report in the layout of the classic ENT summary.
std::string render_report_text(const AnalysisReport& r);

/// `<bits>.json`
std::filesystem::path sidecar_path(const std::filesystem::path& bit_file);

/// Writes the packed payload and, next to it, `sidecar` with n_bits and
/// schema_version filled in.
void write_bit_file(const std::filesystem::path& path, const BitBuffer& bits, Json sidecar);

/// Reads a packed bit file. n_bits comes from the sidecar when present,
/// otherwise every byte counts as 8 bits.
BitBuffer read_bit_file(const std::filesystem::path& path);

/// Pretty-printed JSON followed by a newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace photonbits
