#pragma once

// In-memory simulate -> dead time -> extract -> accumulate chain for long
// runs. Times are carried in clock periods and periodically rebased by a
// whole number of periods, so precision does not decay with run length.

#include <cstdint>
#include <optional>

#include "photonbits/analysis.hpp"
#include "photonbits/extractor.hpp"

namespace photonbits {

enum class Method { basic, continuous, restartable };

std::string to_string(Method m);
/// Accepts exact|basic, continuous, restart|restartable.
Method parse_method(const std::string& name);

struct PipelineConfig {
  Method method = Method::restartable;
  double tau = 0.0;         ///< mean interval, seconds
  double period = 0.0;      ///< clock period T, seconds (ignored for basic)
  double phase = 0.0;       ///< seconds, continuous only
  double skew = 0.0;        ///< seconds
  double dead_time = 0.0;   ///< seconds
  std::uint64_t events = 0; ///< events reaching the extractor (after dead time); 0 = unbounded
  std::uint64_t target_bits = 0;  ///< stop once this many bits are out; 0 = unbounded
  std::uint64_t seed = 0;
  int max_lag = 8;
  bool keep_bits = false;
  std::size_t chunk = std::size_t{1} << 16;

  void validate() const;
};

struct PipelineResult {
  ExtractionStats stats;
  BitStatsAccumulator acc;
  std::optional<BitBuffer> bits;  ///< when keep_bits
};

PipelineResult run_pipeline(const PipelineConfig& cfg);

/// `streams` independent runs of cfg (seeds derived from cfg.seed and the
/// stream index), each truncated to whole 48-bit groups and concatenated in
/// stream order. cfg.events and cfg.target_bits are totals, split evenly.
PipelineResult run_pipeline_streams(const PipelineConfig& cfg, std::size_t streams, unsigned jobs);

}  // namespace photonbits
