#pragma once

// Bit extraction from event timing. Consecutive intervals are grouped in
// pairs (t1, t2) sharing their boundary event; each pair yields one bit or
// is discarded as a tie.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "photonbits/bit_buffer.hpp"
#include "photonbits/event_source.hpp"

namespace photonbits {

namespace simd {
struct KernelTable;
}

enum class ClockMode { continuous, restartable };

std::string to_string(ClockMode mode);
ClockMode parse_clock_mode(const std::string& name);

struct ClockConfig {
  double period = 0.0;  ///< clock period T, seconds
  ClockMode mode = ClockMode::restartable;
  double phase = 0.0;  ///< first free-running edge at phase + T (continuous only)
  double skew = 0.0;   ///< extra length of the up-counting (first) window

  /// Throws ConfigError unless period > 0, 0 <= phase < period, skew >= 0.
  void validate() const;
  /// Non-fatal remarks (skew above half a period).
  std::vector<std::string> warnings() const;
};

struct ExtractionStats {
  std::uint64_t events_consumed = 0;
  std::uint64_t intervals_formed = 0;
  std::uint64_t pairs_formed = 0;
  std::uint64_t ties_discarded = 0;
  std::uint64_t bits_emitted = 0;

  double bits_per_event() const noexcept {
    return events_consumed ? static_cast<double>(bits_emitted) / static_cast<double>(events_consumed) : 0.0;
  }
  double bits_per_pair() const noexcept {
    return pairs_formed ? static_cast<double>(bits_emitted) / static_cast<double>(pairs_formed) : 0.0;
  }
  friend bool operator==(const ExtractionStats&, const ExtractionStats&) = default;
};

struct IntervalPair {
  double t1;
  double t2;
};

/// Pairs (e0,e1,e2), (e2,e3,e4), ...; a trailing unpaired interval is dropped.
std::vector<IntervalPair> pair_intervals(const EventStream& s);

struct Extraction {
  BitBuffer bits;
  ExtractionStats stats;
};

/// Single-pass extractor with O(1) carried state. Timestamps may be fed in
/// arbitrary chunks; the result does not depend on the chunking.
class Extractor {
 public:
  /// Exact comparison: 0 if t1 < t2, 1 if t1 > t2, tie if equal.
  static Extractor basic();
  static Extractor clocked(const ClockConfig& clock);

  /// Throws DataError if a timestamp is not strictly after its predecessor.
  void feed(std::span<const double> timestamps);

  /// Subtracts `shift` from the carried time origin. For continuous mode the
  /// shift must be a whole number of periods with (prev - phase) / period
  /// >= shift / period + 1; the pipeline only rebases with period == 1.
  void rebase(double shift) noexcept;

  const ExtractionStats& stats() const noexcept { return stats_; }
  /// Last timestamp fed, if any.
  bool has_last() const noexcept { return have_prev_; }
  double last_time() const noexcept { return prev_t_; }
  BitBuffer& bits() noexcept { return bits_; }
  const BitBuffer& bits() const noexcept { return bits_; }
  Extraction finish() &&;

 private:
  enum class Kind { basic, restartable, continuous };
  Extractor(Kind kind, const ClockConfig& clock);

  void emit(int sign) {
    ++stats_.pairs_formed;
    if (sign == 0) {
      ++stats_.ties_discarded;
    } else {
      bits_.push_back(sign > 0);
      ++stats_.bits_emitted;
    }
  }
  void feed_intervals(std::span<const double> timestamps);
  void feed_continuous(std::span<const double> timestamps);

  Kind kind_;
  ClockConfig clock_;
  const simd::KernelTable* kernels_;
  ExtractionStats stats_;
  BitBuffer bits_;

  bool have_prev_ = false;
  double prev_t_ = 0.0;
  bool have_first_ = false;  // first interval of the current pair is pending
  double pending_ = 0.0;     // its length, or its count in continuous mode
  double prev_edge_ = 0.0;   // continuous: edge index at prev_t_

  std::vector<double> scratch_;
  std::vector<double> scratch2_;
  std::vector<std::int8_t> signs_;
};

Extraction extract_basic(const EventStream& s);
Extraction extract_clocked(const EventStream& s, const ClockConfig& clock);

/// Hardware-style realization of the restartable method: one signed counter
/// stepped edge by edge, up during t1 (+ skew) and down during t2, emitting
/// the sign. Throws UnsupportedConfigError for continuous mode.
Extraction extract_updown_counter(const EventStream& s, const ClockConfig& clock);

/// Restartable extraction split at pair boundaries across `jobs` threads.
/// Equal to extract_clocked on the same input.
Extraction extract_restartable_sharded(const EventStream& s, const ClockConfig& clock,
                                       std::size_t shards, unsigned jobs);

}  // namespace photonbits
