#pragma once

// Simulated and measured detection-pulse streams: Poisson generation,
// detector effects (non-paralyzable dead time, a single-afterpulse model),
// interval statistics and timestamp file interchange.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "photonbits/rng.hpp"

namespace photonbits {

namespace simd {
struct KernelTable;
}

struct StreamMeta {
  std::string origin;  ///< "poisson", "file:<path>", "explicit"
  double tau = 0.0;    ///< simulated mean interval in seconds, 0 when unknown
  std::uint64_t seed = 0;
  double dead_time = 0.0;
  double afterpulse_prob = 0.0;
  double afterpulse_tau = 0.0;
  std::vector<std::string> filters;  ///< transforms applied, in order
};

/// Strictly increasing event times in seconds.
class EventStream {
 public:
  EventStream() = default;
  /// Throws DataError naming the first (1-based) record that is not finite or
  /// not strictly after its predecessor.
  explicit EventStream(std::vector<double> times, StreamMeta meta = {});

  std::span<const double> times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double operator[](std::size_t i) const noexcept { return times_[i]; }
  const StreamMeta& meta() const noexcept { return meta_; }
  StreamMeta& meta() noexcept { return meta_; }

  /// Consecutive differences (size() - 1 values).
  std::vector<double> intervals() const;

 private:
  std::vector<double> times_;
  StreamMeta meta_;
};

struct SourceConfig {
  double tau = 0.0;  ///< mean inter-event time, seconds
  std::uint64_t n_events = 0;
  std::uint64_t seed = 0;
  double dead_time = 0.0;
  double afterpulse_prob = 0.0;
  double afterpulse_tau = 0.0;

  /// Throws ConfigError on tau <= 0, dead_time < 0, p outside [0, 1), or
  /// afterpulse_tau <= 0 with p > 0.
  void validate() const;
};

/// Streaming Poisson source. Successive generate() calls continue one
/// deterministic sequence regardless of how the output is chunked.
class PoissonGenerator {
 public:
  PoissonGenerator(double tau, std::uint64_t seed, double start = 0.0);

  void generate(std::span<double> out);
  double now() const noexcept { return now_; }
  /// Moves the time origin; the caller guarantees now() - shift is exact.
  void rebase(double shift) noexcept { now_ -= shift; }

 private:
  Xoshiro4x rng_;
  std::vector<double> draws_;
  std::size_t pos_;
  double tau_;
  double now_;
  const simd::KernelTable* kernels_;
};

/// Non-paralyzable dead time: keeps an event iff it is at least `dead_time`
/// after the previously kept one. Carries state across calls.
class DeadTimeFilter {
 public:
  explicit DeadTimeFilter(double dead_time);

  /// Filters `times` in place and returns the number kept (a prefix).
  std::size_t apply(std::span<double> times) noexcept;
  void rebase(double shift) noexcept { last_ -= shift; }

 private:
  double dead_time_;
  double last_ = 0.0;
  bool have_last_ = false;
};

/// n_events Poisson arrivals, first one an exponential delay after t = 0.
/// Ignores cfg.dead_time and the afterpulse fields.
EventStream gen_poisson_stream(const SourceConfig& cfg);

EventStream apply_dead_time(const EventStream& s, double dead_time);

/// Afterpulse model: each input event independently spawns, with probability
/// p, one extra event at an Exp(tau_ap) delay. Coincident times are pushed
/// forward to the next representable double.
EventStream apply_afterpulsing(const EventStream& s, double p, double tau_ap, std::uint64_t seed);

/// gen_poisson_stream, then dead time, then afterpulsing (afterpulses are
/// themselves subject to the dead time when both are enabled).
EventStream simulate_source(const SourceConfig& cfg);

/// Like simulate_source, but cfg.n_events counts detected events: the source
/// runs until exactly that many survive dead time (and afterpulse merging).
/// Without afterpulsing the result is a prefix of a longer run with the same seed.
EventStream simulate_detected(const SourceConfig& cfg);

struct CoherenceTime {
  double tau_cohr;  ///< seconds
  double f_cohr;    ///< 2*pi / tau_cohr, hertz
};

/// Coherence time of a Gaussian emission spectrum: lambda^2 / (4 pi c sigma).
CoherenceTime coherence_time(double wavelength, double spectral_width);

inline constexpr double kSpeedOfLight = 2.99792458e8;

struct HistogramBinning {
  double lo = 1e-9;  ///< first log-bin edge, seconds
  double hi = 0.0;   ///< last log-bin edge; 0 means 100 * tau
  int bins = 200;
};

/// Log-binned interval histogram with an underflow bin [0, lo) in front and,
/// when needed, an overflow bin [hi, max interval] at the end, so counts sum
/// to size() - 1.
struct IntervalHistogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  double fitted_tau = 0.0;       ///< ML estimate from intervals >= fit_threshold
  double cutoff_estimate = 0.0;  ///< smallest observed interval
  double fit_threshold = 0.0;    ///< cutoff_estimate plus the width of its bin
  std::size_t fit_samples = 0;
  double goodness = 0.0;  ///< reduced Pearson chi^2 of the fit over populated bins

  /// Width of the bin containing t (0 if outside every bin).
  double bin_width_at(double t) const noexcept;
};

IntervalHistogram interval_histogram(const EventStream& s, const HistogramBinning& binning = {});

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test of samples against shift + Exp(tau).
KsResult ks_exponential(std::span<const double> samples, double tau, double shift = 0.0);

/// Asymptotic Kolmogorov tail probability Q(lambda).
double kolmogorov_tail(double lambda) noexcept;

// ---- timestamp interchange ----

enum class TimestampFormat {
  binary_ns,    ///< little-endian u64 nanoseconds, no header
  csv_seconds,  ///< one decimal value per line, '#' comments allowed
};

TimestampFormat parse_timestamp_format(const std::string& name);

EventStream parse_binary_timestamps(std::span<const std::uint8_t> bytes, const std::string& origin);
EventStream parse_csv_timestamps(const std::string& text, const std::string& origin);
EventStream ingest_timestamps(const std::filesystem::path& path, TimestampFormat format);

struct ExportSummary {
  std::size_t records = 0;
  std::size_t adjusted = 0;  ///< records moved +1 ns to stay strictly increasing
};

/// Binary export rounds to the nearest nanosecond; records that would not
/// stay strictly increasing are moved to previous + 1 ns and counted.
std::vector<std::uint8_t> encode_binary_timestamps(const EventStream& s, ExportSummary* summary = nullptr);
std::string encode_csv_timestamps(const EventStream& s);
ExportSummary export_timestamps(const EventStream& s, const std::filesystem::path& path,
                                TimestampFormat format);

/// CSV with header `bin_lo_s,bin_hi_s,count`.
std::string histogram_csv(const IntervalHistogram& h);

}  // namespace photonbits
