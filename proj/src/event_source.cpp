#include "photonbits/event_source.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "photonbits/error.hpp"
#include "photonbits/simd/kernels.hpp"

namespace photonbits {
namespace {

constexpr std::size_t kDrawBlock = 4096;
constexpr std::uint64_t kIntervalTag = substream_tag("poisson/intervals");
constexpr std::uint64_t kAfterpulseSelectTag = substream_tag("afterpulse/select");
constexpr std::uint64_t kAfterpulseDelayTag = substream_tag("afterpulse/delay");

double strictly_after(double prev, double candidate) noexcept {
  return candidate > prev ? candidate : std::nextafter(prev, HUGE_VAL);
}

}  // namespace

EventStream::EventStream(std::vector<double> times, StreamMeta meta)
    : times_(std::move(times)), meta_(std::move(meta)) {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) {
      throw DataError("record " + std::to_string(i + 1) + ": timestamp is not finite", i + 1);
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw DataError("record " + std::to_string(i + 1) + ": timestamp not strictly after record " +
                          std::to_string(i),
                      i + 1);
    }
  }
}

std::vector<double> EventStream::intervals() const {
  std::vector<double> out;
  if (times_.size() < 2) return out;
  out.resize(times_.size() - 1);
  for (std::size_t i = 1; i < times_.size(); ++i) out[i - 1] = times_[i] - times_[i - 1];
  return out;
}

void SourceConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
  if (!(dead_time >= 0.0)) throw ConfigError("dead_time must be >= 0");
  if (!(afterpulse_prob >= 0.0 && afterpulse_prob < 1.0)) {
    throw ConfigError("afterpulse_prob must lie in [0, 1)");
  }
  if (afterpulse_prob > 0.0 && !(afterpulse_tau > 0.0)) {
    throw ConfigError("afterpulse_tau must be positive when afterpulse_prob > 0");
  }
}

PoissonGenerator::PoissonGenerator(double tau, std::uint64_t seed, double start)
    : rng_(seed_xoshiro4x(seed, kIntervalTag)),
      draws_(kDrawBlock),
      pos_(kDrawBlock),
      tau_(tau),
      now_(start),
      kernels_(&simd::active_kernels()) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
}

void PoissonGenerator::generate(std::span<double> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    if (pos_ == draws_.size()) {
      kernels_->fill_exponential(rng_, draws_, tau_);
      pos_ = 0;
    }
    const std::size_t take = std::min(out.size() - i, draws_.size() - pos_);
    double t = now_;
    for (std::size_t j = 0; j < take; ++j) {
      t = strictly_after(t, t + draws_[pos_ + j]);
      out[i + j] = t;
    }
    now_ = t;
    pos_ += take;
    i += take;
  }
}

DeadTimeFilter::DeadTimeFilter(double dead_time) : dead_time_(dead_time) {
  if (!(dead_time >= 0.0)) throw ConfigError("dead time must be >= 0");
}

std::size_t DeadTimeFilter::apply(std::span<double> times) noexcept {
  std::size_t kept = 0;
  for (double t : times) {
    if (!have_last_ || t - last_ >= dead_time_) {
      times[kept++] = t;
      last_ = t;
      have_last_ = true;
    }
  }
  return kept;
}

EventStream gen_poisson_stream(const SourceConfig& cfg) {
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) throw ConfigError("tau must be positive");
  PoissonGenerator gen(cfg.tau, cfg.seed);
  std::vector<double> times(cfg.n_events);
  gen.generate(times);
  StreamMeta meta;
  meta.origin = "poisson";
  meta.tau = cfg.tau;
  meta.seed = cfg.seed;
  return EventStream(std::move(times), std::move(meta));
}

EventStream apply_dead_time(const EventStream& s, double dead_time) {
  if (!(dead_time >= 0.0)) throw ConfigError("dead time must be >= 0");
  StreamMeta meta = s.meta();
  if (dead_time == 0.0) return s;
  std::vector<double> times(s.times().begin(), s.times().end());
  DeadTimeFilter filter(dead_time);
  times.resize(filter.apply(times));
  meta.dead_time = dead_time;
  meta.filters.push_back("dead_time");
  return EventStream(std::move(times), std::move(meta));
}

EventStream apply_afterpulsing(const EventStream& s, double p, double tau_ap, std::uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("afterpulse probability must lie in [0, 1)");
  if (p == 0.0) return s;
  if (!(tau_ap > 0.0)) throw ConfigError("afterpulse time constant must be positive");

  UniformSource select(seed, kAfterpulseSelectTag);
  Xoshiro4x delay_rng = seed_xoshiro4x(seed, kAfterpulseDelayTag);
  const auto& kernels = simd::active_kernels();
  std::vector<double> delays(256);
  std::size_t dpos = delays.size();

  std::vector<double> times(s.times().begin(), s.times().end());
  times.reserve(times.size() + static_cast<std::size_t>(static_cast<double>(times.size()) * p * 1.1) + 16);
  for (double t : s.times()) {
    if (select.next_open() < p) {
      if (dpos == delays.size()) {
        kernels.fill_exponential(delay_rng, delays, tau_ap);
        dpos = 0;
      }
      times.push_back(t + delays[dpos++]);
    }
  }
  std::sort(times.begin(), times.end());
  for (std::size_t i = 1; i < times.size(); ++i) times[i] = strictly_after(times[i - 1], times[i]);

  StreamMeta meta = s.meta();
  meta.afterpulse_prob = p;
  meta.afterpulse_tau = tau_ap;
  meta.filters.push_back("afterpulsing");
  return EventStream(std::move(times), std::move(meta));
}

EventStream simulate_source(const SourceConfig& cfg) {
  cfg.validate();
  EventStream s = apply_dead_time(gen_poisson_stream(cfg), cfg.dead_time);
  if (cfg.afterpulse_prob > 0.0) {
    s = apply_afterpulsing(s, cfg.afterpulse_prob, cfg.afterpulse_tau, cfg.seed);
    s = apply_dead_time(s, cfg.dead_time);
  }
  return s;
}

EventStream simulate_detected(const SourceConfig& cfg) {
  cfg.validate();
  StreamMeta meta;
  meta.origin = "poisson";
  meta.tau = cfg.tau;
  meta.seed = cfg.seed;
  if (cfg.dead_time > 0.0) {
    meta.dead_time = cfg.dead_time;
    meta.filters.push_back("dead_time");
  }
  if (cfg.n_events == 0) return EventStream({}, meta);

  std::uint64_t base_n = cfg.n_events;
  for (;;) {
    PoissonGenerator gen(cfg.tau, cfg.seed);
    DeadTimeFilter filter(cfg.dead_time);
    std::vector<double> kept;
    kept.reserve(base_n);
    std::vector<double> buf(std::size_t{1} << 16);
    while (kept.size() < base_n) {
      gen.generate(buf);
      const std::size_t k = std::min<std::size_t>(filter.apply(buf), base_n - kept.size());
      kept.insert(kept.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k));
    }
    EventStream base(std::move(kept), meta);
    if (cfg.afterpulse_prob == 0.0) return base;

    EventStream s = apply_dead_time(apply_afterpulsing(base, cfg.afterpulse_prob, cfg.afterpulse_tau, cfg.seed),
                                    cfg.dead_time);
    // Only events up to the last base event are final; later ones could be
    // preceded by base events not generated yet.
    const auto t = s.times();
    const std::size_t settled =
        static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), base.times().back()) - t.begin());
    if (settled >= cfg.n_events) {
      return EventStream(std::vector<double>(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(cfg.n_events)),
                         s.meta());
    }
    base_n += base_n / 8 + 64;
  }
}

CoherenceTime coherence_time(double wavelength, double spectral_width) {
  if (!(wavelength > 0.0) || !(spectral_width > 0.0)) {
    throw DomainError("coherence_time: wavelength and spectral width must be positive");
  }
  const double tau = wavelength * wavelength / (4.0 * std::numbers::pi * kSpeedOfLight * spectral_width);
  return {tau, 2.0 * std::numbers::pi / tau};
}

double IntervalHistogram::bin_width_at(double t) const noexcept {
  auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), t);
  if (it == bin_edges.begin() || it == bin_edges.end()) return 0.0;
  return *it - *(it - 1);
}

IntervalHistogram interval_histogram(const EventStream& s, const HistogramBinning& binning) {
  if (s.size() < 2) throw InsufficientDataError("interval_histogram needs at least 2 events");
  if (binning.bins < 1 || !(binning.lo > 0.0)) throw ConfigError("histogram needs lo > 0 and bins >= 1");
  const std::vector<double> iv = s.intervals();

  double tau = s.meta().tau;
  if (!(tau > 0.0)) tau = std::accumulate(iv.begin(), iv.end(), 0.0) / static_cast<double>(iv.size());
  const double hi = binning.hi > 0.0 ? binning.hi : 100.0 * tau;
  if (!(hi > binning.lo)) throw ConfigError("histogram upper edge must exceed the lower edge");

  IntervalHistogram h;
  h.bin_edges.reserve(static_cast<std::size_t>(binning.bins) + 3);
  h.bin_edges.push_back(0.0);
  const double ratio = std::log(hi / binning.lo);
  for (int i = 0; i <= binning.bins; ++i) {
    h.bin_edges.push_back(i == binning.bins ? hi : binning.lo * std::exp(ratio * i / binning.bins));
  }
  const double longest = *std::max_element(iv.begin(), iv.end());
  if (longest >= hi) h.bin_edges.push_back(std::nextafter(longest, HUGE_VAL));
  h.counts.assign(h.bin_edges.size() - 1, 0);
  for (double t : iv) {
    const auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), t);
    ++h.counts[static_cast<std::size_t>(it - h.bin_edges.begin()) - 1];
  }

  h.cutoff_estimate = *std::min_element(iv.begin(), iv.end());
  h.fit_threshold = h.cutoff_estimate + h.bin_width_at(h.cutoff_estimate);
  double excess = 0.0;
  for (double t : iv) {
    if (t >= h.fit_threshold) {
      excess += t - h.fit_threshold;
      ++h.fit_samples;
    }
  }
  if (h.fit_samples == 0 || !(excess > 0.0)) {
    throw InsufficientDataError("no intervals beyond the dead-time edge to fit");
  }
  h.fitted_tau = excess / static_cast<double>(h.fit_samples);

  // Pearson chi^2 over bins fully above the fit threshold with >= 5 expected.
  double chi2 = 0.0;
  int dof = 0;
  const double n_fit = static_cast<double>(h.fit_samples);
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double a = h.bin_edges[b], c = h.bin_edges[b + 1];
    if (a < h.fit_threshold) continue;
    const double expected = n_fit * (std::exp(-(a - h.fit_threshold) / h.fitted_tau) -
                                     std::exp(-(c - h.fit_threshold) / h.fitted_tau));
    if (expected < 5.0) continue;
    const double d = static_cast<double>(h.counts[b]) - expected;
    chi2 += d * d / expected;
    ++dof;
  }
  h.goodness = dof > 1 ? chi2 / (dof - 1) : 0.0;
  return h;
}

double kolmogorov_tail(double lambda) noexcept {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-16 * std::fabs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_exponential(std::span<const double> samples, double tau, double shift) {
  if (samples.empty()) throw InsufficientDataError("KS test needs at least one sample");
  if (!(tau > 0.0)) throw DomainError("KS test needs tau > 0");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = x[i] <= shift ? 0.0 : -std::expm1(-(x[i] - shift) / tau);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d), x.size()};
}

}  // namespace photonbits
