#include "photonbits/extractor.hpp"

#include <algorithm>
#include <cmath>

#include "photonbits/error.hpp"
#include "photonbits/simd/kernels.hpp"
#include "parallel.hpp"

namespace photonbits {

std::string to_string(ClockMode mode) {
  return mode == ClockMode::continuous ? "continuous" : "restartable";
}

ClockMode parse_clock_mode(const std::string& name) {
  if (name == "continuous") return ClockMode::continuous;
  if (name == "restartable" || name == "restart") return ClockMode::restartable;
  throw ConfigError("unknown clock mode '" + name + "' (expected continuous or restartable)");
}

void ClockConfig::validate() const {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("clock period must be positive");
  if (!(phase >= 0.0 && phase < period)) throw ConfigError("clock phase must lie in [0, period)");
  if (!(skew >= 0.0) || !std::isfinite(skew)) throw ConfigError("clock skew must be >= 0");
}

std::vector<std::string> ClockConfig::warnings() const {
  std::vector<std::string> w;
  if (skew > period / 2.0) w.emplace_back("skew exceeds half a clock period");
  return w;
}

std::vector<IntervalPair> pair_intervals(const EventStream& s) {
  std::vector<IntervalPair> out;
  const auto t = s.times();
  if (t.size() < 3) return out;
  out.reserve((t.size() - 1) / 2);
  for (std::size_t i = 0; i + 2 < t.size(); i += 2) out.push_back({t[i + 1] - t[i], t[i + 2] - t[i + 1]});
  return out;
}

Extractor::Extractor(Kind kind, const ClockConfig& clock)
    : kind_(kind), clock_(clock), kernels_(&simd::active_kernels()) {}

Extractor Extractor::basic() { return Extractor(Kind::basic, ClockConfig{1.0}); }

Extractor Extractor::clocked(const ClockConfig& clock) {
  clock.validate();
  return Extractor(clock.mode == ClockMode::continuous ? Kind::continuous : Kind::restartable, clock);
}

void Extractor::feed(std::span<const double> ts) {
  if (ts.empty()) return;
  if (kind_ == Kind::continuous) {
    feed_continuous(ts);
  } else {
    feed_intervals(ts);
  }
}

void Extractor::feed_intervals(std::span<const double> ts) {
  scratch_.clear();
  scratch_.reserve(ts.size() + 1);
  if (have_first_) scratch_.push_back(pending_);
  for (double t : ts) {
    if (have_prev_) {
      if (!(t > prev_t_)) {
        throw DataError("event " + std::to_string(stats_.events_consumed + 1) + " is not after its predecessor",
                        stats_.events_consumed + 1);
      }
      scratch_.push_back(t - prev_t_);
      ++stats_.intervals_formed;
    }
    prev_t_ = t;
    have_prev_ = true;
    ++stats_.events_consumed;
  }
  const std::size_t pairs = scratch_.size() / 2;
  if (kind_ == Kind::restartable) {
    signs_.resize(pairs);
    kernels_->restart_signs(std::span<const double>(scratch_.data(), 2 * pairs), clock_.period, clock_.skew,
                            signs_);
    for (std::int8_t s : signs_) emit(s);
  } else {
    for (std::size_t i = 0; i < pairs; ++i) {
      const double t1 = scratch_[2 * i], t2 = scratch_[2 * i + 1];
      emit((t1 > t2) - (t1 < t2));
    }
  }
  have_first_ = scratch_.size() % 2 == 1;
  if (have_first_) pending_ = scratch_.back();
}

void Extractor::feed_continuous(std::span<const double> ts) {
  scratch_.resize(ts.size());
  kernels_->edge_indices(ts, 0.0, clock_.phase, clock_.period, scratch_);
  const bool skewed = clock_.skew != 0.0;
  if (skewed) {
    scratch2_.resize(ts.size());
    kernels_->edge_indices(ts, clock_.skew, clock_.phase, clock_.period, scratch2_);
  }
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double t = ts[j];
    if (have_prev_) {
      if (!(t > prev_t_)) {
        throw DataError("event " + std::to_string(stats_.events_consumed + 1) + " is not after its predecessor",
                        stats_.events_consumed + 1);
      }
      ++stats_.intervals_formed;
      if (!have_first_) {
        pending_ = (skewed ? scratch2_[j] : scratch_[j]) - prev_edge_;
        have_first_ = true;
      } else {
        const double n2 = scratch_[j] - prev_edge_;
        emit((pending_ > n2) - (pending_ < n2));
        have_first_ = false;
      }
    }
    prev_edge_ = scratch_[j];
    prev_t_ = t;
    have_prev_ = true;
    ++stats_.events_consumed;
  }
}

void Extractor::rebase(double shift) noexcept {
  prev_t_ -= shift;
  if (kind_ == Kind::continuous) prev_edge_ -= shift / clock_.period;
}

Extraction Extractor::finish() && { return {std::move(bits_), stats_}; }

Extraction extract_basic(const EventStream& s) {
  Extractor x = Extractor::basic();
  x.feed(s.times());
  return std::move(x).finish();
}

Extraction extract_clocked(const EventStream& s, const ClockConfig& clock) {
  Extractor x = Extractor::clocked(clock);
  x.feed(s.times());
  return std::move(x).finish();
}

Extraction extract_updown_counter(const EventStream& s, const ClockConfig& clock) {
  clock.validate();
  if (clock.mode != ClockMode::restartable) {
    throw UnsupportedConfigError("the up/down counter realizes the restartable clock only");
  }
  Extraction out;
  out.stats.events_consumed = s.size();
  out.stats.intervals_formed = s.empty() ? 0 : s.size() - 1;
  const auto t = s.times();
  for (std::size_t i = 0; i + 2 < t.size(); i += 2) {
    // The clock restarts at each event; edge k fires k periods later.
    std::int64_t counter = 0;
    const double up_window = (t[i + 1] - t[i]) + clock.skew;
    for (std::int64_t k = 1; static_cast<double>(k) * clock.period <= up_window; ++k) ++counter;
    const double down_window = t[i + 2] - t[i + 1];
    for (std::int64_t k = 1; static_cast<double>(k) * clock.period <= down_window; ++k) --counter;
    ++out.stats.pairs_formed;
    if (counter == 0) {
      ++out.stats.ties_discarded;
    } else {
      out.bits.push_back(counter > 0);
      ++out.stats.bits_emitted;
    }
  }
  return out;
}

Extraction extract_restartable_sharded(const EventStream& s, const ClockConfig& clock, std::size_t shards,
                                       unsigned jobs) {
  clock.validate();
  if (clock.mode != ClockMode::restartable) {
    throw UnsupportedConfigError("only restartable extraction can be split at pair boundaries");
  }
  const auto t = s.times();
  const std::size_t pairs = t.size() < 3 ? 0 : (t.size() - 1) / 2;
  shards = std::clamp<std::size_t>(shards, 1, std::max<std::size_t>(pairs, 1));
  std::vector<Extraction> parts(shards);

  auto run = [&](std::size_t k) {
    const std::size_t p0 = pairs * k / shards, p1 = pairs * (k + 1) / shards;
    const std::size_t first = 2 * p0;
    const std::size_t last = k + 1 == shards ? t.size() : 2 * p1 + 1;  // one past the closing event
    Extractor x = Extractor::clocked(clock);
    if (first < last) x.feed(t.subspan(first, last - first));
    parts[k] = std::move(x).finish();
  };
  detail::parallel_for(shards, jobs, run);

  Extraction out;
  out.stats.events_consumed = t.size();
  out.stats.intervals_formed = t.empty() ? 0 : t.size() - 1;
  for (const auto& p : parts) {
    out.bits.append(p.bits);
    out.stats.pairs_formed += p.stats.pairs_formed;
    out.stats.ties_discarded += p.stats.ties_discarded;
    out.stats.bits_emitted += p.stats.bits_emitted;
  }
  return out;
}

}  // namespace photonbits
