#include "photonbits/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "photonbits/error.hpp"
#include "photonbits/rng.hpp"
#include "parallel.hpp"

namespace photonbits {

namespace {

constexpr double kRebaseAbove = 1048576.0;  // 2^20 clock periods
constexpr std::size_t kFlushQuantum = 192;

PipelineResult run_one(const PipelineConfig& cfg, std::uint64_t seed, std::uint64_t events, std::uint64_t target_bits,
                       bool whole_points) {
  if (events == 0) events = UINT64_MAX;
  if (target_bits == 0) target_bits = UINT64_MAX;
  const double unit = cfg.method == Method::basic ? cfg.tau : cfg.period;
  PoissonGenerator gen(cfg.tau / unit, seed);
  DeadTimeFilter dead(cfg.dead_time / unit);
  const ClockConfig clock{1.0, cfg.method == Method::continuous ? ClockMode::continuous : ClockMode::restartable,
                          cfg.phase / unit, cfg.skew / unit};
  Extractor x = cfg.method == Method::basic ? Extractor::basic() : Extractor::clocked(clock);

  PipelineResult res{{}, BitStatsAccumulator(cfg.max_lag), std::nullopt};
  if (cfg.keep_bits) res.bits.emplace();
  auto flush = [&](std::size_t count) {
    BitBuffer& b = x.bits();
    if (count == 0) return;
    const BitBuffer head = count == b.size() ? std::move(b) : b.slice(0, count);
    BitBuffer rest = b.slice(count, b.size() - count);
    res.acc.append(head);
    if (res.bits) res.bits->append(head);
    b = std::move(rest);
  };

  std::vector<double> buf(cfg.chunk);
  std::uint64_t consumed = 0;
  while (consumed < events && x.stats().bits_emitted < target_bits) {
    gen.generate(buf);
    const std::size_t kept = dead.apply(buf);
    const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(kept, events - consumed));
    x.feed(std::span<const double>(buf.data(), take));
    consumed += take;
    flush(x.bits().size() / kFlushQuantum * kFlushQuantum);
    if (x.has_last() && x.last_time() > kRebaseAbove) {
      const double shift = std::floor(x.last_time() - clock.phase) - 1.0;
      gen.rebase(shift);
      dead.rebase(shift);
      x.rebase(shift);
    }
  }
  const std::size_t left = x.bits().size();
  flush(whole_points ? left / 48 * 48 : left);
  res.stats = x.stats();
  return res;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::basic: return "exact";
    case Method::continuous: return "continuous";
    case Method::restartable: return "restartable";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "exact" || name == "basic") return Method::basic;
  if (name == "continuous") return Method::continuous;
  if (name == "restart" || name == "restartable") return Method::restartable;
  throw ConfigError("unknown extraction method '" + name + "' (expected exact, continuous or restart)");
}

void PipelineConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
  if (method != Method::basic) {
    ClockConfig{period, method == Method::continuous ? ClockMode::continuous : ClockMode::restartable, phase, skew}
        .validate();
  }
  if (!(dead_time >= 0.0) || !std::isfinite(dead_time)) throw ConfigError("dead time must be >= 0");
  if (max_lag < 1 || max_lag > 63) throw ConfigError("max lag must lie in [1, 63]");
  if (chunk == 0) throw ConfigError("chunk must be positive");
  if (events == 0 && target_bits == 0) throw ConfigError("either an event count or a bit target is required");
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  return run_one(cfg, cfg.seed, cfg.events, cfg.target_bits, false);
}

PipelineResult run_pipeline_streams(const PipelineConfig& cfg, std::size_t streams, unsigned jobs) {
  cfg.validate();
  streams = std::max<std::size_t>(streams, 1);
  std::vector<std::optional<PipelineResult>> parts(streams);
  detail::parallel_for(streams, jobs, [&](std::size_t i) {
    const auto share = [&](std::uint64_t total) {
      return static_cast<std::uint64_t>(static_cast<unsigned __int128>(total) * (i + 1) / streams -
                                        static_cast<unsigned __int128>(total) * i / streams);
    };
    parts[i] = run_one(cfg, derive_seed(cfg.seed, i), share(cfg.events), share(cfg.target_bits), true);
  });
  PipelineResult total{{}, BitStatsAccumulator(cfg.max_lag), std::nullopt};
  if (cfg.keep_bits) total.bits.emplace();
  for (auto& p : parts) {
    total.acc.merge(p->acc);
    if (total.bits) total.bits->append(*p->bits);
    total.stats.events_consumed += p->stats.events_consumed;
    total.stats.intervals_formed += p->stats.intervals_formed;
    total.stats.pairs_formed += p->stats.pairs_formed;
    total.stats.ties_discarded += p->stats.ties_discarded;
    total.stats.bits_emitted += p->stats.bits_emitted;
  }
  return total;
}

}  // namespace photonbits
