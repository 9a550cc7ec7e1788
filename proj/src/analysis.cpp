#include "photonbits/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "photonbits/error.hpp"
#include "photonbits/simd/kernels.hpp"
#include "parallel.hpp"

namespace photonbits {

namespace {

constexpr std::size_t kPiBits = 48;
constexpr std::size_t kShardQuantum = 192;  // multiple of both 64 and 48

using i128 = __int128;

std::vector<std::uint64_t> lag_counts(const BitBuffer& b, int max_lag) {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(max_lag), 0);
  if (max_lag > 0 && !b.empty()) simd::active_kernels().lag_pair_counts(b.words(), b.size(), out);
  return out;
}

// Lag pairs (i, j) with i in `left`, j in `right`, j - i = k.
void add_cross_pairs(std::vector<std::uint64_t>& acc, const BitBuffer& left, const BitBuffer& right,
                     int max_lag) {
  if (left.empty() || right.empty() || max_lag == 0) return;
  BitBuffer joined = left;
  joined.append(right);
  const auto all = lag_counts(joined, max_lag);
  const auto l = lag_counts(left, max_lag);
  const auto r = lag_counts(right, max_lag);
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += all[k] - l[k] - r[k];
}

BitBuffer last_bits(const BitBuffer& a, const BitBuffer& b, std::size_t keep) {
  BitBuffer joined = a;
  joined.append(b);
  if (joined.size() <= keep) return joined;
  return joined.slice(joined.size() - keep, keep);
}

std::uint32_t reverse24(std::uint32_t v) noexcept {
  static const auto table = [] {
    std::array<std::uint8_t, 256> t{};
    for (unsigned i = 0; i < 256; ++i) {
      unsigned r = 0;
      for (unsigned b = 0; b < 8; ++b) r |= ((i >> b) & 1U) << (7 - b);
      t[i] = static_cast<std::uint8_t>(r);
    }
    return t;
  }();
  return (static_cast<std::uint32_t>(table[v & 0xff]) << 16) |
         (static_cast<std::uint32_t>(table[(v >> 8) & 0xff]) << 8) | table[(v >> 16) & 0xff];
}

// 48 consumed bits, LSB-first; the first consumed bit of each coordinate is its MSB.
bool pi_hit(std::uint64_t v) noexcept {
  const std::uint64_t x = reverse24(static_cast<std::uint32_t>(v & 0xffffff));
  const std::uint64_t y = reverse24(static_cast<std::uint32_t>((v >> 24) & 0xffffff));
  return x * x + y * y < (std::uint64_t{1} << 48);
}

double autocorr_from(std::uint64_t n, std::uint64_t ones, std::uint64_t s_k, std::uint64_t ones_tail_k,
                     std::uint64_t ones_head_k, int k) {
  const i128 N = n, O = ones, S = s_k;
  const i128 A = O - static_cast<i128>(ones_tail_k);
  const i128 B = O - static_cast<i128>(ones_head_k);
  const i128 num = N * N * S - N * O * (A + B) + (N - k) * O * O;
  const i128 den = N * (N * O - O * O);
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

}  // namespace

BitStatsAccumulator::BitStatsAccumulator(int max_lag) : max_lag_(max_lag) {
  if (max_lag < 0 || max_lag > simd::kMaxLag) {
    throw ConfigError("maximum lag must lie in [0, " + std::to_string(simd::kMaxLag) + "]");
  }
  lag_pairs_.assign(static_cast<std::size_t>(max_lag), 0);
}

std::uint64_t BitStatsAccumulator::ones_in_head(int k) const noexcept {
  const unsigned c = static_cast<unsigned>(std::min<std::size_t>(static_cast<std::size_t>(k), head_.size()));
  return static_cast<std::uint64_t>(std::popcount(head_.read(0, c)));
}

std::uint64_t BitStatsAccumulator::ones_in_tail(int k) const noexcept {
  const std::size_t c = std::min<std::size_t>(static_cast<std::size_t>(k), tail_.size());
  return static_cast<std::uint64_t>(std::popcount(tail_.read(tail_.size() - c, static_cast<unsigned>(c))));
}

void BitStatsAccumulator::consume_pi(const BitBuffer& bits, std::size_t first) {
  std::size_t pos = first;
  if (!pi_pending_.empty()) {
    const std::size_t need = kPiBits - pi_pending_.size();
    if (bits.size() - pos < need) {
      pi_pending_.append(bits, pos);
      return;
    }
    pi_pending_.append(bits, pos, need);
    pos += need;
    ++pi_points_;
    pi_hits_ += pi_hit(pi_pending_.read(0, kPiBits));
    pi_pending_.clear();
  }
  for (; pos + kPiBits <= bits.size(); pos += kPiBits) {
    ++pi_points_;
    pi_hits_ += pi_hit(bits.read(pos, kPiBits));
  }
  pi_pending_.append(bits, pos);
}

void BitStatsAccumulator::append(const BitBuffer& bits) {
  if (bits.empty()) return;
  const auto& kern = simd::active_kernels();
  ones_ += kern.count_ones(bits.words(), bits.size());
  const auto inner = lag_counts(bits, max_lag_);
  for (std::size_t k = 0; k < inner.size(); ++k) lag_pairs_[k] += inner[k];
  if (n_ > 0) add_cross_pairs(lag_pairs_, tail_, bits.slice(0, 64), max_lag_);

  if (head_.size() < 64) head_.append(bits, 0, 64 - head_.size());
  tail_ = bits.size() >= 64 ? bits.slice(bits.size() - 64, 64) : last_bits(tail_, bits, 64);
  consume_pi(bits, 0);
  n_ += bits.size();
}

void BitStatsAccumulator::merge(const BitStatsAccumulator& right) {
  if (right.max_lag_ != max_lag_) throw ConfigError("cannot merge accumulators with different maximum lags");
  if (right.n_ == 0) return;
  if (n_ == 0) {
    *this = right;
    return;
  }
  if (n_ % kPiBits != 0) throw ConfigError("left accumulator length must be a multiple of 48 bits to merge");
  for (std::size_t k = 0; k < lag_pairs_.size(); ++k) lag_pairs_[k] += right.lag_pairs_[k];
  add_cross_pairs(lag_pairs_, tail_, right.head_, max_lag_);
  ones_ += right.ones_;
  if (head_.size() < 64) head_.append(right.head_, 0, 64 - head_.size());
  tail_ = last_bits(tail_, right.tail_, 64);
  pi_points_ += right.pi_points_;
  pi_hits_ += right.pi_hits_;
  pi_pending_ = right.pi_pending_;
  n_ += right.n_;
}

AnalysisReport BitStatsAccumulator::finalize() const {
  if (n_ == 0) throw InsufficientDataError("no bits to analyze");
  AnalysisReport r;
  const double n = static_cast<double>(n_);
  r.n_bits = n_;
  r.ones = ones_;
  r.mean = static_cast<double>(ones_) / n;
  r.bias = {r.mean - 0.5, 0.5 / std::sqrt(n)};

  if (ones_ == 0 || ones_ == n_) {
    r.autocorr_error = "constant bit sequence: autocorrelation is undefined";
  } else {
    const int kmax = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(max_lag_), n_ - 1));
    for (int k = 1; k <= kmax; ++k) {
      const double a = autocorr_from(n_, ones_, lag_pairs(k), ones_in_tail(k), ones_in_head(k), k);
      r.autocorr.push_back({k, a, 1.0 / std::sqrt(n)});
    }
  }

  if (n_ >= 2 && max_lag_ >= 1) {
    const double pairs = n - 1.0;
    const std::uint64_t n11 = lag_pairs(1);
    const std::uint64_t n10 = ones_ - ones_in_tail(1) - n11;
    const std::uint64_t n01 = ones_ - ones_in_head(1) - n11;
    const std::uint64_t n00 = (n_ - 1) - n11 - n10 - n01;
    r.pair_probs = PairProbs{static_cast<double>(n00) / pairs, static_cast<double>(n01) / pairs,
                             static_cast<double>(n10) / pairs, static_cast<double>(n11) / pairs};
  }

  r.entropy = binary_entropy(r.mean);
  const double diff = static_cast<double>(ones_) - static_cast<double>(n_ - ones_);
  r.chi_square = diff * diff / n;
  r.chi_square_p = chi_square_tail_1dof(r.chi_square);

  r.pi_points = pi_points_;
  if (pi_points_ > 0) {
    const double est = 4.0 * static_cast<double>(pi_hits_) / static_cast<double>(pi_points_);
    r.pi_estimate = est;
    r.pi_error = 100.0 * std::abs(est - std::numbers::pi) / std::numbers::pi;
  }
  return r;
}

BiasResult bias(const BitBuffer& bits) {
  if (bits.empty()) throw InsufficientDataError("bias needs at least one bit");
  const double n = static_cast<double>(bits.size());
  const double ones = static_cast<double>(simd::active_kernels().count_ones(bits.words(), bits.size()));
  return {ones / n - 0.5, 0.5 / std::sqrt(n)};
}

std::vector<AutocorrEntry> autocorr(const BitBuffer& bits, int k_max) {
  if (k_max < 1 || k_max > simd::kMaxLag) {
    throw ConfigError("lag must lie in [1, " + std::to_string(simd::kMaxLag) + "]");
  }
  if (bits.size() <= static_cast<std::size_t>(k_max)) {
    throw InsufficientDataError("autocorrelation up to lag " + std::to_string(k_max) + " needs more than " +
                                std::to_string(k_max) + " bits");
  }
  BitStatsAccumulator acc(k_max);
  acc.append(bits);
  auto r = acc.finalize();
  if (r.autocorr_error) throw DomainError(*r.autocorr_error);
  return r.autocorr;
}

PairProbs pair_probs(const BitBuffer& bits) {
  if (bits.size() < 2) throw InsufficientDataError("pair probabilities need at least two bits");
  BitStatsAccumulator acc(1);
  acc.append(bits);
  return *acc.finalize().pair_probs;
}

AnalysisReport ent_battery(const BitBuffer& bits, int k_max) {
  if (bits.size() < kPiBits) throw InsufficientDataError("the battery needs at least 48 bits");
  BitStatsAccumulator acc(k_max);
  acc.append(bits);
  return acc.finalize();
}

BitStatsAccumulator accumulate_sharded(const BitBuffer& bits, int k_max, std::size_t shards, unsigned jobs) {
  shards = std::max<std::size_t>(shards, 1);
  std::vector<std::size_t> cut(shards + 1);
  for (std::size_t i = 0; i <= shards; ++i) {
    cut[i] = i == shards ? bits.size() : bits.size() * i / shards / kShardQuantum * kShardQuantum;
  }
  std::vector<BitStatsAccumulator> parts(shards, BitStatsAccumulator(k_max));
  detail::parallel_for(shards, jobs, [&](std::size_t i) { parts[i].append(bits.slice(cut[i], cut[i + 1] - cut[i])); });
  BitStatsAccumulator total(k_max);
  for (const auto& p : parts) total.merge(p);
  return total;
}

AnalysisReport ent_battery_sharded(const BitBuffer& bits, int k_max, std::size_t shards, unsigned jobs) {
  if (bits.size() < kPiBits) throw InsufficientDataError("the battery needs at least 48 bits");
  return accumulate_sharded(bits, k_max, shards, jobs).finalize();
}

double binary_entropy(double p1) noexcept {
  const double p0 = 1.0 - p1;
  double h = 0.0;
  if (p0 > 0.0) h -= p0 * std::log2(p0);
  if (p1 > 0.0) h -= p1 * std::log2(p1);
  return h;
}

double chi_square_tail_1dof(double chi2) noexcept {
  // Q(1/2, c/2) reduces to erfc(sqrt(c/2)).
  return std::erfc(std::sqrt(chi2 / 2.0));
}

double multinomial_diff_sigma(double pa, double pb, double n) noexcept {
  const double d = pa - pb;
  return std::sqrt(std::max(0.0, pa + pb - d * d) / n);
}

}  // namespace photonbits
