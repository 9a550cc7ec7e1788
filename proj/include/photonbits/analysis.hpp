#pragma once

// Randomness statistics over bit sequences, closed-form laws of the
// clocked extraction methods and an exact oracle for the restartable clock.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "photonbits/bit_buffer.hpp"

namespace photonbits {

struct BiasResult {
  double b = 0.0;
  double std_err = 0.0;
};

struct AutocorrEntry {
  int lag = 0;
  double a = 0.0;
  double std_err = 0.0;
};

struct PairProbs {
  double p00 = 0.0;
  double p01 = 0.0;
  double p10 = 0.0;
  double p11 = 0.0;
};

struct AnalysisReport {
  std::uint64_t n_bits = 0;
  std::uint64_t ones = 0;
  double mean = 0.0;
  BiasResult bias;
  std::vector<AutocorrEntry> autocorr;
  std::optional<std::string> autocorr_error;  ///< set instead of autocorr for constant input
  std::optional<PairProbs> pair_probs;
  double entropy = 0.0;  ///< bits per bit
  double chi_square = 0.0;
  double chi_square_p = 0.0;
  std::uint64_t pi_points = 0;
  std::optional<double> pi_estimate;
  std::optional<double> pi_error;    ///< percent deviation from pi
  std::optional<double> efficiency;  ///< bits per event, filled by callers holding ExtractionStats
};

/// Sufficient statistics of a bit sequence: length, ones, lag-k 11-pair
/// counts, the first and last 64 bits, and Monte-Carlo pi counters. Appending
/// and merging are exact; finalize() gives the same report as a single pass.
class BitStatsAccumulator {
 public:
  explicit BitStatsAccumulator(int max_lag = 32);

  void append(const BitBuffer& bits);
  /// Concatenation: *this followed by `right`. Requires n() % 48 == 0 unless
  /// `right` is empty, so that pi points do not straddle the seam.
  void merge(const BitStatsAccumulator& right);

  AnalysisReport finalize() const;

  int max_lag() const noexcept { return max_lag_; }
  std::uint64_t n() const noexcept { return n_; }
  std::uint64_t ones() const noexcept { return ones_; }
  std::uint64_t lag_pairs(int k) const { return lag_pairs_.at(static_cast<std::size_t>(k - 1)); }
  std::uint64_t pi_points() const noexcept { return pi_points_; }
  std::uint64_t pi_hits() const noexcept { return pi_hits_; }
  /// Ones among the first / last min(k, n) bits, k <= 64.
  std::uint64_t ones_in_head(int k) const noexcept;
  std::uint64_t ones_in_tail(int k) const noexcept;

  friend bool operator==(const BitStatsAccumulator&, const BitStatsAccumulator&) = default;

 private:
  void consume_pi(const BitBuffer& bits, std::size_t first);

  int max_lag_;
  std::uint64_t n_ = 0;
  std::uint64_t ones_ = 0;
  std::vector<std::uint64_t> lag_pairs_;
  BitBuffer head_;  // first min(n, 64) bits
  BitBuffer tail_;  // last min(n, 64) bits
  std::uint64_t pi_points_ = 0;
  std::uint64_t pi_hits_ = 0;
  BitBuffer pi_pending_;  // < 48 bits not yet forming a point
};

/// b = ones/n - 1/2 with standard error 1/(2 sqrt n).
BiasResult bias(const BitBuffer& bits);

/// Serial autocorrelation coefficients a_1..a_kmax, standard error 1/sqrt N.
/// Throws InsufficientDataError if n <= k_max, DomainError for constant input.
std::vector<AutocorrEntry> autocorr(const BitBuffer& bits, int k_max);

/// Frequencies of the n - 1 overlapping consecutive pairs.
PairProbs pair_probs(const BitBuffer& bits);

/// Entropy, chi-square, mean, Monte-Carlo pi, a_1..a_kmax and pair
/// probabilities. Needs at least 48 bits.
AnalysisReport ent_battery(const BitBuffer& bits, int k_max = 32);

/// Same result as ent_battery, computed on `shards` pieces by up to `jobs`
/// threads and merged.
AnalysisReport ent_battery_sharded(const BitBuffer& bits, int k_max, std::size_t shards, unsigned jobs);

/// Accumulator over `bits` built shard-wise; equal to a single append().
BitStatsAccumulator accumulate_sharded(const BitBuffer& bits, int k_max, std::size_t shards, unsigned jobs);

/// Binary entropy in bits.
double binary_entropy(double p1) noexcept;
/// Upper tail of the chi-square distribution with one degree of freedom.
double chi_square_tail_1dof(double chi2) noexcept;
/// Standard deviation of p_a - p_b for two cells of one multinomial sample of size n.
double multinomial_diff_sigma(double pa, double pb, double n) noexcept;

// ---- closed-form laws ----

/// Fast-clock autocorrelation law of the continuous clock: 0.8 x^2.
double a_asymptotic(double x);
/// Three-term efficiency expansion: 1/2 - x/4 + x^2/8.
double eta_asymptotic(double x);
/// Leading-order up/down skew bias: x * dt_over_tau / 2.
double bias_model(double x, double dt_over_tau);

struct OracleResult {
  double x = 0.0;
  double q = 0.0;
  double p_tie = 0.0;
  double p_bit = 0.0;
  double eta_exact = 0.0;
  double eta_paper = 0.0;  ///< eta_asymptotic(x)
};

/// Restartable clock on Poisson input without dead time or skew:
/// p_tie = (1-q)/(1+q), eta = q/(1+q), q = exp(-x). Throws DomainError for x <= 0.
OracleResult oracle_restartable(double x);

struct RestartableExact {
  double p_tie = 0.0;
  double p_one = 0.0;   ///< P(n1 > n2) per pair
  double p_zero = 0.0;  ///< P(n1 < n2) per pair
  double eta = 0.0;     ///< bits per event, (1 - p_tie) / 2
  double bias = 0.0;    ///< p_one / (p_one + p_zero) - 1/2
};

/// Exact restartable statistics with non-paralyzable dead time and skew, both
/// in units of the clock period: intervals are dead + Exp(tau), the first
/// window of each pair is lengthened by skew.
RestartableExact restartable_exact(double x, double dead_over_period = 0.0, double skew_over_period = 0.0);

}  // namespace photonbits
