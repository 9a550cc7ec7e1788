#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "photonbits/analysis.hpp"
#include "photonbits/error.hpp"
#include "support.hpp"

using namespace photonbits;
using testing_support::random_bits;
using testing_support::to_vector;

namespace {

BitBuffer bits_of(std::initializer_list<int> v) {
  BitBuffer b;
  for (int x : v) b.push_back(x != 0);
  return b;
}

BitBuffer pattern(const std::vector<int>& unit, std::size_t repeats) {
  BitBuffer b;
  for (std::size_t r = 0; r < repeats; ++r) {
    for (int x : unit) b.push_back(x != 0);
  }
  return b;
}

// Serial correlation evaluated term by term in long double.
long double direct_autocorr(const std::vector<std::uint8_t>& y, int k) {
  const std::size_t n = y.size();
  long double mean = 0;
  for (auto v : y) mean += v;
  mean /= n;
  long double num = 0, den = 0;
  for (std::size_t i = 0; i + k < n; ++i) num += (y[i] - mean) * (y[i + k] - mean);
  for (auto v : y) den += (v - mean) * (v - mean);
  return num / den;
}

PairProbs direct_pairs(const std::vector<std::uint8_t>& y) {
  double c[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i + 1 < y.size(); ++i) c[2 * y[i] + y[i + 1]] += 1;
  const double n = static_cast<double>(y.size() - 1);
  return {c[0] / n, c[1] / n, c[2] / n, c[3] / n};
}

// 1-dof chi-square tail through the series of the lower incomplete gamma.
double chi2_tail_series(double c) {
  const double a = 0.5, x = c / 2.0;
  double term = 1.0 / a, sum = term;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
  }
  const double lower = std::exp(-x + a * std::log(x) - std::lgamma(a)) * sum;
  return 1.0 - lower;
}

}  // namespace

TEST(Bias, AlternatingIsBalanced) {
  const auto r = bias(pattern({0, 1}, 500));
  EXPECT_EQ(r.b, 0.0);
  EXPECT_DOUBLE_EQ(r.std_err, 1.0 / (2.0 * std::sqrt(1000.0)));
}

TEST(Bias, AllOnes) { EXPECT_EQ(bias(pattern({1}, 8)).b, 0.5); }

TEST(Bias, ThreeOfFour) { EXPECT_EQ(bias(bits_of({1, 1, 0, 1})).b, 0.25); }

TEST(Bias, EmptyIsAnError) { EXPECT_THROW(bias(BitBuffer{}), InsufficientDataError); }

TEST(Autocorr, Alternating) {
  const auto a = autocorr(bits_of({0, 1, 0, 1}), 1);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_DOUBLE_EQ(a[0].a, -0.75);
  EXPECT_DOUBLE_EQ(a[0].std_err, 0.5);
}

TEST(Autocorr, TwoBlocks) { EXPECT_DOUBLE_EQ(autocorr(bits_of({0, 0, 1, 1}), 1)[0].a, 0.25); }

TEST(Autocorr, ConstantSequenceIsAnError) {
  EXPECT_THROW(autocorr(pattern({1}, 100), 3), DomainError);
  EXPECT_THROW(autocorr(pattern({0}, 100), 3), DomainError);
}

TEST(Autocorr, TooShortIsAnError) { EXPECT_THROW(autocorr(bits_of({0, 1, 1}), 3), InsufficientDataError); }

TEST(Autocorr, FairCoinWithinNullBound) {
  std::mt19937_64 g(11);
  const auto a = autocorr(random_bits(g, 1'000'000), 32);
  for (const auto& e : a) EXPECT_LT(std::abs(e.a), 3e-3) << "lag " << e.lag;
}

TEST(Autocorr, MatchesTermByTermEvaluation) {
  std::mt19937_64 g(5);
  std::uniform_int_distribution<std::size_t> len(70, 4000);
  std::uniform_real_distribution<double> p(0.05, 0.95);
  for (int trial = 0; trial < 60; ++trial) {
    const BitBuffer b = random_bits(g, len(g), p(g));
    const auto y = to_vector(b);
    if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0) continue;
    const auto a = autocorr(b, 63);
    for (const auto& e : a) {
      EXPECT_NEAR(e.a, static_cast<double>(direct_autocorr(y, e.lag)), 1e-12) << "trial " << trial;
    }
  }
}

TEST(PairProbs, TwoBlocks) {
  const auto p = pair_probs(bits_of({0, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(p.p00, 1.0 / 3);
  EXPECT_DOUBLE_EQ(p.p01, 1.0 / 3);
  EXPECT_DOUBLE_EQ(p.p10, 0.0);
  EXPECT_DOUBLE_EQ(p.p11, 1.0 / 3);
}

TEST(PairProbs, Alternating) {
  const auto p = pair_probs(bits_of({0, 1, 0, 1}));
  EXPECT_DOUBLE_EQ(p.p00, 0.0);
  EXPECT_DOUBLE_EQ(p.p01, 2.0 / 3);
  EXPECT_DOUBLE_EQ(p.p10, 1.0 / 3);
  EXPECT_DOUBLE_EQ(p.p11, 0.0);
}

TEST(PairProbs, SumToOneAndMatchDirectCount) {
  std::mt19937_64 g(8);
  for (std::size_t n : {2u, 3u, 65u, 1000u, 4097u}) {
    const BitBuffer b = random_bits(g, n, 0.3);
    const auto p = pair_probs(b);
    const auto d = direct_pairs(to_vector(b));
    EXPECT_NEAR(p.p00 + p.p01 + p.p10 + p.p11, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(p.p00, d.p00);
    EXPECT_DOUBLE_EQ(p.p01, d.p01);
    EXPECT_DOUBLE_EQ(p.p10, d.p10);
    EXPECT_DOUBLE_EQ(p.p11, d.p11);
  }
  EXPECT_THROW(pair_probs(bits_of({1})), InsufficientDataError);
}

TEST(Battery, BalancedInput) {
  const auto r = ent_battery(pattern({0, 1}, 500));
  EXPECT_DOUBLE_EQ(r.entropy, 1.0);
  EXPECT_DOUBLE_EQ(r.chi_square, 0.0);
  EXPECT_DOUBLE_EQ(r.chi_square_p, 1.0);
  EXPECT_EQ(r.autocorr.size(), 32u);
}

TEST(Battery, QuarterOnesEntropy) {
  const auto r = ent_battery(pattern({0, 0, 0, 1}, 64));
  EXPECT_NEAR(r.entropy, 0.811278, 5e-7);
}

TEST(Battery, ChiSquareFourSix) {
  BitStatsAccumulator acc(1);
  acc.append(bits_of({0, 0, 0, 0, 1, 1, 1, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(acc.finalize().chi_square, 0.4);
}

TEST(Battery, ChiSquareTailMatchesIncompleteGamma) {
  for (double c : {0.01, 0.4, 1.0, 2.89, 7.5, 15.0}) {
    EXPECT_NEAR(chi_square_tail_1dof(c), chi2_tail_series(c), 1e-12) << c;
  }
  EXPECT_NEAR(chi_square_tail_1dof(2.89), 0.0891, 1e-4);
}

TEST(Battery, AllZeroPiIsFour) {
  BitStatsAccumulator acc(8);
  acc.append(pattern({0}, 480));
  const auto r = acc.finalize();
  ASSERT_TRUE(r.pi_estimate);
  EXPECT_EQ(*r.pi_estimate, 4.0);
  EXPECT_EQ(r.pi_points, 10u);
  EXPECT_TRUE(r.autocorr_error);
  EXPECT_THROW(ent_battery(pattern({0, 1}, 23)), InsufficientDataError);
}

TEST(Battery, PiPointConvention) {
  // First consumed bit of each 24-bit coordinate is its most significant bit.
  std::vector<int> unit(48, 0);
  unit[0] = 1;  // X = 2^23, Y = 0: inside
  BitStatsAccumulator a(1);
  a.append(pattern(unit, 1));
  EXPECT_EQ(a.pi_hits(), 1u);

  std::vector<int> corner(48, 1);  // X = Y = 2^24 - 1: outside
  BitStatsAccumulator b(1);
  b.append(pattern(corner, 1));
  EXPECT_EQ(b.pi_hits(), 0u);

  std::vector<int> edge(48, 0);  // X = 2^24 - 1, Y = 0: X^2 < 2^48, inside
  for (int i = 0; i < 24; ++i) edge[i] = 1;
  BitStatsAccumulator c(1);
  c.append(pattern(edge, 1));
  EXPECT_EQ(c.pi_hits(), 1u);
}

TEST(Battery, PiMatchesDirectEvaluation) {
  std::mt19937_64 g(21);
  const BitBuffer b = random_bits(g, 48 * 5000 + 17);
  const auto y = to_vector(b);
  std::uint64_t hits = 0, points = 0;
  for (std::size_t i = 0; i + 48 <= y.size(); i += 48) {
    long double u = 0, v = 0;
    for (int j = 0; j < 24; ++j) {
      u += y[i + j] * std::ldexp(1.0L, -(j + 1));
      v += y[i + 24 + j] * std::ldexp(1.0L, -(j + 1));
    }
    hits += (u * u + v * v < 1.0L);
    ++points;
  }
  const auto r = ent_battery(b);
  EXPECT_EQ(r.pi_points, points);
  EXPECT_DOUBLE_EQ(*r.pi_estimate, 4.0 * static_cast<double>(hits) / static_cast<double>(points));
  EXPECT_NEAR(*r.pi_error, 100.0 * std::abs(*r.pi_estimate - std::numbers::pi) / std::numbers::pi, 1e-12);
}

TEST(Accumulator, ChunkedAppendEqualsSingleAppend) {
  std::mt19937_64 g(3);
  std::uniform_int_distribution<std::size_t> cut(0, 300);
  for (int trial = 0; trial < 40; ++trial) {
    const BitBuffer b = random_bits(g, 2000 + cut(g), 0.4);
    BitStatsAccumulator whole(63), parts(63);
    whole.append(b);
    for (std::size_t pos = 0; pos < b.size();) {
      const std::size_t n = std::min(cut(g), b.size() - pos);
      parts.append(b.slice(pos, n));
      pos += n;
    }
    ASSERT_EQ(whole, parts) << "trial " << trial;
  }
}

TEST(Accumulator, MergeEqualsSinglePass) {
  std::mt19937_64 g(4);
  std::uniform_int_distribution<std::size_t> groups(0, 12);
  for (int trial = 0; trial < 40; ++trial) {
    const BitBuffer b = random_bits(g, 48 * 40 + groups(g) * 5, 0.6);
    BitStatsAccumulator whole(32);
    whole.append(b);
    BitStatsAccumulator merged(32);
    std::size_t pos = 0;
    while (pos < b.size()) {
      std::size_t n = groups(g) * 48;
      if (n == 0 || pos + n > b.size()) n = b.size() - pos;
      BitStatsAccumulator piece(32);
      piece.append(b.slice(pos, n));
      merged.merge(piece);
      pos += n;
    }
    ASSERT_EQ(whole, merged) << "trial " << trial;
    const auto r1 = whole.finalize(), r2 = merged.finalize();
    for (std::size_t k = 0; k < r1.autocorr.size(); ++k) ASSERT_EQ(r1.autocorr[k].a, r2.autocorr[k].a);
  }
}

TEST(Accumulator, MergeIsAssociative) {
  std::mt19937_64 g(6);
  const BitBuffer a = random_bits(g, 480), b = random_bits(g, 960), c = random_bits(g, 333);
  BitStatsAccumulator A(16), B(16), C(16);
  A.append(a);
  B.append(b);
  C.append(c);
  BitStatsAccumulator left = A;
  left.merge(B);
  left.merge(C);
  BitStatsAccumulator bc = B;
  bc.merge(C);
  BitStatsAccumulator right = A;
  right.merge(bc);
  EXPECT_EQ(left, right);
}

TEST(Accumulator, MergeRequiresWholePiPoints) {
  BitStatsAccumulator a(4), b(4);
  a.append(pattern({1, 0, 0}, 7));
  b.append(pattern({1}, 5));
  EXPECT_THROW(a.merge(b), ConfigError);
  EXPECT_THROW(BitStatsAccumulator(64), ConfigError);
}

TEST(Accumulator, ShardedBatteryEqualsSerial) {
  std::mt19937_64 g(9);
  const BitBuffer b = random_bits(g, 100'003, 0.52);
  const auto serial = ent_battery(b, 32);
  for (std::size_t shards : {1u, 2u, 7u, 64u}) {
    for (unsigned jobs : {1u, 3u}) {
      EXPECT_EQ(accumulate_sharded(b, 32, shards, jobs), [&] {
        BitStatsAccumulator a(32);
        a.append(b);
        return a;
      }());
      const auto r = ent_battery_sharded(b, 32, shards, jobs);
      EXPECT_EQ(r.ones, serial.ones);
      for (std::size_t k = 0; k < r.autocorr.size(); ++k) EXPECT_EQ(r.autocorr[k].a, serial.autocorr[k].a);
      EXPECT_EQ(*r.pi_estimate, *serial.pi_estimate);
    }
  }
}

TEST(PairIdentity, BalancedSequencesWithinTwoOverN) {
  std::mt19937_64 g(12);
  for (std::size_t n : {1000u, 20'000u, 1'000'000u}) {
    std::vector<std::uint8_t> v(n, 0);
    std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), 1);
    std::shuffle(v.begin(), v.end(), g);
    const BitBuffer b = BitBuffer::from_bits(v);
    const auto a1 = autocorr(b, 1)[0].a;
    const auto p = pair_probs(b);
    EXPECT_LE(std::abs(a1 - (p.p11 + p.p00 - p.p10 - p.p01)), 2.0 / static_cast<double>(n)) << n;
  }
}

TEST(PairIdentity, UnbiasedStreamsWithinTolerance) {
  std::mt19937_64 g(13);
  const BitBuffer b = random_bits(g, 1'000'000);
  const auto a1 = autocorr(b, 1)[0].a;
  const auto p = pair_probs(b);
  EXPECT_LE(std::abs(a1 - (p.p11 + p.p00 - p.p10 - p.p01)), 1e-4);
}

TEST(Laws, Autocorrelation) {
  EXPECT_EQ(a_asymptotic(0.0), 0.0);
  EXPECT_NEAR(a_asymptotic(1.0 / 90.0), 9.88e-5, 5e-8);
  EXPECT_NEAR(a_asymptotic(0.2), 0.032, 1e-15);
  EXPECT_THROW(a_asymptotic(-1.0), DomainError);
}

TEST(Laws, Efficiency) {
  EXPECT_EQ(eta_asymptotic(0.0), 0.5);
  EXPECT_NEAR(eta_asymptotic(2.0 / 48.0), 0.48980, 5e-6);
  EXPECT_DOUBLE_EQ(eta_asymptotic(0.5), 0.40625);
}

TEST(Laws, Bias) {
  EXPECT_EQ(bias_model(0.1, 0.0), 0.0);
  EXPECT_NEAR(bias_model(0.1, 0.02), 1e-3, 1e-18);
  // Halving tau at fixed T and dt doubles both ratios.
  EXPECT_DOUBLE_EQ(bias_model(0.2, 0.04) / bias_model(0.1, 0.02), 4.0);
}

TEST(Entropy, Bounds) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_EQ(binary_entropy(0.5), 1.0);
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double h = binary_entropy(u(g));
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0);
  }
}

TEST(Report, InvariantsOnRandomInput) {
  std::mt19937_64 g(14);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = ent_battery(random_bits(g, 48 + trial * 37, p(g)));
    EXPECT_LE(std::abs(r.bias.b), 0.5);
    EXPECT_GE(r.entropy, 0.0);
    EXPECT_LE(r.entropy, 1.0);
    ASSERT_TRUE(r.pair_probs);
    EXPECT_NEAR(r.pair_probs->p00 + r.pair_probs->p01 + r.pair_probs->p10 + r.pair_probs->p11, 1.0, 1e-12);
  }
}
