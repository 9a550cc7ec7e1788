#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "photonbits/bit_buffer.hpp"
#include "photonbits/event_source.hpp"

namespace testing_support {

// Generators deliberately use the standard library engine, not the library's
// own generator, so that test inputs are independent of the code under test.
inline photonbits::BitBuffer random_bits(std::mt19937_64& g, std::size_t n, double p1 = 0.5) {
  std::bernoulli_distribution coin(p1);
  photonbits::BitBuffer b;
  for (std::size_t i = 0; i < n; ++i) b.push_back(coin(g));
  return b;
}

inline std::vector<std::uint8_t> to_vector(const photonbits::BitBuffer& b) {
  std::vector<std::uint8_t> v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v[i] = b[i];
  return v;
}

/// Strictly increasing integer-valued times, so sums and differences are exact.
inline std::vector<double> integer_times(std::mt19937_64& g, std::size_t n, int max_gap) {
  std::uniform_int_distribution<int> gap(1, max_gap);
  std::vector<double> t(n);
  double now = 0.0;
  for (auto& v : t) {
    now += gap(g);
    v = now;
  }
  return t;
}

inline photonbits::EventStream stream_of(std::vector<double> t) { return photonbits::EventStream(std::move(t)); }

/// Exponential arrivals from the standard library.
inline std::vector<double> poisson_times(std::mt19937_64& g, std::size_t n, double tau) {
  std::exponential_distribution<double> e(1.0 / tau);
  std::vector<double> t(n);
  double now = 0.0;
  for (auto& v : t) {
    now += e(g);
    v = now;
  }
  return t;
}

}  // namespace testing_support
