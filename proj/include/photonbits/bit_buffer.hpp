#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace photonbits {

/// Packed bit sequence. Bit i lives in word i / 64 at position i % 64, so the
/// first emitted bit is the least-significant bit of the first byte once the
/// words are serialized little-endian. Pad bits past size() are always zero.
class BitBuffer {
 public:
  BitBuffer() = default;

  static BitBuffer from_bits(std::span<const std::uint8_t> bits);
  /// Reads ceil(n_bits / 8) bytes; bits past n_bits in the last byte must be zero.
  static BitBuffer from_bytes(std::span<const std::uint8_t> bytes, std::size_t n_bits);

  void push_back(bool bit) {
    const std::size_t w = size_ / 64;
    if (w == words_.size()) words_.push_back(0);
    words_[w] |= static_cast<std::uint64_t>(bit) << (size_ % 64);
    ++size_;
  }

  /// Appends `count` bits of `other` starting at bit `first`.
  void append(const BitBuffer& other, std::size_t first = 0, std::size_t count = SIZE_MAX);

  bool operator[](std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Up to 64 bits starting at `first`, LSB-first. Bits past size() read as zero.
  std::uint64_t read(std::size_t first, unsigned count) const noexcept;

  BitBuffer slice(std::size_t first, std::size_t count) const;
  std::vector<std::uint8_t> to_bytes() const;
  void clear() noexcept {
    words_.clear();
    size_ = 0;
  }
  void reserve(std::size_t n_bits) { words_.reserve((n_bits + 63) / 64); }

  friend bool operator==(const BitBuffer&, const BitBuffer&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

}  // namespace photonbits
