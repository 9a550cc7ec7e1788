#include "photonbits/bit_buffer.hpp"

#include <algorithm>

#include "photonbits/error.hpp"

namespace photonbits {

BitBuffer BitBuffer::from_bits(std::span<const std::uint8_t> bits) {
  BitBuffer b;
  b.reserve(bits.size());
  for (auto v : bits) b.push_back(v != 0);
  return b;
}

BitBuffer BitBuffer::from_bytes(std::span<const std::uint8_t> bytes, std::size_t n_bits) {
  if (bytes.size() != (n_bits + 7) / 8) {
    throw DataError("bit payload has " + std::to_string(bytes.size()) + " bytes, expected " +
                    std::to_string((n_bits + 7) / 8));
  }
  BitBuffer b;
  b.words_.assign((n_bits + 63) / 64, 0);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    b.words_[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
  }
  b.size_ = n_bits;
  if (n_bits % 64 != 0 && (b.words_.back() >> (n_bits % 64)) != 0) {
    throw DataError("non-zero pad bits after bit " + std::to_string(n_bits));
  }
  return b;
}

std::uint64_t BitBuffer::read(std::size_t first, unsigned count) const noexcept {
  if (count == 0 || first >= size_) return 0;
  const std::size_t w = first / 64;
  const unsigned off = first % 64;
  std::uint64_t v = words_[w] >> off;
  if (off != 0 && w + 1 < words_.size()) v |= words_[w + 1] << (64 - off);
  return count == 64 ? v : v & ((std::uint64_t{1} << count) - 1);
}

void BitBuffer::append(const BitBuffer& other, std::size_t first, std::size_t count) {
  if (first > other.size_) first = other.size_;
  count = std::min(count, other.size_ - first);
  if (count == 0) return;
  if (size_ % 64 == 0 && first % 64 == 0) {
    const std::size_t nw = (count + 63) / 64;
    words_.insert(words_.end(), other.words_.begin() + static_cast<std::ptrdiff_t>(first / 64),
                  other.words_.begin() + static_cast<std::ptrdiff_t>(first / 64 + nw));
    size_ += count;
    if (size_ % 64 != 0) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    return;
  }
  words_.reserve((size_ + count + 63) / 64);
  std::size_t done = 0;
  while (done < count) {
    const unsigned take = static_cast<unsigned>(std::min<std::size_t>(64 - size_ % 64, count - done));
    const std::uint64_t chunk = other.read(first + done, take);
    if (size_ % 64 == 0) words_.push_back(0);
    words_.back() |= chunk << (size_ % 64);
    size_ += take;
    done += take;
  }
}

BitBuffer BitBuffer::slice(std::size_t first, std::size_t count) const {
  BitBuffer b;
  b.append(*this, first, count);
  return b;
}

std::vector<std::uint8_t> BitBuffer::to_bytes() const {
  std::vector<std::uint8_t> out((size_ + 7) / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

}  // namespace photonbits
