#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sigsub {

/// Fixed-width bit vector over transaction indices. Bit i is graph i of the database.
class OccurrenceBits {
 public:
  static constexpr std::size_t kWordBits = 64;

  OccurrenceBits() = default;
  explicit OccurrenceBits(std::size_t width)
      : width_(width), words_(word_count(width), 0) {}

  static constexpr std::size_t word_count(std::size_t width) {
    return (width + kWordBits - 1) / kWordBits;
  }

  std::size_t width() const noexcept { return width_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  void set(std::size_t i) {
    assert(i < width_);
    words_[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
  }
  void reset(std::size_t i) {
    assert(i < width_);
    words_[i / kWordBits] &= ~(std::uint64_t{1} << (i % kWordBits));
  }
  bool test(std::size_t i) const {
    assert(i < width_);
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  /// popcount(*this & other). Widths must match.
  std::size_t and_count(const OccurrenceBits& other) const {
    assert(width_ == other.width_);
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return c;
  }

  /// Bit 0 first, e.g. "1010" has bits 0 and 2 set.
  std::string to_string() const {
    std::string s(width_, '0');
    for (std::size_t i = 0; i < width_; ++i)
      if (test(i)) s[i] = '1';
    return s;
  }

  friend bool operator==(const OccurrenceBits&, const OccurrenceBits&) = default;

 private:
  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace sigsub
