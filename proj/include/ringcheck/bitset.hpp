#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace ringcheck {

// Dense bit vector sized to a state graph; the workhorse of the fixpoint
// engine. Word-at-a-time boolean algebra, bit indices are state ids.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(size_t size, bool fill = false)
      : size_(size), words_((size + 63) / 64, fill ? ~uint64_t{0} : 0) {
    trim();
  }

  size_t size() const { return size_; }

  bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i) { words_[i >> 6] |= uint64_t{1} << (i & 63); }
  void reset(size_t i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

  size_t count() const {
    size_t c = 0;
    for (uint64_t w : words_) c += static_cast<size_t>(__builtin_popcountll(w));
    return c;
  }

  bool any() const {
    for (uint64_t w : words_) {
      if (w) return true;
    }
    return false;
  }

  Bitset& operator&=(const Bitset& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  Bitset& operator|=(const Bitset& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  Bitset operator&(const Bitset& o) const {
    Bitset r = *this;
    r &= o;
    return r;
  }
  Bitset operator|(const Bitset& o) const {
    Bitset r = *this;
    r |= o;
    return r;
  }
  Bitset operator~() const {
    Bitset r = *this;
    for (uint64_t& w : r.words_) w = ~w;
    r.trim();
    return r;
  }

  bool operator==(const Bitset& o) const = default;

 private:
  void trim() {
    if (size_ & 63) words_.back() &= (uint64_t{1} << (size_ & 63)) - 1;
  }

  size_t size_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace ringcheck
