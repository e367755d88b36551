#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "structboost/errors.hpp"

namespace structboost {

// Fixed-width set of vertex positions backed by 64-bit words. The width is
// the vertex count of the graph the set belongs to; bits at or above the
// width are always zero.
class VertexSet {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  VertexSet() = default;
  explicit VertexSet(std::size_t width)
      : width_(width), words_((width + kWordBits - 1) / kWordBits, 0) {}

  VertexSet(std::size_t width, std::initializer_list<std::size_t> members)
      : VertexSet(width) {
    for (auto v : members) insert(v);
  }

  static VertexSet full(std::size_t width) {
    VertexSet s(width);
    for (auto& w : s.words_) w = ~Word{0};
    s.trim();
    return s;
  }

  static VertexSet from_indices(std::size_t width, std::span<const std::size_t> members) {
    VertexSet s(width);
    for (auto v : members) s.insert(v);
    return s;
  }

  std::size_t width() const noexcept { return width_; }

  std::size_t cardinality() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool empty() const noexcept {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  bool contains(std::size_t v) const noexcept {
    return v < width_ && ((words_[v / kWordBits] >> (v % kWordBits)) & 1U);
  }

  void insert(std::size_t v) {
    check_index(v);
    words_[v / kWordBits] |= Word{1} << (v % kWordBits);
  }

  void erase(std::size_t v) {
    check_index(v);
    words_[v / kWordBits] &= ~(Word{1} << (v % kWordBits));
  }

  VertexSet complement() const {
    VertexSet s(*this);
    for (auto& w : s.words_) w = ~w;
    s.trim();
    return s;
  }

  VertexSet& operator|=(const VertexSet& o) {
    check_width(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  VertexSet& operator&=(const VertexSet& o) {
    check_width(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  // Set difference.
  VertexSet& operator-=(const VertexSet& o) {
    check_width(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

  bool intersects(const VertexSet& o) const {
    check_width(o);
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  bool is_subset_of(const VertexSet& o) const {
    check_width(o);
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  // Lowest member, or width() when empty.
  std::size_t first() const noexcept { return next(0); }

  // Lowest member >= from, or width() when there is none.
  std::size_t next(std::size_t from) const noexcept {
    if (from >= width_) return width_;
    std::size_t wi = from / kWordBits;
    Word w = words_[wi] & (~Word{0} << (from % kWordBits));
    while (true) {
      if (w) return wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w));
      if (++wi == words_.size()) return width_;
      w = words_[wi];
    }
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      Word w = words_[wi];
      while (w) {
        f(wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(cardinality());
    for_each([&](std::size_t v) { out.push_back(v); });
    return out;
  }

  std::span<const Word> words() const noexcept { return words_; }

  // Overwrites the first word; used by the 64-bit enumeration fast path to
  // hand results out without reallocating.
  void assign_low_word(Word w) {
    words_.at(0) = w;
    trim();
  }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

  // Canonical order: by width, then by the set read as an unsigned binary
  // number with vertex i weighted 2^i.
  friend std::strong_ordering operator<=>(const VertexSet& a, const VertexSet& b) {
    if (auto c = a.width_ <=> b.width_; c != 0) return c;
    for (std::size_t i = a.words_.size(); i-- > 0;) {
      if (auto c = a.words_[i] <=> b.words_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  std::size_t hash() const noexcept {
    std::size_t h = width_ * 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) h = (h ^ w) * 0x100000001b3ULL + (h >> 29);
    return h;
  }

 private:
  void check_index(std::size_t v) const {
    if (v >= width_)
      throw WidthMismatch("vertex index " + std::to_string(v) + " outside set of width " +
                          std::to_string(width_));
  }
  void check_width(const VertexSet& o) const {
    if (o.width_ != width_)
      throw WidthMismatch("vertex set widths differ: " + std::to_string(width_) + " vs " +
                          std::to_string(o.width_));
  }
  void trim() {
    if (width_ % kWordBits != 0 && !words_.empty())
      words_.back() &= (Word{1} << (width_ % kWordBits)) - 1;
  }

  std::size_t width_ = 0;
  std::vector<Word> words_;
};

struct VertexSetHash {
  std::size_t operator()(const VertexSet& s) const noexcept { return s.hash(); }
};

}  // namespace structboost
