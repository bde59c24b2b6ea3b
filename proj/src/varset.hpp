#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace lpc::detail {

// Fixed-width bitset over variables 1..n.
class VarSet {
 public:
  VarSet() = default;
  explicit VarSet(std::uint32_t num_vars) : words_((num_vars + 64) / 64, 0) {}

  void set(std::uint32_t v) { words_[v / 64] |= std::uint64_t{1} << (v % 64); }
  bool test(std::uint32_t v) const { return (words_[v / 64] >> (v % 64)) & 1U; }

  VarSet& operator|=(const VarSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  bool intersects(const VarSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & o.words_[i]) return true;
    }
    return false;
  }
  /// Variables in *this that are missing from `o`.
  std::vector<std::uint32_t> minus(const VarSet& o) const {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i] & ~o.words_[i];
      while (w) {
        out.push_back(static_cast<std::uint32_t>(i * 64 + std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  friend bool operator==(const VarSet&, const VarSet&) = default;

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace lpc::detail
