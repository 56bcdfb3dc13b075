// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace figalign {

/// Ordered set of lowercase Latin letters a-z stored as a 26-bit mask.
/// Iteration and `letters()` are always ascending.
class LabelSet {
 public:
  constexpr LabelSet() = default;
  constexpr LabelSet(std::initializer_list<char> letters) {
    for (char c : letters) insert(c);
  }

  static constexpr LabelSet from_mask(std::uint32_t mask) {
    LabelSet s;
    s.mask_ = mask & kAll;
    return s;
  }

  static constexpr bool is_letter(char c) { return c >= 'a' && c <= 'z'; }

  /// Inserts `c` if it is a lowercase letter; returns false otherwise.
  constexpr bool insert(char c) {
    if (!is_letter(c)) return false;
    mask_ |= 1u << (c - 'a');
    return true;
  }

  constexpr bool contains(char c) const {
    return is_letter(c) && (mask_ & (1u << (c - 'a'))) != 0;
  }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr std::uint32_t mask() const { return mask_; }

  /// Smallest letter, if any.
  constexpr std::optional<char> front() const {
    if (empty()) return std::nullopt;
    return static_cast<char>('a' + std::countr_zero(mask_));
  }

  std::vector<char> letters() const {
    std::vector<char> out;
    for (int i = 0; i < 26; ++i)
      if (mask_ & (1u << i)) out.push_back(static_cast<char>('a' + i));
    return out;
  }

  std::string str() const {
    auto l = letters();
    return {l.begin(), l.end()};
  }

  friend constexpr LabelSet operator&(LabelSet a, LabelSet b) {
    return from_mask(a.mask_ & b.mask_);
  }
  friend constexpr LabelSet operator|(LabelSet a, LabelSet b) {
    return from_mask(a.mask_ | b.mask_);
  }
  friend constexpr bool operator==(LabelSet, LabelSet) = default;

 private:
  static constexpr std::uint32_t kAll = (1u << 26) - 1;
  std::uint32_t mask_ = 0;
};

}  // namespace figalign
