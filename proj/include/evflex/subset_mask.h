// Copyright 2026 The evflex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EVFLEX_SUBSET_MASK_H_
#define EVFLEX_SUBSET_MASK_H_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace evflex {

// A subset of the periods {0, ..., horizon-1}, stored as packed 64-bit words.
// Horizons up to 64 fit a single word and can be enumerated as integers via
// FromBits/bits(); longer horizons use the same interface with more words.
class SubsetMask {
 public:
  SubsetMask() = default;
  explicit SubsetMask(std::size_t horizon);

  static SubsetMask Full(std::size_t horizon);
  static SubsetMask FromBits(std::size_t horizon, std::uint64_t bits);
  // 1-based period numbers, matching the usual {1, ..., T} notation.
  static SubsetMask FromPeriods(std::size_t horizon,
                                std::initializer_list<std::size_t> periods);
  static SubsetMask FromIndices(std::size_t horizon,
                                std::span<const std::size_t> indices);

  std::size_t horizon() const { return horizon_; }
  bool Contains(std::size_t index) const {
    return (words_[index >> 6] >> (index & 63)) & 1U;
  }
  void Insert(std::size_t index) {
    words_[index >> 6] |= std::uint64_t{1} << (index & 63);
  }
  void Erase(std::size_t index) {
    words_[index >> 6] &= ~(std::uint64_t{1} << (index & 63));
  }
  std::size_t Count() const;
  // Number of members in the inclusive index range [first, last].
  std::size_t CountInRange(std::size_t first, std::size_t last) const;
  bool Empty() const;
  bool IsSubsetOf(const SubsetMask& other) const;
  // Only valid when horizon() <= 64.
  std::uint64_t bits() const;

  SubsetMask Complement() const;
  SubsetMask& operator|=(const SubsetMask& other);
  SubsetMask& operator&=(const SubsetMask& other);
  SubsetMask& operator-=(const SubsetMask& other);  // set difference

  std::vector<std::size_t> Indices() const;
  std::size_t Hash() const;
  std::string ToString() const;  // 1-based, e.g. "{1,3}"

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;
  // Orders by the packed integer value, least significant word last.
  friend bool operator<(const SubsetMask& a, const SubsetMask& b);

 private:
  std::size_t horizon_ = 0;
  std::vector<std::uint64_t> words_;
};

inline SubsetMask operator|(SubsetMask a, const SubsetMask& b) {
  a |= b;
  return a;
}
inline SubsetMask operator&(SubsetMask a, const SubsetMask& b) {
  a &= b;
  return a;
}
inline SubsetMask operator-(SubsetMask a, const SubsetMask& b) {
  a -= b;
  return a;
}

struct SubsetMaskHash {
  std::size_t operator()(const SubsetMask& mask) const { return mask.Hash(); }
};

}  // namespace evflex

#endif  // EVFLEX_SUBSET_MASK_H_
