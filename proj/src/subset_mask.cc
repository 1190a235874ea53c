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

#include "evflex/subset_mask.h"

#include <fmt/core.h>

#include "evflex/errors.h"

namespace evflex {
namespace {

std::size_t WordCount(std::size_t horizon) { return (horizon + 63) / 64; }

// Mask of the valid bits in the last word.
std::uint64_t TailMask(std::size_t horizon) {
  const std::size_t rem = horizon & 63;
  return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

std::uint64_t RangeBits(std::size_t lo, std::size_t hi) {
  // bits lo..hi inclusive, 0 <= lo <= hi < 64
  const std::uint64_t upper =
      hi == 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << (hi + 1)) - 1;
  return upper & ~((std::uint64_t{1} << lo) - 1);
}

}  // namespace

SubsetMask::SubsetMask(std::size_t horizon)
    : horizon_(horizon), words_(WordCount(horizon), 0) {}

SubsetMask SubsetMask::Full(std::size_t horizon) {
  SubsetMask mask(horizon);
  for (auto& w : mask.words_) w = ~std::uint64_t{0};
  if (!mask.words_.empty()) mask.words_.back() &= TailMask(horizon);
  return mask;
}

SubsetMask SubsetMask::FromBits(std::size_t horizon, std::uint64_t bits) {
  if (horizon > 64) {
    throw InvalidInputError("FromBits requires a horizon of at most 64");
  }
  SubsetMask mask(horizon);
  if (!mask.words_.empty()) mask.words_[0] = bits & TailMask(horizon);
  return mask;
}

SubsetMask SubsetMask::FromPeriods(std::size_t horizon,
                                   std::initializer_list<std::size_t> periods) {
  SubsetMask mask(horizon);
  for (std::size_t p : periods) {
    if (p < 1 || p > horizon) {
      throw InvalidInputError(
          fmt::format("period {} outside 1..{}", p, horizon));
    }
    mask.Insert(p - 1);
  }
  return mask;
}

SubsetMask SubsetMask::FromIndices(std::size_t horizon,
                                   std::span<const std::size_t> indices) {
  SubsetMask mask(horizon);
  for (std::size_t i : indices) {
    if (i >= horizon) {
      throw InvalidInputError(
          fmt::format("index {} outside 0..{}", i, horizon - 1));
    }
    mask.Insert(i);
  }
  return mask;
}

std::size_t SubsetMask::Count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t SubsetMask::CountInRange(std::size_t first,
                                     std::size_t last) const {
  if (first > last) return 0;
  const std::size_t wf = first >> 6;
  const std::size_t wl = last >> 6;
  if (wf == wl) {
    return static_cast<std::size_t>(
        std::popcount(words_[wf] & RangeBits(first & 63, last & 63)));
  }
  std::size_t n = static_cast<std::size_t>(
      std::popcount(words_[wf] & RangeBits(first & 63, 63)));
  for (std::size_t w = wf + 1; w < wl; ++w) {
    n += static_cast<std::size_t>(std::popcount(words_[w]));
  }
  n += static_cast<std::size_t>(
      std::popcount(words_[wl] & RangeBits(0, last & 63)));
  return n;
}

bool SubsetMask::Empty() const {
  for (auto w : words_) {
    if (w != 0) return false;
  }
  return true;
}

bool SubsetMask::IsSubsetOf(const SubsetMask& other) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

std::uint64_t SubsetMask::bits() const {
  if (horizon_ > 64) {
    throw InvalidInputError("bits() requires a horizon of at most 64");
  }
  return words_.empty() ? 0 : words_[0];
}

SubsetMask SubsetMask::Complement() const {
  SubsetMask out = *this;
  for (auto& w : out.words_) w = ~w;
  if (!out.words_.empty()) out.words_.back() &= TailMask(horizon_);
  return out;
}

SubsetMask& SubsetMask::operator|=(const SubsetMask& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

SubsetMask& SubsetMask::operator&=(const SubsetMask& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

SubsetMask& SubsetMask::operator-=(const SubsetMask& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

std::vector<std::size_t> SubsetMask::Indices() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::size_t SubsetMask::Hash() const {
  // FNV-1a over the words.
  std::uint64_t h = 1469598103934665603ULL ^ horizon_;
  for (auto w : words_) {
    h ^= w;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::string SubsetMask::ToString() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i : Indices()) {
    if (!first) out += ",";
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

bool operator<(const SubsetMask& a, const SubsetMask& b) {
  if (a.horizon_ != b.horizon_) return a.horizon_ < b.horizon_;
  for (std::size_t i = a.words_.size(); i-- > 0;) {
    if (a.words_[i] != b.words_[i]) return a.words_[i] < b.words_[i];
  }
  return false;
}

}  // namespace evflex
