// Copyright (c) 2026, The granary-curate Authors. All rights reserved.
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

#pragma once

#include <bitset>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string_view>

namespace granary {

// A set of Unicode scalar values. Backs the corpus-wide allowed charset and
// the per-language character histograms.
//
// File format: UTF-8, one character per line; a line may instead hold a
// \uXXXX escape (used for whitespace and the backslash itself).
class CharSet {
 public:
  CharSet();

  static CharSet from_file(const std::filesystem::path& path);
  static CharSet from_chars(std::u32string_view chars);
  static CharSet from_utf8(std::string_view chars);

  void insert(char32_t ch);
  bool contains(char32_t ch) const noexcept {
    return ch < kDense ? dense_->test(ch) : sparse_.count(ch) > 0;
  }
  std::size_t size() const noexcept { return size_; }

  // Members that are neither letters, digits nor whitespace.
  CharSet punctuation() const;

  // Union of this set with another, used by monotonicity checks.
  CharSet merged(const CharSet& other) const;

  template <typename F>
  void for_each(F&& f) const {
    for (char32_t c = 0; c < kDense; ++c) {
      if (dense_->test(c)) f(c);
    }
    for (char32_t c : sparse_) f(c);
  }

 private:
  static constexpr char32_t kDense = 0x10000;
  std::shared_ptr<std::bitset<kDense>> dense_;
  std::set<char32_t> sparse_;
  std::size_t size_ = 0;
};

}  // namespace granary
