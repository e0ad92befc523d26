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

#include "granary/charset.hpp"

#include <fstream>
#include <string>

#include "granary/error.hpp"
#include "granary/unicode.hpp"

namespace granary {

CharSet::CharSet() : dense_(std::make_shared<std::bitset<kDense>>()) {}

void CharSet::insert(char32_t ch) {
  if (contains(ch)) return;
  if (ch < kDense) {
    // Copy-on-write: sets built from one another share the bitmap.
    if (dense_.use_count() > 1) dense_ = std::make_shared<std::bitset<kDense>>(*dense_);
    dense_->set(ch);
  } else {
    sparse_.insert(ch);
  }
  ++size_;
}

CharSet CharSet::from_chars(std::u32string_view chars) {
  CharSet set;
  for (char32_t c : chars) set.insert(c);
  return set;
}

CharSet CharSet::from_utf8(std::string_view chars) { return from_chars(unicode::decode(chars)); }

CharSet CharSet::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open character file " + path.string());
  CharSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.size() == 6 && line[0] == '\\' && line[1] == 'u') {
      try {
        set.insert(static_cast<char32_t>(std::stoul(line.substr(2), nullptr, 16)));
      } catch (const std::exception&) {
        throw Error("charset", path.string() + ":" + std::to_string(line_no) + ": bad escape " + line);
      }
      continue;
    }
    auto chars = unicode::decode(line);
    if (chars.size() != 1) {
      throw Error("charset", path.string() + ":" + std::to_string(line_no) +
                                 ": expected one character per line");
    }
    set.insert(chars[0]);
  }
  return set;
}

CharSet CharSet::punctuation() const {
  CharSet out;
  for_each([&](char32_t c) {
    if (!unicode::is_letter(c) && !unicode::is_digit(c) && !unicode::is_space(c)) out.insert(c);
  });
  return out;
}

CharSet CharSet::merged(const CharSet& other) const {
  CharSet out = *this;
  other.for_each([&](char32_t c) { out.insert(c); });
  return out;
}

}  // namespace granary
