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

#include "granary/unicode.hpp"

namespace granary::unicode {

namespace {

inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

char32_t next_scalar(std::string_view text, std::size_t& pos) noexcept {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + len > text.size()) {
    ++pos;
    return kReplacement;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + i]);
    if (!is_continuation(b)) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kReplacement;
  }
  pos += len;
  return cp;
}

std::u32string decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) out.push_back(next_scalar(text, pos));
  return out;
}

void append(std::string& out, char32_t ch) {
  if (ch < 0x80) {
    out.push_back(static_cast<char>(ch));
  } else if (ch < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (ch >> 6)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  } else if (ch < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (ch >> 12)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (ch >> 18)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  }
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t ch : text) append(out, ch);
  return out;
}

std::size_t scalar_count(std::string_view text) noexcept {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (static_cast<unsigned char>(text[pos]) < 0x80) {
      ++pos;
    } else {
      next_scalar(text, pos);
    }
    ++n;
  }
  return n;
}

char32_t fold_case(char32_t ch) noexcept {
  if (ch < 0x80) return (ch >= 'A' && ch <= 'Z') ? ch + 32 : ch;
  if (ch >= 0xC0 && ch <= 0xDE && ch != 0xD7) return ch + 32;
  if (ch >= 0x100 && ch <= 0x17F) {
    if (ch == 0x130) return U'i';
    if (ch == 0x178) return 0xFF;
    if (ch == 0x17F) return U's';
    if (ch == 0x131 || ch == 0x138 || ch == 0x149) return ch;
    if ((ch >= 0x139 && ch <= 0x148) || (ch >= 0x179 && ch <= 0x17E)) return (ch & 1) ? ch + 1 : ch;
    return (ch & 1) ? ch : ch + 1;
  }
  if (ch >= 0x218 && ch <= 0x21B) return (ch & 1) ? ch : ch + 1;
  if (ch >= 0x370 && ch <= 0x3FF) {
    if (ch == 0x386) return 0x3AC;
    if (ch >= 0x388 && ch <= 0x38A) return ch + 37;
    if (ch == 0x38C) return 0x3CC;
    if (ch == 0x38E || ch == 0x38F) return ch + 63;
    if (ch >= 0x391 && ch <= 0x3AB && ch != 0x3A2) return ch + 32;
    if (ch == 0x3C2) return 0x3C3;
    return ch;
  }
  if (ch >= 0x400 && ch <= 0x40F) return ch + 80;
  if (ch >= 0x410 && ch <= 0x42F) return ch + 32;
  if (ch >= 0x460 && ch <= 0x4BF && ch != 0x482 && !(ch >= 0x483 && ch <= 0x489)) {
    return (ch & 1) ? ch : ch + 1;
  }
  return ch;
}

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) append(out, fold_case(next_scalar(text, pos)));
  return out;
}

bool is_letter(char32_t ch) noexcept {
  if (ch < 0x80) return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z');
  if (ch == 0xAA || ch == 0xB5 || ch == 0xBA) return true;
  if (ch >= 0xC0 && ch <= 0x24F) return ch != 0xD7 && ch != 0xF7;
  if (ch >= 0x370 && ch <= 0x3FF) {
    return ch != 0x375 && ch != 0x37E && ch != 0x384 && ch != 0x385 && ch != 0x387 && ch != 0x3F6;
  }
  if (ch >= 0x400 && ch <= 0x52F) return ch < 0x482 || ch > 0x489;
  return false;
}

bool is_digit(char32_t ch) noexcept { return ch >= '0' && ch <= '9'; }

bool is_space(char32_t ch) noexcept {
  return ch == ' ' || (ch >= 0x09 && ch <= 0x0D) || ch == 0xA0 || ch == 0x2028 || ch == 0x2029 ||
         (ch >= 0x2000 && ch <= 0x200A) || ch == 0x202F || ch == 0x3000;
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_ascii_space(text[i])) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

std::size_t word_count(std::string_view text) noexcept {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = is_ascii_space(c);
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace granary::unicode
