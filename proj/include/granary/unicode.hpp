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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 and case-folding helpers for the scripts of the supported
// languages (Latin, Greek, Cyrillic). Malformed bytes decode to U+FFFD, one
// replacement per offending byte, so every byte sequence has a defined length.
namespace granary::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes one scalar starting at text[pos] and advances pos.
char32_t next_scalar(std::string_view text, std::size_t& pos) noexcept;

std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t ch);

std::size_t scalar_count(std::string_view text) noexcept;

char32_t fold_case(char32_t ch) noexcept;
std::string fold_case(std::string_view text);

bool is_letter(char32_t ch) noexcept;
bool is_digit(char32_t ch) noexcept;
bool is_space(char32_t ch) noexcept;

// Splits on ASCII whitespace; empty tokens are skipped.
std::vector<std::string_view> split_words(std::string_view text);

// Counts ASCII-whitespace-delimited words without materializing them.
std::size_t word_count(std::string_view text) noexcept;

}  // namespace granary::unicode
