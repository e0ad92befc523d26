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

#include <array>
#include <optional>
#include <string_view>

namespace granary {

struct LanguageInfo {
  std::string_view code;
  std::string_view name;
};

// The 23 EU languages plus Ukrainian and Russian.
inline constexpr std::array<LanguageInfo, 25> kLanguages{{
    {"bg", "Bulgarian"}, {"cs", "Czech"},      {"da", "Danish"},     {"de", "German"},
    {"el", "Greek"},     {"en", "English"},    {"es", "Spanish"},    {"et", "Estonian"},
    {"fi", "Finnish"},   {"fr", "French"},     {"hr", "Croatian"},   {"hu", "Hungarian"},
    {"it", "Italian"},   {"lt", "Lithuanian"}, {"lv", "Latvian"},    {"mt", "Maltese"},
    {"nl", "Dutch"},     {"pl", "Polish"},     {"pt", "Portuguese"}, {"ro", "Romanian"},
    {"ru", "Russian"},   {"sk", "Slovak"},     {"sl", "Slovenian"},  {"sv", "Swedish"},
    {"uk", "Ukrainian"},
}};

inline std::optional<std::size_t> language_index(std::string_view code) {
  for (std::size_t i = 0; i < kLanguages.size(); ++i) {
    if (kLanguages[i].code == code) return i;
  }
  return std::nullopt;
}

inline bool is_supported_language(std::string_view code) { return language_index(code).has_value(); }

inline std::string_view language_name(std::string_view code) {
  auto idx = language_index(code);
  return idx ? kLanguages[*idx].name : std::string_view{};
}

}  // namespace granary
