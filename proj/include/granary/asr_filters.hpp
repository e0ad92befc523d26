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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "granary/charset.hpp"
#include "granary/decision.hpp"
#include "granary/manifest.hpp"

namespace granary {

struct CharRateBounds {
  double min = 1.0;
  double max = 30.0;
};

struct AsrFilterConfig {
  double min_lid_prob = 0.8;
  int ngram_min_n = 2;
  int ngram_max_n = 5;
  int ngram_min_consecutive_repeats = 4;
  int unigram_min_consecutive_repeats = 5;
  std::size_t max_word_chars = 40;
  CharRateBounds char_rate_default;
  std::map<std::string, CharRateBounds> char_rate_per_lang;
  // <lang> -> phrase file. Languages without a list fail with "no_phrase_list"
  // unless phrase_lists_optional is set.
  std::map<std::string, std::filesystem::path> phrase_lists;
  bool phrase_lists_optional = false;
  std::filesystem::path charset;

  CharRateBounds char_rate_bounds(const std::string& lang) const;
  void validate() const;
};

// Simultaneous multi-pattern matcher (Aho-Corasick over case-folded scalars).
// Scans the text once regardless of how many phrases are indexed.
class PhraseIndex {
 public:
  PhraseIndex();
  explicit PhraseIndex(const std::vector<std::string>& phrases);

  static PhraseIndex from_file(const std::filesystem::path& path);

  bool matches(std::string_view text) const;
  std::size_t phrase_count() const noexcept { return phrase_count_; }

 private:
  struct Node {
    std::vector<std::pair<char32_t, std::int32_t>> next;  // sorted by scalar
    std::int32_t fail = 0;
    bool terminal = false;
  };
  static constexpr char32_t kRootDense = 0x600;

  void add(std::u32string_view phrase);
  void build();
  std::int32_t child(std::int32_t node, char32_t ch) const;

  std::vector<Node> nodes_;
  std::vector<std::int32_t> root_dense_;
  std::size_t phrase_count_ = 0;
};

// Per-language phrase indexes, immutable once loaded.
class PhraseLibrary {
 public:
  void add(const std::string& lang, PhraseIndex index);
  static PhraseLibrary from_files(const std::map<std::string, std::filesystem::path>& files);
  const PhraseIndex* find(const std::string& lang) const;

 private:
  std::map<std::string, PhraseIndex> by_lang_;
};

FilterDecision lid_filter(const UtteranceRecord& r, const AsrFilterConfig& cfg);

bool detect_repeated_ngrams(std::string_view text, const AsrFilterConfig& cfg);
bool detect_long_words(std::string_view text, const AsrFilterConfig& cfg);
bool detect_hallucinated_phrases(std::string_view text, const std::string& lang,
                                 const PhraseLibrary& phrases, bool list_optional = false);

// Scalars per second. Throws Error("invalid_duration") when duration_s <= 0.
double char_rate(std::string_view text, double duration_s);

struct CharsetViolation {
  std::size_t index = 0;  // scalar index into the text
  char32_t ch = 0;
  bool operator==(const CharsetViolation&) const = default;
};

std::optional<CharsetViolation> charset_check(std::string_view text, const CharSet& allowed);

// Runs the text-level filters (hallucination, character rate, charset) and,
// optionally, the LID filter. Every filter runs; flags are never short-circuited.
class AsrQualityFilter {
 public:
  AsrQualityFilter(AsrFilterConfig cfg, PhraseLibrary phrases, CharSet charset);

  // Loads phrase lists and the charset named in cfg.
  static AsrQualityFilter from_config(const AsrFilterConfig& cfg);

  FilterDecision filter_text(const UtteranceRecord& r) const;
  FilterDecision filter_record(const UtteranceRecord& r) const;

  const AsrFilterConfig& config() const noexcept { return cfg_; }
  const CharSet& charset() const noexcept { return charset_; }
  const PhraseLibrary& phrases() const noexcept { return phrases_; }

 private:
  AsrFilterConfig cfg_;
  PhraseLibrary phrases_;
  CharSet charset_;
};

}  // namespace granary
