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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "granary/charset.hpp"

namespace granary {

// Unit-cost Levenshtein distance over Unicode scalars, two-row dynamic
// program in O(min(|a|, |b|)) memory.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

// Character error rate: edit distance / reference length in scalars.
// cer("", "") == 0; an empty reference with a non-empty hypothesis has no
// defined rate and yields +infinity, which every threshold rejects.
double cer(std::string_view hypothesis, std::string_view reference);

// Case-folds, removes every character in `punctuation`, and collapses runs
// of whitespace into single spaces.
std::string normalize_for_cer(std::string_view text, const CharSet& punctuation);

struct PncConfig {
  double cer_threshold = 0.05;
  bool normalize = true;
  std::filesystem::path exemplars_dir;

  void validate() const;
};

using ExemplarPair = std::pair<std::string, std::string>;

// Per-language before/after correction pairs (<lang>.tsv, tab-separated).
class ExemplarBank {
 public:
  static ExemplarBank from_dir(const std::filesystem::path& dir);
  void add(const std::string& lang, std::vector<ExemplarPair> pairs);
  // Throws Error("missing_exemplars") when the language has no exemplar file.
  const std::vector<ExemplarPair>& get(const std::string& lang) const;

 private:
  std::map<std::string, std::vector<ExemplarPair>> by_lang_;
};

// Markers around the text to restore; the model is asked to echo them.
inline constexpr std::string_view kInputOpen = "<<<";
inline constexpr std::string_view kInputClose = ">>>";

std::string build_restoration_prompt(const std::string& lang, std::string_view text,
                                     const std::vector<ExemplarPair>& exemplars);

// Pulls the text to restore back out of a prompt (used by the mock LLM).
std::string extract_prompt_input(std::string_view prompt);

// Strips surrounding whitespace and the optional <<< >>> markers from a reply.
std::string extract_restored_text(std::string_view response);

struct RestorationOutcome {
  enum class Source { original, restored };

  std::string chosen_text;
  Source source = Source::original;
  double cer_value = 0.0;
  bool charset_ok = true;

  bool reverted() const noexcept { return source == Source::original; }
};

// Keeps the restoration iff its CER against the original is within the
// threshold and every character is allowed; otherwise keeps the original.
RestorationOutcome accept_restoration(std::string_view original, std::string_view restored,
                                      const PncConfig& cfg, const CharSet& charset,
                                      const CharSet& punctuation);
RestorationOutcome accept_restoration(std::string_view original, std::string_view restored,
                                      const PncConfig& cfg, const CharSet& charset);

}  // namespace granary
