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
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "granary/charset.hpp"
#include "granary/clients.hpp"
#include "granary/decision.hpp"
#include "granary/manifest.hpp"

namespace granary {

struct TranslationPair {
  std::string id;
  std::string src_text;
  std::string tgt_text;
  std::string src_lang;
  std::string tgt_lang;
  std::optional<double> qe_score;
  std::set<std::string> flags;
};

// Builds a pair from a translated record. Throws Error("not_a_pair") when the
// record lacks any of the pair fields.
TranslationPair pair_from_record(const UtteranceRecord& r);
bool has_pair_fields(const UtteranceRecord& r);

struct AstFilterConfig {
  double max_len_ratio = 9.0;
  std::size_t min_words = 1;
  std::size_t max_words = 250;
  double histogram_threshold = 0.8;
  double lid_min_prob = 0.5;
  double qe_threshold = 0.5;
  std::filesystem::path histograms_dir;  // <lang>.hist
  std::filesystem::path wordlists_dir;   // <lang>.words, for the text LID backend

  void validate() const;
};

// Frequent-character sets per language.
class CharHistograms {
 public:
  static CharHistograms from_dir(const std::filesystem::path& dir);
  void add(const std::string& lang, CharSet chars);
  // Throws Error("unknown_language") when no histogram is loaded for lang.
  const CharSet& get(const std::string& lang) const;

 private:
  std::map<std::string, CharSet> by_lang_;
};

// Pluggable text language identification.
class TextLanguageClassifier {
 public:
  virtual ~TextLanguageClassifier() = default;
  virtual LanguageGuess classify(std::string_view text) const = 0;
};

// Counts case-folded tokens found in each language's word list; the top
// language wins with probability hits / tokens. Ties go to the language that
// sorts first. No hits gives ("und", 0).
class WordlistClassifier final : public TextLanguageClassifier {
 public:
  static WordlistClassifier from_dir(const std::filesystem::path& dir);
  void add(const std::string& lang, const std::vector<std::string>& words);
  LanguageGuess classify(std::string_view text) const override;

 private:
  std::map<std::string, std::vector<std::string>> owners_;  // folded word -> languages
};

// Fixed answers keyed by exact text; unknown text gives the fallback.
class TableClassifier final : public TextLanguageClassifier {
 public:
  explicit TableClassifier(std::map<std::string, LanguageGuess> table, LanguageGuess fallback = {"und", 0.0})
      : table_(std::move(table)), fallback_(std::move(fallback)) {}
  LanguageGuess classify(std::string_view text) const override;

 private:
  std::map<std::string, LanguageGuess> table_;
  LanguageGuess fallback_;
};

bool length_ratio_ok(const TranslationPair& pair, const AstFilterConfig& cfg);

// Fraction of non-whitespace scalars of text inside the histogram; 1.0 for
// text with no such scalars.
double char_histogram_score(std::string_view text, const CharSet& histogram);
double char_histogram_score(std::string_view text, const std::string& lang, const CharHistograms& histograms);

bool lid_text_check(std::string_view text, const std::string& expected_lang,
                    const TextLanguageClassifier& classifier, const AstFilterConfig& cfg);

// Throws Error("qe_missing") when the pair carries no score.
bool qe_filter(const TranslationPair& pair, const AstFilterConfig& cfg);

// Length ratio, histogram, LID and QE, in that order, all evaluated.
FilterDecision filter_pair(const TranslationPair& pair, const AstFilterConfig& cfg,
                           const CharHistograms& histograms, const TextLanguageClassifier& classifier);

}  // namespace granary
