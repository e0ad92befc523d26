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

#include "granary/ast_filters.hpp"

#include <algorithm>
#include <fstream>

#include "granary/error.hpp"
#include "granary/languages.hpp"
#include "granary/unicode.hpp"

namespace granary {

bool has_pair_fields(const UtteranceRecord& r) {
  return r.src_text && r.tgt_text && r.src_lang && r.tgt_lang;
}

TranslationPair pair_from_record(const UtteranceRecord& r) {
  if (!has_pair_fields(r)) throw Error("not_a_pair", "record " + r.id + " has no translation pair");
  return {r.id, *r.src_text, *r.tgt_text, *r.src_lang, *r.tgt_lang, r.qe_score, r.flags};
}

void AstFilterConfig::validate() const {
  if (!(max_len_ratio > 0)) throw ConfigError("ast_filter.max_len_ratio must be > 0");
  if (min_words == 0 || min_words > max_words) throw ConfigError("ast_filter: need 1 <= min_words <= max_words");
  auto unit = [](double v, const char* name) {
    if (!(v >= 0 && v <= 1)) throw ConfigError(std::string("ast_filter.") + name + " must lie in [0, 1]");
  };
  unit(histogram_threshold, "histogram_threshold");
  unit(qe_threshold, "qe_threshold");
  unit(lid_min_prob, "lid_min_prob");
}

CharHistograms CharHistograms::from_dir(const std::filesystem::path& dir) {
  CharHistograms h;
  for (const auto& lang : kLanguages) {
    const auto path = dir / (std::string(lang.code) + ".hist");
    if (std::filesystem::exists(path)) h.add(std::string(lang.code), CharSet::from_file(path));
  }
  return h;
}

void CharHistograms::add(const std::string& lang, CharSet chars) { by_lang_.insert_or_assign(lang, std::move(chars)); }

const CharSet& CharHistograms::get(const std::string& lang) const {
  auto it = by_lang_.find(lang);
  if (it == by_lang_.end()) throw Error("unknown_language", "no character histogram for '" + lang + "'");
  return it->second;
}

WordlistClassifier WordlistClassifier::from_dir(const std::filesystem::path& dir) {
  WordlistClassifier c;
  for (const auto& lang : kLanguages) {
    std::ifstream in(dir / (std::string(lang.code) + ".words"));
    if (!in) continue;
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) words.push_back(line);
    }
    c.add(std::string(lang.code), words);
  }
  return c;
}

void WordlistClassifier::add(const std::string& lang, const std::vector<std::string>& words) {
  for (const auto& w : words) {
    auto& langs = owners_[unicode::fold_case(w)];
    if (std::find(langs.begin(), langs.end(), lang) == langs.end()) langs.push_back(lang);
  }
}

LanguageGuess WordlistClassifier::classify(std::string_view text) const {
  std::map<std::string, std::size_t> hits;
  std::size_t tokens = 0;
  for (auto tok : unicode::split_words(text)) {
    ++tokens;
    // Trim surrounding punctuation so "Hello," still counts.
    auto folded = unicode::decode(unicode::fold_case(tok));
    std::size_t b = 0, e = folded.size();
    while (b < e && !unicode::is_letter(folded[b]) && !unicode::is_digit(folded[b])) ++b;
    while (e > b && !unicode::is_letter(folded[e - 1]) && !unicode::is_digit(folded[e - 1]) && folded[e - 1] != U'\'') --e;
    auto it = owners_.find(unicode::encode(std::u32string_view(folded).substr(b, e - b)));
    if (it == owners_.end()) continue;
    for (const auto& lang : it->second) ++hits[lang];
  }
  LanguageGuess best{"und", 0.0};
  std::size_t best_hits = 0;
  for (const auto& [lang, n] : hits) {
    if (n > best_hits) best = {lang, 0.0}, best_hits = n;
  }
  if (tokens > 0) best.prob = static_cast<double>(best_hits) / static_cast<double>(tokens);
  return best;
}

LanguageGuess TableClassifier::classify(std::string_view text) const {
  auto it = table_.find(std::string(text));
  return it == table_.end() ? fallback_ : it->second;
}

bool length_ratio_ok(const TranslationPair& pair, const AstFilterConfig& cfg) {
  const auto src = unicode::word_count(pair.src_text);
  const auto tgt = unicode::word_count(pair.tgt_text);
  for (auto n : {src, tgt}) {
    if (n < cfg.min_words || n > cfg.max_words) return false;
  }
  const auto [lo, hi] = std::minmax(src, tgt);
  return static_cast<double>(hi) <= cfg.max_len_ratio * static_cast<double>(lo);
}

double char_histogram_score(std::string_view text, const CharSet& histogram) {
  std::size_t total = 0, inside = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t ch = unicode::next_scalar(text, pos);
    if (unicode::is_space(ch)) continue;
    ++total;
    if (histogram.contains(ch)) ++inside;
  }
  return total == 0 ? 1.0 : static_cast<double>(inside) / static_cast<double>(total);
}

double char_histogram_score(std::string_view text, const std::string& lang, const CharHistograms& histograms) {
  return char_histogram_score(text, histograms.get(lang));
}

bool lid_text_check(std::string_view text, const std::string& expected_lang,
                    const TextLanguageClassifier& classifier, const AstFilterConfig& cfg) {
  const auto guess = classifier.classify(text);
  return guess.lang == expected_lang && guess.prob >= cfg.lid_min_prob;
}

bool qe_filter(const TranslationPair& pair, const AstFilterConfig& cfg) {
  if (!pair.qe_score) throw Error("qe_missing", "pair " + pair.id + " has no quality estimate");
  return *pair.qe_score >= cfg.qe_threshold;
}

FilterDecision filter_pair(const TranslationPair& pair, const AstFilterConfig& cfg,
                           const CharHistograms& histograms, const TextLanguageClassifier& classifier) {
  FilterDecision d;
  d.record_id = pair.id;
  if (!length_ratio_ok(pair, cfg)) {
    d.add(flag::kAstLenRatio, "word counts " + std::to_string(unicode::word_count(pair.src_text)) + " / " +
                                  std::to_string(unicode::word_count(pair.tgt_text)));
  }
  const double src_hist = char_histogram_score(pair.src_text, pair.src_lang, histograms);
  const double tgt_hist = char_histogram_score(pair.tgt_text, pair.tgt_lang, histograms);
  if (src_hist < cfg.histogram_threshold || tgt_hist < cfg.histogram_threshold) {
    d.add(flag::kAstHistogram, "histogram scores " + format_double(src_hist) + " / " + format_double(tgt_hist));
  }
  if (!lid_text_check(pair.src_text, pair.src_lang, classifier, cfg) ||
      !lid_text_check(pair.tgt_text, pair.tgt_lang, classifier, cfg)) {
    d.add(flag::kAstLid, "text language differs from " + pair.src_lang + " / " + pair.tgt_lang);
  }
  if (!qe_filter(pair, cfg)) d.add(flag::kAstQe, "qe " + format_double(*pair.qe_score));
  return d;
}

}  // namespace granary
