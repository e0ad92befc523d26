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

#include "granary/asr_filters.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>

#include "granary/error.hpp"
#include "granary/unicode.hpp"

namespace granary {

CharRateBounds AsrFilterConfig::char_rate_bounds(const std::string& lang) const {
  auto it = char_rate_per_lang.find(lang);
  return it == char_rate_per_lang.end() ? char_rate_default : it->second;
}

void AsrFilterConfig::validate() const {
  if (!(min_lid_prob >= 0.0 && min_lid_prob <= 1.0)) throw ConfigError("min_lid_prob must lie in [0, 1]");
  if (ngram_min_n < 1 || ngram_max_n > 10 || ngram_min_n > ngram_max_n) {
    throw ConfigError("ngram_n_range must lie within 1..10");
  }
  if (ngram_min_consecutive_repeats < 2 || unigram_min_consecutive_repeats < 2) {
    throw ConfigError("repeat thresholds must be at least 2");
  }
  if (max_word_chars == 0) throw ConfigError("max_word_chars must be positive");
  auto check = [](const CharRateBounds& b, const std::string& where) {
    if (!(b.min >= 0 && b.min < b.max)) throw ConfigError("char_rate_bounds " + where + ": need 0 <= min < max");
  };
  check(char_rate_default, "default");
  for (const auto& [lang, b] : char_rate_per_lang) check(b, lang);
}

// ---------------------------------------------------------------------------
// Phrase index

PhraseIndex::PhraseIndex() : nodes_(1), root_dense_(kRootDense, -1) {}

PhraseIndex::PhraseIndex(const std::vector<std::string>& phrases) : PhraseIndex() {
  for (const auto& p : phrases) {
    auto folded = unicode::decode(unicode::fold_case(p));
    if (!folded.empty()) add(folded);
  }
  build();
}

PhraseIndex PhraseIndex::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open phrase list " + path.string());
  std::vector<std::string> phrases;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    phrases.push_back(line.substr(first, last - first + 1));
  }
  return PhraseIndex(phrases);
}

std::int32_t PhraseIndex::child(std::int32_t node, char32_t ch) const {
  if (node == 0 && ch < kRootDense) return root_dense_[ch];
  const auto& next = nodes_[node].next;
  auto it = std::lower_bound(next.begin(), next.end(), ch,
                             [](const auto& e, char32_t c) { return e.first < c; });
  return (it != next.end() && it->first == ch) ? it->second : -1;
}

void PhraseIndex::add(std::u32string_view phrase) {
  std::int32_t node = 0;
  for (char32_t ch : phrase) {
    auto& next = nodes_[node].next;
    auto it = std::lower_bound(next.begin(), next.end(), ch,
                               [](const auto& e, char32_t c) { return e.first < c; });
    if (it != next.end() && it->first == ch) {
      node = it->second;
      continue;
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    next.insert(it, {ch, id});
    if (node == 0 && ch < kRootDense) root_dense_[ch] = id;
    nodes_.emplace_back();
    node = id;
  }
  nodes_[node].terminal = true;
  ++phrase_count_;
}

void PhraseIndex::build() {
  std::deque<std::int32_t> queue;
  for (const auto& [ch, id] : nodes_[0].next) {
    nodes_[id].fail = 0;
    queue.push_back(id);
  }
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto& [ch, v] : nodes_[u].next) {
      std::int32_t f = nodes_[u].fail;
      while (f != 0 && child(f, ch) < 0) f = nodes_[f].fail;
      const auto target = child(f, ch);
      nodes_[v].fail = (target >= 0 && target != v) ? target : 0;
      nodes_[v].terminal = nodes_[v].terminal || nodes_[nodes_[v].fail].terminal;
      queue.push_back(v);
    }
  }
}

bool PhraseIndex::matches(std::string_view text) const {
  if (phrase_count_ == 0) return false;
  std::int32_t state = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t ch = unicode::fold_case(unicode::next_scalar(text, pos));
    std::int32_t next = child(state, ch);
    while (next < 0 && state != 0) {
      state = nodes_[state].fail;
      next = child(state, ch);
    }
    state = next < 0 ? 0 : next;
    if (nodes_[state].terminal) return true;
  }
  return false;
}

void PhraseLibrary::add(const std::string& lang, PhraseIndex index) { by_lang_[lang] = std::move(index); }

PhraseLibrary PhraseLibrary::from_files(const std::map<std::string, std::filesystem::path>& files) {
  PhraseLibrary lib;
  for (const auto& [lang, path] : files) lib.add(lang, PhraseIndex::from_file(path));
  return lib;
}

const PhraseIndex* PhraseLibrary::find(const std::string& lang) const {
  auto it = by_lang_.find(lang);
  return it == by_lang_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Individual filters

FilterDecision lid_filter(const UtteranceRecord& r, const AsrFilterConfig& cfg) {
  if (!r.lid_pred || !r.lid_prob) {
    throw Error("lid_missing", "record " + r.id + " has no language prediction; run transcribe first");
  }
  FilterDecision d;
  d.record_id = r.id;
  if (*r.lid_pred != r.lang_target) {
    d.add(flag::kLidMismatch, "predicted " + *r.lid_pred + ", expected " + r.lang_target);
  }
  if (*r.lid_prob < cfg.min_lid_prob) d.add(flag::kLidLowConf, "lid_prob " + format_double(*r.lid_prob));
  if (r.segment_lids) {
    std::set<std::string_view> distinct(r.segment_lids->begin(), r.segment_lids->end());
    if (distinct.size() > 1) d.add(flag::kLidMulti, std::to_string(distinct.size()) + " segment languages");
  }
  return d;
}

namespace {

// True iff some n-gram repeats at least `repeats` times back to back. R copies
// of an n-gram starting at i is the same as tok[p] == tok[p + n] holding for
// the (R - 1) * n consecutive positions p = i .. i + (R - 1) * n - 1.
bool has_consecutive_repeat(const std::vector<std::string_view>& tokens, std::size_t n, std::size_t repeats) {
  const std::size_t need = (repeats - 1) * n;
  if (tokens.size() < repeats * n) return false;
  std::size_t run = 0;
  for (std::size_t p = 0; p + n < tokens.size(); ++p) {
    run = tokens[p] == tokens[p + n] ? run + 1 : 0;
    if (run >= need) return true;
  }
  return false;
}

}  // namespace

bool detect_repeated_ngrams(std::string_view text, const AsrFilterConfig& cfg) {
  const auto tokens = unicode::split_words(text);
  if (has_consecutive_repeat(tokens, 1, static_cast<std::size_t>(cfg.unigram_min_consecutive_repeats))) {
    return true;
  }
  for (int n = cfg.ngram_min_n; n <= cfg.ngram_max_n; ++n) {
    if (has_consecutive_repeat(tokens, static_cast<std::size_t>(n),
                               static_cast<std::size_t>(cfg.ngram_min_consecutive_repeats))) {
      return true;
    }
  }
  return false;
}

bool detect_long_words(std::string_view text, const AsrFilterConfig& cfg) {
  for (auto word : unicode::split_words(text)) {
    if (word.size() > cfg.max_word_chars && unicode::scalar_count(word) > cfg.max_word_chars) return true;
  }
  return false;
}

bool detect_hallucinated_phrases(std::string_view text, const std::string& lang, const PhraseLibrary& phrases,
                                 bool list_optional) {
  const auto* index = phrases.find(lang);
  if (!index) {
    if (list_optional) return false;
    throw Error("no_phrase_list", "no hallucinated-phrase list for language '" + lang + "'");
  }
  return index->matches(text);
}

double char_rate(std::string_view text, double duration_s) {
  if (!(duration_s > 0)) throw Error("invalid_duration", "character rate needs a positive duration");
  return static_cast<double>(unicode::scalar_count(text)) / duration_s;
}

std::optional<CharsetViolation> charset_check(std::string_view text, const CharSet& allowed) {
  std::size_t pos = 0;
  std::size_t index = 0;
  while (pos < text.size()) {
    const char32_t ch = unicode::next_scalar(text, pos);
    if (!allowed.contains(ch)) return CharsetViolation{index, ch};
    ++index;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Composite

AsrQualityFilter::AsrQualityFilter(AsrFilterConfig cfg, PhraseLibrary phrases, CharSet charset)
    : cfg_(std::move(cfg)), phrases_(std::move(phrases)), charset_(std::move(charset)) {
  cfg_.validate();
}

AsrQualityFilter AsrQualityFilter::from_config(const AsrFilterConfig& cfg) {
  if (cfg.charset.empty()) throw ConfigError("asr_filter.charset is required");
  return AsrQualityFilter(cfg, PhraseLibrary::from_files(cfg.phrase_lists), CharSet::from_file(cfg.charset));
}

FilterDecision AsrQualityFilter::filter_text(const UtteranceRecord& r) const {
  FilterDecision d;
  d.record_id = r.id;
  if (detect_repeated_ngrams(r.text, cfg_)) d.add(flag::kHallucNgram, "repeated n-gram");
  if (detect_long_words(r.text, cfg_)) d.add(flag::kHallucLongword, "word over " + std::to_string(cfg_.max_word_chars) + " chars");
  if (detect_hallucinated_phrases(r.text, r.lang_target, phrases_, cfg_.phrase_lists_optional)) {
    d.add(flag::kHallucPhrase, "known hallucinated phrase");
  }
  const double rate = char_rate(r.text, r.duration_s);
  const auto bounds = cfg_.char_rate_bounds(r.lang_target);
  if (rate < bounds.min) d.add(flag::kCharRateLow, "char rate " + format_double(rate));
  if (rate > bounds.max) d.add(flag::kCharRateHigh, "char rate " + format_double(rate));
  if (auto bad = charset_check(r.text, charset_)) {
    std::string ch;
    unicode::append(ch, bad->ch);
    d.add(flag::kCharset, "invalid character '" + ch + "' at " + std::to_string(bad->index));
  }
  return d;
}

FilterDecision AsrQualityFilter::filter_record(const UtteranceRecord& r) const {
  FilterDecision d = lid_filter(r, cfg_);
  d.merge(filter_text(r));
  return d;
}

}  // namespace granary
