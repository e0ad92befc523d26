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

#include "granary/pnc.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>

#include "granary/asr_filters.hpp"
#include "granary/error.hpp"
#include "granary/languages.hpp"
#include "granary/unicode.hpp"

namespace granary {

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // b is the shorter side; one row of |b| + 1 cells plus a carried diagonal.
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

double cer(std::string_view hypothesis, std::string_view reference) {
  const auto hyp = unicode::decode(hypothesis);
  const auto ref = unicode::decode(reference);
  if (ref.empty()) return hyp.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(edit_distance(hyp, ref)) / static_cast<double>(ref.size());
}

std::string normalize_for_cer(std::string_view text, const CharSet& punctuation) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t ch = unicode::next_scalar(text, pos);
    if (punctuation.contains(ch)) continue;
    if (unicode::is_space(ch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    unicode::append(out, unicode::fold_case(ch));
  }
  return out;
}

void PncConfig::validate() const {
  if (!(cer_threshold >= 0)) throw ConfigError("pnc_cer_threshold must be >= 0");
}

ExemplarBank ExemplarBank::from_dir(const std::filesystem::path& dir) {
  ExemplarBank bank;
  for (const auto& lang : kLanguages) {
    const auto path = dir / (std::string(lang.code) + ".tsv");
    std::ifstream in(path);
    if (!in) continue;
    std::vector<ExemplarPair> pairs;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw Error("bad_exemplar", path.string() + ": line without a tab");
      pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    bank.add(std::string(lang.code), std::move(pairs));
  }
  return bank;
}

void ExemplarBank::add(const std::string& lang, std::vector<ExemplarPair> pairs) {
  by_lang_[lang] = std::move(pairs);
}

const std::vector<ExemplarPair>& ExemplarBank::get(const std::string& lang) const {
  auto it = by_lang_.find(lang);
  if (it == by_lang_.end()) throw Error("missing_exemplars", "no restoration exemplars for '" + lang + "'");
  return it->second;
}

std::string build_restoration_prompt(const std::string& lang, std::string_view text,
                                     const std::vector<ExemplarPair>& exemplars) {
  const auto name = language_name(lang);
  if (name.empty()) throw Error("unsupported_language", "no restoration prompt for '" + lang + "'");
  if (exemplars.size() < 2) throw Error("missing_exemplars", "need at least two exemplars for '" + lang + "'");

  std::string p;
  p += "### Instruction\n";
  p += "The following text is an automatic transcription in ";
  p += name;
  p += ". Restore its punctuation and capitalization. Do not add, remove, translate or reorder words. "
       "Answer with the corrected text only, enclosed in <<< and >>>.\n\n";
  p += "### Examples\n";
  for (const auto& [before, after] : exemplars) {
    p += "Input: ";
    p += kInputOpen;
    p += before;
    p += kInputClose;
    p += "\nOutput: ";
    p += kInputOpen;
    p += after;
    p += kInputClose;
    p += "\n";
  }
  p += "\n### Input\n";
  p += kInputOpen;
  p += text;
  p += kInputClose;
  p += "\n### Output\n";
  return p;
}

std::string extract_prompt_input(std::string_view prompt) {
  const auto section = prompt.rfind("### Input\n");
  if (section == std::string_view::npos) throw Error("bad_prompt", "prompt has no input section");
  const auto open = prompt.find(kInputOpen, section);
  const auto close = prompt.rfind(kInputClose);
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw Error("bad_prompt", "prompt input is not delimited");
  }
  const auto start = open + kInputOpen.size();
  return std::string(prompt.substr(start, close - start));
}

std::string extract_restored_text(std::string_view response) {
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return std::string_view{};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
  };
  auto s = trim(response);
  const auto open = s.find(kInputOpen);
  const auto close = s.rfind(kInputClose);
  if (open != std::string_view::npos && close != std::string_view::npos && close >= open + kInputOpen.size()) {
    s = trim(s.substr(open + kInputOpen.size(), close - open - kInputOpen.size()));
  }
  return std::string(s);
}

RestorationOutcome accept_restoration(std::string_view original, std::string_view restored,
                                      const PncConfig& cfg, const CharSet& charset,
                                      const CharSet& punctuation) {
  RestorationOutcome out;
  out.cer_value = cfg.normalize
                      ? cer(normalize_for_cer(restored, punctuation), normalize_for_cer(original, punctuation))
                      : cer(restored, original);
  out.charset_ok = !charset_check(restored, charset).has_value();
  if (out.cer_value <= cfg.cer_threshold && out.charset_ok) {
    out.source = RestorationOutcome::Source::restored;
    out.chosen_text = std::string(restored);
  } else {
    out.source = RestorationOutcome::Source::original;
    out.chosen_text = std::string(original);
  }
  return out;
}

RestorationOutcome accept_restoration(std::string_view original, std::string_view restored,
                                      const PncConfig& cfg, const CharSet& charset) {
  return accept_restoration(original, restored, cfg, charset, charset.punctuation());
}

}  // namespace granary
