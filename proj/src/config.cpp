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

#include <cstdlib>
#include <fstream>
#include <set>

#include "granary/error.hpp"
#include "granary/languages.hpp"
#include "granary/pipeline.hpp"

namespace granary {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr Stage kStageOrder[] = {Stage::validate,   Stage::segment,     Stage::transcribe,
                                 Stage::lid_filter, Stage::asr_filter,  Stage::pnc_restore,
                                 Stage::translate,  Stage::ast_filter,  Stage::stats};

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void read_path(const json& obj, const char* key, fs::path& out, const fs::path& base, const std::string& where) {
  std::string s;
  read(obj, key, s, where);
  if (!s.empty()) out = resolve(base, s);
}

void read_service(const json& obj, ServiceConfig& svc, const std::string& where) {
  check_keys(obj, where, {"base_url", "timeout_s", "max_retries", "backoff_base_s", "max_in_flight", "decode_params"});
  read(obj, "base_url", svc.base_url, where);
  read(obj, "timeout_s", svc.timeout_s, where);
  read(obj, "max_retries", svc.max_retries, where);
  read(obj, "backoff_base_s", svc.backoff_base_s, where);
  read(obj, "max_in_flight", svc.max_in_flight, where);
  if (auto it = obj.find("decode_params"); it != obj.end()) {
    if (!it->is_object()) throw ConfigError(where + ".decode_params must be an object");
    svc.decode_params = *it;
  }
}

CharRateBounds read_bounds(const json& obj, const std::string& where) {
  check_keys(obj, where, {"min", "max"});
  CharRateBounds b;
  read(obj, "min", b.min, where);
  read(obj, "max", b.max, where);
  return b;
}

}  // namespace

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::validate: return "validate";
    case Stage::segment: return "segment";
    case Stage::transcribe: return "transcribe";
    case Stage::lid_filter: return "lid_filter";
    case Stage::asr_filter: return "asr_filter";
    case Stage::pnc_restore: return "pnc_restore";
    case Stage::translate: return "translate";
    case Stage::ast_filter: return "ast_filter";
    case Stage::stats: return "stats";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (auto s : kStageOrder) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

bool PipelineConfig::has(Stage s) const {
  for (auto x : stages) {
    if (x == s) return true;
  }
  return false;
}

void PipelineConfig::validate() const {
  if (stages.empty()) throw ConfigError("stages must not be empty");
  for (std::size_t i = 1; i < stages.size(); ++i) {
    if (static_cast<int>(stages[i]) <= static_cast<int>(stages[i - 1])) {
      throw ConfigError("stage '" + std::string(stage_name(stages[i])) + "' must come before '" +
                        std::string(stage_name(stages[i - 1])) + "' (or is repeated)");
    }
  }
  if (shard_count < 1) throw ConfigError("shard_count must be >= 1");
  if (worker_count < 1) throw ConfigError("worker_count must be >= 1");
  if (chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
  if (!(max_error_rate >= 0 && max_error_rate <= 1)) throw ConfigError("max_error_rate must lie in [0, 1]");
  if (has(Stage::segment)) segmentation.validate();
  if (has(Stage::lid_filter) || has(Stage::asr_filter)) asr_filter.validate();
  if (has(Stage::asr_filter) || has(Stage::pnc_restore)) {
    if (asr_filter.charset.empty()) throw ConfigError("asr_filter.charset is required");
  }
  if (has(Stage::pnc_restore)) {
    pnc.validate();
    if (pnc.exemplars_dir.empty()) throw ConfigError("pnc_restore.exemplars_dir is required");
  }
  if (has(Stage::ast_filter)) {
    ast_filter.validate();
    if (ast_filter.histograms_dir.empty()) throw ConfigError("ast_filter.histograms_dir is required");
    if (ast_filter.wordlists_dir.empty()) throw ConfigError("ast_filter.wordlists_dir is required");
  }
  auto need = [&](const ServiceConfig& svc, const char* name) {
    svc.validate(name);
    if (!services.in_process_mock && svc.base_url.empty()) {
      throw ConfigError(std::string("services.") + name + ".base_url is required (or set services.mock)");
    }
  };
  if (has(Stage::transcribe)) need(services.asr, "asr");
  if (has(Stage::pnc_restore)) need(services.llm, "llm");
  if (has(Stage::translate)) {
    need(services.translate, "translate");
    need(services.qe, "qe");
  }
}

void apply_data_dir(PipelineConfig& cfg, const fs::path& data_dir) {
  cfg.asr_filter.phrase_lists.clear();
  for (const auto& lang : kLanguages) {
    const auto p = data_dir / "phrases" / (std::string(lang.code) + ".txt");
    if (fs::exists(p)) cfg.asr_filter.phrase_lists[std::string(lang.code)] = p;
  }
  cfg.asr_filter.charset = data_dir / "charset.txt";
  cfg.pnc.exemplars_dir = data_dir / "exemplars";
  cfg.ast_filter.histograms_dir = data_dir / "histograms";
  cfg.ast_filter.wordlists_dir = data_dir / "wordlists";
  cfg.services.mock_wordlists_dir = (data_dir / "wordlists").string();
}

PipelineConfig parse_config(const json& doc, const fs::path& base) {
  check_keys(doc, "config",
             {"stages", "shard_count", "worker_count", "chunk_size", "seed", "max_error_rate", "data_dir",
              "segmentation", "asr_filter", "pnc_restore", "ast_filter", "services", "description"});
  PipelineConfig cfg;
  if (auto it = doc.find("data_dir"); it != doc.end()) {
    if (!it->is_string()) throw ConfigError("data_dir must be a string");
    apply_data_dir(cfg, resolve(base, it->get<std::string>()));
  }

  std::vector<std::string> names;
  read(doc, "stages", names, "config");
  for (const auto& n : names) {
    auto s = parse_stage(n);
    if (!s) throw ConfigError("unknown stage '" + n + "'");
    cfg.stages.push_back(*s);
  }
  read(doc, "shard_count", cfg.shard_count, "config");
  read(doc, "worker_count", cfg.worker_count, "config");
  read(doc, "chunk_size", cfg.chunk_size, "config");
  read(doc, "seed", cfg.seed, "config");
  read(doc, "max_error_rate", cfg.max_error_rate, "config");

  if (auto it = doc.find("segmentation"); it != doc.end()) {
    check_keys(*it, "segmentation", {"max_segment_s", "pad_s", "merge_gap_s"});
    read(*it, "max_segment_s", cfg.segmentation.max_segment_s, "segmentation");
    read(*it, "pad_s", cfg.segmentation.pad_s, "segmentation");
    read(*it, "merge_gap_s", cfg.segmentation.merge_gap_s, "segmentation");
  }

  if (auto it = doc.find("asr_filter"); it != doc.end()) {
    const std::string w = "asr_filter";
    check_keys(*it, w, {"min_lid_prob", "ngram_n_range", "ngram_min_consecutive_repeats",
                        "unigram_min_consecutive_repeats", "max_word_chars", "char_rate_bounds", "phrase_lists",
                        "phrase_lists_dir", "phrase_lists_optional", "charset"});
    auto& a = cfg.asr_filter;
    read(*it, "min_lid_prob", a.min_lid_prob, w);
    if (auto r = it->find("ngram_n_range"); r != it->end()) {
      if (!r->is_array() || r->size() != 2) throw ConfigError("asr_filter.ngram_n_range must be [min, max]");
      a.ngram_min_n = (*r)[0].get<int>();
      a.ngram_max_n = (*r)[1].get<int>();
    }
    read(*it, "ngram_min_consecutive_repeats", a.ngram_min_consecutive_repeats, w);
    read(*it, "unigram_min_consecutive_repeats", a.unigram_min_consecutive_repeats, w);
    read(*it, "max_word_chars", a.max_word_chars, w);
    if (auto b = it->find("char_rate_bounds"); b != it->end()) {
      if (!b->is_object()) throw ConfigError("asr_filter.char_rate_bounds must be an object");
      for (const auto& [k, v] : b->items()) {
        if (k == "default") {
          a.char_rate_default = read_bounds(v, "asr_filter.char_rate_bounds.default");
        } else {
          a.char_rate_per_lang[k] = read_bounds(v, "asr_filter.char_rate_bounds." + k);
        }
      }
    }
    if (auto d = it->find("phrase_lists_dir"); d != it->end()) {
      const auto dir = resolve(base, d->get<std::string>());
      a.phrase_lists.clear();
      for (const auto& lang : kLanguages) {
        const auto p = dir / (std::string(lang.code) + ".txt");
        if (fs::exists(p)) a.phrase_lists[std::string(lang.code)] = p;
      }
    }
    if (auto p = it->find("phrase_lists"); p != it->end()) {
      if (!p->is_object()) throw ConfigError("asr_filter.phrase_lists must map language to file");
      for (const auto& [lang, file] : p->items()) a.phrase_lists[lang] = resolve(base, file.get<std::string>());
    }
    read(*it, "phrase_lists_optional", a.phrase_lists_optional, w);
    read_path(*it, "charset", a.charset, base, w);
  }

  if (auto it = doc.find("pnc_restore"); it != doc.end()) {
    const std::string w = "pnc_restore";
    check_keys(*it, w, {"pnc_cer_threshold", "pnc_cer_normalize", "exemplars_dir"});
    read(*it, "pnc_cer_threshold", cfg.pnc.cer_threshold, w);
    read(*it, "pnc_cer_normalize", cfg.pnc.normalize, w);
    read_path(*it, "exemplars_dir", cfg.pnc.exemplars_dir, base, w);
  }

  if (auto it = doc.find("ast_filter"); it != doc.end()) {
    const std::string w = "ast_filter";
    check_keys(*it, w, {"max_len_ratio", "min_words", "max_words", "histogram_threshold", "lid_min_prob",
                        "qe_threshold", "histograms_dir", "wordlists_dir"});
    auto& a = cfg.ast_filter;
    read(*it, "max_len_ratio", a.max_len_ratio, w);
    read(*it, "min_words", a.min_words, w);
    read(*it, "max_words", a.max_words, w);
    read(*it, "histogram_threshold", a.histogram_threshold, w);
    read(*it, "lid_min_prob", a.lid_min_prob, w);
    read(*it, "qe_threshold", a.qe_threshold, w);
    read_path(*it, "histograms_dir", a.histograms_dir, base, w);
    read_path(*it, "wordlists_dir", a.wordlists_dir, base, w);
  }

  if (auto it = doc.find("services"); it != doc.end()) {
    check_keys(*it, "services", {"mock", "mock_wordlists_dir", "mock_table", "asr", "translate", "qe", "llm"});
    read(*it, "mock", cfg.services.in_process_mock, "services");
    fs::path p;
    read_path(*it, "mock_wordlists_dir", p, base, "services");
    if (!p.empty()) cfg.services.mock_wordlists_dir = p.string();
    p.clear();
    read_path(*it, "mock_table", p, base, "services");
    if (!p.empty()) cfg.services.mock_table = p.string();
    if (auto s = it->find("asr"); s != it->end()) read_service(*s, cfg.services.asr, "services.asr");
    if (auto s = it->find("translate"); s != it->end()) read_service(*s, cfg.services.translate, "services.translate");
    if (auto s = it->find("qe"); s != it->end()) read_service(*s, cfg.services.qe, "services.qe");
    if (auto s = it->find("llm"); s != it->end()) read_service(*s, cfg.services.llm, "services.llm");
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  auto cfg = parse_config(doc, path.parent_path());
  if (const char* env = std::getenv("GRANARY_SERVICES"); env && *env) apply_service_overrides(cfg.services, env);
  cfg.validate();
  return cfg;
}

}  // namespace granary
