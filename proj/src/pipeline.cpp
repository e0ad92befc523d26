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

#include "granary/pipeline.hpp"

#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "granary/error.hpp"

namespace granary {

namespace {

// Canonical order used to pick the flag a dropped record is charged to.
constexpr std::string_view kFlagOrder[] = {
    flag::kInvalidRecord, flag::kServiceError,  flag::kLidMismatch,  flag::kLidLowConf,   flag::kLidMulti,
    flag::kHallucNgram,   flag::kHallucLongword, flag::kHallucPhrase, flag::kCharRateLow, flag::kCharRateHigh,
    flag::kCharset,       flag::kAstLenRatio,   flag::kAstHistogram, flag::kAstLid,       flag::kAstQe,
};

void drop(UtteranceRecord& r, const FilterDecision& d) {
  for (const auto& f : d.flags) r.flags.insert(f);
  if (!d.causes.empty()) {
    auto& reasons = r.extra["drop_reasons"];
    if (!reasons.is_array()) reasons = nlohmann::ordered_json::array();
    for (const auto& c : d.causes) reasons.push_back(c);
  }
}

FilterDecision error_decision(const UtteranceRecord& r, std::string_view f, const Error& e) {
  FilterDecision d;
  d.record_id = r.id;
  d.add(f, e.code() + ": " + e.what());
  return d;
}

}  // namespace

std::string primary_flag(const std::set<std::string>& flags) {
  for (auto f : kFlagOrder) {
    if (flags.count(std::string(f))) return std::string(f);
  }
  for (const auto& f : flags) {
    if (!is_informational(f)) return f;
  }
  return "unknown";
}

std::size_t shard_of(std::string_view id, std::size_t shard_count) noexcept {
  return static_cast<std::size_t>(fnv1a(id) % shard_count);
}

// ---------------------------------------------------------------------------
// Services and resources

Services make_services(std::shared_ptr<const MockBackend> backend, const ServicesConfig& cfg) {
  auto transport = std::make_shared<HandlerTransport>(
      [backend](const std::string& path, const std::string& body) { return backend->handle(path, body); });
  Services s;
  s.asr = std::make_shared<AsrClient>(ServiceClient(transport, cfg.asr));
  s.translation = std::make_shared<TranslationClient>(ServiceClient(transport, cfg.translate));
  s.qe = std::make_shared<QeClient>(ServiceClient(transport, cfg.qe));
  s.llm = std::make_shared<LlmClient>(ServiceClient(transport, cfg.llm));
  return s;
}

Services make_services(const PipelineConfig& cfg, Sleeper sleeper) {
  const auto& sc = cfg.services;
  if (sc.in_process_mock) {
    MockTable table;
    if (!sc.mock_table.empty()) {
      std::ifstream in(sc.mock_table);
      if (!in) throw ConfigError("cannot open mock table " + sc.mock_table);
      table = MockTable::from_json(nlohmann::json::parse(in));
    }
    auto vocab = sc.mock_wordlists_dir.empty() ? Vocabulary{} : Vocabulary::from_dir(sc.mock_wordlists_dir);
    return make_services(std::make_shared<MockBackend>(cfg.seed, std::move(vocab), std::move(table)), sc);
  }
  auto client = [&](const ServiceConfig& svc) {
    return ServiceClient(std::make_shared<HttpTransport>(svc.base_url, svc.timeout_s, svc.max_in_flight), svc,
                         sleeper);
  };
  Services s;
  if (!sc.asr.base_url.empty()) s.asr = std::make_shared<AsrClient>(client(sc.asr));
  if (!sc.translate.base_url.empty()) s.translation = std::make_shared<TranslationClient>(client(sc.translate));
  if (!sc.qe.base_url.empty()) s.qe = std::make_shared<QeClient>(client(sc.qe));
  if (!sc.llm.base_url.empty()) s.llm = std::make_shared<LlmClient>(client(sc.llm));
  return s;
}

PipelineResources PipelineResources::load(const PipelineConfig& cfg) {
  PipelineResources r;
  if (cfg.has(Stage::asr_filter) || cfg.has(Stage::pnc_restore)) {
    r.charset = CharSet::from_file(cfg.asr_filter.charset);
    r.punctuation = r.charset.punctuation();
  }
  if (cfg.has(Stage::asr_filter)) {
    r.asr.emplace(cfg.asr_filter, PhraseLibrary::from_files(cfg.asr_filter.phrase_lists), r.charset);
  }
  if (cfg.has(Stage::pnc_restore)) r.exemplars = ExemplarBank::from_dir(cfg.pnc.exemplars_dir);
  if (cfg.has(Stage::ast_filter)) {
    r.histograms = CharHistograms::from_dir(cfg.ast_filter.histograms_dir);
    r.text_lid = std::make_shared<WordlistClassifier>(WordlistClassifier::from_dir(cfg.ast_filter.wordlists_dir));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Per-record stage chain

Pipeline::Pipeline(PipelineConfig cfg, Services services)
    : Pipeline(cfg, std::move(services), PipelineResources::load(cfg)) {}

Pipeline::Pipeline(PipelineConfig cfg, Services services, PipelineResources resources)
    : cfg_(std::move(cfg)), services_(std::move(services)), res_(std::move(resources)) {
  cfg_.validate();
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("pipeline needs a ") + what + " client");
  };
  if (cfg_.has(Stage::transcribe)) require(services_.asr != nullptr, "transcription");
  if (cfg_.has(Stage::pnc_restore)) require(services_.llm != nullptr, "restoration");
  if (cfg_.has(Stage::translate)) require(services_.translation && services_.qe, "translation and QE");
}

void Pipeline::apply_stage(Stage stage, std::vector<UtteranceRecord>& current, RecordOutcome& outcome,
                           bool duplicate_id) const {
  std::vector<UtteranceRecord> next;
  next.reserve(current.size());
  auto keep = [&](UtteranceRecord&& r) { next.push_back(std::move(r)); };
  auto reject = [&](UtteranceRecord&& r, const FilterDecision& d) {
    drop(r, d);
    outcome.dropped.push_back(std::move(r));
  };

  for (auto& r : current) {
    switch (stage) {
      case Stage::validate: {
        auto d = validate_record(r);
        if (duplicate_id) d.add(flag::kInvalidRecord, "duplicate id " + r.id);
        d.passed() ? keep(std::move(r)) : reject(std::move(r), d);
        break;
      }
      case Stage::segment: {
        const auto& seg = cfg_.segmentation;
        if (!r.spans) {
          if (r.duration_s > seg.max_segment_s) r.flags.emplace(flag::kOversizeSpan);
          keep(std::move(r));
          break;
        }
        std::vector<Segment> planned;
        try {
          planned = plan_segments(*r.spans, seg, r.duration_s);
        } catch (const Error& e) {
          reject(std::move(r), error_decision(r, flag::kInvalidRecord, e));
          break;
        }
        for (std::size_t k = 0; k < planned.size(); ++k) {
          UtteranceRecord child = r;
          child.spans.reset();
          char suffix[32];
          std::snprintf(suffix, sizeof(suffix), "-s%04zu", k);
          child.id = r.id + suffix;
          child.offset_s = r.offset_s + planned[k].start_s;
          child.duration_s = planned[k].length();
          child.text = planned[k].text;
          if (planned[k].oversize) child.flags.emplace(flag::kOversizeSpan);
          keep(std::move(child));
        }
        break;
      }
      case Stage::transcribe: {
        try {
          const auto guess = services_.asr->detect_language(r.audio_ref);
          const auto result =
              services_.asr->transcribe(r.audio_ref, guess.lang, {r.offset_s, r.offset_s + r.duration_s});
          r.lid_pred = guess.lang;
          r.lid_prob = guess.prob;
          r.text = result.joined_text();
          r.segment_lids = result.segment_lids();
          keep(std::move(r));
        } catch (const Error& e) {
          outcome.service_error = true;
          reject(std::move(r), error_decision(r, flag::kServiceError, e));
        }
        break;
      }
      case Stage::lid_filter: {
        FilterDecision d;
        try {
          d = lid_filter(r, cfg_.asr_filter);
        } catch (const Error& e) {
          d = error_decision(r, e.code(), e);
        }
        d.passed() ? keep(std::move(r)) : reject(std::move(r), d);
        break;
      }
      case Stage::asr_filter: {
        FilterDecision d;
        try {
          d = res_.asr->filter_text(r);
        } catch (const Error& e) {
          d = error_decision(r, e.code(), e);
        }
        d.passed() ? keep(std::move(r)) : reject(std::move(r), d);
        break;
      }
      case Stage::pnc_restore: {
        if (r.text.empty()) {
          keep(std::move(r));
          break;
        }
        try {
          const auto prompt = build_restoration_prompt(r.lang_target, r.text, res_.exemplars.get(r.lang_target));
          const auto restored = extract_restored_text(services_.llm->restore(prompt, r.lang_target));
          const auto outcome_pnc = accept_restoration(r.text, restored, cfg_.pnc, res_.charset, res_.punctuation);
          if (outcome_pnc.reverted()) {
            r.flags.emplace(flag::kPncReverted);
          } else {
            r.text_restored = outcome_pnc.chosen_text;
          }
        } catch (const Error&) {
          // Restoration is best effort; the original transcription stays.
          r.flags.emplace(flag::kPncReverted);
        }
        keep(std::move(r));
        break;
      }
      case Stage::translate: {
        const std::string& src = r.text_restored ? *r.text_restored : r.text;
        if (r.lang_target == "en" || src.empty()) {
          keep(std::move(r));
          break;
        }
        try {
          auto tgt = services_.translation->translate(src, r.lang_target, "en");
          const auto qe = services_.qe->qe_score(src, tgt, r.lang_target, "en");
          r.src_text = src;
          r.tgt_text = std::move(tgt);
          r.src_lang = r.lang_target;
          r.tgt_lang = "en";
          r.qe_score = qe.score;
          if (qe.clamped) r.flags.emplace(flag::kQeClamped);
          keep(std::move(r));
        } catch (const Error& e) {
          outcome.service_error = true;
          reject(std::move(r), error_decision(r, flag::kServiceError, e));
        }
        break;
      }
      case Stage::ast_filter: {
        if (!has_pair_fields(r)) {
          keep(std::move(r));
          break;
        }
        FilterDecision d;
        try {
          d = filter_pair(pair_from_record(r), cfg_.ast_filter, res_.histograms, *res_.text_lid);
        } catch (const Error& e) {
          d = error_decision(r, e.code(), e);
        }
        d.passed() ? keep(std::move(r)) : reject(std::move(r), d);
        break;
      }
      case Stage::stats:
        keep(std::move(r));
        break;
    }
  }
  current = std::move(next);
}

RecordOutcome Pipeline::process(UtteranceRecord r, bool duplicate_id) const {
  RecordOutcome outcome;
  std::vector<UtteranceRecord> current;
  current.push_back(std::move(r));
  for (auto stage : cfg_.stages) {
    if (current.empty()) break;
    apply_stage(stage, current, outcome, duplicate_id);
  }
  outcome.kept = std::move(current);
  return outcome;
}

// ---------------------------------------------------------------------------
// Chunk kernels

void Pipeline::process_chunk_serial(std::span<UtteranceRecord> in, std::span<const char> duplicate,
                                    std::span<RecordOutcome> out) const {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = process(std::move(in[i]), duplicate[i] != 0);
}

void Pipeline::process_chunk_parallel(std::span<UtteranceRecord> in, std::span<const char> duplicate,
                                      std::span<RecordOutcome> out) const {
  constexpr std::size_t kBlock = 32;
  const std::size_t shards = cfg_.shard_count;
  std::vector<std::vector<std::size_t>> members(shards);
  for (std::size_t i = 0; i < in.size(); ++i) members[shard_of(in[i].id, shards)].push_back(i);

  // Work items are blocks within a shard, so shards also split across workers.
  struct Block {
    std::size_t shard, begin, end;
  };
  std::vector<Block> blocks;
  for (std::size_t s = 0; s < shards; ++s) {
    for (std::size_t b = 0; b < members[s].size(); b += kBlock) {
      blocks.push_back({s, b, std::min(members[s].size(), b + kBlock)});
    }
  }

  std::exception_ptr failure;
  const auto n_blocks = static_cast<std::ptrdiff_t>(blocks.size());
  const int workers = static_cast<int>(cfg_.worker_count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t b = 0; b < n_blocks; ++b) {
    try {
      const auto& blk = blocks[static_cast<std::size_t>(b)];
      for (std::size_t k = blk.begin; k < blk.end; ++k) {
        const std::size_t i = members[blk.shard][k];
        out[i] = process(std::move(in[i]), duplicate[i] != 0);
      }
    } catch (...) {
#pragma omp critical(granary_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

RunSummary Pipeline::run(std::istream& in, std::ostream& out, std::ostream& sidecar, std::ostream* errors) const {
  RunSummary summary;
  ManifestWriter out_writer(out);
  ManifestWriter side_writer(sidecar);
  ManifestReader reader(in, [&](const ManifestError& e) {
    ++summary.malformed_lines;
    if (!errors) return;
    nlohmann::ordered_json j{{"line", e.line_no}, {"error", e.cause}, {"raw", e.raw}};
    *errors << j.dump() << '\n';
  });

  // Hashes of ids seen so far. 64-bit hashes keep this small at manifest
  // scale; a collision would only flag a spurious duplicate.
  std::unordered_set<std::uint64_t> seen;
  const bool check_duplicates = cfg_.has(Stage::validate);

  std::vector<UtteranceRecord> chunk;
  std::vector<char> duplicate;
  std::vector<RecordOutcome> outcomes;
  chunk.reserve(cfg_.chunk_size);

  auto flush = [&] {
    outcomes.assign(chunk.size(), RecordOutcome{});
    if (cfg_.worker_count == 1 && cfg_.shard_count == 1) {
      process_chunk_serial(chunk, duplicate, outcomes);
    } else {
      process_chunk_parallel(chunk, duplicate, outcomes);
    }
    for (auto& o : outcomes) {
      if (o.service_error) ++summary.service_errors;
      for (const auto& r : o.kept) {
        out_writer.write(r);
        summary.output_hours += r.hours();
        summary.stats.add_filtered(r.corpus, r.lang_target, r.hours());
      }
      for (const auto& r : o.dropped) {
        side_writer.write(r);
        summary.sidecar_hours += r.hours();
        for (const auto& f : r.flags) {
          if (!is_informational(f)) ++summary.drop_flags[f];
        }
        ++summary.drop_primary[primary_flag(r.flags)];
      }
      summary.output_records += o.kept.size();
      summary.sidecar_records += o.dropped.size();
    }
    chunk.clear();
    duplicate.clear();
  };

  while (auto r = reader.next()) {
    ++summary.input_records;
    summary.input_hours += r->hours();
    summary.stats.add_unfiltered(r->corpus, r->lang_target, r->hours());
    duplicate.push_back(check_duplicates && !seen.insert(fnv1a(r->id)).second ? 1 : 0);
    chunk.push_back(std::move(*r));
    if (chunk.size() >= cfg_.chunk_size) flush();
  }
  if (!chunk.empty()) flush();
  out.flush();
  sidecar.flush();
  if (!out || !sidecar) throw IoError("failed to flush output manifests");
  return summary;
}

}  // namespace granary
