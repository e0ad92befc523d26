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
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "granary/asr_filters.hpp"
#include "granary/ast_filters.hpp"
#include "granary/clients.hpp"
#include "granary/manifest.hpp"
#include "granary/mock.hpp"
#include "granary/pnc.hpp"
#include "granary/segmentation.hpp"

namespace granary {

// Stages in their only valid order.
enum class Stage { validate, segment, transcribe, lid_filter, asr_filter, pnc_restore, translate, ast_filter, stats };

std::string_view stage_name(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

struct PipelineConfig {
  std::vector<Stage> stages;
  std::size_t shard_count = 1;
  std::size_t worker_count = 1;
  std::size_t chunk_size = 4096;
  std::uint64_t seed = 0;
  // Runs whose service-error rate exceeds this fail with exit code 3.
  double max_error_rate = 0.05;
  SegmentationConfig segmentation;
  AsrFilterConfig asr_filter;
  PncConfig pnc;
  AstFilterConfig ast_filter;
  ServicesConfig services;

  bool has(Stage s) const;
  // Throws ConfigError on out-of-order or duplicate stages and bad values.
  void validate() const;
};

// Parses the JSON config document; relative paths resolve against base_dir.
PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// Default data layout shipped with the repository.
void apply_data_dir(PipelineConfig& cfg, const std::filesystem::path& data_dir);

struct Services {
  std::shared_ptr<const AsrClient> asr;
  std::shared_ptr<const TranslationClient> translation;
  std::shared_ptr<const QeClient> qe;
  std::shared_ptr<const LlmClient> llm;
};

// HTTP clients, or in-process mocks seeded with cfg.seed when
// cfg.services.in_process_mock is set.
Services make_services(const PipelineConfig& cfg, Sleeper sleeper = {});
Services make_services(std::shared_ptr<const MockBackend> backend, const ServicesConfig& cfg);

struct PipelineResources {
  std::optional<AsrQualityFilter> asr;
  CharSet charset;
  CharSet punctuation;
  ExemplarBank exemplars;
  CharHistograms histograms;
  std::shared_ptr<const TextLanguageClassifier> text_lid;

  // Loads only what the configured stages need.
  static PipelineResources load(const PipelineConfig& cfg);
};

struct RecordOutcome {
  std::vector<UtteranceRecord> kept;
  std::vector<UtteranceRecord> dropped;
  bool service_error = false;
};

struct RunSummary {
  std::uint64_t input_records = 0;
  std::uint64_t output_records = 0;
  std::uint64_t sidecar_records = 0;
  std::uint64_t malformed_lines = 0;
  std::uint64_t service_errors = 0;
  double input_hours = 0.0;
  double output_hours = 0.0;
  double sidecar_hours = 0.0;
  CorpusStats stats;
  std::map<std::string, std::uint64_t> drop_flags;    // every flag on a dropped record
  std::map<std::string, std::uint64_t> drop_primary;  // one flag per dropped record

  double service_error_rate() const noexcept {
    return input_records ? static_cast<double>(service_errors) / static_cast<double>(input_records) : 0.0;
  }
};

// First drop-class flag in canonical order; what a dropped record is charged to.
std::string primary_flag(const std::set<std::string>& flags);

std::size_t shard_of(std::string_view id, std::size_t shard_count) noexcept;

class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, Services services);
  Pipeline(PipelineConfig cfg, Services services, PipelineResources resources);

  // Runs every configured stage on one record. Never throws for record-level
  // problems: those end up as flags on a dropped record.
  RecordOutcome process(UtteranceRecord r, bool duplicate_id = false) const;

  // Reference kernel: records in input order on the calling thread.
  void process_chunk_serial(std::span<UtteranceRecord> in, std::span<const char> duplicate,
                            std::span<RecordOutcome> out) const;
  // Shards the chunk by id hash and fans the shards out over worker_count
  // OpenMP threads. Output slots are indexed by input position, so the
  // result equals the serial kernel's.
  void process_chunk_parallel(std::span<UtteranceRecord> in, std::span<const char> duplicate,
                              std::span<RecordOutcome> out) const;

  // Streams a manifest through the pipeline in chunks of chunk_size records.
  // Malformed input lines go to `errors` when given.
  RunSummary run(std::istream& in, std::ostream& out, std::ostream& sidecar, std::ostream* errors = nullptr) const;

  const PipelineConfig& config() const noexcept { return cfg_; }

 private:
  void apply_stage(Stage stage, std::vector<UtteranceRecord>& current, RecordOutcome& outcome,
                   bool duplicate_id) const;

  PipelineConfig cfg_;
  Services services_;
  PipelineResources res_;
};

// Hours and counts per (corpus, language) from an unfiltered and a filtered manifest.
CorpusStats compute_stats(std::istream& input, std::istream& output);

// "text" (aligned table) or "json" (one object). Throws Error("unknown_format").
std::string render_report(const CorpusStats& stats, const std::map<std::string, std::uint64_t>& drop_flags,
                          const std::map<std::string, std::uint64_t>& drop_primary, std::string_view format);
std::string render_report(const RunSummary& summary, std::string_view format);

}  // namespace granary
