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
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "granary/decision.hpp"
#include "granary/segmentation.hpp"

namespace granary {

// One audio segment and everything the pipeline learns about it.
struct UtteranceRecord {
  std::string id;
  std::string audio_ref;
  double offset_s = 0.0;
  double duration_s = 0.0;
  std::string text;
  std::string lang_target;
  std::optional<std::string> lid_pred;
  std::optional<double> lid_prob;
  std::optional<std::vector<std::string>> segment_lids;
  std::optional<std::string> text_restored;
  std::set<std::string> flags;
  std::string corpus;

  // Speech-translation pair fields, populated by the translate stage.
  std::optional<std::string> src_text;
  std::optional<std::string> tgt_text;
  std::optional<std::string> src_lang;
  std::optional<std::string> tgt_lang;
  std::optional<double> qe_score;

  // Long-form speech regions awaiting segmentation.
  std::optional<std::vector<SegmentSpan>> spans;

  // Fields this version does not know about, kept in input order.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  double hours() const noexcept { return duration_s / 3600.0; }
  bool operator==(const UtteranceRecord&) const = default;
};

// Stable id for records that arrive without one.
std::string synthesize_id(std::string_view audio_ref, double offset_s, double duration_s);

// 64-bit FNV-1a; shared by id synthesis, sharding and the mocks.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// Parses one manifest line. Throws Error("malformed_line") with the cause.
UtteranceRecord parse_record(std::string_view line);

// Serializes one record as a single JSON line without the trailing newline.
std::string serialize_record(const UtteranceRecord& r);
void serialize_record(const UtteranceRecord& r, std::string& out);

struct ManifestError {
  std::size_t line_no = 0;
  std::string cause;
  std::string raw;
};

// Streams records from a line-delimited manifest. Malformed lines are handed
// to the error sink (or kept in errors() when no sink is given) and skipped.
class ManifestReader {
 public:
  using ErrorSink = std::function<void(const ManifestError&)>;

  explicit ManifestReader(std::istream& in, ErrorSink on_error = {});

  std::optional<UtteranceRecord> next();

  std::size_t line_no() const noexcept { return line_no_; }
  std::size_t error_count() const noexcept { return error_count_; }
  const std::vector<ManifestError>& errors() const noexcept { return errors_; }

 private:
  std::istream& in_;
  ErrorSink on_error_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::size_t error_count_ = 0;
  std::vector<ManifestError> errors_;
};

// Reads a whole manifest into memory. Convenience for tests and small files.
std::vector<UtteranceRecord> read_manifest(std::istream& in, std::vector<ManifestError>* errors = nullptr);

class ManifestWriter {
 public:
  explicit ManifestWriter(std::ostream& out) : out_(out) {}

  // Throws IoError carrying the count written so far when the sink fails.
  void write(const UtteranceRecord& r);
  void write_raw_line(std::string_view line);
  std::size_t count() const noexcept { return count_; }

 private:
  std::ostream& out_;
  std::string buffer_;
  std::size_t count_ = 0;
};

std::size_t write_manifest(const std::vector<UtteranceRecord>& records, std::ostream& out);

// Pass iff every record invariant holds; otherwise drop with invalid_record.
FilterDecision validate_record(const UtteranceRecord& r);

struct CorpusTally {
  double unfiltered_hours = 0.0;
  double filtered_hours = 0.0;
  std::uint64_t unfiltered_count = 0;
  std::uint64_t filtered_count = 0;

  // filtered / unfiltered hours; 0 when nothing was seen.
  double retention_rate() const noexcept {
    return unfiltered_hours > 0 ? filtered_hours / unfiltered_hours : 0.0;
  }
  void merge(const CorpusTally& other) noexcept;
};

// Hours and record counts per (corpus, language), before and after filtering.
class CorpusStats {
 public:
  using Key = std::pair<std::string, std::string>;

  void add_unfiltered(const std::string& corpus, const std::string& lang, double hours,
                      std::uint64_t count = 1);
  void add_filtered(const std::string& corpus, const std::string& lang, double hours,
                    std::uint64_t count = 1);
  void merge(const CorpusStats& other);

  const std::map<Key, CorpusTally>& per_key() const noexcept { return per_key_; }
  std::map<std::string, CorpusTally> per_corpus() const;
  std::map<std::string, CorpusTally> per_language() const;
  CorpusTally total() const;
  std::set<std::string> languages() const;

  // Checks 0 <= filtered <= unfiltered for every key.
  bool consistent() const;

 private:
  std::map<Key, CorpusTally> per_key_;
};

}  // namespace granary
