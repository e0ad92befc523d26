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

#include "granary/manifest.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "granary/error.hpp"
#include "granary/languages.hpp"

namespace granary {

using ojson = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) noexcept {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string synthesize_id(std::string_view audio_ref, double offset_s, double duration_s) {
  std::string key(audio_ref);
  key.push_back('\0');
  key += format_double(offset_s);
  key.push_back('\0');
  key += format_double(duration_s);
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + 16, fnv1a(key), 16);
  std::string hex(buf, end);
  return std::string(16 - hex.size(), '0') + hex;
}

namespace {

[[noreturn]] void malformed(const std::string& cause) { throw Error("malformed_line", cause); }

std::string take_string(const ojson& v, const char* key) {
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double take_number(const ojson& v, const char* key) {
  if (!v.is_number()) malformed(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<std::string> take_string_list(const ojson& v, const char* key) {
  if (!v.is_array()) malformed(std::string("field '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& item : v) out.push_back(take_string(item, key));
  return out;
}

std::vector<SegmentSpan> take_spans(const ojson& v) {
  if (!v.is_array()) malformed("field 'spans' must be an array");
  std::vector<SegmentSpan> out;
  for (const auto& item : v) {
    if (!item.is_object() || !item.contains("start") || !item.contains("end")) {
      malformed("each span needs 'start' and 'end'");
    }
    SegmentSpan span;
    span.start_s = take_number(item["start"], "spans.start");
    span.end_s = take_number(item["end"], "spans.end");
    if (auto it = item.find("text"); it != item.end()) span.text = take_string(*it, "spans.text");
    out.push_back(std::move(span));
  }
  return out;
}

void append_escaped(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static constexpr char kHex[] = "0123456789abcdef";
          out += "\\u00";
          out.push_back(kHex[(c >> 4) & 0xF]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

class ObjectWriter {
 public:
  explicit ObjectWriter(std::string& out) : out_(out) { out_.push_back('{'); }
  ~ObjectWriter() { out_.push_back('}'); }

  void key(std::string_view k) {
    if (!first_) out_.push_back(',');
    first_ = false;
    append_escaped(out_, k);
    out_.push_back(':');
  }
  void str(std::string_view k, std::string_view v) { key(k), append_escaped(out_, v); }
  void num(std::string_view k, double v) { key(k), append_double(out_, v); }
  template <typename Range>
  void str_list(std::string_view k, const Range& values) {
    key(k);
    out_.push_back('[');
    bool first = true;
    for (const auto& v : values) {
      if (!first) out_.push_back(',');
      first = false;
      append_escaped(out_, v);
    }
    out_.push_back(']');
  }
  std::string& raw() { return out_; }

 private:
  std::string& out_;
  bool first_ = true;
};

}  // namespace

UtteranceRecord parse_record(std::string_view line) {
  ojson obj;
  try {
    obj = ojson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) malformed("line is not a JSON object");

  UtteranceRecord r;
  bool has_path = false, has_duration = false;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    const ojson& v = it.value();
    if (v.is_null()) malformed("field '" + k + "' is null");
    if (k == "id") {
      r.id = take_string(v, "id");
    } else if (k == "audio_filepath") {
      r.audio_ref = take_string(v, "audio_filepath"), has_path = true;
    } else if (k == "offset") {
      r.offset_s = take_number(v, "offset");
    } else if (k == "duration") {
      r.duration_s = take_number(v, "duration"), has_duration = true;
    } else if (k == "text") {
      r.text = take_string(v, "text");
    } else if (k == "lang_target") {
      r.lang_target = take_string(v, "lang_target");
    } else if (k == "lid_pred") {
      r.lid_pred = take_string(v, "lid_pred");
    } else if (k == "lid_prob") {
      r.lid_prob = take_number(v, "lid_prob");
    } else if (k == "segment_lids") {
      r.segment_lids = take_string_list(v, "segment_lids");
    } else if (k == "text_restored") {
      r.text_restored = take_string(v, "text_restored");
    } else if (k == "flags") {
      for (auto& f : take_string_list(v, "flags")) r.flags.insert(std::move(f));
    } else if (k == "corpus") {
      r.corpus = take_string(v, "corpus");
    } else if (k == "src_text") {
      r.src_text = take_string(v, "src_text");
    } else if (k == "tgt_text") {
      r.tgt_text = take_string(v, "tgt_text");
    } else if (k == "src_lang") {
      r.src_lang = take_string(v, "src_lang");
    } else if (k == "tgt_lang") {
      r.tgt_lang = take_string(v, "tgt_lang");
    } else if (k == "qe_score") {
      r.qe_score = take_number(v, "qe_score");
    } else if (k == "spans") {
      r.spans = take_spans(v);
    } else {
      r.extra[k] = v;
    }
  }
  if (!has_path) malformed("missing required field 'audio_filepath'");
  if (!has_duration) malformed("missing required field 'duration'");
  if (r.id.empty()) r.id = synthesize_id(r.audio_ref, r.offset_s, r.duration_s);
  return r;
}

void serialize_record(const UtteranceRecord& r, std::string& out) {
  ObjectWriter w(out);
  w.str("id", r.id);
  w.str("audio_filepath", r.audio_ref);
  w.num("offset", r.offset_s);
  w.num("duration", r.duration_s);
  w.str("text", r.text);
  w.str("lang_target", r.lang_target);
  if (r.lid_pred) w.str("lid_pred", *r.lid_pred);
  if (r.lid_prob) w.num("lid_prob", *r.lid_prob);
  if (r.segment_lids) w.str_list("segment_lids", *r.segment_lids);
  if (r.text_restored) w.str("text_restored", *r.text_restored);
  if (!r.flags.empty()) w.str_list("flags", r.flags);
  if (!r.corpus.empty()) w.str("corpus", r.corpus);
  if (r.src_text) w.str("src_text", *r.src_text);
  if (r.tgt_text) w.str("tgt_text", *r.tgt_text);
  if (r.src_lang) w.str("src_lang", *r.src_lang);
  if (r.tgt_lang) w.str("tgt_lang", *r.tgt_lang);
  if (r.qe_score) w.num("qe_score", *r.qe_score);
  if (r.spans) {
    w.key("spans");
    auto& o = w.raw();
    o.push_back('[');
    for (std::size_t i = 0; i < r.spans->size(); ++i) {
      if (i) o.push_back(',');
      const auto& s = (*r.spans)[i];
      ObjectWriter sw(o);
      sw.num("start", s.start_s);
      sw.num("end", s.end_s);
      if (s.text) sw.str("text", *s.text);
    }
    o.push_back(']');
  }
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) {
    w.key(it.key());
    w.raw() += it.value().dump();
  }
}

std::string serialize_record(const UtteranceRecord& r) {
  std::string out;
  serialize_record(r, out);
  return out;
}

ManifestReader::ManifestReader(std::istream& in, ErrorSink on_error)
    : in_(in), on_error_(std::move(on_error)) {}

std::optional<UtteranceRecord> ManifestReader::next() {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      return parse_record(line_);
    } catch (const Error& e) {
      ++error_count_;
      ManifestError err{line_no_, e.what(), line_};
      if (on_error_) {
        on_error_(err);
      } else {
        errors_.push_back(std::move(err));
      }
    }
  }
  if (in_.bad()) throw IoError("read failure at line " + std::to_string(line_no_));
  return std::nullopt;
}

std::vector<UtteranceRecord> read_manifest(std::istream& in, std::vector<ManifestError>* errors) {
  ManifestReader reader(in);
  std::vector<UtteranceRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  if (errors) *errors = reader.errors();
  return out;
}

void ManifestWriter::write(const UtteranceRecord& r) {
  buffer_.clear();
  serialize_record(r, buffer_);
  write_raw_line(buffer_);
}

void ManifestWriter::write_raw_line(std::string_view line) {
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.put('\n');
  if (!out_) throw IoError("manifest write failed after " + std::to_string(count_) + " records", count_);
  ++count_;
}

std::size_t write_manifest(const std::vector<UtteranceRecord>& records, std::ostream& out) {
  ManifestWriter writer(out);
  for (const auto& r : records) writer.write(r);
  out.flush();
  if (!out) throw IoError("manifest flush failed", writer.count());
  return writer.count();
}

FilterDecision validate_record(const UtteranceRecord& r) {
  FilterDecision d;
  d.record_id = r.id;
  auto fail = [&](std::string cause) { d.add(flag::kInvalidRecord, std::move(cause)); };
  if (r.id.empty()) fail("empty id");
  if (r.audio_ref.empty()) fail("empty audio_filepath");
  if (!std::isfinite(r.duration_s) || !(r.duration_s > 0)) fail("duration must be > 0");
  if (!std::isfinite(r.offset_s) || r.offset_s < 0) fail("offset must be >= 0");
  if (r.lid_prob && !(*r.lid_prob >= 0.0 && *r.lid_prob <= 1.0)) fail("lid_prob outside [0, 1]");
  if (r.qe_score && !(*r.qe_score >= 0.0 && *r.qe_score <= 1.0)) fail("qe_score outside [0, 1]");
  if (!is_supported_language(r.lang_target)) fail("unsupported lang_target '" + r.lang_target + "'");
  return d;
}

void CorpusTally::merge(const CorpusTally& other) noexcept {
  unfiltered_hours += other.unfiltered_hours;
  filtered_hours += other.filtered_hours;
  unfiltered_count += other.unfiltered_count;
  filtered_count += other.filtered_count;
}

void CorpusStats::add_unfiltered(const std::string& corpus, const std::string& lang, double hours,
                                 std::uint64_t count) {
  auto& t = per_key_[{corpus, lang}];
  t.unfiltered_hours += hours;
  t.unfiltered_count += count;
}

void CorpusStats::add_filtered(const std::string& corpus, const std::string& lang, double hours,
                               std::uint64_t count) {
  auto& t = per_key_[{corpus, lang}];
  t.filtered_hours += hours;
  t.filtered_count += count;
}

void CorpusStats::merge(const CorpusStats& other) {
  for (const auto& [k, t] : other.per_key_) per_key_[k].merge(t);
}

std::map<std::string, CorpusTally> CorpusStats::per_corpus() const {
  std::map<std::string, CorpusTally> out;
  for (const auto& [k, t] : per_key_) out[k.first].merge(t);
  return out;
}

std::map<std::string, CorpusTally> CorpusStats::per_language() const {
  std::map<std::string, CorpusTally> out;
  for (const auto& [k, t] : per_key_) out[k.second].merge(t);
  return out;
}

CorpusTally CorpusStats::total() const {
  CorpusTally out;
  for (const auto& [k, t] : per_key_) out.merge(t);
  return out;
}

std::set<std::string> CorpusStats::languages() const {
  std::set<std::string> out;
  for (const auto& [k, t] : per_key_) out.insert(k.second);
  return out;
}

bool CorpusStats::consistent() const {
  for (const auto& [k, t] : per_key_) {
    if (t.filtered_hours < 0 || t.unfiltered_hours < 0) return false;
    // Sums of the same durations in a different order may differ in the last ulp.
    if (t.filtered_hours > t.unfiltered_hours * (1 + 1e-12)) return false;
    if (t.filtered_count > t.unfiltered_count) return false;
  }
  return true;
}

}  // namespace granary
