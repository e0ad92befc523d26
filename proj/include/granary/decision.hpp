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

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace granary {

namespace flag {
inline constexpr std::string_view kLidMismatch = "lid_mismatch";
inline constexpr std::string_view kLidLowConf = "lid_low_conf";
inline constexpr std::string_view kLidMulti = "lid_multi";
inline constexpr std::string_view kHallucNgram = "halluc_ngram";
inline constexpr std::string_view kHallucLongword = "halluc_longword";
inline constexpr std::string_view kHallucPhrase = "halluc_phrase";
inline constexpr std::string_view kCharRateLow = "char_rate_low";
inline constexpr std::string_view kCharRateHigh = "char_rate_high";
inline constexpr std::string_view kCharset = "charset";
inline constexpr std::string_view kInvalidRecord = "invalid_record";
inline constexpr std::string_view kPncReverted = "pnc_reverted";
inline constexpr std::string_view kOversizeSpan = "oversize_span";
inline constexpr std::string_view kQeClamped = "qe_clamped";
inline constexpr std::string_view kServiceError = "service_error";
inline constexpr std::string_view kAstLenRatio = "ast_len_ratio";
inline constexpr std::string_view kAstHistogram = "ast_histogram";
inline constexpr std::string_view kAstLid = "ast_lid";
inline constexpr std::string_view kAstQe = "ast_qe";
}  // namespace flag

// Informational flags annotate a record but never cause a drop on their own.
inline bool is_informational(std::string_view f) {
  return f == flag::kPncReverted || f == flag::kOversizeSpan || f == flag::kQeClamped;
}

enum class Verdict { pass, drop };

struct FilterDecision {
  std::string record_id;
  Verdict verdict = Verdict::pass;
  std::set<std::string> flags;
  std::vector<std::string> causes;

  bool passed() const noexcept { return verdict == Verdict::pass; }

  // Adds a flag; drop-class flags flip the verdict.
  void add(std::string_view f, std::string cause = {}) {
    flags.emplace(f);
    if (!cause.empty()) causes.push_back(std::move(cause));
    if (!is_informational(f)) verdict = Verdict::drop;
  }

  void merge(const FilterDecision& other) {
    for (const auto& f : other.flags) flags.insert(f);
    causes.insert(causes.end(), other.causes.begin(), other.causes.end());
    if (!other.passed()) verdict = Verdict::drop;
  }
};

}  // namespace granary
