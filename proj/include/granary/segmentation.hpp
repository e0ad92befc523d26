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

#include <optional>
#include <string>
#include <vector>

namespace granary {

// A timestamped speech region, in seconds relative to the start of the audio.
struct SegmentSpan {
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<std::string> text;

  double length() const noexcept { return end_s - start_s; }
  bool operator==(const SegmentSpan&) const = default;
};

struct SegmentationConfig {
  double max_segment_s = 40.0;
  double pad_s = 0.4;
  double merge_gap_s = 2.0;

  // Throws ConfigError unless all values are positive and pad_s < max_segment_s.
  void validate() const;
};

struct Segment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::size_t span_count = 0;
  // Set when a single input span exceeded max_segment_s and was emitted as is.
  bool oversize = false;

  double length() const noexcept { return end_s - start_s; }
  bool operator==(const Segment&) const = default;
};

// Checks that spans are finite, well-formed (end > start), sorted and
// non-overlapping, and within [0, audio_duration_s] when a duration is given.
// Throws Error("invalid_span") naming the first offending index.
void check_spans(const std::vector<SegmentSpan>& spans, std::optional<double> audio_duration_s);

// Extends each span by pad_s on both sides, clamped to the audio. Where padded
// neighbours would overlap, both meet at the midpoint of the original gap.
std::vector<SegmentSpan> pad_spans(const std::vector<SegmentSpan>& spans, double pad_s,
                                   double audio_duration_s);

// Greedy left-to-right merge: a span joins the open segment iff the merged
// extent stays within max_segment_s and the gap is at most merge_gap_s.
std::vector<Segment> merge_spans(const std::vector<SegmentSpan>& spans, const SegmentationConfig& cfg);

std::vector<Segment> plan_segments(const std::vector<SegmentSpan>& spans, const SegmentationConfig& cfg,
                                   double audio_duration_s);

}  // namespace granary
