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

#include "granary/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "granary/error.hpp"

namespace granary {

void SegmentationConfig::validate() const {
  if (!(max_segment_s > 0) || !(pad_s > 0) || !(merge_gap_s > 0)) {
    throw ConfigError("segmentation: max_segment_s, pad_s and merge_gap_s must be positive");
  }
  if (!(pad_s < max_segment_s)) throw ConfigError("segmentation: pad_s must be smaller than max_segment_s");
}

void check_spans(const std::vector<SegmentSpan>& spans, std::optional<double> audio_duration_s) {
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    std::string problem;
    if (!std::isfinite(s.start_s) || !std::isfinite(s.end_s)) {
      problem = "non-finite bounds";
    } else if (s.start_s < 0) {
      problem = "negative start";
    } else if (!(s.end_s > s.start_s)) {
      problem = "end must be greater than start";
    } else if (audio_duration_s && s.end_s > *audio_duration_s) {
      problem = "ends past the audio duration";
    } else if (i > 0 && s.start_s < spans[i - 1].end_s) {
      problem = "overlaps or precedes the previous span";
    }
    if (!problem.empty()) {
      std::ostringstream msg;
      msg << "span " << i << " (" << s.start_s << ", " << s.end_s << "): " << problem;
      throw Error("invalid_span", msg.str());
    }
  }
}

std::vector<SegmentSpan> pad_spans(const std::vector<SegmentSpan>& spans, double pad_s,
                                   double audio_duration_s) {
  check_spans(spans, audio_duration_s);
  std::vector<SegmentSpan> out = spans;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double start = spans[i].start_s - pad_s;
    double end = spans[i].end_s + pad_s;
    if (i > 0) {
      const double gap = spans[i].start_s - spans[i - 1].end_s;
      if (2 * pad_s > gap) start = (spans[i - 1].end_s + spans[i].start_s) / 2;
    }
    if (i + 1 < spans.size()) {
      const double gap = spans[i + 1].start_s - spans[i].end_s;
      if (2 * pad_s > gap) end = (spans[i].end_s + spans[i + 1].start_s) / 2;
    }
    out[i].start_s = std::max(0.0, start);
    out[i].end_s = std::min(audio_duration_s, end);
  }
  return out;
}

std::vector<Segment> merge_spans(const std::vector<SegmentSpan>& spans, const SegmentationConfig& cfg) {
  check_spans(spans, std::nullopt);
  std::vector<Segment> out;
  std::optional<Segment> open;
  auto close = [&] {
    if (open) out.push_back(std::move(*open));
    open.reset();
  };
  auto append_text = [](std::string& dst, const std::optional<std::string>& src) {
    if (!src || src->empty()) return;
    if (!dst.empty()) dst.push_back(' ');
    dst += *src;
  };

  for (const auto& span : spans) {
    if (span.length() > cfg.max_segment_s) {
      close();
      Segment big{span.start_s, span.end_s, {}, 1, true};
      append_text(big.text, span.text);
      out.push_back(std::move(big));
      continue;
    }
    if (open && span.end_s - open->start_s <= cfg.max_segment_s &&
        span.start_s - open->end_s <= cfg.merge_gap_s) {
      open->end_s = span.end_s;
      ++open->span_count;
      append_text(open->text, span.text);
      continue;
    }
    close();
    open = Segment{span.start_s, span.end_s, {}, 1, false};
    append_text(open->text, span.text);
  }
  close();
  return out;
}

std::vector<Segment> plan_segments(const std::vector<SegmentSpan>& spans, const SegmentationConfig& cfg,
                                   double audio_duration_s) {
  return merge_spans(pad_spans(spans, cfg.pad_s, audio_duration_s), cfg);
}

}  // namespace granary
