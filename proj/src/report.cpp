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

#include <cstdio>
#include <istream>
#include <numeric>
#include <sstream>

#include "granary/error.hpp"
#include "granary/pipeline.hpp"

namespace granary {

CorpusStats compute_stats(std::istream& input, std::istream& output) {
  CorpusStats stats;
  ManifestReader in(input);
  while (auto r = in.next()) stats.add_unfiltered(r->corpus, r->lang_target, r->hours());
  ManifestReader out(output);
  while (auto r = out.next()) stats.add_filtered(r->corpus, r->lang_target, r->hours());
  return stats;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(const std::string& corpus) { return corpus.empty() ? "-" : corpus; }

nlohmann::ordered_json tally_json(const CorpusTally& t) {
  return {{"unfiltered_hours", t.unfiltered_hours},
          {"filtered_hours", t.filtered_hours},
          {"unfiltered_count", t.unfiltered_count},
          {"filtered_count", t.filtered_count},
          {"retention_rate", t.retention_rate()}};
}

std::uint64_t sum_counts(const std::map<std::string, std::uint64_t>& m) {
  return std::accumulate(m.begin(), m.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const auto& kv) { return acc + kv.second; });
}

std::string render_text(const CorpusStats& stats, const std::map<std::string, std::uint64_t>& drop_flags,
                        const std::map<std::string, std::uint64_t>& drop_primary) {
  std::ostringstream os;
  char line[256];
  const char* row_fmt = "%-12s %-8s %16s %16s %10s %12s %12s\n";
  std::snprintf(line, sizeof(line), row_fmt, "corpus", "lang", "unfiltered_h", "filtered_h", "retained%",
                "records_in", "records_out");
  os << line;
  auto row = [&](const std::string& corpus, const std::string& lang, const CorpusTally& t) {
    std::snprintf(line, sizeof(line), row_fmt, corpus.c_str(), lang.c_str(), fixed2(t.unfiltered_hours).c_str(),
                  fixed2(t.filtered_hours).c_str(), fixed2(100.0 * t.retention_rate()).c_str(),
                  std::to_string(t.unfiltered_count).c_str(), std::to_string(t.filtered_count).c_str());
    os << line;
  };
  for (const auto& [key, t] : stats.per_key()) row(label(key.first), key.second, t);
  const auto corpora = stats.per_corpus();
  if (corpora.size() > 1) {
    for (const auto& [corpus, t] : corpora) row(label(corpus), "all", t);
  }
  row("total", "all", stats.total());

  if (!drop_primary.empty() || !drop_flags.empty()) {
    os << "\ndropped records: " << sum_counts(drop_primary) << '\n';
    os << "flag                 primary      all\n";
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> merged;
    for (const auto& [f, n] : drop_primary) merged[f].first = n;
    for (const auto& [f, n] : drop_flags) merged[f].second = n;
    for (const auto& [f, n] : merged) {
      std::snprintf(line, sizeof(line), "%-20s %7llu %8llu\n", f.c_str(), static_cast<unsigned long long>(n.first),
                    static_cast<unsigned long long>(n.second));
      os << line;
    }
  }
  return os.str();
}

std::string render_json(const CorpusStats& stats, const std::map<std::string, std::uint64_t>& drop_flags,
                        const std::map<std::string, std::uint64_t>& drop_primary) {
  nlohmann::ordered_json doc;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& [key, t] : stats.per_key()) {
    auto j = tally_json(t);
    j["corpus"] = key.first;
    j["lang"] = key.second;
    rows.push_back(std::move(j));
  }
  doc["rows"] = std::move(rows);
  auto corpora = nlohmann::ordered_json::object();
  for (const auto& [corpus, t] : stats.per_corpus()) corpora[corpus] = tally_json(t);
  doc["corpora"] = std::move(corpora);
  auto langs = nlohmann::ordered_json::object();
  for (const auto& [lang, t] : stats.per_language()) langs[lang] = tally_json(t);
  doc["languages"] = std::move(langs);
  doc["total"] = tally_json(stats.total());
  doc["drop_flags"] = drop_flags;
  doc["drop_primary"] = drop_primary;
  doc["dropped_records"] = sum_counts(drop_primary);
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_report(const CorpusStats& stats, const std::map<std::string, std::uint64_t>& drop_flags,
                          const std::map<std::string, std::uint64_t>& drop_primary, std::string_view format) {
  if (format == "text") return render_text(stats, drop_flags, drop_primary);
  if (format == "json") return render_json(stats, drop_flags, drop_primary);
  throw Error("unknown_format", "unknown report format '" + std::string(format) + "'");
}

std::string render_report(const RunSummary& summary, std::string_view format) {
  return render_report(summary.stats, summary.drop_flags, summary.drop_primary, format);
}

}  // namespace granary
