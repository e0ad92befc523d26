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

// Serial reference kernel against the OpenMP sharded kernel on the
// service-free filter path.
//
//   bench_kernels [records] [max_workers]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "granary/pipeline.hpp"
#include "synth.hpp"

using namespace granary;

namespace {

struct Timing {
  double best_s = 1e300;
  std::size_t kept = 0;
};

template <typename Kernel>
Timing time_kernel(const std::vector<UtteranceRecord>& recs, Kernel&& kernel) {
  std::vector<char> dup(recs.size(), 0);
  Timing t;
  for (int rep = 0; rep < 5; ++rep) {
    auto copy = recs;
    std::vector<RecordOutcome> out(copy.size());
    const auto t0 = std::chrono::steady_clock::now();
    kernel(std::span<UtteranceRecord>(copy), std::span<const char>(dup), std::span<RecordOutcome>(out));
    t.best_s = std::min(t.best_s, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    t.kept = 0;
    for (const auto& o : out) t.kept += o.kept.size();
  }
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  const std::size_t max_workers = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 8;

  std::mt19937_64 rng(5);
  synth::TextGen gen(5);
  const auto vocab = gen.vocab(400, 2, 9);
  std::vector<UtteranceRecord> recs;
  recs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) recs.push_back(synth::filtered_record(i, rng, vocab));

  auto cfg = load_config(std::filesystem::path(GRANARY_CONFIGS_DIR) / "filters.json");
  cfg.worker_count = 1;
  cfg.shard_count = 1;
  const Pipeline serial(cfg, Services{});
  const auto base = time_kernel(recs, [&](auto in, auto dup, auto out) { serial.process_chunk_serial(in, dup, out); });
  std::printf("%-22s %10.0f rec/s  kept %zu\n", "serial", static_cast<double>(n) / base.best_s, base.kept);

  for (std::size_t w = 1; w <= max_workers; w *= 2) {
    cfg.worker_count = w;
    cfg.shard_count = std::max<std::size_t>(8, w);
    const Pipeline p(cfg, Services{});
    const auto t = time_kernel(recs, [&](auto in, auto dup, auto out) { p.process_chunk_parallel(in, dup, out); });
    char label[64];
    std::snprintf(label, sizeof(label), "openmp workers=%zu", w);
    std::printf("%-22s %10.0f rec/s  kept %zu  x%.2f vs serial%s\n", label, static_cast<double>(n) / t.best_s,
                t.kept, base.best_s / t.best_s, t.kept == base.kept ? "" : "  MISMATCH");
  }
  return 0;
}
