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

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "granary/error.hpp"
#include "granary/mock.hpp"
#include "granary/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitService = 3;

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw granary::IoError("cannot open " + path + " for reading");
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw granary::IoError("cannot open " + path + " for writing");
  return f;
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  auto f = open_out(path);
  f << content;
  if (!f.flush()) throw granary::IoError("failed writing " + path);
}

struct RunArgs {
  std::string config, input, output, sidecar, report, report_format = "text", errors, services;
  std::size_t workers = 0, shards = 0;
};

int cmd_run(const RunArgs& a) {
  auto cfg = granary::load_config(a.config);
  if (a.workers) cfg.worker_count = a.workers;
  if (a.shards) cfg.shard_count = a.shards;
  if (!a.services.empty()) granary::apply_service_overrides(cfg.services, a.services);
  cfg.validate();

  granary::Pipeline pipeline(cfg, granary::make_services(cfg));
  auto in = open_in(a.input);
  auto out = open_out(a.output);
  auto side = open_out(a.sidecar);
  std::unique_ptr<std::ofstream> errors;
  if (!a.errors.empty()) errors = std::make_unique<std::ofstream>(open_out(a.errors));

  const auto summary = pipeline.run(in, out, side, errors.get());
  if (!a.report.empty()) write_file(a.report, granary::render_report(summary, a.report_format));

  std::cerr << "records in " << summary.input_records << ", kept " << summary.output_records << ", dropped "
            << summary.sidecar_records << ", malformed lines " << summary.malformed_lines << ", service errors "
            << summary.service_errors << '\n';
  if (summary.service_error_rate() > cfg.max_error_rate) {
    std::cerr << "service error rate " << summary.service_error_rate() << " exceeds cap " << cfg.max_error_rate
              << '\n';
    return kExitService;
  }
  return kExitOk;
}

int cmd_stats(const std::string& input, const std::string& output, const std::string& format,
              const std::string& report) {
  auto in = open_in(input);
  auto out = open_in(output);
  const auto stats = granary::compute_stats(in, out);
  write_file(report, granary::render_report(stats, {}, {}, format));
  return kExitOk;
}

int cmd_validate(const std::string& config) {
  const auto cfg = granary::load_config(config);
  // Loading resources catches missing data files too.
  granary::PipelineResources::load(cfg);
  std::cout << "ok:";
  for (auto s : cfg.stages) std::cout << ' ' << granary::stage_name(s);
  std::cout << '\n';
  return kExitOk;
}

int cmd_mock_server(std::uint64_t seed, const std::string& host, int port, const std::string& wordlists,
                    const std::string& table_path) {
  granary::MockTable table;
  if (!table_path.empty()) {
    auto f = open_in(table_path);
    table = granary::MockTable::from_json(nlohmann::json::parse(f));
  }
  auto backend = std::make_shared<granary::MockBackend>(seed, granary::Vocabulary::from_dir(wordlists), table);
  granary::MockServer server(backend);
  std::cerr << "mock services on http://" << host << ':' << port << " seed " << seed << '\n';
  if (!server.listen(host, port)) throw granary::IoError("cannot listen on " + host + ":" + std::to_string(port));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"granary: speech data curation pipeline"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the configured stages over a manifest");
  run_cmd->add_option("--config", run.config, "Pipeline config (JSON)")->required();
  run_cmd->add_option("--input", run.input, "Input manifest")->required();
  run_cmd->add_option("--output", run.output, "Manifest of kept records")->required();
  run_cmd->add_option("--sidecar", run.sidecar, "Manifest of dropped records")->required();
  run_cmd->add_option("--report", run.report, "Where to write the retention report ('-' for stdout)");
  run_cmd->add_option("--report-format", run.report_format, "text or json");
  run_cmd->add_option("--errors", run.errors, "Where to write malformed input lines");
  run_cmd->add_option("--workers", run.workers, "Override worker_count");
  run_cmd->add_option("--shards", run.shards, "Override shard_count");
  run_cmd->add_option("--services", run.services, "Endpoint overrides, e.g. asr=http://h:p,llm=...");

  std::string st_in, st_out, st_format = "text", st_report = "-";
  auto* stats_cmd = app.add_subcommand("stats", "Retention table from an unfiltered and a filtered manifest");
  stats_cmd->add_option("--input", st_in, "Unfiltered manifest")->required();
  stats_cmd->add_option("--output", st_out, "Filtered manifest")->required();
  stats_cmd->add_option("--format", st_format, "text or json");
  stats_cmd->add_option("--report", st_report, "Destination ('-' for stdout)");

  std::string vc_config;
  auto* vc_cmd = app.add_subcommand("validate-config", "Check a config and the data files it refers to");
  vc_cmd->add_option("--config", vc_config)->required();

  std::uint64_t seed = 0;
  int port = 8080;
  std::string host = "127.0.0.1", wordlists = std::string(GRANARY_DATA_DIR) + "/wordlists", table;
  auto* mock_cmd = app.add_subcommand("mock-server", "Serve deterministic mock ASR, MT, QE and LLM endpoints");
  mock_cmd->add_option("--seed", seed);
  mock_cmd->add_option("--port", port);
  mock_cmd->add_option("--host", host);
  mock_cmd->add_option("--wordlists", wordlists, "Directory of <lang>.words files");
  mock_cmd->add_option("--table", table, "JSON table of scripted responses");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*stats_cmd) return cmd_stats(st_in, st_out, st_format, st_report);
    if (*vc_cmd) return cmd_validate(vc_config);
    if (*mock_cmd) return cmd_mock_server(seed, host, port, wordlists, table);
  } catch (const granary::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const granary::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const granary::Error& e) {
    // Missing data files and unknown report formats surface here.
    std::cerr << e.code() << ": " << e.what() << '\n';
    return e.code() == "unknown_format" ? kExitConfig : kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
