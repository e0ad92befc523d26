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
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "granary/clients.hpp"

namespace httplib {
class Server;
}

namespace granary {

// Per-language word lists (<lang>.words). Shared by the mock services and
// the word-list text LID backend.
class Vocabulary {
 public:
  static Vocabulary from_dir(const std::filesystem::path& dir);
  void add(const std::string& lang, std::vector<std::string> words);
  // Words for a language; a synthetic list when none was loaded.
  const std::vector<std::string>& words(const std::string& lang) const;
  const std::map<std::string, std::vector<std::string>>& all() const noexcept { return by_lang_; }

 private:
  std::map<std::string, std::vector<std::string>> by_lang_;
};

// Fixed answers that take precedence over the seeded generators.
struct MockTable {
  std::map<std::string, LanguageGuess> detect;              // audio_ref
  std::map<std::string, TranscriptionResult> transcribe;    // audio_ref
  std::map<std::string, std::string> translate;             // src \t tgt \t text
  std::map<std::string, double> qe;                         // src_text \t tgt_text
  std::map<std::string, std::string> restore;               // input text
  double qe_high = 0.9;
  double qe_low = 0.1;

  static MockTable from_json(const nlohmann::json& j);
};

// Deterministic stand-ins for the transcription, translation, quality
// estimation and restoration models. Every answer is a pure function of the
// request and the seed; a small seeded fraction of answers is deliberately
// bad (wrong language, low confidence, hallucinated repeats, gibberish
// translations, heavy rewrites) so every filter has something to catch.
class MockBackend {
 public:
  MockBackend(std::uint64_t seed, Vocabulary vocab, MockTable table = {});

  LanguageGuess detect_language(const std::string& audio_ref) const;
  TranscriptionResult transcribe(const std::string& audio_ref, const std::string& lang_hint,
                                 const Window& window) const;
  std::string translate(const std::string& text, const std::string& src, const std::string& tgt) const;
  // The word-by-word translation the mock treats as correct.
  std::string faithful_translation(const std::string& text, const std::string& tgt) const;
  double qe_score(const std::string& src_text, const std::string& tgt_text, const std::string& src,
                  const std::string& tgt) const;
  std::string restore(const std::string& prompt, const std::string& lang) const;

  // HTTP-shaped dispatch used by both the in-process transport and the server.
  HttpResponse handle(const std::string& path, const std::string& body) const;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t hash(std::initializer_list<std::string_view> parts) const;
  const std::string& pick(const std::string& lang, std::uint64_t h) const;

  std::uint64_t seed_;
  Vocabulary vocab_;
  MockTable table_;
};

// Serves a MockBackend over HTTP on 127.0.0.1 from a background thread.
class MockServer {
 public:
  explicit MockServer(std::shared_ptr<const MockBackend> backend);
  ~MockServer();

  // Binds (port 0 picks a free port) and starts serving; returns the port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks serving on the calling thread.
  bool listen(const std::string& host, int port);
  void stop();
  std::string base_url() const;

 private:
  std::shared_ptr<const MockBackend> backend_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

}  // namespace granary
