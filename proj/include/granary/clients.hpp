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

#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "granary/error.hpp"
#include "json.hpp"

namespace httplib {
class Client;
}

namespace granary {

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Connection-level failure (refused, reset, timed out).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message) : Error("transport", message) {}
};

// A failed service call after all retries.
class ServiceError : public Error {
 public:
  ServiceError(std::string code, const std::string& message, int attempts)
      : Error(std::move(code), message), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Throws TransportError when no HTTP response was obtained.
  virtual HttpResponse post(const std::string& path, const std::string& body) = 0;
};

// Plain HTTP/1.1 with JSON bodies. Keeps a pool of keep-alive connections and
// never has more than max_in_flight requests outstanding.
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string base_url, double timeout_s, std::size_t max_in_flight);
  ~HttpTransport() override;

  HttpResponse post(const std::string& path, const std::string& body) override;

 private:
  std::unique_ptr<httplib::Client> acquire();
  void release(std::unique_ptr<httplib::Client> client);

  std::string base_url_;
  double timeout_s_;
  std::size_t max_in_flight_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::vector<std::unique_ptr<httplib::Client>> idle_;
};

// Routes requests to an in-process handler; hermetic tests and mock runs.
class HandlerTransport final : public Transport {
 public:
  using Handler = std::function<HttpResponse(const std::string& path, const std::string& body)>;
  explicit HandlerTransport(Handler handler) : handler_(std::move(handler)) {}
  HttpResponse post(const std::string& path, const std::string& body) override { return handler_(path, body); }

 private:
  Handler handler_;
};

struct ServiceConfig {
  std::string base_url;
  double timeout_s = 120.0;
  int max_retries = 2;
  double backoff_base_s = 1.0;
  std::size_t max_in_flight = 16;
  // Forwarded to the backend untouched.
  nlohmann::json decode_params = nlohmann::json::object();

  void validate(const std::string& name) const;
};

using Sleeper = std::function<void(double seconds)>;

// JSON-over-HTTP call with retries. Transport failures and 5xx responses are
// retried with delays backoff_base_s * 2^k; other statuses fail at once.
// A persistently failing call makes exactly 1 + max_retries attempts.
class ServiceClient {
 public:
  ServiceClient(std::shared_ptr<Transport> transport, ServiceConfig cfg, Sleeper sleeper = {});

  nlohmann::json call(const std::string& path, const nlohmann::json& request) const;
  const ServiceConfig& config() const noexcept { return cfg_; }

 private:
  std::shared_ptr<Transport> transport_;
  ServiceConfig cfg_;
  Sleeper sleeper_;
};

struct LanguageGuess {
  std::string lang;
  double prob = 0.0;
};

struct TranscribedSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::string lid;
  double lid_prob = 0.0;
};

struct TranscriptionResult {
  std::vector<TranscribedSegment> segments;
  std::string detected_lang;
  double detected_lang_prob = 0.0;

  std::string joined_text() const;
  std::vector<std::string> segment_lids() const;
};

struct Window {
  double start_s = 0.0;
  double end_s = 0.0;
};

// Throws Error("invalid_segments") unless segments are well-formed, sorted,
// non-overlapping, inside the window, with probabilities in [0, 1].
void check_transcription(const TranscriptionResult& result, const Window& window);

TranscriptionResult transcription_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TranscriptionResult& r);

class AsrClient {
 public:
  explicit AsrClient(ServiceClient client) : client_(std::move(client)) {}

  // First pass: language identification.
  LanguageGuess detect_language(const std::string& audio_ref) const;
  // Second pass: transcription conditioned on the detected language.
  TranscriptionResult transcribe(const std::string& audio_ref, const std::string& lang_hint,
                                 const Window& window) const;

 private:
  ServiceClient client_;
};

class TranslationClient {
 public:
  explicit TranslationClient(ServiceClient client) : client_(std::move(client)) {}
  std::string translate(const std::string& text, const std::string& src, const std::string& tgt) const;

 private:
  ServiceClient client_;
};

struct QeResult {
  double score = 0.0;
  bool clamped = false;
};

class QeClient {
 public:
  explicit QeClient(ServiceClient client) : client_(std::move(client)) {}
  QeResult qe_score(const std::string& src_text, const std::string& tgt_text, const std::string& src,
                    const std::string& tgt) const;

 private:
  ServiceClient client_;
};

// LLM used for punctuation and capitalization restoration.
class LlmClient {
 public:
  explicit LlmClient(ServiceClient client) : client_(std::move(client)) {}
  std::string restore(const std::string& prompt, const std::string& lang) const;

 private:
  ServiceClient client_;
};

struct ServicesConfig {
  // When set, every service is served by an in-process mock with this seed
  // instead of HTTP.
  bool in_process_mock = false;
  std::string mock_wordlists_dir;  // vocabulary for in-process mocks
  std::string mock_table;          // optional fixed answers (JSON)
  ServiceConfig asr;
  ServiceConfig translate;
  ServiceConfig qe;
  ServiceConfig llm;

  ServicesConfig();
};

// Applies GRANARY_SERVICES-style overrides: "asr=URL,translate=URL,qe=URL,llm=URL"
// (any subset; "all=URL" sets every service).
void apply_service_overrides(ServicesConfig& cfg, std::string_view spec);

}  // namespace granary
