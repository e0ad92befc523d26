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

#include "granary/clients.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "httplib.h"

namespace granary {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Transports

HttpTransport::HttpTransport(std::string base_url, double timeout_s, std::size_t max_in_flight)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s), max_in_flight_(std::max<std::size_t>(1, max_in_flight)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

HttpTransport::~HttpTransport() = default;

std::unique_ptr<httplib::Client> HttpTransport::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
  ++in_flight_;
  if (!idle_.empty()) {
    auto c = std::move(idle_.back());
    idle_.pop_back();
    return c;
  }
  lock.unlock();
  auto c = std::make_unique<httplib::Client>(base_url_);
  const auto secs = static_cast<time_t>(timeout_s_);
  const auto usecs = static_cast<time_t>((timeout_s_ - static_cast<double>(secs)) * 1e6);
  c->set_connection_timeout(secs, usecs);
  c->set_read_timeout(secs, usecs);
  c->set_write_timeout(secs, usecs);
  c->set_keep_alive(true);
  c->set_tcp_nodelay(true);
  return c;
}

void HttpTransport::release(std::unique_ptr<httplib::Client> client) {
  {
    std::lock_guard lock(mu_);
    if (client) idle_.push_back(std::move(client));
    --in_flight_;
  }
  cv_.notify_one();
}

HttpResponse HttpTransport::post(const std::string& path, const std::string& body) {
  auto client = acquire();
  auto res = client->Post(path, body, "application/json");
  if (!res) {
    const auto err = httplib::to_string(res.error());
    release(nullptr);  // drop the connection, it may be half-open
    throw TransportError(base_url_ + path + ": " + err);
  }
  HttpResponse out{res->status, std::move(res->body)};
  release(std::move(client));
  return out;
}

// ---------------------------------------------------------------------------
// Retrying JSON client

void ServiceConfig::validate(const std::string& name) const {
  if (!(timeout_s > 0)) throw ConfigError("services." + name + ".timeout_s must be > 0");
  if (max_retries < 0) throw ConfigError("services." + name + ".max_retries must be >= 0");
  if (!(backoff_base_s >= 0)) throw ConfigError("services." + name + ".backoff_base_s must be >= 0");
  if (max_in_flight == 0) throw ConfigError("services." + name + ".max_in_flight must be >= 1");
}

ServiceClient::ServiceClient(std::shared_ptr<Transport> transport, ServiceConfig cfg, Sleeper sleeper)
    : transport_(std::move(transport)), cfg_(std::move(cfg)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
}

json ServiceClient::call(const std::string& path, const json& request) const {
  const std::string body = request.dump();
  const int attempts = 1 + cfg_.max_retries;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) sleeper_(cfg_.backoff_base_s * std::ldexp(1.0, attempt - 2));
    HttpResponse res;
    try {
      res = transport_->post(path, body);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    if (res.status == 200) {
      try {
        return json::parse(res.body);
      } catch (const json::exception& e) {
        throw ServiceError("bad_response", path + ": response is not JSON", attempt);
      }
    }
    const std::string excerpt = res.body.substr(0, 200);
    if (res.status >= 500) {
      last_error = path + ": HTTP " + std::to_string(res.status) + ": " + excerpt;
      continue;
    }
    throw ServiceError("http_status", path + ": HTTP " + std::to_string(res.status) + ": " + excerpt, attempt);
  }
  throw ServiceError("transport", last_error + " (after " + std::to_string(attempts) + " attempts)", attempts);
}

// ---------------------------------------------------------------------------
// Typed clients

std::string TranscriptionResult::joined_text() const {
  std::string out;
  for (const auto& s : segments) {
    if (s.text.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

std::vector<std::string> TranscriptionResult::segment_lids() const {
  std::vector<std::string> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.lid);
  return out;
}

void check_transcription(const TranscriptionResult& result, const Window& window) {
  constexpr double kEps = 1e-9;
  auto bad = [](std::size_t i, const std::string& why) {
    throw Error("invalid_segments", "segment " + std::to_string(i) + ": " + why);
  };
  if (!(result.detected_lang_prob >= 0 && result.detected_lang_prob <= 1)) {
    throw Error("invalid_segments", "detected_lang_prob outside [0, 1]");
  }
  for (std::size_t i = 0; i < result.segments.size(); ++i) {
    const auto& s = result.segments[i];
    if (!std::isfinite(s.start_s) || !std::isfinite(s.end_s) || !(s.end_s > s.start_s)) bad(i, "empty or inverted");
    if (s.start_s < window.start_s - kEps || s.end_s > window.end_s + kEps) bad(i, "outside the window");
    if (i > 0 && s.start_s < result.segments[i - 1].end_s) bad(i, "overlaps the previous segment");
    if (!(s.lid_prob >= 0 && s.lid_prob <= 1)) bad(i, "lid_prob outside [0, 1]");
  }
}

TranscriptionResult transcription_from_json(const json& j) {
  try {
    TranscriptionResult r;
    for (const auto& s : j.at("segments")) {
      r.segments.push_back({s.at("start_s").get<double>(), s.at("end_s").get<double>(),
                            s.at("text").get<std::string>(), s.at("lid").get<std::string>(),
                            s.at("lid_prob").get<double>()});
    }
    r.detected_lang = j.at("detected_lang").get<std::string>();
    r.detected_lang_prob = j.at("detected_lang_prob").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw Error("bad_response", std::string("malformed transcription: ") + e.what());
  }
}

json to_json(const TranscriptionResult& r) {
  json segs = json::array();
  for (const auto& s : r.segments) {
    segs.push_back({{"start_s", s.start_s}, {"end_s", s.end_s}, {"text", s.text}, {"lid", s.lid},
                    {"lid_prob", s.lid_prob}});
  }
  return {{"segments", segs}, {"detected_lang", r.detected_lang}, {"detected_lang_prob", r.detected_lang_prob}};
}

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error("bad_response", path + ": response lacks '" + key + "'");
  }
}

}  // namespace

LanguageGuess AsrClient::detect_language(const std::string& audio_ref) const {
  const std::string path = "/v1/detect_language";
  auto res = client_.call(path, {{"audio_ref", audio_ref}});
  LanguageGuess g{field<std::string>(res, "lang", path), field<double>(res, "prob", path)};
  if (!(g.prob >= 0 && g.prob <= 1)) throw Error("bad_response", path + ": prob outside [0, 1]");
  return g;
}

TranscriptionResult AsrClient::transcribe(const std::string& audio_ref, const std::string& lang_hint,
                                          const Window& window) const {
  auto res = client_.call("/v1/transcribe", {{"audio_ref", audio_ref},
                                             {"lang_hint", lang_hint},
                                             {"start", window.start_s},
                                             {"end", window.end_s},
                                             {"decode_params", client_.config().decode_params}});
  auto result = transcription_from_json(res);
  check_transcription(result, window);
  return result;
}

std::string TranslationClient::translate(const std::string& text, const std::string& src,
                                         const std::string& tgt) const {
  if (text.empty()) throw Error("empty_input", "refusing to translate empty text");
  if (src == tgt) throw Error("same_language", "source and target language are both '" + src + "'");
  const std::string path = "/v1/translate";
  auto res = client_.call(path, {{"text", text}, {"src", src}, {"tgt", tgt},
                                 {"decode_params", client_.config().decode_params}});
  auto out = field<std::string>(res, "text", path);
  if (out.empty()) throw Error("empty_translation", "translation service returned empty text");
  return out;
}

QeResult QeClient::qe_score(const std::string& src_text, const std::string& tgt_text, const std::string& src,
                            const std::string& tgt) const {
  if (src_text.empty() || tgt_text.empty()) throw Error("empty_input", "quality estimation needs two texts");
  const std::string path = "/v1/qe_score";
  auto res = client_.call(path, {{"src_text", src_text}, {"tgt_text", tgt_text}, {"src", src}, {"tgt", tgt}});
  const double raw = field<double>(res, "score", path);
  if (std::isnan(raw)) throw Error("bad_response", path + ": score is NaN");
  QeResult out{std::clamp(raw, 0.0, 1.0), false};
  out.clamped = out.score != raw;
  return out;
}

std::string LlmClient::restore(const std::string& prompt, const std::string& lang) const {
  const std::string path = "/v1/restore";
  auto res = client_.call(path, {{"prompt", prompt}, {"lang", lang},
                                 {"decode_params", client_.config().decode_params}});
  return field<std::string>(res, "text", path);
}

ServicesConfig::ServicesConfig() {
  asr.decode_params = {{"beam_size", 5}, {"batch_size", 16}};
  translate.decode_params = {{"strategy", "greedy"}};
  llm.max_retries = 1;
  llm.decode_params = {{"strategy", "greedy"}};
}

void apply_service_overrides(ServicesConfig& cfg, std::string_view overrides) {
  std::size_t pos = 0;
  while (pos <= overrides.size()) {
    auto end = overrides.find_first_of(",;", pos);
    if (end == std::string_view::npos) end = overrides.size();
    auto item = overrides.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("GRANARY_SERVICES entry without '=': " + std::string(item));
    const auto name = item.substr(0, eq);
    const std::string url(item.substr(eq + 1));
    if (name == "asr" || name == "all") cfg.asr.base_url = url;
    if (name == "translate" || name == "all") cfg.translate.base_url = url;
    if (name == "qe" || name == "all") cfg.qe.base_url = url;
    if (name == "llm" || name == "all") cfg.llm.base_url = url;
    if (name != "asr" && name != "translate" && name != "qe" && name != "llm" && name != "all") {
      throw ConfigError("GRANARY_SERVICES: unknown service '" + std::string(name) + "'");
    }
    cfg.in_process_mock = false;
  }
}

}  // namespace granary
