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

#include "granary/mock.hpp"

#include <cmath>
#include <fstream>

#include "granary/languages.hpp"
#include "granary/manifest.hpp"
#include "granary/pnc.hpp"
#include "granary/unicode.hpp"
#include "httplib.h"

namespace granary {

using json = nlohmann::json;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const std::vector<std::string>& synthetic_words() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> w;
    for (int i = 0; i < 64; ++i) w.push_back("word" + std::to_string(i));
    return w;
  }();
  return words;
}

// Upper-case form of a lower-case letter, or the letter itself.
char32_t to_upper(char32_t ch) {
  for (char32_t delta : {32u, 80u, 1u, 37u, 63u}) {
    if (ch < delta) continue;
    const char32_t up = ch - delta;
    if (up != ch && unicode::fold_case(up) == ch) return up;
  }
  return ch;
}

std::string capitalize_and_terminate(const std::string& text) {
  if (text.empty()) return text;
  std::size_t pos = 0;
  const char32_t first = unicode::next_scalar(text, pos);
  std::string out;
  unicode::append(out, to_upper(first));
  out.append(text, pos, std::string::npos);
  const char last = out.back();
  if (last != '.' && last != '?' && last != '!') out.push_back('.');
  return out;
}

std::string detect_lang_from_ref(const std::string& audio_ref) {
  std::size_t pos = 0;
  while (pos <= audio_ref.size()) {
    auto end = audio_ref.find('/', pos);
    if (end == std::string::npos) end = audio_ref.size();
    const auto part = std::string_view(audio_ref).substr(pos, end - pos);
    if (is_supported_language(part)) return std::string(part);
    pos = end + 1;
  }
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------

Vocabulary Vocabulary::from_dir(const std::filesystem::path& dir) {
  Vocabulary v;
  for (const auto& lang : kLanguages) {
    std::ifstream in(dir / (std::string(lang.code) + ".words"));
    if (!in) continue;
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) words.push_back(line);
    }
    if (!words.empty()) v.add(std::string(lang.code), std::move(words));
  }
  return v;
}

void Vocabulary::add(const std::string& lang, std::vector<std::string> words) { by_lang_[lang] = std::move(words); }

const std::vector<std::string>& Vocabulary::words(const std::string& lang) const {
  auto it = by_lang_.find(lang);
  return it == by_lang_.end() ? synthetic_words() : it->second;
}

MockTable MockTable::from_json(const json& j) {
  MockTable t;
  if (auto it = j.find("detect"); it != j.end()) {
    for (const auto& [ref, v] : it->items()) t.detect[ref] = {v.at("lang").get<std::string>(), v.at("prob").get<double>()};
  }
  if (auto it = j.find("transcribe"); it != j.end()) {
    for (const auto& [ref, v] : it->items()) t.transcribe[ref] = transcription_from_json(v);
  }
  if (auto it = j.find("translate"); it != j.end()) {
    for (const auto& [k, v] : it->items()) t.translate[k] = v.get<std::string>();
  }
  if (auto it = j.find("qe"); it != j.end()) {
    for (const auto& [k, v] : it->items()) t.qe[k] = v.get<double>();
  }
  if (auto it = j.find("restore"); it != j.end()) {
    for (const auto& [k, v] : it->items()) t.restore[k] = v.get<std::string>();
  }
  t.qe_high = j.value("qe_high", t.qe_high);
  t.qe_low = j.value("qe_low", t.qe_low);
  return t;
}

MockBackend::MockBackend(std::uint64_t seed, Vocabulary vocab, MockTable table)
    : seed_(seed), vocab_(std::move(vocab)), table_(std::move(table)) {}

std::uint64_t MockBackend::hash(std::initializer_list<std::string_view> parts) const {
  std::uint64_t h = fnv1a(std::to_string(seed_));
  for (auto p : parts) {
    h = fnv1a(p, h);
    h = fnv1a("\x1f", h);
  }
  return splitmix(h);
}

const std::string& MockBackend::pick(const std::string& lang, std::uint64_t h) const {
  const auto& words = vocab_.words(lang);
  return words[h % words.size()];
}

LanguageGuess MockBackend::detect_language(const std::string& audio_ref) const {
  if (auto it = table_.detect.find(audio_ref); it != table_.detect.end()) return it->second;
  const auto h = hash({"detect", audio_ref});
  std::string lang = detect_lang_from_ref(audio_ref);
  if (lang.empty()) lang = std::string(kLanguages[h % kLanguages.size()].code);
  const auto roll = (h >> 16) % 1000;
  const auto frac = static_cast<double>((h >> 32) % 1000) / 1000.0;
  if (roll < 30) {
    const auto idx = *language_index(lang);
    lang = std::string(kLanguages[(idx + 1 + (h >> 40) % (kLanguages.size() - 1)) % kLanguages.size()].code);
  }
  const double prob = roll >= 30 && roll < 80 ? 0.5 + 0.29 * frac : 0.85 + 0.14 * frac;
  return {lang, prob};
}

TranscriptionResult MockBackend::transcribe(const std::string& audio_ref, const std::string& lang_hint,
                                            const Window& window) const {
  if (auto it = table_.transcribe.find(audio_ref); it != table_.transcribe.end()) return it->second;
  const auto h = hash({"transcribe", audio_ref, lang_hint, format_double(window.start_s), format_double(window.end_s)});
  TranscriptionResult r;
  r.detected_lang = lang_hint;
  std::uint64_t k = h;
  double t = window.start_s;
  while (t < window.end_s) {
    k = splitmix(k);
    double end = std::min(window.end_s, t + 4.0 + static_cast<double>(k % 9));
    if (window.end_s - end < 0.5) end = window.end_s;
    TranscribedSegment seg{t, end, {}, lang_hint, 0.9 + static_cast<double>((k >> 20) % 100) / 1000.0};
    const auto n_words = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround((end - t) * 2.0)));
    for (std::size_t w = 0; w < n_words; ++w) {
      k = splitmix(k);
      if (w) seg.text.push_back(' ');
      seg.text += pick(lang_hint, k);
    }
    r.segments.push_back(std::move(seg));
    t = end;
  }
  if (r.segments.empty()) return r;

  auto& last = r.segments.back();
  if ((h >> 8) % 1000 < 20 && r.segments.size() >= 2) {
    const auto idx = language_index(lang_hint).value_or(0);
    last.lid = std::string(kLanguages[(idx + 7) % kLanguages.size()].code);
  }
  if ((h >> 18) % 1000 < 15) {
    const auto& w = pick(lang_hint, h >> 3);
    for (int i = 0; i < 6; ++i) last.text += " " + w;
  }
  if ((h >> 28) % 1000 < 10) {
    last.text.push_back(' ');
    for (int i = 0; i < 10; ++i) last.text += pick(lang_hint, h >> i);
  }
  double best = 0;
  for (const auto& s : r.segments) best = std::max(best, s.lid_prob);
  r.detected_lang_prob = best;
  return r;
}

std::string MockBackend::faithful_translation(const std::string& text, const std::string& tgt) const {
  std::string out;
  for (auto tok : unicode::split_words(text)) {
    if (!out.empty()) out.push_back(' ');
    out += pick(tgt, hash({"word", tok}));
  }
  return out;
}

std::string MockBackend::translate(const std::string& text, const std::string& src, const std::string& tgt) const {
  if (auto it = table_.translate.find(src + "\t" + tgt + "\t" + text); it != table_.translate.end()) {
    return it->second;
  }
  const auto h = hash({"translate", src, tgt, text});
  const auto roll = h % 1000;
  if (roll < 40) {
    // Gibberish: source-language words, so neither LID nor QE accept it.
    std::string out;
    std::uint64_t k = h;
    for (std::size_t i = 0, n = unicode::word_count(text); i < n; ++i) {
      k = splitmix(k);
      if (!out.empty()) out.push_back(' ');
      out += pick(src, k);
    }
    return out;
  }
  std::string out = faithful_translation(text, tgt);
  if (roll < 50) {
    // Runaway generation: far longer than the source.
    const auto n = unicode::word_count(text) * 11;
    std::uint64_t k = h;
    for (std::size_t i = 0; i < n; ++i) {
      k = splitmix(k);
      out += " " + pick(tgt, k);
    }
  }
  return out;
}

double MockBackend::qe_score(const std::string& src_text, const std::string& tgt_text, const std::string&,
                             const std::string& tgt) const {
  if (auto it = table_.qe.find(src_text + "\t" + tgt_text); it != table_.qe.end()) return it->second;
  return tgt_text == faithful_translation(src_text, tgt) ? table_.qe_high : table_.qe_low;
}

std::string MockBackend::restore(const std::string& prompt, const std::string& lang) const {
  const auto input = extract_prompt_input(prompt);
  if (auto it = table_.restore.find(input); it != table_.restore.end()) return it->second;
  const auto h = hash({"restore", lang, input});
  std::string text = input;
  if (h % 1000 < 50) {
    // Heavy rewrite: replace every third word.
    auto words = unicode::split_words(input);
    std::string out;
    std::uint64_t k = h;
    for (std::size_t i = 0; i < words.size(); ++i) {
      k = splitmix(k);
      if (!out.empty()) out.push_back(' ');
      if (i % 3 == 0) {
        out += pick(lang, k) + "x";
      } else {
        out += words[i];
      }
    }
    text = out;
  }
  return std::string(kInputOpen) + capitalize_and_terminate(text) + std::string(kInputClose);
}

HttpResponse MockBackend::handle(const std::string& path, const std::string& body) const {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return {400, R"({"error":"body is not JSON"})"};
  }
  try {
    json res;
    if (path == "/v1/detect_language") {
      auto g = detect_language(req.at("audio_ref").get<std::string>());
      res = {{"lang", g.lang}, {"prob", g.prob}};
    } else if (path == "/v1/transcribe") {
      res = to_json(transcribe(req.at("audio_ref").get<std::string>(), req.at("lang_hint").get<std::string>(),
                               {req.at("start").get<double>(), req.at("end").get<double>()}));
    } else if (path == "/v1/translate") {
      const auto text = req.at("text").get<std::string>();
      if (text.empty()) return {400, R"({"error":"empty text"})"};
      res = {{"text", translate(text, req.at("src").get<std::string>(), req.at("tgt").get<std::string>())}};
    } else if (path == "/v1/qe_score") {
      res = {{"score", qe_score(req.at("src_text").get<std::string>(), req.at("tgt_text").get<std::string>(),
                                req.at("src").get<std::string>(), req.at("tgt").get<std::string>())}};
    } else if (path == "/v1/restore") {
      res = {{"text", restore(req.at("prompt").get<std::string>(), req.value("lang", std::string("en")))}};
    } else {
      return {404, R"({"error":"unknown endpoint"})"};
    }
    return {200, res.dump()};
  } catch (const std::exception& e) {
    return {400, json{{"error", e.what()}}.dump()};
  }
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::size_t kServerThreads = 96;
}  // namespace

MockServer::MockServer(std::shared_ptr<const MockBackend> backend)
    : backend_(std::move(backend)), server_(std::make_unique<httplib::Server>()) {
  // Every pooled keep-alive client connection pins a server thread, so the
  // pool has to be larger than the clients' combined in-flight limit.
  server_->new_task_queue = [] { return new httplib::ThreadPool(kServerThreads); };
  server_->set_keep_alive_timeout(1);
  server_->set_tcp_nodelay(true);
  server_->Post(R"(/v1/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    auto out = backend_->handle(req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  });
}

MockServer::~MockServer() { stop(); }

int MockServer::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw IoError("cannot bind mock server to " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

bool MockServer::listen(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  return server_->listen(host, port);
}

void MockServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

}  // namespace granary
