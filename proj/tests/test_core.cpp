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

#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "granary/charset.hpp"
#include "granary/error.hpp"
#include "granary/languages.hpp"
#include "granary/manifest.hpp"
#include "granary/unicode.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace granary;

TEST_CASE("utf8 decoding is total") {
  CHECK(unicode::decode("a\xC3\xA9z") == U"aéz");
  // Each stray byte becomes one replacement character.
  CHECK(unicode::decode("a\xFF\xC3") == std::u32string{U'a', unicode::kReplacement, unicode::kReplacement});
  CHECK(unicode::scalar_count("\xF0\x9F\x98\x80x") == 2);
  CHECK(unicode::encode(U"中\U0001F600") == "\xE4\xB8\xAD\xF0\x9F\x98\x80");
}

TEST_CASE("case folding covers the supported scripts") {
  CHECK(unicode::fold_case("ÉCOLE Straße") == "école straße");
  CHECK(unicode::fold_case("ΑΘΗΝΑ") == "αθηνα");
  CHECK(unicode::fold_case("МОСКВА ЇЖАК") == "москва їжак");
  CHECK(unicode::fold_case("ŁÓDŹ ŞİŞ ȘȚ") == unicode::fold_case("łódź şiş șț"));
}

TEST_CASE("word splitting") {
  const auto w = unicode::split_words("  one\ttwo \n three  ");
  REQUIRE(w.size() == 3);
  CHECK(w[2] == "three");
  CHECK(unicode::word_count("") == 0);
  CHECK(unicode::word_count(" a  b ") == 2);
}

TEST_CASE("charset file loads the shipped superset") {
  const auto cs = CharSet::from_file(std::string(GRANARY_DATA_DIR) + "/charset.txt");
  CHECK(cs.size() > 300);
  for (char32_t c : std::u32string(U"aZé ßœąčřšžőűłșțαωабвгґєїё.,?!'0")) CHECK(cs.contains(c));
  CHECK_FALSE(cs.contains(U'中'));
  const auto punct = cs.punctuation();
  CHECK(punct.contains(U','));
  CHECK(punct.contains(U'?'));
  CHECK_FALSE(punct.contains(U'a'));
  CHECK_FALSE(punct.contains(U' '));
}

TEST_CASE("charset copies are independent") {
  auto a = CharSet::from_utf8("abc");
  auto b = a;
  b.insert(U'z');
  CHECK_FALSE(a.contains(U'z'));
  CHECK(b.contains(U'z'));
  b.insert(U'\U0001F600');
  CHECK(b.contains(U'\U0001F600'));
  CHECK(b.size() == 5);
}

TEST_CASE("languages") {
  CHECK(kLanguages.size() == 25);
  CHECK(is_supported_language("mt"));
  CHECK_FALSE(is_supported_language("ja"));
  CHECK(language_name("uk") == "Ukrainian");
}

// --- manifest -------------------------------------------------------------

TEST_CASE("read_manifest: two well-formed lines in order") {
  std::istringstream in(
      R"({"id":"a","audio_filepath":"x.wav","duration":1.5,"lang_target":"fr","text":"un"})"
      "\n"
      R"({"id":"b","audio_filepath":"y.wav","duration":2,"lang_target":"fr"})"
      "\n");
  const auto recs = read_manifest(in);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].id == "a");
  CHECK(recs[0].text == "un");
  CHECK(recs[1].duration_s == 2.0);
}

TEST_CASE("read_manifest: empty stream") {
  std::istringstream in("");
  std::vector<ManifestError> errors;
  CHECK(read_manifest(in, &errors).empty());
  CHECK(errors.empty());
}

TEST_CASE("read_manifest: malformed line 2 is reported, stream continues") {
  std::istringstream in(
      R"({"id":"a","audio_filepath":"x.wav","duration":1,"lang_target":"en"})"
      "\n{not json\n"
      R"({"id":"c","audio_filepath":"z.wav","duration":3,"lang_target":"en"})"
      "\n");
  std::vector<ManifestError> errors;
  const auto recs = read_manifest(in, &errors);
  CHECK(recs.size() == 2);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].line_no == 2);
  CHECK(errors[0].raw == "{not json");
}

TEST_CASE("parse_record rejects nulls, wrong types and missing required fields") {
  CHECK_THROWS_AS(parse_record(R"({"id":"a","audio_filepath":"x","duration":null})"), Error);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","audio_filepath":"x"})"), Error);
  CHECK_THROWS_AS(parse_record(R"({"id":"a","audio_filepath":"x","duration":"3"})"), Error);
  CHECK_THROWS_AS(parse_record(R"([1,2])"), Error);
  try {
    parse_record("{");
  } catch (const Error& e) {
    CHECK(e.code() == "malformed_line");
  }
}

TEST_CASE("missing ids are synthesized from audio, offset and duration") {
  const auto a = parse_record(R"({"audio_filepath":"x.wav","offset":1.25,"duration":3,"lang_target":"en"})");
  const auto b = parse_record(R"({"audio_filepath":"x.wav","offset":1.25,"duration":3,"lang_target":"de"})");
  const auto c = parse_record(R"({"audio_filepath":"x.wav","offset":1.5,"duration":3,"lang_target":"en"})");
  CHECK_FALSE(a.id.empty());
  CHECK(a.id == b.id);
  CHECK(a.id != c.id);
  CHECK(a.id == synthesize_id("x.wav", 1.25, 3.0));
}

TEST_CASE("unknown fields pass through verbatim and in order") {
  const std::string line =
      R"({"id":"a","audio_filepath":"x.wav","duration":1,"lang_target":"en","speaker":{"name":"z","n":[1,2]},"zeta":true})";
  const auto r = parse_record(line);
  const auto out = serialize_record(r);
  CHECK(out.find(R"("speaker":{"name":"z","n":[1,2]},"zeta":true)") != std::string::npos);
  CHECK(parse_record(out) == r);
}

TEST_CASE("optional fields are omitted, never null") {
  UtteranceRecord r;
  r.id = "a";
  r.audio_ref = "x";
  r.duration_s = 1;
  r.lang_target = "en";
  const auto s = serialize_record(r);
  CHECK(s.find("null") == std::string::npos);
  CHECK(s.find("lid_prob") == std::string::npos);
  CHECK(s.find("flags") == std::string::npos);
}

TEST_CASE("float serialization is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(3.0) == "3");
  CHECK(format_double(1e-7) == "1e-07");
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    double v;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

namespace {

UtteranceRecord random_record(std::mt19937_64& rng, std::size_t i) {
  std::uniform_real_distribution<double> u(0.0, 100.0);
  UtteranceRecord r;
  r.id = "id-" + std::to_string(i);
  r.audio_ref = "/a/b c/\"q\"\\" + std::to_string(rng() % 1000) + ".wav";
  r.offset_s = u(rng);
  r.duration_s = u(rng) + 1e-9;
  r.text = oracle::encode(std::u32string{U'h', U'é', U'\n', U'中', U'\t', U'\U0001F600', U'"', U'\x01'});
  r.lang_target = kLanguages[rng() % kLanguages.size()].code;
  r.corpus = i % 2 ? "YTC" : "";
  if (rng() % 2) {
    r.lid_pred = "de";
    r.lid_prob = u(rng) / 100.0;
    r.segment_lids = std::vector<std::string>{"de", "fr"};
  }
  if (rng() % 3 == 0) r.text_restored = "Hé.";
  if (rng() % 3 == 0) r.flags = {"pnc_reverted", "oversize_span"};
  if (rng() % 4 == 0) {
    r.src_text = "a";
    r.tgt_text = "b";
    r.src_lang = "de";
    r.tgt_lang = "en";
    r.qe_score = u(rng) / 100.0;
  }
  if (rng() % 5 == 0) {
    r.spans = std::vector<SegmentSpan>{{0.0, 1.5, std::nullopt}, {2.0, u(rng) + 2.5, std::string("t")}};
  }
  if (rng() % 5 == 0) r.extra["custom"] = {{"k", static_cast<int>(i)}};
  return r;
}

}  // namespace

TEST_CASE("write then read is the identity for 10,000 randomized records") {
  std::mt19937_64 rng(11);
  std::vector<UtteranceRecord> recs;
  for (std::size_t i = 0; i < 10000; ++i) recs.push_back(random_record(rng, i));
  std::stringstream io;
  CHECK(write_manifest(recs, io) == recs.size());
  const auto back = read_manifest(io);
  REQUIRE(back.size() == recs.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) mismatches += !(back[i] == recs[i]);
  CHECK(mismatches == 0);
}

TEST_CASE("write_manifest: one record is one line; zero records is empty") {
  std::mt19937_64 rng(1);
  std::stringstream one;
  write_manifest({random_record(rng, 0)}, one);
  const auto s = one.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == 1);
  std::stringstream none;
  CHECK(write_manifest({}, none) == 0);
  CHECK(none.str().empty());
}

TEST_CASE("write failure reports the partial count") {
  std::mt19937_64 rng(1);
  std::vector<UtteranceRecord> recs{random_record(rng, 0), random_record(rng, 1)};
  std::ostringstream sink;
  ManifestWriter w(sink);
  w.write(recs[0]);
  sink.setstate(std::ios::badbit);
  try {
    w.write(recs[1]);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.written() == 1);
  }
}

TEST_CASE("validate_record") {
  UtteranceRecord r;
  r.id = "a";
  r.audio_ref = "x.wav";
  r.duration_s = 5.0;
  r.lid_prob = 0.9;
  r.lang_target = "fr";
  CHECK(validate_record(r).passed());

  auto bad = r;
  bad.duration_s = -1.0;
  auto d = validate_record(bad);
  CHECK_FALSE(d.passed());
  CHECK(d.flags == std::set<std::string>{"invalid_record"});
  CHECK_FALSE(d.causes.empty());

  bad = r;
  bad.lid_prob = 1.3;
  CHECK(validate_record(bad).flags.count("invalid_record"));

  bad = r;
  bad.duration_s = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(validate_record(bad).passed());

  bad = r;
  bad.lang_target = "ja";
  CHECK_FALSE(validate_record(bad).passed());
}

TEST_CASE("corpus stats") {
  CorpusStats s;
  s.add_unfiltered("YODAS", "de", 2.0);
  s.add_unfiltered("YODAS", "fr", 2.0);
  s.add_filtered("YODAS", "de", 1.5);
  CHECK(s.total().retention_rate() == doctest::Approx(0.375));
  CHECK(s.per_key().at({"YODAS", "fr"}).retention_rate() == 0.0);
  CHECK(s.consistent());
  CorpusStats t;
  t.add_unfiltered("YTC", "de", 1.0);
  s.merge(t);
  CHECK(s.per_language().at("de").unfiltered_hours == 3.0);
  CHECK(s.per_corpus().size() == 2);
  CorpusStats bad;
  bad.add_filtered("a", "b", 1.0);
  CHECK_FALSE(bad.consistent());
}
