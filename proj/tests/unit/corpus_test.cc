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
//
// Copyright 2026 The lmaug Authors.

#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lmaug/corpus.h"
#include "lmaug/error.h"

using namespace lmaug;

TEST_SUITE("corpus") {
  TEST_CASE("tokenize splits on whitespace and keeps case") {
    auto c = normalize_and_tokenize("hát megbeszélem a nejemmel\n");
    REQUIRE(c.size() == 1);
    CHECK(c[0] == Sentence{"hát", "megbeszélem", "a", "nejemmel"});
    CHECK(normalize_and_tokenize("").empty());
    CHECK(normalize_and_tokenize("a  b\t c\n") == Corpus{{"a", "b", "c"}});
    CHECK(normalize_and_tokenize("\n\n  \nA b\n") == Corpus{{"A", "b"}});
    // U+3000 ideographic space and U+00A0 no-break space separate tokens.
    CHECK(normalize_and_tokenize("x\xe3\x80\x80y\xc2\xa0z") == Corpus{{"x", "y", "z"}});
  }

  TEST_CASE("invalid utf-8 reports byte offset") {
    std::string text = "ok line\nab\xff cd\n";
    try {
      normalize_and_tokenize(text);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.byte_offset() == 10);
    }
    CHECK(find_invalid_utf8("\xc0\xaf") == std::optional<std::size_t>(0));    // overlong
    CHECK(find_invalid_utf8("a\xed\xa0\x80") == std::optional<std::size_t>(1));  // surrogate
    CHECK(!find_invalid_utf8("árvíztűrő 😀").has_value());
  }

  TEST_CASE("vocabulary keeps most frequent with lexicographic ties") {
    auto v = build_vocabulary(Corpus{{"a", "b", "a"}}, 1);
    CHECK(v.contains("a"));
    CHECK_FALSE(v.contains("b"));
    CHECK(v.size() == 4);
    auto t = build_vocabulary(Corpus{{"b", "a"}}, 1);
    CHECK(t.contains("a"));
    CHECK_FALSE(t.contains("b"));
    CHECK_THROWS_AS(build_vocabulary(Corpus{}, 5), Error);
  }

  TEST_CASE("vocabulary ids are a bijection and specials are reserved") {
    Corpus c{{"x", "y", "<unk>", "z", "x"}};
    auto v = build_vocabulary(c, 2);
    CHECK(v.size() <= 2 + 3);
    std::set<WordId> ids;
    for (const auto& t : v.tokens()) ids.insert(*v.find(t));
    CHECK(ids.size() == v.size());
    CHECK(*ids.rbegin() == v.size() - 1);
    CHECK(v.token(v.unk()) == "<unk>");
    CHECK(v.token(v.bos()) == "<s>");
    CHECK(v.token(v.eos()) == "</s>");
    CHECK(v.contains("x"));
    CHECK(v == build_vocabulary(c, 2));
  }

  TEST_CASE("vocabulary file round trip") {
    auto v = build_vocabulary(Corpus{{"b", "c", "b", "a"}}, 10);
    std::stringstream ss;
    v.write(ss);
    auto r = Vocabulary::read(ss);
    CHECK(r == v);
    CHECK(r.same_tokens(v));
  }

  TEST_CASE("apply vocabulary maps oov to unk") {
    auto v = Vocabulary::from_tokens(std::vector<std::string>{"a", "b"});
    CHECK(apply_vocabulary(Corpus{{"a", "zzz", "b"}}, v) == Corpus{{"a", "<unk>", "b"}});
    CHECK(apply_vocabulary(Corpus{{"a", "b"}}, v) == Corpus{{"a", "b"}});
    CHECK(apply_vocabulary(Corpus{}, v).empty());
    CHECK(apply_vocabulary(Corpus{{"a"}}, v, true) == Corpus{{"a", "</s>"}});
  }

  TEST_CASE("subsample bounds and determinism") {
    std::mt19937 rng(7);
    Corpus c;
    std::size_t longest = 0;
    for (int i = 0; i < 500; ++i) {
      Sentence s(1 + rng() % 12, "w");
      longest = std::max(longest, s.size());
      c.push_back(s);
    }
    const auto total = token_count(c);
    for (std::uint64_t target : {1ull, 50ull, 700ull, 2000ull}) {
      auto r = subsample(c, target, 11);
      auto n = token_count(r.sentences);
      CHECK_FALSE(r.exhausted);
      CHECK(n >= target);
      CHECK(n <= target + longest);
      CHECK(subsample(c, target, 11).sentences == r.sentences);
    }
    CHECK(subsample(c, 700, 1).sentences != subsample(c, 700, 2).sentences);
    auto all = subsample(c, total + 1, 3);
    CHECK(all.exhausted);
    CHECK(all.sentences == c);
    CHECK(subsample(c, total, 3).sentences == c);
  }

  TEST_CASE("subsample keeps corpus order") {
    Corpus c;
    for (int i = 0; i < 100; ++i) c.push_back({std::to_string(i)});
    auto r = subsample(c, 30, 5).sentences;
    REQUIRE(r.size() == 30);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::stoi(r[i - 1][0]) < std::stoi(r[i][0]));
  }

  TEST_CASE("corpus statistics") {
    auto s = corpus_stats(Corpus{{"a", "a"}});
    CHECK(s.token_count == 2);
    CHECK(s.type_count == 1);
    CHECK(s.sentence_count == 1);
    CHECK(s.oov_rate == 0.0);
    auto v = Vocabulary::from_tokens(std::vector<std::string>{"a"});
    auto o = corpus_stats(Corpus{{"a", "b", "c", "a"}}, v);
    CHECK(o.oov_count == 2);
    CHECK(o.oov_rate == doctest::Approx(0.5));
  }

  TEST_CASE("applied vocabulary bounds type count") {
    Corpus c{{"p", "q", "r", "s", "p", "p", "q"}};
    auto v = build_vocabulary(c, 2);
    auto mapped = apply_vocabulary(c, v);
    for (const auto& s : mapped)
      for (const auto& t : s) CHECK(v.contains(t));
    CHECK(corpus_stats(mapped).type_count <= v.size());
  }

  TEST_CASE("token counts merge is order independent") {
    Corpus a{{"x", "y"}, {"x"}}, b{{"y", "z"}};
    TokenCounts ab, ba, whole;
    TokenCounts ca, cb;
    ca.add(a);
    cb.add(b);
    ab = ca;
    ab.merge(cb);
    ba = cb;
    ba.merge(ca);
    whole.add(a);
    whole.add(b);
    for (const auto* t : {&ab, &ba}) {
      CHECK(t->total() == whole.total());
      for (const auto& [w, n] : whole.counts()) CHECK(t->count(w) == n);
    }
  }

  TEST_CASE("utf8 boundaries are code point offsets") {
    CHECK(utf8_boundaries("héj") == std::vector<std::size_t>{0, 1, 3, 4});
  }
}
