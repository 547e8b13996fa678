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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lmaug/error.h"
#include "lmaug/eval.h"
#include "lmaug/segmenter.h"

using namespace lmaug;

namespace {

// Minimal edit count by unrestricted recursive search over edit operations.
std::uint64_t brute_edits(const Sentence& r, std::size_t i, const Sentence& h, std::size_t j) {
  if (i == r.size()) return h.size() - j;
  if (j == h.size()) return r.size() - i;
  std::uint64_t best = 1 + brute_edits(r, i + 1, h, j);          // delete
  best = std::min(best, 1 + brute_edits(r, i, h, j + 1));        // insert
  best = std::min(best, (r[i] != h[j]) + brute_edits(r, i + 1, h, j + 1));
  return best;
}

Sentence random_sentence(std::mt19937& rng, int max_len) {
  Sentence s;
  for (int i = 0, n = rng() % (max_len + 1); i < n; ++i) s.push_back(std::string(1, char('a' + rng() % 3)));
  return s;
}

// Two-sided exact p by enumerating every sign pattern of the ranks.
double enumerate_p(const std::vector<double>& d) {
  std::vector<double> nz;
  for (double x : d)
    if (x != 0) nz.push_back(x);
  const int n = static_cast<int>(nz.size());
  std::vector<double> rank(n);
  for (int i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(nz[j]) < std::abs(nz[i])) ++less;
      if (std::abs(nz[j]) == std::abs(nz[i])) ++equal;
    }
    rank[i] = less + (equal + 1) / 2.0;
  }
  double total = 0, plus = 0;
  for (int i = 0; i < n; ++i) {
    total += rank[i];
    if (nz[i] > 0) plus += rank[i];
  }
  const double w = std::min(plus, total - plus);
  std::uint64_t hits = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double p = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) p += rank[i];
    if (std::min(p, total - p) <= w + 1e-9) ++hits;
  }
  return static_cast<double>(hits) / std::ldexp(1.0, n);
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("wer basics") {
    SentenceMap ref{{"u1", {"a", "b", "c"}}};
    CHECK(wer(ref, ref).wer == 0.0);
    auto r = wer(ref, SentenceMap{{"u1", {"a", "x", "c"}}});
    CHECK(r.wer == doctest::Approx(100.0 / 3));
    CHECK(r.totals.substitutions == 1);
    CHECK_THROWS_AS(wer(ref, SentenceMap{{"u2", {"a"}}}), Error);
    auto missing = wer(ref, SentenceMap{});
    CHECK(missing.totals.deletions == 3);
  }

  TEST_CASE("alignment prefers substitution, then insertion, then deletion") {
    auto c = align({"a", "b"}, {"c"});
    CHECK(c.substitutions == 1);
    CHECK(c.deletions == 1);
    auto i = align({"a"}, {"b", "c"});
    CHECK(i.substitutions == 1);
    CHECK(i.insertions == 1);
    auto e = align({}, {"x", "y"});
    CHECK(e.insertions == 2);
  }

  TEST_CASE("alignment equals exhaustive minimal edit search") {
    std::mt19937 rng(19);
    for (int t = 0; t < 20; ++t) {
      auto r = random_sentence(rng, 6), h = random_sentence(rng, 6);
      auto c = align(r, h);
      CHECK(c.errors() == brute_edits(r, 0, h, 0));
      CHECK(c.ref_len == r.size());
      // Consistency of the decomposition.
      CHECK(c.substitutions + c.deletions <= r.size());
      CHECK(h.size() + c.deletions == r.size() + c.insertions);
      // Symmetric cost.
      CHECK(align(h, r).errors() == c.errors());
    }
  }

  TEST_CASE("werr arithmetic") {
    CHECK(std::abs(werr(21.9, 21.3) - 2.7) <= 0.1);
    CHECK(std::abs(werr(21.9, 22.5) + 2.7) <= 0.1);
    CHECK(werr(13.0, 13.0) == 0.0);
    CHECK_THROWS_AS(werr(0.0, 1.0), Error);
    for (double b : {5.0, 21.9, 40.0})
      for (double n : {1.0, 21.3, 50.0}) CHECK(std::abs(b * (1 - werr(b, n) / 100) - n) < 1e-9);
  }

  TEST_CASE("reference and n-best files") {
    std::istringstream refs("u2\tb c\r\nu1\ta\n\n");
    auto r = read_references(refs);
    CHECK(r.size() == 2);
    CHECK(r.at("u2") == Sentence{"b", "c"});
    std::istringstream nb("u1\t1\t-1.5\t-2\ta b\nu1\t2\t-1.75\t-1\ta c\nu0\t1\t0\t0\tz\n");
    auto n = read_nbest(nb);
    REQUIRE(n.size() == 2);
    CHECK(n[0].utterance_id == "u0");
    CHECK(n[1].hypotheses[1].tokens == Sentence{"a", "c"});
    std::stringstream out;
    write_nbest(out, n);
    auto again = read_nbest(out);
    CHECK(again[1].hypotheses[1].acoustic_score == -1.75);
    std::istringstream gap("u1\t1\t0\t0\ta\nu1\t3\t0\t0\tb\n");
    CHECK_THROWS_WITH_AS(read_nbest(gap), doctest::Contains("line 2"), ParseError);
    std::istringstream nan("u1\t1\tnan\t0\ta\n");
    CHECK_THROWS_AS(read_nbest(nan), ParseError);
  }

  TEST_CASE("rescoring selects by hand-computed totals") {
    NBestSet set{{"u", {{1, -10.0, -5.0, {"x"}}, {2, -10.5, -3.0, {"y"}}, {3, -11.0, -1.0, {"z"}}}}};
    // Toy LM: log10 scores by first token.
    SentenceScorer lm = [](const Sentence& s) {
      if (s[0] == "x") return -4.0;
      if (s[0] == "y") return -3.0;
      return -2.5;
    };
    // lm_scale 0: acoustic argmax.
    CHECK(rescore_nbest(set, lm, {0.0, {}}).at("u") == Sentence{"x"});
    // lm_scale 1: totals -14, -13.5, -13.5 -> tie, lower rank wins.
    CHECK(rescore_nbest(set, lm, {1.0, {}}).at("u") == Sentence{"y"});
    // lm_scale 2: -18, -16.5, -16 -> z.
    CHECK(rescore_nbest(set, lm, {2.0, {}}).at("u") == Sentence{"z"});
    // Mixture with lambda 0 uses the stored scores: -15, -13.5, -12.
    CHECK(rescore_nbest(set, lm, {1.0, 0.0}).at("u") == Sentence{"z"});
    // lambda 0.5 for x: log10(0.5e-4 + 0.5e-5).
    const double mixed = rescore_total(set[0].hypotheses[0], -4.0, {1.0, 0.5});
    CHECK(mixed == doctest::Approx(-10.0 + std::log10(0.5e-4 + 0.5e-5)).epsilon(1e-12));
    // Single hypothesis lists are identity.
    NBestSet single{{"v", {{1, -3.0, -3.0, {"q"}}}}};
    CHECK(rescore_nbest(single, lm, {2.0, 0.3}).at("v") == Sentence{"q"});
    NBestSet empty{{"w", {}}};
    CHECK_THROWS_AS(rescore_nbest(empty, lm, {}), Error);
  }

  TEST_CASE("weight search") {
    SentenceScorer lm = [](const Sentence& s) { return s.back() == "good" ? -1.0 : -3.0; };
    // Correct hypothesis first by acoustics everywhere: lm_scale 0 wins the tie.
    NBestSet clean{{"a", {{1, -1.0, 0.0, {"w", "good"}}, {2, -2.0, 0.0, {"w", "bad"}}}}};
    SentenceMap refs{{"a", {"w", "good"}}, {"b", {"w", "good"}}};
    auto s0 = optimize_rescore_weights(clean, lm, refs, false);
    CHECK(s0.weights.lm_scale == 0.0);
    CHECK(s0.dev_wer == 0.0);

    // Planted error: the acoustically best hypothesis is wrong by a margin
    // of 0.25; the LM gap is 2, so lm_scale > 0.125 fixes it and the
    // smallest grid value that does so is 0.2.
    NBestSet planted{{"a", {{1, -1.0, 0.0, {"w", "bad"}}, {2, -1.25, 0.0, {"w", "good"}}}},
                     {"b", {{1, -1.0, 0.0, {"w", "good"}}, {2, -1.5, 0.0, {"w", "bad"}}}}};
    auto s = optimize_rescore_weights(planted, lm, refs, false);
    CHECK(s.weights.lm_scale == doctest::Approx(0.2));
    CHECK(s.dev_wer == 0.0);
    // Independent re-scoring with the returned weights agrees.
    CHECK(wer(refs, rescore_nbest(planted, lm, s.weights)).wer == s.dev_wer);
    auto zero = wer(refs, rescore_nbest(planted, lm, {0.0, {}})).wer;
    CHECK(s.dev_wer <= zero);
    auto sl = optimize_rescore_weights(planted, lm, refs, true);
    CHECK(sl.weights.lambda.has_value());
    CHECK(sl.dev_wer == 0.0);
  }

  TEST_CASE("morph hypotheses are desegmented before scoring") {
    SentenceMap refs{{"u", {"házban", "van"}}};
    Sentence morphs{"ház", "+ban", "van"};
    CHECK(wer(refs, SentenceMap{{"u", morphs}}).wer > 0.0);
    CHECK(wer(refs, SentenceMap{{"u", desegment(morphs)}}).wer == 0.0);
    NBestSet nb{{"u", {{1, 0.0, 0.0, morphs}}}};
    SentenceScorer lm = [](const Sentence&) { return 0.0; };
    auto s = optimize_rescore_weights(nb, lm, refs, false, [](const Sentence& m) { return desegment(m); });
    CHECK(s.dev_wer == 0.0);
  }

  TEST_CASE("wilcoxon exact path") {
    std::vector<double> z(10, 1.0);
    auto same = wilcoxon_signed_rank(z, z);
    CHECK(same.p_value == 1.0);
    CHECK(same.n_effective == 0);

    std::vector<double> a{3, 4, 5, 6, 7, 8, 9, 10}, b(8, 0.0);
    auto r = wilcoxon_signed_rank(a, b);
    CHECK(r.n_effective == 8);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(0.0078125).epsilon(1e-12));

    std::mt19937 rng(31);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> x(15), y(15), d(15);
      for (int i = 0; i < 15; ++i) {
        x[i] = rng() % 7;
        y[i] = rng() % 7;
        d[i] = x[i] - y[i];
      }
      auto w = wilcoxon_signed_rank(x, y);
      CHECK(w.exact);
      CHECK(w.p_value == doctest::Approx(enumerate_p(d)).epsilon(1e-12));
      CHECK(w.p_value >= 2.0 / std::ldexp(1.0, w.n_effective) - 1e-15);
      CHECK(w.p_value <= 1.0);
    }
    CHECK_THROWS_AS(wilcoxon_signed_rank(a, std::vector<double>{1.0}), Error);
  }

  TEST_CASE("wilcoxon p is monotone in the statistic") {
    // n = 10 distinct magnitudes; flipping more of the small ranks to the
    // negative side raises W = min(W+, W-) and must not lower p.
    std::vector<double> zero(10, 0.0);
    double prev = 0.0;
    for (int neg = 0; neg <= 5; ++neg) {
      std::vector<double> d;
      for (int i = 1; i <= 10; ++i) d.push_back(i <= neg ? -i : i);
      auto r = wilcoxon_signed_rank(d, zero);
      CHECK(r.p_value >= prev);
      prev = r.p_value;
    }
  }

  TEST_CASE("wilcoxon normal approximation") {
    // Reference values from a standard statistics package (tie and
    // continuity corrected, two-sided).
    std::vector<double> a{4, 4, 0, 4, 2, 3, 3, 1, 5, 0, 1, 2, 3, 2, 0, 0, 0, 0, 0, 5, 1, 3, 4, 1, 1, 2, 1, 5, 1, 5};
    std::vector<double> b{4, 5, 0, 2, 3, 2, 3, 4, 3, 0, 5, 3, 5, 1, 2, 5, 1, 0, 2, 4, 0, 5, 2, 1, 3, 5, 5, 5, 1, 0};
    auto r = wilcoxon_signed_rank(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.n_effective == 22);
    CHECK(r.statistic == 77.0);
    CHECK(r.p_value == doctest::Approx(0.10760634195928707).epsilon(1e-9));
  }
}
