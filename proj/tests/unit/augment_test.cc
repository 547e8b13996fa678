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

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/lm_checks.h"
#include "doctest.h"
#include "lmaug/augment.h"
#include "lmaug/error.h"
#include "lmaug/mkn.h"
#include "lmaug/ngram.h"

using namespace lmaug;
namespace fs = std::filesystem;

namespace {

Corpus load_public(const char* split, std::uint64_t tokens) {
  auto c = read_corpus(std::string(LMAUG_DATA_DIR) + "/sotu/" + split + ".txt");
  Corpus out;
  std::uint64_t n = 0;
  for (auto& s : c) {
    if (n >= tokens) break;
    n += s.size();
    out.push_back(std::move(s));
  }
  return out;
}

struct Words {
  Corpus train = load_public("train", 6000);
  Corpus dev = load_public("dev", 1200);
  Corpus eval = load_public("eval", 1200);
};

const Words& words() {
  static const Words w;
  return w;
}

PipelineConfig tiny(TokenType type) {
  PipelineConfig c;
  c.seed = 11;
  c.corpus.word_vocab_size = 3000;
  c.corpus.morph_vocab_size = 3000;
  c.ngram.order = 3;
  c.neural.layers = 1;
  c.neural.embed_dim = 16;
  c.neural.hidden_dim = 16;
  c.neural.batch_size = 8;
  c.neural.seq_len = 10;
  c.neural.max_epochs = 2;
  c.augment.token_type = type;
  c.augment.gen_tokens = 4000;
  c.augment.gen_lanes = 8;
  return c;
}

PreparedCorpora prepare(const PipelineConfig& c) {
  return prepare_corpora(c, words().train, words().dev, words().eval);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("lmaug-" + name + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace

TEST_SUITE("augment") {
  TEST_CASE("prepared corpora share one vocabulary") {
    auto c = tiny(TokenType::kMorph);
    auto p = prepare(c);
    REQUIRE(p.segmenter.has_value());
    CHECK(p.token_type == TokenType::kMorph);
    bool tagged = false;
    for (const auto& s : p.train)
      for (const auto& t : s) {
        CHECK(p.vocab.contains(t));
        tagged = tagged || t.front() == '+';
      }
    CHECK(tagged);
    for (const auto& s : p.eval)
      for (const auto& t : s) CHECK(p.vocab.contains(t));
    // Morph training text still spells the original words.
    CHECK(desegment(segment_corpus(*p.segmenter, words().train)) == words().train);

    auto w = prepare(tiny(TokenType::kWord));
    CHECK_FALSE(w.segmenter.has_value());
    CHECK(token_count(w.train) == token_count(words().train));
  }

  TEST_CASE("no generated text leaves the baseline unchanged") {
    auto c = tiny(TokenType::kWord);
    c.augment.gen_tokens = 0;
    auto r = run_augmentation(c, prepare(c));
    CHECK_FALSE(r.rnn_bnlm.has_value());
    CHECK(r.lambda == 1.0);
    CHECK(std::abs(r.merged.dev_ppl - r.baseline.dev_ppl) <= 1e-6);
    CHECK(std::abs(r.merged.eval_ppl - r.baseline.eval_ppl) <= 1e-6);
    CHECK(r.relative_reduction() == doctest::Approx(0.0));
  }

  TEST_CASE("pipeline artifacts reproduce the report") {
    TempDir a("augment-a"), b("augment-b");
    auto c = tiny(TokenType::kWord);
    auto prepared = prepare(c);
    AugmentOptions opt;
    opt.output_dir = a.path;
    auto r = run_augmentation(c, prepared, opt);
    REQUIRE(r.rnn_bnlm.has_value());
    CHECK(r.gen_tokens >= c.augment.gen_tokens);
    CHECK(r.rnn_epochs == 2);
    CHECK(r.lambda > 0.0);
    CHECK(r.lambda <= 1.0);
    CHECK(r.merged.ngrams <= r.baseline.ngrams + r.rnn_bnlm->ngrams);
    CHECK(r.merged.ngrams >= std::max(r.baseline.ngrams, r.rnn_bnlm->ngrams));

    for (const char* f : {"config.cfg", "vocab.txt", "baseline.arpa", "rnn.lstm", "rnn_train.jsonl",
                          "generated.txt", "rnn_bnlm.arpa", "merged.arpa", "report.txt", "report.tsv",
                          "timing.tsv"})
      CHECK_MESSAGE(fs::exists(a.path / f), f);

    // Persisted models give the reported perplexities.
    auto check = [&](const char* file, const ModelScores& s) {
      auto m = load_arpa(a.path / file);
      CHECK(m.ngram_count() == s.ngrams);
      CHECK(close_rel(perplexity(m, prepared.dev).ppl, s.dev_ppl, 1e-6));
      CHECK(close_rel(perplexity(m, prepared.eval).ppl, s.eval_ppl, 1e-6));
    };
    check("baseline.arpa", r.baseline);
    check("rnn_bnlm.arpa", *r.rnn_bnlm);
    check("merged.arpa", r.merged);
    CHECK(token_count(read_corpus(a.path / "generated.txt")) == r.gen_tokens);
    auto echoed = load_config(a.path / "config.cfg");
    CHECK(echoed.output_dir == (a.path / "out").string());
    echoed.output_dir = c.output_dir;
    CHECK(echoed == c);

    // A second run is byte-identical.
    opt.output_dir = b.path;
    auto r2 = run_augmentation(c, prepared, opt);
    for (const char* f : {"merged.arpa", "rnn_bnlm.arpa", "generated.txt", "report.txt", "report.tsv", "rnn.lstm"})
      CHECK_MESSAGE(slurp(a.path / f) == slurp(b.path / f), f);
    CHECK(r2.merged.eval_ppl == r.merged.eval_ppl);

    // Sampling from the saved LSTM instead of retraining gives the same models.
    TempDir d("augment-d");
    auto lm = LstmLm::load(a.path / "rnn.lstm");
    opt.pretrained = &lm;
    opt.output_dir = d.path;
    auto r3 = run_augmentation(c, prepared, opt);
    CHECK(slurp(a.path / "merged.arpa") == slurp(d.path / "merged.arpa"));
    CHECK(r3.rnn_dev_ppl == doctest::Approx(r.rnn_dev_ppl).epsilon(1e-5));
  }

  TEST_CASE("size budget matches the baseline") {
    auto c = tiny(TokenType::kWord);
    c.augment.gen_tokens = 12000;
    c.augment.size_budget = SizeBudget::parse("baseline");
    auto r = run_augmentation(c, prepare(c));
    REQUIRE(r.rnn_bnlm.has_value());
    REQUIRE(r.size_budget.has_value());
    CHECK(*r.size_budget == r.baseline.ngrams);
    CHECK(r.rnn_bnlm->ngrams <= r.baseline.ngrams);
  }

  TEST_CASE("size matching") {
    auto p = prepare(tiny(TokenType::kWord));
    auto big = estimate_mkn(count_ngrams(p.train, p.vocab, 3));
    Corpus half(p.train.begin(), p.train.begin() + p.train.size() / 3);
    auto small = estimate_mkn(count_ngrams(half, p.vocab, 3));
    REQUIRE(big.ngram_count() > small.ngram_count());

    auto same = size_match(small, big);
    CHECK(same.ngram_count() == small.ngram_count());
    std::ostringstream x, y;
    write_arpa(same, x);
    write_arpa(small, y);
    CHECK(x.str() == y.str());

    auto pruned = size_match(big, small);
    CHECK(pruned.ngram_count() <= small.ngram_count());
    CHECK(lmaug::testing::max_normalization_error(pruned) < 1e-6);
  }

  TEST_CASE("stage failures name the stage and keep earlier artifacts") {
    TempDir dir("augment-fail");
    auto c = tiny(TokenType::kWord);
    c.neural.seq_len = 0;
    AugmentOptions opt;
    opt.output_dir = dir.path;
    try {
      run_augmentation(c, prepare(tiny(TokenType::kWord)), opt);
      FAIL("expected a stage error");
    } catch (const StageError& e) {
      CHECK(e.stage() == "rnn-train");
      CHECK(std::string(e.what()).find("seq_len") != std::string::npos);
    }
    CHECK(fs::exists(dir.path / "baseline.arpa"));
    CHECK_FALSE(fs::exists(dir.path / "merged.arpa"));
  }

  TEST_CASE("corpus size ablation") {
    CHECK(ablation_sizes({1.0, 1.0 / 6, 1.0 / 34}, 517681) == std::vector<std::uint64_t>{517681, 86280, 15226});
    CHECK_THROWS_AS(ablation_sizes({0.0}, 10), Error);
    // ceil(8 * 517681 / 86280) = 49.
    CHECK(ablation_epochs(8, 100, 517681, 86280) == 49);
    CHECK(ablation_epochs(8, 40, 517681, 86280) == 40);
    CHECK(ablation_epochs(8, 40, 517681, 517681) == 8);
    CHECK(ablation_epochs(2, 40, 900, 300) == 6);
    CHECK(ablation_epochs(8, 4, 900, 300) == 8);
    CHECK_THROWS_AS(ablation_epochs(8, 40, 900, 0), Error);

    auto c = tiny(TokenType::kWord);
    c.augment.gen_tokens = 2000;
    const auto full = token_count(words().train);
    CHECK_THROWS_AS(ablate_corpus_size(c, words().train, words().dev, words().eval, {100, 200}), Error);

    auto single = ablate_corpus_size(c, words().train, words().dev, words().eval, {full});
    REQUIRE(single.size() == 1);
    auto direct = run_augmentation(c, prepare(c));
    CHECK(single[0].merged.eval_ppl == direct.merged.eval_ppl);
    CHECK(single[0].baseline.eval_ppl == direct.baseline.eval_ppl);
    CHECK(single[0].lambda == direct.lambda);

    TempDir dir("ablate");
    auto runs = ablate_corpus_size(c, words().train, words().dev, words().eval, {full, full / 3}, dir.path);
    REQUIRE(runs.size() == 2);
    CHECK(runs[1].train_tokens < runs[0].train_tokens);
    CHECK(runs[1].train_tokens >= full / 3);
    CHECK(runs[0].rnn_epochs == c.neural.max_epochs);
    CHECK(runs[1].rnn_epochs > runs[0].rnn_epochs);
    CHECK(fs::exists(dir.path / "ablation.txt"));
    CHECK(fs::exists(dir.path / ("size-" + std::to_string(full / 3)) / "merged.arpa"));
  }

  TEST_CASE("report layout") {
    AugmentationReport r;
    r.label = "morph";
    r.token_type = TokenType::kMorph;
    r.train_tokens = 1000;
    r.vocab_size = 50;
    r.gen_tokens = 5000000;
    r.baseline = {100, 20.0, 25.0};
    r.rnn_bnlm = ModelScores{80, 30.0, 35.0};
    r.merged = {150, 18.0, 20.0};
    r.lambda = 0.75;
    std::ostringstream txt, tsv;
    write_report_table(txt, {r});
    write_report_tsv(tsv, {r});
    CHECK(txt.str().find("BNLM + RNN-BNLM 5M") != std::string::npos);
    CHECK(txt.str().find("20.00%") != std::string::npos);
    CHECK(tsv.str() ==
          "label\ttoken_type\ttrain_tokens\tvocab_size\tgen_tokens\tmodel\tngrams\tdev_ppl\teval_ppl\tlambda\n"
          "morph\tmorph\t1000\t50\t5000000\tbnlm\t100\t20\t25\t0.75\n"
          "morph\tmorph\t1000\t50\t5000000\trnn_bnlm\t80\t30\t35\t0.75\n"
          "morph\tmorph\t1000\t50\t5000000\tmerged\t150\t18\t20\t0.75\n");
  }
}
