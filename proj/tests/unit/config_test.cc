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

#include <set>
#include <sstream>

#include "doctest.h"
#include "lmaug/config.h"
#include "lmaug/error.h"

using namespace lmaug;

namespace {

PipelineConfig parse(const std::string& text, const std::filesystem::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("empty file gives the published defaults") {
    auto c = parse("# nothing here\n\n");
    CHECK(c.neural.layers == 2);
    CHECK(c.neural.embed_dim == 650);
    CHECK(c.neural.hidden_dim == 650);
    CHECK(c.neural.batch_size == 32);
    CHECK(c.neural.seq_len == 35);
    CHECK(c.neural.dropout_keep == 0.5);
    CHECK(c.neural.momentum == 0.9);
    CHECK(c.neural.lr_init == 1.0);
    CHECK(c.neural.patience == 3);
    CHECK(c.neural.clip_norm == 5.0);
    CHECK(c.ngram.order == 4);
    CHECK(c.corpus.word_vocab_size == 50000);
    CHECK(c.corpus.morph_vocab_size == 30000);
    CHECK(c.augment.token_type == TokenType::kMorph);
    CHECK(c.augment.gen_tokens == 5000000);
    CHECK(c == PipelineConfig{});
  }

  TEST_CASE("values and comments") {
    auto c = parse(
        "seed = 9  # trailing comment\n"
        "neural.hidden_dim=128\n"
        "augment.token_type = word\n"
        "augment.size_budget = baseline\n"
        "augment.ablation_fractions = 1, 0.5, 0.25\n"
        "augment.ablation_max_epochs = 12\n"
        "neural.lr_halving = false\n");
    CHECK(c.seed == 9);
    CHECK(c.neural.hidden_dim == 128);
    CHECK(c.augment.token_type == TokenType::kWord);
    CHECK(c.augment.size_budget.kind == SizeBudget::Kind::kBaseline);
    CHECK(c.augment.ablation_fractions == std::vector<double>{1.0, 0.5, 0.25});
    CHECK(c.augment.ablation_max_epochs == 12);
    CHECK_FALSE(c.neural.lr_halving);
    CHECK(parse("augment.size_budget = 12345\n").augment.size_budget.count == 12345);
  }

  TEST_CASE("errors name the key and line") {
    auto e = error_of("seed = 1\nneural.dropout_keep = 1.5\n");
    CHECK(e.find("line 2") != std::string::npos);
    CHECK(e.find("neural.dropout_keep") != std::string::npos);
    CHECK(e.find("(0, 1]") != std::string::npos);

    CHECK(error_of("neural.hiden_dim = 3\n").find("unknown key 'neural.hiden_dim'") != std::string::npos);
    CHECK(error_of("neural.hidden_dim = 12x\n").find("neural.hidden_dim") != std::string::npos);
    CHECK(error_of("neural.hidden_dim = 0\n").find("neural.hidden_dim") != std::string::npos);
    CHECK(error_of("ngram.order\n").find("line 1") != std::string::npos);
    CHECK(error_of("augment.token_type = bpe\n").find("augment.token_type") != std::string::npos);
    CHECK(error_of("augment.ablation_fractions = 1, 1\n").find("descending") != std::string::npos);
    CHECK(error_of("neural.momentum = nan\n").find("neural.momentum") != std::string::npos);
    CHECK(error_of("augment.size_budget = 0\n").find("augment.size_budget") != std::string::npos);
  }

  TEST_CASE("relative paths resolve against the config directory") {
    auto c = parse("corpus.train = data/train.txt\ncorpus.dev = /abs/dev.txt\n", "/etc/lmaug");
    CHECK(c.corpus.train == "/etc/lmaug/data/train.txt");
    CHECK(c.corpus.dev == "/abs/dev.txt");
    CHECK(c.output_dir == "/etc/lmaug/out");
    CHECK(parse("corpus.train = a.txt\n").corpus.train == "a.txt");
  }

  TEST_CASE("dump and parse round trip") {
    PipelineConfig c;
    c.seed = 77;
    c.corpus.train = "/x/train.txt";
    c.neural.dropout_keep = 0.35;
    c.neural.lr_init = 0.7;
    c.segmenter.corpus_weight = 1.0 / 3;
    c.augment.size_budget = SizeBudget::parse("98765");
    c.augment.temperature = 0.0;
    c.eval.search_lambda = true;
    std::ostringstream out;
    dump_config(out, c);
    CHECK(parse(out.str()) == c);

    // Every key appears exactly once.
    std::set<std::string> seen;
    std::istringstream lines(out.str());
    std::string line;
    while (std::getline(lines, line)) CHECK(seen.insert(line.substr(0, line.find(' '))).second);
    CHECK(seen.size() == config_keys().size());
  }

  TEST_CASE("command-line overrides") {
    PipelineConfig c;
    set_config_value(c, "neural.max_epochs", "7");
    CHECK(c.neural.max_epochs == 7);
    CHECK_THROWS_AS(set_config_value(c, "nope", "1"), Error);
    CHECK_THROWS_WITH_AS(set_config_value(c, "neural.patience", "-1"), doctest::Contains("neural.patience"), Error);
  }

  TEST_CASE("stage seeds are distinct and stable") {
    std::set<std::uint64_t> s;
    for (auto st : {SeedStage::kSubsample, SeedStage::kSegmenter, SeedStage::kNeural, SeedStage::kGenerate}) {
      s.insert(stage_seed(1, st));
      s.insert(stage_seed(2, st));
    }
    CHECK(s.size() == 8);
    CHECK(stage_seed(5, SeedStage::kNeural) == stage_seed(5, SeedStage::kNeural));
  }
}
