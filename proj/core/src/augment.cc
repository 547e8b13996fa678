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

#include "lmaug/augment.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "lmaug/error.h"
#include "lmaug/generate.h"
#include "lmaug/interpolate.h"
#include "lmaug/lstm_train.h"
#include "lmaug/mkn.h"
#include "lmaug/ngram.h"
#include "lmaug/prune.h"

namespace lmaug {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

// Runs one stage, turning any failure into a StageError.
template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

BackoffModel estimate(const Corpus& text, const Vocabulary& vocab, int order, int threads) {
  return estimate_mkn(count_ngrams(text, vocab, order, threads));
}

ModelScores score(const BackoffModel& m, const PreparedCorpora& c) {
  return {m.ngram_count(), perplexity(m, c.dev).ppl, perplexity(m, c.eval).ppl};
}

std::string short_count(std::uint64_t n) {
  if (n >= 1000000 && n % 100000 == 0)
    return n % 1000000 == 0 ? fmt::format("{}M", n / 1000000) : fmt::format("{:.1f}M", n / 1e6);
  if (n >= 1000 && n % 100 == 0)
    return n % 1000 == 0 ? fmt::format("{}K", n / 1000) : fmt::format("{:.1f}K", n / 1e3);
  return std::to_string(n);
}

}  // namespace

double AugmentationReport::relative_reduction() const {
  return 100.0 * (baseline.eval_ppl - merged.eval_ppl) / baseline.eval_ppl;
}

WordCorpora load_corpora(const PipelineConfig& config) {
  for (const auto* p : {&config.corpus.train, &config.corpus.dev, &config.corpus.eval})
    if (p->empty()) throw Error("corpus.train, corpus.dev and corpus.eval must be set");
  WordCorpora c{read_corpus(config.corpus.train), read_corpus(config.corpus.dev),
                read_corpus(config.corpus.eval)};
  if (config.corpus.train_tokens > 0)
    c.train = subsample(c.train, config.corpus.train_tokens,
                        stage_seed(config.seed, SeedStage::kSubsample))
                  .sentences;
  return c;
}

PreparedCorpora prepare_corpora(const PipelineConfig& config, const Corpus& train_words,
                                const Corpus& dev_words, const Corpus& eval_words) {
  PreparedCorpora p;
  p.token_type = config.augment.token_type;
  const Corpus* train = &train_words;
  const Corpus* dev = &dev_words;
  const Corpus* eval = &eval_words;
  Corpus seg_train, seg_dev, seg_eval;
  std::size_t vocab_size = config.corpus.word_vocab_size;
  if (p.token_type == TokenType::kMorph) {
    SegmenterConfig sc = config.segmenter;
    sc.seed = stage_seed(config.seed, SeedStage::kSegmenter);
    p.segmenter = train_segmenter(count_words(train_words), sc);
    seg_train = segment_corpus(*p.segmenter, train_words);
    seg_dev = segment_corpus(*p.segmenter, dev_words);
    seg_eval = segment_corpus(*p.segmenter, eval_words);
    train = &seg_train, dev = &seg_dev, eval = &seg_eval;
    vocab_size = config.corpus.morph_vocab_size;
  }
  p.vocab = build_vocabulary(*train, vocab_size);
  p.train = apply_vocabulary(*train, p.vocab);
  p.dev = apply_vocabulary(*dev, p.vocab);
  p.eval = apply_vocabulary(*eval, p.vocab);
  return p;
}

BackoffModel size_match(const BackoffModel& model, const BackoffModel& reference) {
  return prune_to_size(model, reference.ngram_count());
}

AugmentationReport run_augmentation(const PipelineConfig& config, const PreparedCorpora& corpora,
                                    const AugmentOptions& options) {
  if (corpora.train.empty() || corpora.dev.empty() || corpora.eval.empty())
    throw StageError("prepare", "train, dev and eval corpora must be non-empty");
  const auto& dir = options.output_dir;
  const bool persist = !dir.empty();
  if (persist) {
    std::filesystem::create_directories(dir);
    auto cfg = open_out(dir / "config.cfg");
    dump_config(cfg, config);
    corpora.vocab.save(dir / "vocab.txt");
  }
  const int order = config.ngram.order;

  AugmentationReport r;
  r.label = options.label.empty() ? to_string(corpora.token_type) : options.label;
  r.token_type = corpora.token_type;
  r.train_tokens = token_count(corpora.train);
  r.vocab_size = corpora.vocab.size();
  std::vector<std::pair<std::string, double>> timing;

  auto t = Clock::now();
  BackoffModel baseline = stage("baseline", [&] {
    auto m = estimate(corpora.train, corpora.vocab, order, config.threads);
    if (persist) save_arpa(m, dir / "baseline.arpa");
    return m;
  });
  timing.emplace_back("baseline", seconds_since(t));
  spdlog::info("[{}] baseline: {} n-grams", r.label, baseline.ngram_count());

  BackoffModel merged = baseline;
  if (config.augment.gen_tokens > 0) {
    t = Clock::now();
    LstmLm lm = stage("rnn-train", [&] {
      if (options.pretrained) {
        if (!options.pretrained->vocab.same_tokens(corpora.vocab))
          throw Error("pretrained LSTM vocabulary differs from the corpus vocabulary");
        LstmLm m = *options.pretrained;
        r.rnn_dev_ppl = std::exp(
            evaluate_xent(m.config, m.params, flatten_corpus(corpora.dev, m.vocab), m.config.batch_size));
        return m;
      }
      LstmLm m;
      m.config = config.neural;
      m.config.vocab_size = static_cast<int>(corpora.vocab.size());
      m.config.seed = stage_seed(config.seed, SeedStage::kNeural);
      m.vocab = corpora.vocab;
      auto result = train_lstm(m.config, flatten_corpus(corpora.train, m.vocab),
                               flatten_corpus(corpora.dev, m.vocab));
      m.params = std::move(result.params);
      r.rnn_epochs = static_cast<int>(result.log.epochs.size());
      r.rnn_dev_ppl = std::exp(result.log.best_dev_xent);
      if (persist) {
        auto log = open_out(dir / "rnn_train.jsonl");
        result.log.write(log);
      }
      return m;
    });
    if (persist) stage("rnn-train", [&] { lm.save(dir / "rnn.lstm"); return 0; });
    timing.emplace_back("rnn-train", seconds_since(t));

    t = Clock::now();
    Corpus generated = stage("generate", [&] {
      GenerateOptions g;
      g.n_tokens = config.augment.gen_tokens;
      g.temperature = config.augment.temperature;
      g.seed = stage_seed(config.seed, SeedStage::kGenerate);
      g.lanes = config.augment.gen_lanes;
      auto text = generate_text(lm, g);
      if (persist) write_corpus(dir / "generated.txt", text);
      return text;
    });
    r.generation_seconds = seconds_since(t);
    timing.emplace_back("generate", r.generation_seconds);
    r.gen_tokens = token_count(generated);
    spdlog::info("[{}] generated {} tokens in {:.1f}s", r.label, r.gen_tokens, r.generation_seconds);

    t = Clock::now();
    BackoffModel rnn = stage("rnn-bnlm", [&] {
      auto m = estimate(generated, corpora.vocab, order, config.threads);
      const auto& budget = config.augment.size_budget;
      if (budget.kind == SizeBudget::Kind::kBaseline) {
        r.size_budget = baseline.ngram_count();
        m = size_match(m, baseline);
      } else if (budget.kind == SizeBudget::Kind::kCount) {
        r.size_budget = budget.count;
        m = prune_to_size(m, budget.count);
      }
      if (persist) save_arpa(m, dir / "rnn_bnlm.arpa");
      return m;
    });
    generated.clear();
    timing.emplace_back("rnn-bnlm", seconds_since(t));

    t = Clock::now();
    merged = stage("interpolate", [&] {
      auto spec = optimize_lambda(baseline, rnn, corpora.dev, config.ngram.lambda_tolerance);
      r.lambda = spec.lambda;
      return interpolate(baseline, rnn, spec.lambda);
    });
    timing.emplace_back("interpolate", seconds_since(t));
    spdlog::info("[{}] lambda {:.4f}", r.label, r.lambda);
    r.rnn_bnlm = stage("evaluate", [&] { return score(rnn, corpora); });
  }

  stage("merge", [&] {
    if (persist) save_arpa(merged, dir / "merged.arpa");
    return 0;
  });
  t = Clock::now();
  stage("evaluate", [&] {
    r.baseline = score(baseline, corpora);
    r.merged = score(merged, corpora);
    return 0;
  });
  timing.emplace_back("evaluate", seconds_since(t));

  if (persist) {
    stage("report", [&] {
      auto txt = open_out(dir / "report.txt");
      write_report_table(txt, {r});
      auto tsv = open_out(dir / "report.tsv");
      write_report_tsv(tsv, {r});
      auto tim = open_out(dir / "timing.tsv");
      tim << "stage\tseconds\n";
      for (const auto& [name, s] : timing) tim << name << '\t' << fmt::format("{:.3f}", s) << '\n';
      return 0;
    });
  }
  return r;
}

std::vector<std::uint64_t> ablation_sizes(const std::vector<double>& fractions,
                                          std::uint64_t full_tokens) {
  std::vector<std::uint64_t> out;
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw Error("ablation fractions must be in (0, 1]");
    out.push_back(std::max<std::uint64_t>(1, std::llround(f * static_cast<double>(full_tokens))));
  }
  return out;
}

int ablation_epochs(int max_epochs, int cap, std::uint64_t full_tokens, std::uint64_t size) {
  if (size == 0) throw Error("ablation size must be positive");
  if (size >= full_tokens || cap <= max_epochs) return max_epochs;
  const std::uint64_t scaled = (static_cast<std::uint64_t>(max_epochs) * full_tokens + size - 1) / size;
  return static_cast<int>(std::min<std::uint64_t>(scaled, static_cast<std::uint64_t>(cap)));
}

std::vector<AugmentationReport> ablate_corpus_size(const PipelineConfig& config,
                                                   const Corpus& train_words,
                                                   const Corpus& dev_words,
                                                   const Corpus& eval_words,
                                                   const std::vector<std::uint64_t>& sizes,
                                                   const std::filesystem::path& output_dir) {
  if (sizes.empty()) throw Error("no ablation sizes given");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] >= sizes[i - 1]) throw Error("ablation sizes must be strictly descending");
  const std::uint64_t full = token_count(train_words);
  std::vector<AugmentationReport> reports;
  for (std::uint64_t size : sizes) {
    PipelineConfig c = config;
    Corpus train = train_words;
    if (size < full) {
      c.corpus.train_tokens = size;
      c.neural.max_epochs = ablation_epochs(config.neural.max_epochs, config.augment.ablation_max_epochs, full, size);
      train = subsample(train_words, size, stage_seed(config.seed, SeedStage::kSubsample)).sentences;
    }
    spdlog::info("ablation: {} training tokens", token_count(train));
    auto prepared = stage("prepare", [&] { return prepare_corpora(c, train, dev_words, eval_words); });
    AugmentOptions opt;
    opt.label = fmt::format("{} {}", to_string(c.augment.token_type), short_count(token_count(train)));
    if (!output_dir.empty()) opt.output_dir = output_dir / fmt::format("size-{}", size);
    reports.push_back(run_augmentation(c, prepared, opt));
  }
  if (!output_dir.empty()) {
    auto txt = open_out(output_dir / "ablation.txt");
    write_ablation_table(txt, reports);
    auto tsv = open_out(output_dir / "ablation.tsv");
    write_report_tsv(tsv, reports);
  }
  return reports;
}

void write_report_table(std::ostream& out, const std::vector<AugmentationReport>& reports) {
  out << fmt::format("{:<32} {:>12} {:>10} {:>10}\n", "Model", "# of n-grams", "Dev PPL", "Eval PPL");
  for (const auto& r : reports) {
    out << fmt::format("{} ({} training tokens, vocabulary {})\n", r.label, r.train_tokens, r.vocab_size);
    auto row = [&](const std::string& name, const ModelScores& s) {
      out << fmt::format("  {:<30} {:>12} {:>10.2f} {:>10.2f}\n", name, s.ngrams, s.dev_ppl, s.eval_ppl);
    };
    row("BNLM", r.baseline);
    if (r.rnn_bnlm) {
      const std::string gen = short_count(r.gen_tokens);
      row("RNN-BNLM " + gen, *r.rnn_bnlm);
      row("BNLM + RNN-BNLM " + gen, r.merged);
      out << fmt::format("  lambda {:.4f}", r.lambda);
      if (r.size_budget) out << fmt::format(", size budget {}", *r.size_budget);
      out << fmt::format(", LSTM dev PPL {:.2f}", r.rnn_dev_ppl);
      if (r.rnn_epochs > 0) out << fmt::format(" after {} epochs", r.rnn_epochs);
      out << fmt::format(", eval PPL reduction {:.2f}%\n", r.relative_reduction());
    }
  }
}

void write_report_tsv(std::ostream& out, const std::vector<AugmentationReport>& reports) {
  out << "label\ttoken_type\ttrain_tokens\tvocab_size\tgen_tokens\tmodel\tngrams\tdev_ppl\teval_ppl\tlambda\n";
  for (const auto& r : reports) {
    auto row = [&](const char* model, const ModelScores& s) {
      out << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.10g}\t{:.10g}\t{:.10g}\n", r.label,
                         to_string(r.token_type), r.train_tokens, r.vocab_size, r.gen_tokens, model,
                         s.ngrams, s.dev_ppl, s.eval_ppl, r.lambda);
    };
    row("bnlm", r.baseline);
    if (r.rnn_bnlm) row("rnn_bnlm", *r.rnn_bnlm);
    row("merged", r.merged);
  }
}

void write_ablation_table(std::ostream& out, const std::vector<AugmentationReport>& reports) {
  out << fmt::format("{:<20} {:>12} {:>12} {:>14} {:>12}\n", "Run", "Train tokens", "BNLM PPL",
                     "Augmented PPL", "Reduction %");
  for (const auto& r : reports)
    out << fmt::format("{:<20} {:>12} {:>12.2f} {:>14.2f} {:>12.2f}\n", r.label, r.train_tokens,
                       r.baseline.eval_ppl, r.merged.eval_ppl, r.relative_reduction());
}

}  // namespace lmaug
