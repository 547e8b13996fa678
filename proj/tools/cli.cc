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

#include "cli.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "lmaug/augment.h"
#include "lmaug/backoff_model.h"
#include "lmaug/config.h"
#include "lmaug/corpus.h"
#include "lmaug/error.h"
#include "lmaug/eval.h"
#include "lmaug/generate.h"
#include "lmaug/interpolate.h"
#include "lmaug/lstm.h"
#include "lmaug/lstm_lm.h"
#include "lmaug/lstm_train.h"
#include "lmaug/mkn.h"
#include "lmaug/ngram.h"
#include "lmaug/prune.h"
#include "lmaug/segmenter.h"

#ifndef LMAUG_VERSION
#define LMAUG_VERSION "unknown"
#endif

namespace lmaug::cli {
namespace {

struct Globals {
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

// Options shared by the subcommands that take a pipeline configuration.
struct ConfigOptions {
  std::string path;
  std::vector<std::string> overrides;

  void add_to(CLI::App* app, bool required) {
    auto* o = app->add_option("--config", path, "Pipeline configuration file");
    if (required) o->required();
    o->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "Override a configuration value (key=value), repeatable");
  }

  PipelineConfig load(const Globals& g) const {
    PipelineConfig c = path.empty() ? PipelineConfig{} : load_config(path);
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
      set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) c.seed = *g.seed;
    c.threads = g.threads;
    return c;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

bool is_lstm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string head;
  std::getline(in, head);
  return head.rfind("lmaug-lstm", 0) == 0;
}

// An n-gram or LSTM model chosen by file contents.
struct AnyModel {
  std::optional<BackoffModel> ngram;
  std::optional<LstmLm> lstm;

  explicit AnyModel(const std::string& path) {
    if (is_lstm_file(path))
      lstm = LstmLm::load(path);
    else
      ngram = load_arpa(path);
  }
  SentenceScorer scorer() const { return ngram ? ngram_scorer(*ngram) : lstm_scorer(*lstm); }
};

std::string fmt_double(double v) { return fmt::format("{:.10g}", v); }

void print_report(std::ostream& out, const WerReport& r) {
  out << fmt::format("WER {:.2f}% ({} errors / {} words: {} sub, {} del, {} ins) over {} utterances\n", r.wer,
                     r.totals.errors(), r.totals.ref_len, r.totals.substitutions, r.totals.deletions,
                     r.totals.insertions, r.utterances.size());
}

SentenceMap desegment_all(const SentenceMap& m) {
  SentenceMap out;
  for (const auto& [id, s] : m) out[id] = desegment(s);
  return out;
}

std::uint64_t seed_for(const Globals& g, SeedStage stage) {
  return stage_seed(g.seed.value_or(PipelineConfig{}.seed), stage);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lmaug: back-off n-gram, LSTM and text-generation augmentation toolkit", "lmaug"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("lmaug ") + LMAUG_VERSION +
                           " (formats: ARPA back-off model, lmaug-lstm 1 checkpoint, morph lexicon 1)");
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads for counting (results do not depend on it)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--seed", g.seed, "Global seed; stage seeds are derived from it");

  std::function<void()> action;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    return s;
  };

  // corpus-stats
  std::string text, vocab_path, out_path, model_path;
  std::size_t size = 50000;
  auto* c = sub("corpus-stats", "Sentence, token, type and OOV counts of a corpus");
  c->add_option("--text", text, "Corpus file")->required()->check(CLI::ExistingFile);
  c->add_option("--vocab", vocab_path, "Vocabulary for the OOV rate")->check(CLI::ExistingFile);
  c->callback([&] {
    action = [&] {
      auto corpus = read_corpus(text);
      auto s = vocab_path.empty() ? corpus_stats(corpus) : corpus_stats(corpus, Vocabulary::load(vocab_path));
      out << "sentences " << s.sentence_count << "\ntokens " << s.token_count << "\ntypes " << s.type_count
          << '\n';
      if (!vocab_path.empty()) out << "oov " << s.oov_count << "\noov_rate " << fmt_double(s.oov_rate) << '\n';
    };
  });

  c = sub("vocab-build", "Vocabulary of the most frequent tokens");
  c->add_option("--text", text, "Corpus file")->required()->check(CLI::ExistingFile);
  c->add_option("--size", size, "Number of regular tokens to keep")->check(CLI::PositiveNumber);
  c->add_option("--out", out_path, "Output vocabulary file")->required();
  c->callback([&] {
    action = [&] {
      auto v = build_vocabulary(read_corpus(text), size);
      v.save(out_path);
      out << "vocabulary " << v.size() << '\n';
    };
  });

  std::uint64_t tokens = 0;
  c = sub("subsample", "Random sentence subset with a target token count");
  c->add_option("--text", text, "Corpus file")->required()->check(CLI::ExistingFile);
  c->add_option("--tokens", tokens, "Target token count")->required()->check(CLI::PositiveNumber);
  c->add_option("--out", out_path, "Output corpus")->required();
  c->callback([&] {
    action = [&] {
      auto r = subsample(read_corpus(text), tokens, seed_for(g, SeedStage::kSubsample));
      write_corpus(std::filesystem::path(out_path), r.sentences);
      out << "sentences " << r.sentences.size() << "\ntokens " << token_count(r.sentences) << '\n';
      if (r.exhausted) spdlog::warn("target exceeds the corpus; kept every sentence");
    };
  });

  SegmenterConfig seg;
  c = sub("seg-train", "Train an unsupervised morph segmentation model");
  c->add_option("--text", text, "Word corpus")->required()->check(CLI::ExistingFile);
  c->add_option("--out", out_path, "Output model")->required();
  c->add_option("--corpus-weight", seg.corpus_weight, "Weight of the corpus cost")->check(CLI::PositiveNumber);
  c->add_option("--max-epochs", seg.max_epochs, "Epoch limit")->check(CLI::PositiveNumber);
  c->add_option("--convergence", seg.convergence, "Relative cost improvement that ends training");
  c->callback([&] {
    action = [&] {
      seg.seed = seed_for(g, SeedStage::kSegmenter);
      auto m = train_segmenter(count_words(read_corpus(text)), seg);
      m.save(out_path);
      out << "morphs " << m.lexicon().size() << "\ncost_bits " << fmt_double(m.cost().total(seg.corpus_weight))
          << "\nepochs " << (m.epoch_costs().empty() ? 0 : m.epoch_costs().size() - 1) << '\n';
    };
  });

  c = sub("seg-apply", "Segment a word corpus into '+'-tagged morphs");
  c->add_option("--model", model_path, "Segmentation model")->required()->check(CLI::ExistingFile);
  c->add_option("--text", text, "Word corpus")->required()->check(CLI::ExistingFile);
  c->add_option("--out", out_path, "Output morph corpus")->required();
  c->callback([&] {
    action = [&] {
      auto morphs = segment_corpus(SegmentationModel::load(model_path), read_corpus(text));
      write_corpus(std::filesystem::path(out_path), morphs);
      out << "tokens " << token_count(morphs) << '\n';
    };
  });

  c = sub("deseg", "Join '+'-tagged morphs back into words");
  c->add_option("--text", text, "Morph corpus")->required()->check(CLI::ExistingFile);
  c->add_option("--out", out_path, "Output word corpus")->required();
  c->callback([&] {
    action = [&] {
      auto words = desegment(read_corpus(text));
      write_corpus(std::filesystem::path(out_path), words);
      out << "tokens " << token_count(words) << '\n';
    };
  });

  int order = 4;
  c = sub("ngram-train", "Estimate a modified Kneser-Ney back-off model");
  c->add_option("--text", text, "Training corpus")->required()->check(CLI::ExistingFile);
  c->add_option("--vocab", vocab_path, "Vocabulary file (default: built from the text)")->check(CLI::ExistingFile);
  c->add_option("--vocab-size", size, "Vocabulary size when building from the text")->check(CLI::PositiveNumber);
  c->add_option("--order", order, "Model order")->check(CLI::Range(1, 9));
  c->add_option("--out", out_path, "Output ARPA file")->required();
  c->callback([&] {
    action = [&] {
      auto corpus = read_corpus(text);
      auto v = vocab_path.empty() ? build_vocabulary(corpus, size) : Vocabulary::load(vocab_path);
      MknDiagnostics diag;
      auto m = estimate_mkn(count_ngrams(corpus, v, order, g.threads), &diag);
      save_arpa(m, out_path);
      for (int k = 1; k <= m.order(); ++k) out << "ngram " << k << ' ' << m.ngram_count(k) << '\n';
    };
  });

  std::optional<double> threshold;
  std::optional<std::size_t> max_ngrams;
  c = sub("ngram-prune", "Entropy-based pruning to a threshold or an n-gram budget");
  c->add_option("--model", model_path, "Input ARPA file")->required()->check(CLI::ExistingFile);
  auto* th = c->add_option("--threshold", threshold, "Relative entropy threshold");
  c->add_option("--max-ngrams", max_ngrams, "N-gram budget")->excludes(th);
  c->add_option("--out", out_path, "Output ARPA file")->required();
  c->callback([&] {
    action = [&] {
      if (!threshold && !max_ngrams) throw CLI::RequiredError("--threshold or --max-ngrams");
      auto m = load_arpa(model_path);
      PruneInfo info;
      auto p = threshold ? prune(m, *threshold, &info) : prune_to_size(m, *max_ngrams, &info);
      save_arpa(p, out_path);
      out << "threshold " << fmt_double(info.threshold) << "\nngrams_before " << info.ngrams_before
          << "\nngrams_after " << info.ngrams_after << '\n';
    };
  });

  std::string model_b, dev_path;
  std::optional<double> lambda;
  double tolerance = 1e-3;
  c = sub("ngram-interp", "Merge two back-off models by linear interpolation");
  c->add_option("--model-a", model_path, "First ARPA file")->required()->check(CLI::ExistingFile);
  c->add_option("--model-b", model_b, "Second ARPA file")->required()->check(CLI::ExistingFile);
  auto* lo = c->add_option("--lambda", lambda, "Weight of model A")->check(CLI::Range(0.0, 1.0));
  c->add_option("--dev", dev_path, "Dev corpus for choosing the weight")->excludes(lo)->check(CLI::ExistingFile);
  c->add_option("--tolerance", tolerance, "Weight search tolerance")->check(CLI::PositiveNumber);
  c->add_option("--out", out_path, "Output ARPA file")->required();
  c->callback([&] {
    action = [&] {
      if (!lambda && dev_path.empty()) throw CLI::RequiredError("--lambda or --dev");
      auto a = load_arpa(model_path), b = load_arpa(model_b);
      double l = lambda.value_or(0.0);
      if (!lambda) {
        auto spec = optimize_lambda(a, b, read_corpus(dev_path), tolerance);
        l = spec.lambda;
        out << "dev_ppl " << fmt_double(spec.dev_ppl) << '\n';
      }
      auto m = interpolate(a, b, l);
      save_arpa(m, out_path);
      out << "lambda " << fmt_double(l) << "\nngrams " << m.ngram_count() << '\n';
    };
  });

  c = sub("ppl", "Perplexity of a back-off or LSTM model on a corpus");
  c->add_option("--model", model_path, "ARPA file or LSTM checkpoint")->required()->check(CLI::ExistingFile);
  c->add_option("--text", text, "Corpus file")->required()->check(CLI::ExistingFile);
  c->callback([&] {
    action = [&] {
      auto corpus = read_corpus(text);
      AnyModel m(model_path);
      if (m.ngram) {
        auto r = perplexity(*m.ngram, corpus);
        out << "ppl " << fmt_double(r.ppl) << "\ntokens " << r.token_count << "\nlogprob " << fmt_double(r.logprob_total)
            << "\nsentences " << r.sentence_count << "\noov " << r.oov_count << '\n';
      } else {
        double total = 0.0;
        std::uint64_t n = 0;
        for (const auto& s : corpus) {
          total += lstm_sentence_logprob10(*m.lstm, s);
          n += s.size() + 1;
        }
        out << "ppl " << fmt_double(std::pow(10.0, -total / static_cast<double>(n))) << "\ntokens " << n
            << "\nlogprob " << fmt_double(total) << "\nsentences " << corpus.size() << '\n';
      }
    };
  });

  ConfigOptions cfg;
  std::string log_path;
  c = sub("rnn-train", "Train the LSTM language model");
  c->add_option("--train", text, "Training corpus")->required()->check(CLI::ExistingFile);
  c->add_option("--dev", dev_path, "Validation corpus")->required()->check(CLI::ExistingFile);
  c->add_option("--vocab", vocab_path, "Vocabulary file (default: built from the training corpus)")
      ->check(CLI::ExistingFile);
  c->add_option("--vocab-size", size, "Vocabulary size when building from the text")->check(CLI::PositiveNumber);
  c->add_option("--out", out_path, "Output checkpoint")->required();
  c->add_option("--log", log_path, "Training log (JSON lines)");
  cfg.add_to(c, false);
  c->callback([&] {
    action = [&] {
      auto config = cfg.load(g);
      auto train = read_corpus(text);
      LstmLm lm;
      lm.vocab = vocab_path.empty() ? build_vocabulary(train, size) : Vocabulary::load(vocab_path);
      lm.config = config.neural;
      lm.config.vocab_size = static_cast<int>(lm.vocab.size());
      lm.config.seed = stage_seed(config.seed, SeedStage::kNeural);
      auto r = train_lstm(lm.config, flatten_corpus(train, lm.vocab), flatten_corpus(read_corpus(dev_path), lm.vocab));
      lm.params = std::move(r.params);
      lm.save(out_path);
      if (!log_path.empty()) {
        auto f = open_out(log_path);
        r.log.write(f);
      }
      out << "epochs " << r.log.epochs.size() << "\nbest_epoch " << r.log.best_epoch << "\ndev_ppl "
          << fmt_double(std::exp(r.log.best_dev_xent)) << "\nstop " << r.log.stop_reason << '\n';
    };
  });

  GenerateOptions gen;
  c = sub("rnn-generate", "Sample text from an LSTM checkpoint");
  c->add_option("--model", model_path, "LSTM checkpoint")->required()->check(CLI::ExistingFile);
  c->add_option("--tokens", gen.n_tokens, "Tokens to generate")->required()->check(CLI::PositiveNumber);
  c->add_option("--temperature", gen.temperature, "Softmax temperature (0 = argmax)")->check(CLI::NonNegativeNumber);
  c->add_option("--lanes", gen.lanes, "Parallel sampling streams")->check(CLI::PositiveNumber);
  c->add_option("--max-sentence-tokens", gen.max_sentence_tokens, "Force a sentence break after this many tokens")
      ->check(CLI::PositiveNumber);
  c->add_option("--out", out_path, "Output corpus")->required();
  c->callback([&] {
    action = [&] {
      gen.seed = seed_for(g, SeedStage::kGenerate);
      auto text_out = generate_text(LstmLm::load(model_path), gen);
      write_corpus(std::filesystem::path(out_path), text_out);
      out << "sentences " << text_out.size() << "\ntokens " << token_count(text_out) << '\n';
    };
  });

  double eps = 1e-5;
  c = sub("gradcheck", "Compare LSTM gradients with central finite differences");
  c->add_option("--eps", eps, "Finite-difference step")->check(CLI::PositiveNumber);
  c->callback([&] {
    action = [&] {
      auto r = gradient_check(gradient_check_config(), eps);
      out << "max_relative_error " << fmt::format("{:.3e}", r.max_relative_error) << "\nworst_block "
          << r.worst_block << "\nchecked " << r.checked << '\n';
      if (!(r.max_relative_error < 1e-4)) throw Error("gradient check failed");
    };
  });

  c = sub("augment", "Run the text-generation augmentation pipeline");
  cfg.add_to(c, true);
  c->callback([&] {
    action = [&] {
      auto config = cfg.load(g);
      auto words = load_corpora(config);
      auto prepared = prepare_corpora(config, words.train, words.dev, words.eval);
      AugmentOptions opt;
      opt.output_dir = config.output_dir;
      auto r = run_augmentation(config, prepared, opt);
      write_report_table(out, {r});
    };
  });

  c = sub("ablate", "Rerun the pipeline on subsampled training sets");
  cfg.add_to(c, true);
  c->callback([&] {
    action = [&] {
      auto config = cfg.load(g);
      auto words = load_corpora(config);
      auto sizes = ablation_sizes(config.augment.ablation_fractions, token_count(words.train));
      auto reports = ablate_corpus_size(config, words.train, words.dev, words.eval, sizes, config.output_dir);
      write_ablation_table(out, reports);
    };
  });

  std::string ref_path, hyp_path, hyp_b;
  bool deseg = false;
  c = sub("wer", "Word error rate of hypotheses against references");
  c->add_option("--ref", ref_path, "Reference file (id<TAB>tokens)")->required()->check(CLI::ExistingFile);
  c->add_option("--hyp", hyp_path, "Hypothesis file (id<TAB>tokens)")->required()->check(CLI::ExistingFile);
  c->add_flag("--desegment", deseg, "Join morphs into words before scoring");
  c->callback([&] {
    action = [&] {
      auto hyps = read_references(hyp_path);
      print_report(out, wer(read_references(ref_path), deseg ? desegment_all(hyps) : hyps));
    };
  });

  std::string dev_nbest, dev_ref;
  double lm_scale = 1.0;
  bool search_lambda = false;
  c = sub("rescore", "Rerank n-best lists with a new language model");
  c->add_option("--nbest", hyp_path, "N-best file")->required()->check(CLI::ExistingFile);
  c->add_option("--model", model_path, "ARPA file or LSTM checkpoint")->required()->check(CLI::ExistingFile);
  auto* ls = c->add_option("--lm-scale", lm_scale, "Language model scale")->check(CLI::NonNegativeNumber);
  c->add_option("--lambda", lambda, "Mix the new LM score with the first-pass one")->check(CLI::Range(0.0, 1.0));
  auto* dn = c->add_option("--dev-nbest", dev_nbest, "Dev n-best file for tuning the weights")
                 ->check(CLI::ExistingFile)
                 ->excludes(ls);
  auto* dr = c->add_option("--dev-ref", dev_ref, "Dev references")->check(CLI::ExistingFile);
  dn->needs(dr);
  dr->needs(dn);
  c->add_flag("--search-lambda", search_lambda, "Also tune the mixing weight on dev")->needs(dn);
  c->add_option("--ref", ref_path, "References for scoring the result")->check(CLI::ExistingFile);
  c->add_flag("--desegment", deseg, "Join morphs into words before scoring and output");
  c->add_option("--out", out_path, "Output hypotheses (id<TAB>tokens)");
  c->callback([&] {
    action = [&] {
      AnyModel m(model_path);
      auto scorer = m.scorer();
      RescoreWeights w;
      w.lm_scale = lm_scale;
      w.lambda = lambda;
      if (!dev_nbest.empty()) {
        std::function<Sentence(const Sentence&)> post;
        if (deseg) post = [](const Sentence& s) { return desegment(s); };
        auto best = optimize_rescore_weights(read_nbest(dev_nbest), scorer, read_references(dev_ref),
                                             search_lambda, post);
        w = best.weights;
        out << "lm_scale " << fmt_double(w.lm_scale) << '\n';
        if (w.lambda) out << "lambda " << fmt_double(*w.lambda) << '\n';
        out << "dev_wer " << fmt::format("{:.2f}", best.dev_wer) << '\n';
      }
      auto hyps = rescore_nbest(read_nbest(hyp_path), scorer, w);
      if (deseg) hyps = desegment_all(hyps);
      if (!out_path.empty()) {
        auto f = open_out(out_path);
        write_references(f, hyps);
      }
      if (!ref_path.empty()) print_report(out, wer(read_references(ref_path), hyps));
    };
  });

  c = sub("wilcoxon", "Wilcoxon signed-rank test on per-utterance errors of two systems");
  c->add_option("--ref", ref_path, "Reference file")->required()->check(CLI::ExistingFile);
  c->add_option("--hyp-a", hyp_path, "Hypotheses of system A")->required()->check(CLI::ExistingFile);
  c->add_option("--hyp-b", hyp_b, "Hypotheses of system B")->required()->check(CLI::ExistingFile);
  c->add_flag("--desegment", deseg, "Join morphs into words before scoring");
  c->callback([&] {
    action = [&] {
      auto refs = read_references(ref_path);
      auto load = [&](const std::string& p) {
        auto h = read_references(p);
        return wer(refs, deseg ? desegment_all(h) : h);
      };
      auto a = load(hyp_path), b = load(hyp_b);
      auto ea = error_counts(a), eb = error_counts(b);
      auto r = wilcoxon_signed_rank(ea, eb);
      out << "wer_a " << fmt::format("{:.2f}", a.wer) << "\nwer_b " << fmt::format("{:.2f}", b.wer) << "\nwerr "
          << fmt::format("{:.2f}", a.wer > 0 ? werr(a.wer, b.wer) : 0.0) << "\nstatistic " << fmt_double(r.statistic)
          << "\np_value " << fmt_double(r.p_value) << "\nn " << r.n_effective << "\nmethod "
          << (r.exact ? "exact" : "normal") << '\n';
    };
  });

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const CLI::App* failed = &app;
    for (const auto* s : app.get_subcommands()) failed = s;
    err << failed->help();
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace lmaug::cli
