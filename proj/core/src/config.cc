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

#include "lmaug/config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

#include "absl/strings/ascii.h"
#include "absl/strings/str_split.h"
#include "lmaug/error.h"

namespace lmaug {

std::string to_string(TokenType t) { return t == TokenType::kWord ? "word" : "morph"; }

TokenType parse_token_type(std::string_view s) {
  if (s == "word") return TokenType::kWord;
  if (s == "morph") return TokenType::kMorph;
  throw Error("token type must be 'word' or 'morph', got '" + std::string(s) + "'");
}

std::uint64_t stage_seed(std::uint64_t global_seed, SeedStage stage) {
  return global_seed * 1000003ULL + static_cast<std::uint64_t>(stage);
}

namespace {

template <class T>
T parse_integer(const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw Error("expected an integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d))
    throw Error("expected a finite number, got '" + v + "'");
  return d;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("expected true or false, got '" + v + "'");
}

std::string format_real(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

using Check = std::function<void(const PipelineConfig&)>;

struct Entry {
  std::string key;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
  Check check;
};

template <class T>
using Access = T& (*)(PipelineConfig&);

template <class T>
T& get_ref(Access<T> a, const PipelineConfig& c) {
  return a(const_cast<PipelineConfig&>(c));
}

template <class T>
Entry integer(std::string key, Access<T> a, T lo, T hi = std::numeric_limits<T>::max()) {
  return {key, [a](PipelineConfig& c, const std::string& v) { a(c) = parse_integer<T>(v); },
          [a](const PipelineConfig& c) { return std::to_string(get_ref(a, c)); },
          [a, lo, hi](const PipelineConfig& c) {
            const T v = get_ref(a, c);
            if (v < lo || v > hi)
              throw Error("must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
          }};
}

// Real in a range; open ends are marked by the flags.
Entry real(std::string key, Access<double> a, double lo, double hi, bool lo_open, bool hi_open) {
  return {key, [a](PipelineConfig& c, const std::string& v) { a(c) = parse_real(v); },
          [a](const PipelineConfig& c) { return format_real(get_ref(a, c)); },
          [a, lo, hi, lo_open, hi_open](const PipelineConfig& c) {
            const double v = get_ref(a, c);
            const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
            if (!ok) {
              std::string range = std::string(lo_open ? "(" : "[") + format_real(lo) + ", " +
                                  (std::isinf(hi) ? std::string("inf") : format_real(hi)) + (hi_open ? ")" : "]");
              throw Error("must be in " + range);
            }
          }};
}

Entry boolean(std::string key, Access<bool> a) {
  return {key, [a](PipelineConfig& c, const std::string& v) { a(c) = parse_bool(v); },
          [a](const PipelineConfig& c) { return std::string(get_ref(a, c) ? "true" : "false"); }, {}};
}

Entry text(std::string key, Access<std::string> a) {
  return {key, [a](PipelineConfig& c, const std::string& v) { a(c) = v; },
          [a](const PipelineConfig& c) { return get_ref(a, c); }, {}};
}

const double kInf = std::numeric_limits<double>::infinity();

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = [] {
    std::vector<Entry> v;
    v.push_back(integer<std::uint64_t>("seed", [](PipelineConfig& c) -> std::uint64_t& { return c.seed; }, 0));
    v.push_back(integer<int>("threads", [](PipelineConfig& c) -> int& { return c.threads; }, 1, 1024));
    v.push_back(text("output_dir", [](PipelineConfig& c) -> std::string& { return c.output_dir; }));

    v.push_back(text("corpus.train", [](PipelineConfig& c) -> std::string& { return c.corpus.train; }));
    v.push_back(text("corpus.dev", [](PipelineConfig& c) -> std::string& { return c.corpus.dev; }));
    v.push_back(text("corpus.eval", [](PipelineConfig& c) -> std::string& { return c.corpus.eval; }));
    v.push_back(integer<std::size_t>("corpus.word_vocab_size",
                                     [](PipelineConfig& c) -> std::size_t& { return c.corpus.word_vocab_size; }, 1));
    v.push_back(integer<std::size_t>("corpus.morph_vocab_size",
                                     [](PipelineConfig& c) -> std::size_t& { return c.corpus.morph_vocab_size; }, 1));
    v.push_back(integer<std::uint64_t>("corpus.train_tokens",
                                       [](PipelineConfig& c) -> std::uint64_t& { return c.corpus.train_tokens; }, 0));

    v.push_back(real("segmenter.corpus_weight",
                     [](PipelineConfig& c) -> double& { return c.segmenter.corpus_weight; }, 0, kInf, true, true));
    v.push_back(real("segmenter.convergence",
                     [](PipelineConfig& c) -> double& { return c.segmenter.convergence; }, 0, 1, false, true));
    v.push_back(integer<int>("segmenter.max_epochs",
                             [](PipelineConfig& c) -> int& { return c.segmenter.max_epochs; }, 1));

    v.push_back(integer<int>("ngram.order", [](PipelineConfig& c) -> int& { return c.ngram.order; }, 1, 9));
    v.push_back(real("ngram.lambda_tolerance",
                     [](PipelineConfig& c) -> double& { return c.ngram.lambda_tolerance; }, 0, 0.5, true, false));

    v.push_back(integer<int>("neural.layers", [](PipelineConfig& c) -> int& { return c.neural.layers; }, 1, 16));
    v.push_back(integer<int>("neural.embed_dim", [](PipelineConfig& c) -> int& { return c.neural.embed_dim; }, 1));
    v.push_back(integer<int>("neural.hidden_dim", [](PipelineConfig& c) -> int& { return c.neural.hidden_dim; }, 1));
    v.push_back(integer<int>("neural.batch_size", [](PipelineConfig& c) -> int& { return c.neural.batch_size; }, 1));
    v.push_back(integer<int>("neural.seq_len", [](PipelineConfig& c) -> int& { return c.neural.seq_len; }, 1));
    v.push_back(real("neural.dropout_keep", [](PipelineConfig& c) -> double& { return c.neural.dropout_keep; }, 0, 1,
                     true, false));
    v.push_back(real("neural.momentum", [](PipelineConfig& c) -> double& { return c.neural.momentum; }, 0, 1, false,
                     true));
    v.push_back(real("neural.lr_init", [](PipelineConfig& c) -> double& { return c.neural.lr_init; }, 0, kInf, true,
                     true));
    v.push_back(boolean("neural.lr_halving", [](PipelineConfig& c) -> bool& { return c.neural.lr_halving; }));
    v.push_back(integer<int>("neural.patience", [](PipelineConfig& c) -> int& { return c.neural.patience; }, 0));
    v.push_back(integer<int>("neural.max_epochs", [](PipelineConfig& c) -> int& { return c.neural.max_epochs; }, 1));
    v.push_back(real("neural.clip_norm", [](PipelineConfig& c) -> double& { return c.neural.clip_norm; }, 0, kInf, true,
                     true));
    v.push_back(real("neural.init_scale", [](PipelineConfig& c) -> double& { return c.neural.init_scale; }, 0, kInf,
                     true, true));

    v.push_back({"augment.token_type",
                 [](PipelineConfig& c, const std::string& s) { c.augment.token_type = parse_token_type(s); },
                 [](const PipelineConfig& c) { return to_string(c.augment.token_type); },
                 {}});
    v.push_back(integer<std::uint64_t>("augment.gen_tokens",
                                       [](PipelineConfig& c) -> std::uint64_t& { return c.augment.gen_tokens; }, 0));
    v.push_back(real("augment.temperature", [](PipelineConfig& c) -> double& { return c.augment.temperature; }, 0,
                     kInf, false, true));
    v.push_back(integer<int>("augment.gen_lanes", [](PipelineConfig& c) -> int& { return c.augment.gen_lanes; }, 1));
    v.push_back({"augment.size_budget",
                 [](PipelineConfig& c, const std::string& s) { c.augment.size_budget = SizeBudget::parse(s); },
                 [](const PipelineConfig& c) { return c.augment.size_budget.str(); },
                 {}});
    v.push_back({"augment.ablation_fractions",
                 [](PipelineConfig& c, const std::string& s) {
                   std::vector<double> f;
                   for (auto part : absl::StrSplit(s, ','))
                     f.push_back(parse_real(std::string(absl::StripAsciiWhitespace(part))));
                   c.augment.ablation_fractions = std::move(f);
                 },
                 [](const PipelineConfig& c) {
                   std::string out;
                   for (double f : c.augment.ablation_fractions) out += (out.empty() ? "" : ", ") + format_real(f);
                   return out;
                 },
                 [](const PipelineConfig& c) {
                   const auto& f = c.augment.ablation_fractions;
                   if (f.empty()) throw Error("must list at least one fraction");
                   for (std::size_t i = 0; i < f.size(); ++i) {
                     if (!(f[i] > 0.0 && f[i] <= 1.0)) throw Error("fractions must be in (0, 1]");
                     if (i > 0 && !(f[i] < f[i - 1])) throw Error("fractions must be strictly descending");
                   }
                 }});
    v.push_back(integer<int>("augment.ablation_max_epochs",
                             [](PipelineConfig& c) -> int& { return c.augment.ablation_max_epochs; }, 1));
    v.push_back(boolean("eval.search_lambda", [](PipelineConfig& c) -> bool& { return c.eval.search_lambda; }));
    return v;
  }();
  return e;
}

const Entry* find_entry(const std::string& key) {
  for (const auto& e : entries())
    if (e.key == key) return &e;
  return nullptr;
}

void resolve(std::string& path, const std::filesystem::path& base) {
  if (path.empty() || base.empty()) return;
  std::filesystem::path p(path);
  if (p.is_relative()) path = (base / p).lexically_normal().string();
}

}  // namespace

std::string SizeBudget::str() const {
  switch (kind) {
    case Kind::kNone:
      return "none";
    case Kind::kBaseline:
      return "baseline";
    case Kind::kCount:
      return std::to_string(count);
  }
  return "none";
}

SizeBudget SizeBudget::parse(std::string_view s) {
  SizeBudget b;
  if (s == "none") return b;
  if (s == "baseline") {
    b.kind = Kind::kBaseline;
    return b;
  }
  b.kind = Kind::kCount;
  b.count = parse_integer<std::uint64_t>(std::string(s));
  if (b.count == 0) throw Error("size budget must be positive");
  return b;
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
  const Entry* e = find_entry(key);
  if (!e) throw Error("unknown key '" + key + "'");
  try {
    e->set(config, value);
    if (e->check) e->check(config);
  } catch (const Error& err) {
    throw Error(key + ": " + err.what());
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.push_back(e.key);
  return out;
}

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    absl::string_view body = absl::StripAsciiWhitespace(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == absl::string_view::npos) throw ParseError("expected 'key = value'", n);
    std::string key(absl::StripAsciiWhitespace(body.substr(0, eq)));
    std::string value(absl::StripAsciiWhitespace(body.substr(eq + 1)));
    if (!find_entry(key)) throw ParseError("unknown key '" + key + "'", n);
    try {
      set_config_value(c, key, value);
    } catch (const Error& e) {
      throw ParseError(e.what(), n);
    }
  }
  resolve(c.corpus.train, base_dir);
  resolve(c.corpus.dev, base_dir);
  resolve(c.corpus.eval, base_dir);
  resolve(c.output_dir, base_dir);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_config(in, std::filesystem::absolute(path).parent_path());
}

void dump_config(std::ostream& out, const PipelineConfig& config) {
  for (const auto& e : entries()) out << e.key << " = " << e.get(config) << '\n';
}

}  // namespace lmaug
