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

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "lmaug/error.h"
#include "lmaug/lstm_lm.h"

namespace lmaug {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little endian");

constexpr const char* kMagic = "lmaug-lstm 1";

struct Field {
  const char* name;
  std::function<std::string(const LstmConfig&)> get;
  std::function<void(LstmConfig&, const std::string&)> set;
};

template <class T>
Field field(const char* name, T LstmConfig::*member) {
  return {name,
          [member](const LstmConfig& c) {
            std::ostringstream s;
            s.precision(17);
            s << c.*member;
            return s.str();
          },
          [member](LstmConfig& c, const std::string& v) {
            std::istringstream s(v);
            s >> c.*member;
            if (!s || !s.eof()) throw Error("bad value '" + v + "'");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      field("layers", &LstmConfig::layers),
      field("embed_dim", &LstmConfig::embed_dim),
      field("hidden_dim", &LstmConfig::hidden_dim),
      field("batch_size", &LstmConfig::batch_size),
      field("seq_len", &LstmConfig::seq_len),
      field("dropout_keep", &LstmConfig::dropout_keep),
      field("momentum", &LstmConfig::momentum),
      field("lr_init", &LstmConfig::lr_init),
      field("lr_halving", &LstmConfig::lr_halving),
      field("patience", &LstmConfig::patience),
      field("max_epochs", &LstmConfig::max_epochs),
      field("clip_norm", &LstmConfig::clip_norm),
      field("init_scale", &LstmConfig::init_scale),
      field("vocab_size", &LstmConfig::vocab_size),
      field("seed", &LstmConfig::seed),
  };
  return f;
}

}  // namespace

void LstmLm::write(std::ostream& out) const {
  out << kMagic << '\n';
  for (const auto& f : fields()) out << f.name << ' ' << f.get(config) << '\n';
  out << "vocab " << vocab.size() << '\n';
  for (const auto& t : vocab.tokens()) out << t << '\n';
  for (const auto& b : params.blocks()) {
    out << "block " << b.name << ' ' << b.rows << ' ' << b.cols << '\n';
    out.write(reinterpret_cast<const char*>(b.data), static_cast<std::streamsize>(b.size * sizeof(float)));
    out << '\n';
  }
  if (!out) throw Error("failed to write LSTM checkpoint");
}

LstmLm LstmLm::read(std::istream& in) {
  std::string line;
  std::uint64_t n = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(std::string("unexpected end of file, expected ") + what, n + 1);
    ++n;
    return line;
  };
  if (next("header") != kMagic) throw ParseError("not an lmaug LSTM checkpoint", n);
  LstmLm lm;
  for (const auto& f : fields()) {
    std::istringstream s(next(f.name));
    std::string key, value;
    s >> key >> value;
    if (key != f.name) throw ParseError(std::string("expected config key '") + f.name + "'", n);
    try {
      f.set(lm.config, value);
    } catch (const Error& e) {
      throw ParseError(std::string(f.name) + ": " + e.what(), n);
    }
  }
  try {
    lm.config.validate();
  } catch (const Error& e) {
    throw ParseError(e.what(), n);
  }
  std::istringstream vs(next("vocab"));
  std::string key;
  std::size_t v = 0;
  vs >> key >> v;
  if (key != "vocab" || !vs) throw ParseError("expected 'vocab N'", n);
  if (v != static_cast<std::size_t>(lm.config.vocab_size))
    throw ParseError("vocabulary size " + std::to_string(v) + " does not match config vocab_size " +
                         std::to_string(lm.config.vocab_size), n);
  std::vector<std::string> tokens(v);
  for (auto& t : tokens) t = next("token");
  try {
    lm.vocab = Vocabulary::from_tokens(tokens);
  } catch (const Error& e) {
    throw ParseError(e.what(), n);
  }
  if (lm.vocab.size() != v) throw ParseError("vocabulary lacks special tokens", n);

  lm.params = LstmParams<float>::zeros(lm.config);
  for (auto& b : lm.params.blocks()) {
    std::istringstream bs(next("block"));
    std::string tag, name;
    int rows = -1, cols = -1;
    bs >> tag >> name >> rows >> cols;
    if (tag != "block" || name != b.name)
      throw ParseError("expected block '" + b.name + "'", n);
    if (rows != b.rows || cols != b.cols)
      throw ParseError("block " + b.name + " has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                           ", config implies " + std::to_string(b.rows) + "x" + std::to_string(b.cols), n);
    in.read(reinterpret_cast<char*>(b.data), static_cast<std::streamsize>(b.size * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(b.size * sizeof(float)))
      throw ParseError("truncated block " + b.name, n);
    for (std::size_t k = 0; k < b.size; ++k)
      if (!std::isfinite(b.data[k])) throw ParseError("non-finite value in block " + b.name, n);
    if (in.get() != '\n') throw ParseError("missing newline after block " + b.name, n);
  }
  return lm;
}

void LstmLm::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write(out);
}

LstmLm LstmLm::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read(in);
}

double lstm_sentence_logprob10(const LstmLm& lm, const Sentence& sentence) {
  const std::int32_t eos = static_cast<std::int32_t>(lm.vocab.eos());
  TokenMatrix in(sentence.size() + 1, 1), out(sentence.size() + 1, 1);
  in(0, 0) = eos;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto id = static_cast<std::int32_t>(lm.vocab.id_or_unk(sentence[i]));
    out(i, 0) = id;
    in(i + 1, 0) = id;
  }
  out(sentence.size(), 0) = eos;
  auto state = LstmState<float>::zeros(lm.config, 1);
  const double mean_nats = lstm_forward(lm.config, lm.params, in, out, state, ForwardOptions{});
  return -mean_nats * static_cast<double>(in.rows()) / std::log(10.0);
}

double lstm_perplexity(const LstmLm& lm, const Corpus& corpus) {
  if (corpus.empty()) throw Error("perplexity of an empty corpus");
  double total = 0.0, n = 0.0;
  for (const auto& s : corpus) {
    total += lstm_sentence_logprob10(lm, s);
    n += static_cast<double>(s.size() + 1);
  }
  return std::pow(10.0, -total / n);
}

}  // namespace lmaug
