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

#include "lmaug/lstm_train.h"

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "lmaug/error.h"
#include "spdlog/spdlog.h"

namespace lmaug {

std::vector<std::int32_t> flatten_corpus(const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<std::int32_t> out;
  out.reserve(token_count(corpus) + corpus.size() + 1);
  out.push_back(static_cast<std::int32_t>(vocab.eos()));
  for (const auto& s : corpus) {
    for (const auto& t : s) out.push_back(static_cast<std::int32_t>(vocab.id_or_unk(t)));
    out.push_back(static_cast<std::int32_t>(vocab.eos()));
  }
  return out;
}

void TrainLog::write(std::ostream& out) const {
  for (const auto& e : epochs) {
    nlohmann::json j{{"epoch", e.epoch},   {"train_xent", e.train_xent}, {"dev_xent", e.dev_xent},
                     {"lr", e.lr},         {"seconds", e.seconds}};
    out << j.dump() << '\n';
  }
  nlohmann::json s{{"stop_reason", stop_reason}, {"best_epoch", best_epoch},
                   {"best_dev_xent", best_dev_xent}};
  out << s.dump() << '\n';
}

TrainLog TrainLog::read(std::istream& in) {
  TrainLog log;
  std::string line;
  std::uint64_t n = 0;
  bool summary = false;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (j.contains("stop_reason")) {
        log.stop_reason = j.at("stop_reason").get<std::string>();
        log.best_epoch = j.at("best_epoch").get<int>();
        log.best_dev_xent = j.at("best_dev_xent").get<double>();
        summary = true;
      } else {
        EpochRecord e;
        e.epoch = j.at("epoch").get<int>();
        e.train_xent = j.at("train_xent").get<double>();
        e.dev_xent = j.at("dev_xent").get<double>();
        e.lr = j.at("lr").get<double>();
        e.seconds = j.at("seconds").get<double>();
        log.epochs.push_back(e);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad training log record: ") + e.what(), n);
    }
  }
  if (!summary) throw ParseError("training log has no summary record", 0);
  return log;
}

TrainingSchedule::TrainingSchedule(double lr_init, int patience, bool halving, int max_epochs)
    : lr_(lr_init), patience_(patience), halving_(halving), max_epochs_(max_epochs) {}

void TrainingSchedule::record(double dev_loss) {
  if (should_stop()) throw Error("training schedule already stopped");
  ++epochs_;
  halved_ = false;
  if (!std::isfinite(dev_loss)) {
    stop_reason_ = "non-finite validation loss";
    return;
  }
  if (epochs_ > 1 && halving_ && dev_loss > prev_loss_) {
    lr_ *= 0.5;
    halved_ = true;
  }
  prev_loss_ = dev_loss;
  if (epochs_ == 1 || dev_loss < best_loss_) {
    best_loss_ = dev_loss;
    best_epoch_ = epochs_;
    wait_ = 0;
  } else {
    if (wait_ >= patience_) stop_reason_ = "early stopping";
    ++wait_;
  }
  if (!should_stop() && epochs_ >= max_epochs_) stop_reason_ = "max epochs";
}

LaneLayout lane_layout(std::size_t stream_size, int max_lanes) {
  if (stream_size < 2) throw Error("token stream too short");
  LaneLayout l;
  l.lanes = static_cast<int>(std::min<std::size_t>(max_lanes, stream_size - 1));
  l.length = (stream_size - 1) / l.lanes;
  return l;
}

namespace {

// Iterates the seq_len windows of a lane layout.
struct Windows {
  const std::vector<std::int32_t>& stream;
  LaneLayout layout;
  int seq_len;

  std::size_t count() const { return (layout.length + seq_len - 1) / seq_len; }

  void get(std::size_t w, TokenMatrix& in, TokenMatrix& out) const {
    const std::size_t start = w * seq_len;
    const int steps = static_cast<int>(std::min<std::size_t>(seq_len, layout.length - start));
    in.resize(steps, layout.lanes);
    out.resize(steps, layout.lanes);
    for (int b = 0; b < layout.lanes; ++b) {
      const std::size_t base = b * layout.length + start;
      for (int t = 0; t < steps; ++t) {
        in(t, b) = stream[base + t];
        out(t, b) = stream[base + t + 1];
      }
    }
  }
};

}  // namespace

double evaluate_xent(const LstmConfig& config, const LstmParams<float>& params,
                     const std::vector<std::int32_t>& stream, int lanes) {
  Windows win{stream, lane_layout(stream.size(), lanes), config.seq_len};
  auto state = LstmState<float>::zeros(config, win.layout.lanes);
  double total = 0.0, n = 0.0;
  TokenMatrix in, out;
  for (std::size_t w = 0; w < win.count(); ++w) {
    win.get(w, in, out);
    double loss = lstm_forward(config, params, in, out, state, ForwardOptions{});
    total += loss * static_cast<double>(in.size());
    n += static_cast<double>(in.size());
  }
  return total / n;
}

TrainResult train_lstm(const LstmConfig& config, const std::vector<std::int32_t>& train_stream,
                       const std::vector<std::int32_t>& dev_stream, const TrainOptions& options) {
  config.validate();
  if (dev_stream.size() < 2) throw Error("validation corpus is empty");
  Windows win{train_stream, lane_layout(train_stream.size(), config.batch_size), config.seq_len};

  TrainResult result;
  auto params = LstmParams<float>::init(config);
  auto velocity = LstmParams<float>::zeros(config);
  LstmParams<float> grads = LstmParams<float>::zeros(config);
  result.params = params;
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  TrainingSchedule schedule(config.lr_init, config.patience, config.lr_halving, config.max_epochs);
  LstmCache<float> cache;
  TokenMatrix in, out;

  while (!schedule.should_stop()) {
    const auto t0 = std::chrono::steady_clock::now();
    const float lr = static_cast<float>(schedule.lr());
    const float mu = static_cast<float>(config.momentum);
    auto state = LstmState<float>::zeros(config, win.layout.lanes);
    double total = 0.0, n = 0.0;
    for (std::size_t w = 0; w < win.count(); ++w) {
      win.get(w, in, out);
      const double loss = lstm_forward(config, params, in, out, state, ForwardOptions{true, &rng}, &cache);
      if (!std::isfinite(loss)) throw Error("training loss is not finite");
      lstm_backward(config, params, cache, grads);
      clip_gradients(grads, config.clip_norm);
      auto pb = params.blocks();
      auto vb = velocity.blocks();
      auto gb = grads.blocks();
      for (std::size_t b = 0; b < pb.size(); ++b) {
        Eigen::Map<Eigen::ArrayXf> p(pb[b].data, pb[b].size), v(vb[b].data, vb[b].size),
            g(gb[b].data, gb[b].size);
        v = mu * v - lr * g;
        p += v;
      }
      total += loss * static_cast<double>(in.size());
      n += static_cast<double>(in.size());
    }
    EpochRecord rec;
    rec.epoch = schedule.epochs() + 1;
    rec.train_xent = total / n;
    rec.dev_xent = evaluate_xent(config, params, dev_stream, config.batch_size);
    if (options.dev_loss_override) rec.dev_xent = options.dev_loss_override(rec.epoch, rec.dev_xent);
    rec.lr = lr;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    schedule.record(rec.dev_xent);
    if (schedule.last_was_best()) result.params = params;
    result.log.epochs.push_back(rec);
    spdlog::info("epoch {}: train {:.4f} dev {:.4f} lr {:g} ({:.1f}s)", rec.epoch, rec.train_xent,
                 rec.dev_xent, rec.lr, rec.seconds);
    if (options.on_epoch) options.on_epoch(rec);
  }
  result.log.stop_reason = schedule.stop_reason();
  result.log.best_epoch = schedule.best_epoch();
  result.log.best_dev_xent = schedule.best_loss();
  return result;
}

}  // namespace lmaug
