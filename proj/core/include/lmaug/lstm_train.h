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
//
// Stateful LSTM training: SGD with momentum over truncated-BPTT windows of
// a corpus stream split into parallel lanes, validation after every epoch,
// learning-rate halving and early stopping.

#ifndef LMAUG_LSTM_TRAIN_H_
#define LMAUG_LSTM_TRAIN_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lmaug/corpus.h"
#include "lmaug/lstm.h"

namespace lmaug {

// [</s>, s1..., </s>, s2..., </s>]; OOV tokens map to <unk>.
std::vector<std::int32_t> flatten_corpus(const Corpus& corpus, const Vocabulary& vocab);

struct EpochRecord {
  int epoch = 0;
  double train_xent = 0.0;  // nats/token
  double dev_xent = 0.0;
  double lr = 0.0;          // rate used during this epoch
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::string stop_reason;
  int best_epoch = 0;
  double best_dev_xent = 0.0;

  // One JSON object per line: an object per epoch, then a summary line.
  void write(std::ostream& out) const;
  static TrainLog read(std::istream& in);
};

// Learning-rate and early-stopping bookkeeping.  After each epoch record()
// takes the validation loss: the rate is halved when it rose above the
// previous epoch's, and training stops once `patience` consecutive epochs
// have failed to improve on the best loss and another one fails too
// (the counter is checked before it is incremented).
class TrainingSchedule {
 public:
  TrainingSchedule(double lr_init, int patience, bool halving, int max_epochs);

  void record(double dev_loss);

  double lr() const { return lr_; }  // for the next epoch
  bool should_stop() const { return !stop_reason_.empty(); }
  const std::string& stop_reason() const { return stop_reason_; }
  int epochs() const { return epochs_; }
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  bool last_was_best() const { return best_epoch_ == epochs_; }
  bool last_halved() const { return halved_; }

 private:
  double lr_;
  int patience_;
  bool halving_;
  int max_epochs_;
  int epochs_ = 0;
  int wait_ = 0;
  int best_epoch_ = 0;
  double best_loss_ = 0.0;
  double prev_loss_ = 0.0;
  bool halved_ = false;
  std::string stop_reason_;
};

struct TrainOptions {
  // Replaces the measured validation loss of an epoch (1-based).
  std::function<double(int epoch, double measured)> dev_loss_override;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  LstmParams<float> params;  // from the best validation epoch
  TrainLog log;
};

TrainResult train_lstm(const LstmConfig& config, const std::vector<std::int32_t>& train_stream,
                       const std::vector<std::int32_t>& dev_stream, const TrainOptions& options = {});

// Mean eval-mode cross-entropy (nats/token) over a stream, split into at
// most `lanes` lanes with state carried across seq_len windows.
double evaluate_xent(const LstmConfig& config, const LstmParams<float>& params,
                     const std::vector<std::int32_t>& stream, int lanes);

// Lane layout used by training and evaluation: lane b reads
// stream[b*len .. (b+1)*len] (inputs and shifted targets).
struct LaneLayout {
  int lanes = 0;
  std::size_t length = 0;  // predicted positions per lane
};
LaneLayout lane_layout(std::size_t stream_size, int max_lanes);

}  // namespace lmaug

#endif  // LMAUG_LSTM_TRAIN_H_
