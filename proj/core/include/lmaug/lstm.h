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
// Stacked LSTM language model: embedding -> dropout -> LSTM layers with
// dropout between them -> dropout -> softmax.  Activations are stored
// column-per-token (feature x (time * lanes)), time-major: column
// t * lanes + b is time step t of lane b.
//
// Gate rows of the layer weights are ordered i, f, g, o.

#ifndef LMAUG_LSTM_H_
#define LMAUG_LSTM_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lmaug {

struct LstmConfig {
  int layers = 2;
  int embed_dim = 650;
  int hidden_dim = 650;
  int batch_size = 32;
  int seq_len = 35;
  double dropout_keep = 0.5;
  double momentum = 0.9;
  double lr_init = 1.0;
  bool lr_halving = true;
  int patience = 3;
  int max_epochs = 40;
  double clip_norm = 5.0;
  double init_scale = 0.05;
  int vocab_size = 0;
  std::uint64_t seed = 0;

  // Throws Error naming the offending field.
  void validate() const;
  bool operator==(const LstmConfig&) const = default;
};

using TokenMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;  // time x lanes

template <class Real>
struct ParamBlock {
  std::string name;
  Real* data;
  std::size_t size;
  int rows, cols;
};

template <class Real>
struct LstmParams {
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  Mat embedding;            // embed x vocab, one column per word
  std::vector<Mat> wx;      // per layer: 4 hidden x input
  std::vector<Mat> wh;      // per layer: 4 hidden x hidden
  std::vector<Vec> bias;    // per layer: 4 hidden
  Mat out_w;                // vocab x hidden
  Vec out_b;                // vocab

  // Uniform(-scale, scale) weights, forget-gate biases 1, other biases and
  // the output bias drawn like the weights.
  static LstmParams init(const LstmConfig& config);
  static LstmParams zeros(const LstmConfig& config);

  std::vector<ParamBlock<Real>> blocks();
  std::vector<ParamBlock<const Real>> blocks() const;
  std::size_t size() const;
  void set_zero();

  template <class Other>
  LstmParams<Other> cast() const;
};

template <class Real>
struct LstmState {
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<Mat> h, c;  // per layer: hidden x lanes

  static LstmState zeros(const LstmConfig& config, int lanes);
  // Keeps only the listed lanes, in order.
  LstmState select_lanes(const std::vector<int>& lanes) const;
};

// Activations kept by forward() for backward().
template <class Real>
struct LstmCache {
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  int steps = 0, lanes = 0;
  TokenMatrix inputs, targets;
  std::vector<Mat> layer_in;      // dropped-out input of each layer
  std::vector<Mat> gates;         // activated i, f, g, o
  std::vector<Mat> cells;         // c_t
  std::vector<Mat> hidden;        // h_t
  std::vector<Mat> h0, c0;        // state before the window
  std::vector<Mat> masks;         // dropout masks: embedding, between layers, top
  Mat top;                        // dropped-out top hidden layer
  Mat probs;                      // softmax output, vocab x (steps * lanes)
};

struct ForwardOptions {
  bool train = false;
  std::mt19937_64* rng = nullptr;  // dropout masks, required when train
};

// Mean cross-entropy (nats/token) of `targets` given `inputs`; updates
// `state` to the final (h, c).  With a cache the softmax outputs and all
// activations are kept.  Throws on ids >= vocab_size.
template <class Real>
Real lstm_forward(const LstmConfig& config, const LstmParams<Real>& params, const TokenMatrix& inputs,
                  const TokenMatrix& targets, LstmState<Real>& state, const ForwardOptions& options,
                  LstmCache<Real>* cache = nullptr);

// Gradients of the mean cross-entropy of the cached window (truncated
// BPTT; the incoming state is treated as a constant).  Throws if a
// gradient is not finite, naming the block.
template <class Real>
void lstm_backward(const LstmConfig& config, const LstmParams<Real>& params,
                   const LstmCache<Real>& cache, LstmParams<Real>& grads);

// Rescales to a global L2 norm of at most max_norm; returns the norm before.
template <class Real>
double clip_gradients(LstmParams<Real>& grads, double max_norm);

// Output logits for one eval-mode step of every lane (vocab x lanes);
// advances state.
template <class Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> lstm_step_logits(
    const LstmConfig& config, const LstmParams<Real>& params,
    const std::vector<std::int32_t>& inputs, LstmState<Real>& state);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_block;
  std::size_t checked = 0;
};

// Small config used by the gradient check: V=7, embed 4, hidden 5, seq 6,
// batch 2.
LstmConfig gradient_check_config();

// Compares every analytic gradient entry with central differences
// (eps = 1e-5) in double precision, with dropout masks held fixed.
// Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradientCheckResult gradient_check(const LstmConfig& config, double eps = 1e-5);

}  // namespace lmaug

#endif  // LMAUG_LSTM_H_
