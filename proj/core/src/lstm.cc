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

#include "lmaug/lstm.h"

#include <cmath>

#include "lmaug/error.h"

namespace lmaug {

void LstmConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw Error(std::string(name) + " must be >= 1");
  };
  positive(layers, "layers");
  positive(embed_dim, "embed_dim");
  positive(hidden_dim, "hidden_dim");
  positive(batch_size, "batch_size");
  positive(seq_len, "seq_len");
  positive(vocab_size, "vocab_size");
  positive(max_epochs, "max_epochs");
  if (!(dropout_keep > 0.0 && dropout_keep <= 1.0)) throw Error("dropout_keep must be in (0, 1]");
  if (!(lr_init > 0.0)) throw Error("lr_init must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error("momentum must be in [0, 1)");
  if (patience < 0) throw Error("patience must be >= 0");
  if (!(clip_norm > 0.0)) throw Error("clip_norm must be > 0");
  if (!(init_scale > 0.0)) throw Error("init_scale must be > 0");
}

template <class Real>
LstmParams<Real> LstmParams<Real>::zeros(const LstmConfig& config) {
  config.validate();
  const int h = config.hidden_dim;
  LstmParams p;
  p.embedding = Mat::Zero(config.embed_dim, config.vocab_size);
  for (int l = 0; l < config.layers; ++l) {
    const int in = l == 0 ? config.embed_dim : h;
    p.wx.push_back(Mat::Zero(4 * h, in));
    p.wh.push_back(Mat::Zero(4 * h, h));
    p.bias.push_back(Vec::Zero(4 * h));
  }
  p.out_w = Mat::Zero(config.vocab_size, h);
  p.out_b = Vec::Zero(config.vocab_size);
  return p;
}

template <class Real>
LstmParams<Real> LstmParams<Real>::init(const LstmConfig& config) {
  LstmParams p = zeros(config);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u(-config.init_scale, config.init_scale);
  for (auto& b : p.blocks())
    for (std::size_t i = 0; i < b.size; ++i) b.data[i] = static_cast<Real>(u(rng));
  const int h = config.hidden_dim;
  for (auto& b : p.bias) b.segment(h, h).setConstant(Real(1));
  return p;
}

template <class Real>
std::vector<ParamBlock<Real>> LstmParams<Real>::blocks() {
  std::vector<ParamBlock<Real>> out;
  auto add = [&](std::string name, auto& m) {
    out.push_back({std::move(name), m.data(), static_cast<std::size_t>(m.size()),
                   static_cast<int>(m.rows()), static_cast<int>(m.cols())});
  };
  add("embedding", embedding);
  for (std::size_t l = 0; l < wx.size(); ++l) {
    const std::string p = "layer" + std::to_string(l + 1) + ".";
    add(p + "wx", wx[l]);
    add(p + "wh", wh[l]);
    add(p + "bias", bias[l]);
  }
  add("output.w", out_w);
  add("output.b", out_b);
  return out;
}

template <class Real>
std::vector<ParamBlock<const Real>> LstmParams<Real>::blocks() const {
  std::vector<ParamBlock<const Real>> out;
  for (auto& b : const_cast<LstmParams*>(this)->blocks())
    out.push_back({b.name, b.data, b.size, b.rows, b.cols});
  return out;
}

template <class Real>
std::size_t LstmParams<Real>::size() const {
  std::size_t n = 0;
  for (const auto& b : blocks()) n += b.size;
  return n;
}

template <class Real>
void LstmParams<Real>::set_zero() {
  for (auto& b : blocks()) std::fill(b.data, b.data + b.size, Real(0));
}

template <class Real>
template <class Other>
LstmParams<Other> LstmParams<Real>::cast() const {
  LstmParams<Other> p;
  p.embedding = embedding.template cast<Other>();
  for (std::size_t l = 0; l < wx.size(); ++l) {
    p.wx.push_back(wx[l].template cast<Other>());
    p.wh.push_back(wh[l].template cast<Other>());
    p.bias.push_back(bias[l].template cast<Other>());
  }
  p.out_w = out_w.template cast<Other>();
  p.out_b = out_b.template cast<Other>();
  return p;
}

template <class Real>
LstmState<Real> LstmState<Real>::zeros(const LstmConfig& config, int lanes) {
  LstmState s;
  for (int l = 0; l < config.layers; ++l) {
    s.h.push_back(Mat::Zero(config.hidden_dim, lanes));
    s.c.push_back(Mat::Zero(config.hidden_dim, lanes));
  }
  return s;
}

template <class Real>
LstmState<Real> LstmState<Real>::select_lanes(const std::vector<int>& lanes) const {
  LstmState s;
  for (std::size_t l = 0; l < h.size(); ++l) {
    Mat hh(h[l].rows(), lanes.size()), cc(c[l].rows(), lanes.size());
    for (std::size_t j = 0; j < lanes.size(); ++j) {
      hh.col(j) = h[l].col(lanes[j]);
      cc.col(j) = c[l].col(lanes[j]);
    }
    s.h.push_back(std::move(hh));
    s.c.push_back(std::move(cc));
  }
  return s;
}

namespace {

template <class Real>
using MatT = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
MatT<Real> dropout_mask(int rows, int cols, double keep, std::mt19937_64& rng) {
  MatT<Real> m(rows, cols);
  std::bernoulli_distribution d(keep);
  const Real scale = static_cast<Real>(1.0 / keep);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng) ? scale : Real(0);
  return m;
}

// Column-wise softmax in place; returns nothing, columns sum to 1.
template <class Real>
void softmax_columns(MatT<Real>& z) {
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    auto col = z.col(j);
    const Real mx = col.maxCoeff();
    col = (col.array() - mx).exp();
    col /= col.sum();
  }
}

void check_ids(const TokenMatrix& ids, int vocab, const char* what) {
  for (Eigen::Index i = 0; i < ids.size(); ++i) {
    const auto id = ids.data()[i];
    if (id < 0 || id >= vocab)
      throw Error(std::string(what) + " id " + std::to_string(id) + " outside vocabulary of size " +
                  std::to_string(vocab));
  }
}

// Runs the LSTM layers and leaves the (dropped-out) top layer in `top`.
template <class Real>
void run_layers(const LstmConfig& config, const LstmParams<Real>& params, const TokenMatrix& inputs,
                LstmState<Real>& state, const ForwardOptions& options, LstmCache<Real>& cache) {
  const int steps = static_cast<int>(inputs.rows());
  const int lanes = static_cast<int>(inputs.cols());
  const int h = config.hidden_dim;
  const int cols = steps * lanes;
  const bool drop = options.train && config.dropout_keep < 1.0;
  if (options.train && drop && options.rng == nullptr) throw Error("train mode needs an rng");

  cache.steps = steps;
  cache.lanes = lanes;
  cache.layer_in.assign(config.layers, {});
  cache.gates.assign(config.layers, {});
  cache.cells.assign(config.layers, {});
  cache.hidden.assign(config.layers, {});
  cache.h0 = state.h;
  cache.c0 = state.c;
  cache.masks.clear();

  MatT<Real> x(config.embed_dim, cols);
  for (int t = 0; t < steps; ++t)
    for (int b = 0; b < lanes; ++b) x.col(t * lanes + b) = params.embedding.col(inputs(t, b));

  auto apply_dropout = [&](MatT<Real>& m) {
    if (!drop) return;
    cache.masks.push_back(dropout_mask<Real>(m.rows(), m.cols(), config.dropout_keep, *options.rng));
    m.array() *= cache.masks.back().array();
  };

  apply_dropout(x);
  for (int l = 0; l < config.layers; ++l) {
    MatT<Real> z = params.wx[l] * x;
    z.colwise() += params.bias[l];
    MatT<Real>& gates = cache.gates[l];
    gates.resize(4 * h, cols);
    MatT<Real>& cells = cache.cells[l];
    cells.resize(h, cols);
    MatT<Real>& hidden = cache.hidden[l];
    hidden.resize(h, cols);
    MatT<Real> hp = state.h[l], cp = state.c[l];
    for (int t = 0; t < steps; ++t) {
      auto zt = z.middleCols(t * lanes, lanes);
      zt.noalias() += params.wh[l] * hp;
      auto g = gates.middleCols(t * lanes, lanes);
      g.topRows(2 * h) = (Real(1) + (-zt.topRows(2 * h).array()).exp()).inverse().matrix();
      g.middleRows(2 * h, h) = zt.middleRows(2 * h, h).array().tanh();
      g.bottomRows(h) = (Real(1) + (-zt.bottomRows(h).array()).exp()).inverse().matrix();
      auto ct = cells.middleCols(t * lanes, lanes);
      ct = g.middleRows(h, h).cwiseProduct(cp) + g.topRows(h).cwiseProduct(g.middleRows(2 * h, h));
      auto ht = hidden.middleCols(t * lanes, lanes);
      ht = g.bottomRows(h).cwiseProduct(MatT<Real>(ct.array().tanh()));
      hp = ht;
      cp = ct;
    }
    state.h[l] = hp;
    state.c[l] = cp;
    cache.layer_in[l] = std::move(x);
    x = hidden;
    apply_dropout(x);
  }
  cache.top = std::move(x);
}

}  // namespace

template <class Real>
Real lstm_forward(const LstmConfig& config, const LstmParams<Real>& params, const TokenMatrix& inputs,
                  const TokenMatrix& targets, LstmState<Real>& state, const ForwardOptions& options,
                  LstmCache<Real>* cache) {
  if (inputs.rows() != targets.rows() || inputs.cols() != targets.cols() || inputs.size() == 0)
    throw Error("inputs and targets must have the same non-empty shape");
  if (static_cast<int>(state.h.size()) != config.layers || state.h[0].cols() != inputs.cols())
    throw Error("state does not match the batch");
  check_ids(inputs, config.vocab_size, "input");
  check_ids(targets, config.vocab_size, "target");

  LstmCache<Real> local;
  LstmCache<Real>& c = cache ? *cache : local;
  run_layers(config, params, inputs, state, options, c);

  c.probs.resize(params.out_w.rows(), c.top.cols());
  c.probs.noalias() = params.out_w * c.top;
  c.probs.colwise() += params.out_b;
  softmax_columns(c.probs);
  const int lanes = static_cast<int>(inputs.cols());
  double loss = 0.0;
  for (Eigen::Index t = 0; t < inputs.rows(); ++t)
    for (int b = 0; b < lanes; ++b)
      loss -= std::log(static_cast<double>(c.probs(targets(t, b), t * lanes + b)));
  if (cache) {
    c.inputs = inputs;
    c.targets = targets;
  }
  return static_cast<Real>(loss / static_cast<double>(inputs.size()));
}

template <class Real>
void lstm_backward(const LstmConfig& config, const LstmParams<Real>& params,
                   const LstmCache<Real>& cache, LstmParams<Real>& grads) {
  const int steps = cache.steps, lanes = cache.lanes, cols = steps * lanes;
  const int h = config.hidden_dim;
  const bool dropped = !cache.masks.empty();
  if (grads.wx.size() != params.wx.size()) grads = LstmParams<Real>::zeros(config);

  // dlogits = (probs - onehot(targets)) / cols, applied without materializing it.
  const Real inv = Real(1) / static_cast<Real>(cols);
  grads.out_w.noalias() = cache.probs * cache.top.transpose();
  grads.out_b = cache.probs.rowwise().sum();
  MatT<Real> dx(h, cols);  // gradient wrt top (dropped) layer
  dx.noalias() = params.out_w.transpose() * cache.probs;
  for (int t = 0; t < steps; ++t)
    for (int b = 0; b < lanes; ++b) {
      const int y = cache.targets(t, b), j = t * lanes + b;
      grads.out_w.row(y) -= cache.top.col(j).transpose();
      grads.out_b(y) -= Real(1);
      dx.col(j) -= params.out_w.row(y).transpose();
    }
  grads.out_w *= inv;
  grads.out_b *= inv;
  dx *= inv;

  for (int l = config.layers - 1; l >= 0; --l) {
    if (dropped) dx.array() *= cache.masks[l + 1].array();
    const MatT<Real>& gates = cache.gates[l];
    const MatT<Real>& cells = cache.cells[l];
    MatT<Real> dz(4 * h, cols);
    MatT<Real> dh_next = MatT<Real>::Zero(h, lanes);
    MatT<Real> dc_next = MatT<Real>::Zero(h, lanes);
    for (int t = steps - 1; t >= 0; --t) {
      const auto g = gates.middleCols(t * lanes, lanes);
      const auto i = g.topRows(h), f = g.middleRows(h, h), gg = g.middleRows(2 * h, h),
                 o = g.bottomRows(h);
      const auto ct = cells.middleCols(t * lanes, lanes);
      const MatT<Real> cprev = t > 0 ? MatT<Real>(cells.middleCols((t - 1) * lanes, lanes)) : cache.c0[l];
      const MatT<Real> tc = ct.array().tanh();
      MatT<Real> dh = dx.middleCols(t * lanes, lanes) + dh_next;
      MatT<Real> dc = dc_next.array() + dh.array() * o.array() * (Real(1) - tc.array().square());
      auto d = dz.middleCols(t * lanes, lanes);
      d.topRows(h) = (dc.array() * gg.array() * i.array() * (Real(1) - i.array())).matrix();
      d.middleRows(h, h) = (dc.array() * cprev.array() * f.array() * (Real(1) - f.array())).matrix();
      d.middleRows(2 * h, h) = (dc.array() * i.array() * (Real(1) - gg.array().square())).matrix();
      d.bottomRows(h) = (dh.array() * tc.array() * o.array() * (Real(1) - o.array())).matrix();
      dc_next = dc.cwiseProduct(f);
      dh_next.noalias() = params.wh[l].transpose() * d;
    }
    // Previous hidden states for the recurrent weight gradient.
    MatT<Real> hprev(h, cols);
    hprev.leftCols(lanes) = cache.h0[l];
    if (steps > 1) hprev.rightCols(cols - lanes) = cache.hidden[l].leftCols(cols - lanes);
    grads.wx[l].noalias() = dz * cache.layer_in[l].transpose();
    grads.wh[l].noalias() = dz * hprev.transpose();
    grads.bias[l] = dz.rowwise().sum();
    dx.noalias() = params.wx[l].transpose() * dz;
  }
  if (dropped) dx.array() *= cache.masks[0].array();
  grads.embedding.setZero();
  for (int t = 0; t < steps; ++t)
    for (int b = 0; b < lanes; ++b) grads.embedding.col(cache.inputs(t, b)) += dx.col(t * lanes + b);

  for (const auto& b : grads.blocks())
    for (std::size_t k = 0; k < b.size; ++k)
      if (!std::isfinite(b.data[k])) throw Error("non-finite gradient in block " + b.name);
}

template <class Real>
double clip_gradients(LstmParams<Real>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& b : grads.blocks())
    for (std::size_t k = 0; k < b.size; ++k) sq += double(b.data[k]) * double(b.data[k]);
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const Real s = static_cast<Real>(max_norm / norm);
    for (auto& b : grads.blocks())
      for (std::size_t k = 0; k < b.size; ++k) b.data[k] *= s;
  }
  return norm;
}

template <class Real>
MatT<Real> lstm_step_logits(const LstmConfig& config, const LstmParams<Real>& params,
                            const std::vector<std::int32_t>& inputs, LstmState<Real>& state) {
  TokenMatrix in(1, static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t b = 0; b < inputs.size(); ++b) in(0, b) = inputs[b];
  check_ids(in, config.vocab_size, "input");
  LstmCache<Real> cache;
  run_layers(config, params, in, state, ForwardOptions{}, cache);
  MatT<Real> z = params.out_w * cache.top;
  z.colwise() += params.out_b;
  return z;
}

LstmConfig gradient_check_config() {
  LstmConfig c;
  c.vocab_size = 7;
  c.embed_dim = 4;
  c.hidden_dim = 5;
  c.seq_len = 6;
  c.batch_size = 2;
  c.seed = 3;
  c.init_scale = 0.5;
  return c;
}

GradientCheckResult gradient_check(const LstmConfig& config, double eps) {
  config.validate();
  auto params = LstmParams<double>::init(config);
  std::mt19937_64 data_rng(config.seed + 1);
  TokenMatrix in(config.seq_len, config.batch_size), out(config.seq_len, config.batch_size);
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    in.data()[i] = static_cast<std::int32_t>(data_rng() % config.vocab_size);
    out.data()[i] = static_cast<std::int32_t>(data_rng() % config.vocab_size);
  }
  auto start = LstmState<double>::zeros(config, config.batch_size);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto* v : {&start.h, &start.c})
    for (auto& m : *v)
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(data_rng);

  const std::uint64_t mask_seed = config.seed + 2;
  auto loss = [&](const LstmParams<double>& p, LstmCache<double>* cache) {
    std::mt19937_64 rng(mask_seed);
    auto s = start;
    return lstm_forward(config, p, in, out, s, ForwardOptions{true, &rng}, cache);
  };

  LstmCache<double> cache;
  loss(params, &cache);
  LstmParams<double> grads;
  lstm_backward(config, params, cache, grads);

  GradientCheckResult result;
  auto pblocks = params.blocks();
  auto gblocks = grads.blocks();
  for (std::size_t bi = 0; bi < pblocks.size(); ++bi) {
    for (std::size_t k = 0; k < pblocks[bi].size; ++k) {
      double& w = pblocks[bi].data[k];
      const double saved = w;
      w = saved + eps;
      const double lp = loss(params, nullptr);
      w = saved - eps;
      const double lm = loss(params, nullptr);
      w = saved;
      const double numeric = (lp - lm) / (2 * eps);
      const double analytic = gblocks[bi].data[k];
      const double err = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      ++result.checked;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_block = pblocks[bi].name;
      }
    }
  }
  return result;
}

#define LMAUG_INSTANTIATE(R)                                                                        \
  template struct LstmParams<R>;                                                                    \
  template struct LstmState<R>;                                                                     \
  template R lstm_forward(const LstmConfig&, const LstmParams<R>&, const TokenMatrix&,              \
                          const TokenMatrix&, LstmState<R>&, const ForwardOptions&, LstmCache<R>*); \
  template void lstm_backward(const LstmConfig&, const LstmParams<R>&, const LstmCache<R>&,         \
                              LstmParams<R>&);                                                      \
  template double clip_gradients(LstmParams<R>&, double);                                           \
  template MatT<R> lstm_step_logits(const LstmConfig&, const LstmParams<R>&,                        \
                                    const std::vector<std::int32_t>&, LstmState<R>&);

LMAUG_INSTANTIATE(float)
LMAUG_INSTANTIATE(double)
#undef LMAUG_INSTANTIATE

template LstmParams<double> LstmParams<float>::cast<double>() const;
template LstmParams<float> LstmParams<double>::cast<float>() const;
template LstmParams<float> LstmParams<float>::cast<float>() const;

}  // namespace lmaug
