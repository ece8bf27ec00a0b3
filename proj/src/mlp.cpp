// Copyright 2026 The Poisonlab Authors
//
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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poisonlab/models.hpp"

namespace poisonlab {

void TrainConfig::validate() const {
  if (epochs < 0) throw ArgumentError("train config: epochs must be >= 0");
  if (learning_rate <= 0.0) throw ArgumentError("train config: learning_rate must be > 0");
  if (batch_size < 1) throw ArgumentError("train config: batch_size must be >= 1");
  if (loss_clip && *loss_clip <= 0.0) throw ArgumentError("train config: loss_clip must be > 0");
}

namespace {

std::vector<double> softmax_floored(std::vector<double> logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v = std::max(v / sum, kProbFloor);
  return logits;
}

struct Activations {
  // per layer: pre-activation then post-activation (ReLU), final layer raw logits
  std::vector<std::vector<double>> post;  // post[0] = input copy
};

std::vector<double> forward(const MlpModel& m, std::span<const double> x, Activations* acts) {
  if (x.size() != static_cast<size_t>(m.layer_sizes.front()))
    throw ArgumentError("mlp: input dimension mismatch");
  std::vector<double> cur(x.begin(), x.end());
  if (acts) acts->post.push_back(cur);
  size_t layers = m.weights.size();
  for (size_t l = 0; l < layers; ++l) {
    int out_n = m.layer_sizes[l + 1];
    int in_n = m.layer_sizes[l];
    std::vector<double> next(out_n);
    for (int o = 0; o < out_n; ++o) {
      double acc = m.biases[l][o];
      const double* wrow = &m.weights[l][static_cast<size_t>(o) * in_n];
      for (int i = 0; i < in_n; ++i) acc += wrow[i] * cur[i];
      next[o] = acc;
    }
    if (l + 1 < layers)
      for (double& v : next) v = std::max(0.0, v);  // ReLU on hidden layers
    cur = std::move(next);
    if (acts) acts->post.push_back(cur);
  }
  return cur;
}

struct Gradients {
  std::vector<std::vector<double>> w, b;
  explicit Gradients(const MlpModel& m) {
    for (size_t l = 0; l < m.weights.size(); ++l) {
      w.emplace_back(m.weights[l].size(), 0.0);
      b.emplace_back(m.biases[l].size(), 0.0);
    }
  }
  void clear() {
    for (auto& v : w) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
  }
};

// Accumulates scale * dLoss/dtheta for one example into grads; returns the
// unscaled per-example loss.
double backward(const MlpModel& m, const Example& ex, double clip_or_zero, Gradients* grads) {
  Activations acts;
  std::vector<double> logits = forward(m, ex.features, &acts);
  std::vector<double> probs = softmax_floored(logits);
  double loss = -std::log(probs[ex.label]);
  double scale = 1.0;
  if (clip_or_zero > 0.0 && loss > clip_or_zero) scale = clip_or_zero / loss;

  size_t layers = m.weights.size();
  std::vector<double> delta(probs.size());
  for (size_t c = 0; c < probs.size(); ++c)
    delta[c] = scale * (probs[c] - (static_cast<int>(c) == ex.label ? 1.0 : 0.0));
  for (size_t l = layers; l-- > 0;) {
    int out_n = m.layer_sizes[l + 1];
    int in_n = m.layer_sizes[l];
    const std::vector<double>& input = acts.post[l];
    for (int o = 0; o < out_n; ++o) {
      grads->b[l][o] += delta[o];
      double* grow = &grads->w[l][static_cast<size_t>(o) * in_n];
      for (int i = 0; i < in_n; ++i) grow[i] += delta[o] * input[i];
    }
    if (l == 0) break;
    std::vector<double> prev(in_n, 0.0);
    for (int i = 0; i < in_n; ++i) {
      if (acts.post[l][i] <= 0.0) continue;  // ReLU gate
      double acc = 0.0;
      for (int o = 0; o < out_n; ++o) acc += m.weights[l][static_cast<size_t>(o) * in_n + i] * delta[o];
      prev[i] = acc;
    }
    delta = std::move(prev);
  }
  return loss;
}

}  // namespace

MlpModel init_mlp(const std::vector<int>& layer_sizes, const Rng& seed) {
  if (layer_sizes.size() < 2) throw ArgumentError("init_mlp: need at least input and output layers");
  for (int s : layer_sizes)
    if (s < 1) throw ArgumentError("init_mlp: layer sizes must be positive");
  MlpModel m;
  m.layer_sizes = layer_sizes;
  Rng rng = seed.substream("init");
  for (size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    int in_n = layer_sizes[l], out_n = layer_sizes[l + 1];
    double stddev = std::sqrt(2.0 / in_n);  // He-style
    std::vector<double> w(static_cast<size_t>(in_n) * out_n);
    for (double& v : w) v = stddev * rng.normal();
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(out_n, 0.0);
  }
  return m;
}

MlpModel train_mlp(const LabeledDataset& dataset, const TrainConfig& config,
                   const std::vector<int>& hidden_sizes) {
  dataset.validate();
  config.validate();
  std::vector<int> layers;
  layers.push_back(dataset.feature_dim);
  for (int h : hidden_sizes) layers.push_back(h);
  layers.push_back(dataset.num_classes);
  MlpModel m = init_mlp(layers, config.seed);

  double clip = config.loss_clip.value_or(0.0);
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Gradients grads(m);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng = config.seed.substream("epoch").substream(static_cast<uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      size_t end = std::min(order.size(), start + config.batch_size);
      grads.clear();
      for (size_t i = start; i < end; ++i)
        epoch_loss += backward(m, dataset.examples[order[i]], clip, &grads);
      double step = config.learning_rate / static_cast<double>(end - start);
      for (size_t l = 0; l < m.weights.size(); ++l) {
        for (size_t i = 0; i < m.weights[l].size(); ++i) m.weights[l][i] -= step * grads.w[l][i];
        for (size_t i = 0; i < m.biases[l].size(); ++i) m.biases[l][i] -= step * grads.b[l][i];
      }
    }
    if (!std::isfinite(epoch_loss)) throw TrainingError("mlp: loss diverged", epoch);
  }
  return m;
}

std::vector<double> mlp_logits(const MlpModel& model, std::span<const double> x) {
  return forward(model, x, nullptr);
}

std::vector<double> mlp_proba(const MlpModel& model, std::span<const double> x) {
  return softmax_floored(forward(model, x, nullptr));
}

double mlp_loss(const MlpModel& model, const Example& example) {
  std::vector<double> probs = mlp_proba(model, example.features);
  if (example.label < 0 || example.label >= static_cast<int>(probs.size()))
    throw ArgumentError("mlp_loss: label out of range");
  return -std::log(probs[example.label]);
}

int mlp_predict(const MlpModel& model, std::span<const double> x) {
  std::vector<double> logits = mlp_logits(model, x);
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace poisonlab
