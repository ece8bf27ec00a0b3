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

namespace {

// Fills `ctx` (length m) with the last m tokens of `tokens[0..len)`,
// left-padded with the pad token.
void window(const CharLmModel& m, std::span<const int> tokens, size_t len, std::vector<int>& ctx) {
  int mlen = m.context_len;
  for (int p = 0; p < mlen; ++p) {
    long src = static_cast<long>(len) - mlen + p;
    ctx[p] = src >= 0 ? tokens[static_cast<size_t>(src)] : m.pad_token();
  }
}

size_t w1_offset(const CharLmModel& m, int pos, int token) {
  return (static_cast<size_t>(pos) * (m.vocab_size + 1) + token) * m.hidden;
}

void hidden_forward(const CharLmModel& m, const std::vector<int>& ctx, std::vector<double>& h) {
  h.assign(m.b1.begin(), m.b1.end());
  for (int p = 0; p < m.context_len; ++p) {
    const double* row = &m.w1[w1_offset(m, p, ctx[p])];
    for (int j = 0; j < m.hidden; ++j) h[j] += row[j];
  }
  for (double& v : h) v = std::max(0.0, v);
}

void logits_forward(const CharLmModel& m, const std::vector<double>& h, std::vector<double>& logits) {
  logits.assign(m.b2.begin(), m.b2.end());
  for (int v = 0; v < m.vocab_size; ++v) {
    const double* row = &m.w2[static_cast<size_t>(v) * m.hidden];
    double acc = logits[v];
    for (int j = 0; j < m.hidden; ++j) acc += row[j] * h[j];
    logits[v] = acc;
  }
}

void softmax_floored_inplace(std::vector<double>& v) {
  double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x = std::max(x / sum, kProbFloor);
}

void check_tokens(const CharLmModel& m, const TokenSeq& seq, const char* who) {
  for (int t : seq.tokens)
    if (t < 0 || t >= m.vocab_size) throw ArgumentError(std::string(who) + ": token id out of range");
}

}  // namespace

CharLmModel init_charlm(int context_len, int vocab_size, int hidden, const Rng& seed) {
  if (context_len < 1) throw ArgumentError("init_charlm: context_len must be >= 1");
  if (vocab_size < 2) throw ArgumentError("init_charlm: vocab_size must be >= 2");
  if (hidden < 1) throw ArgumentError("init_charlm: hidden must be >= 1");
  CharLmModel m;
  m.context_len = context_len;
  m.vocab_size = vocab_size;
  m.hidden = hidden;
  Rng rng = seed.substream("init");
  m.w1.resize(static_cast<size_t>(context_len) * (vocab_size + 1) * hidden);
  double s1 = std::sqrt(2.0 / context_len);  // each position contributes one row
  for (double& v : m.w1) v = s1 * rng.normal() / std::sqrt(static_cast<double>(hidden));
  m.b1.assign(hidden, 0.0);
  m.w2.resize(static_cast<size_t>(vocab_size) * hidden);
  double s2 = std::sqrt(2.0 / hidden);
  for (double& v : m.w2) v = s2 * rng.normal();
  m.b2.assign(vocab_size, 0.0);
  return m;
}

CharLmModel train_charlm(const TextCorpus& corpus, const TrainConfig& config, int context_len,
                         int hidden) {
  corpus.validate();
  config.validate();
  if (corpus.sequences.empty()) throw ArgumentError("train_charlm: empty corpus");
  CharLmModel m = init_charlm(context_len, corpus.vocab_size, hidden, config.seed);

  // Every (sequence, step) pair is one training position; step i predicts
  // token i from the window ending at i-1.
  std::vector<std::pair<int, int>> positions;
  for (size_t s = 0; s < corpus.sequences.size(); ++s)
    for (size_t i = 0; i < corpus.sequences[s].size(); ++i)
      positions.emplace_back(static_cast<int>(s), static_cast<int>(i));

  double clip = config.loss_clip.value_or(0.0);
  std::vector<int> ctx(m.context_len);
  std::vector<double> h, logits, dh(m.hidden);
  std::vector<double> gw1(m.w1.size()), gb1(m.b1.size()), gw2(m.w2.size()), gb2(m.b2.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng = config.seed.substream("epoch").substream(static_cast<uint64_t>(epoch));
    shuffle_rng.shuffle(positions);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < positions.size(); start += config.batch_size) {
      size_t end = std::min(positions.size(), start + config.batch_size);
      std::fill(gw1.begin(), gw1.end(), 0.0);
      std::fill(gb1.begin(), gb1.end(), 0.0);
      std::fill(gw2.begin(), gw2.end(), 0.0);
      std::fill(gb2.begin(), gb2.end(), 0.0);
      for (size_t bi = start; bi < end; ++bi) {
        const TokenSeq& seq = corpus.sequences[positions[bi].first];
        int step = positions[bi].second;
        window(m, seq.tokens, static_cast<size_t>(step), ctx);
        int target = seq.tokens[step];
        hidden_forward(m, ctx, h);
        logits_forward(m, h, logits);
        softmax_floored_inplace(logits);
        double loss = -std::log(logits[target]);
        epoch_loss += loss;
        double scale = (clip > 0.0 && loss > clip) ? clip / loss : 1.0;
        // d logits
        logits[target] -= 1.0;
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int v = 0; v < m.vocab_size; ++v) {
          double dv = scale * logits[v];
          gb2[v] += dv;
          double* grow = &gw2[static_cast<size_t>(v) * m.hidden];
          const double* wrow = &m.w2[static_cast<size_t>(v) * m.hidden];
          for (int j = 0; j < m.hidden; ++j) {
            grow[j] += dv * h[j];
            dh[j] += dv * wrow[j];
          }
        }
        for (int j = 0; j < m.hidden; ++j)
          if (h[j] <= 0.0) dh[j] = 0.0;  // ReLU gate
        for (int j = 0; j < m.hidden; ++j) gb1[j] += dh[j];
        for (int p = 0; p < m.context_len; ++p) {
          double* grow = &gw1[w1_offset(m, p, ctx[p])];
          for (int j = 0; j < m.hidden; ++j) grow[j] += dh[j];
        }
      }
      double step_size = config.learning_rate / static_cast<double>(end - start);
      for (size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= step_size * gw1[i];
      for (size_t i = 0; i < m.b1.size(); ++i) m.b1[i] -= step_size * gb1[i];
      for (size_t i = 0; i < m.w2.size(); ++i) m.w2[i] -= step_size * gw2[i];
      for (size_t i = 0; i < m.b2.size(); ++i) m.b2[i] -= step_size * gb2[i];
    }
    if (!std::isfinite(epoch_loss)) throw TrainingError("charlm: loss diverged", epoch);
  }
  return m;
}

std::vector<double> lm_next_distribution(const CharLmModel& model, std::span<const int> context) {
  for (int t : context)
    if (t < 0 || t >= model.vocab_size)
      throw ArgumentError("lm_next_distribution: token id out of range");
  std::vector<int> ctx(model.context_len);
  window(model, context, context.size(), ctx);
  std::vector<double> h, logits;
  hidden_forward(model, ctx, h);
  logits_forward(model, h, logits);
  softmax_floored_inplace(logits);
  return logits;
}

double lm_continuation_loss(const CharLmModel& model, const TokenSeq& prefix,
                            const TokenSeq& continuation) {
  if (continuation.size() == 0) throw ArgumentError("lm_continuation_loss: empty continuation");
  check_tokens(model, prefix, "lm_continuation_loss");
  check_tokens(model, continuation, "lm_continuation_loss");
  std::vector<int> full = prefix.tokens;
  full.insert(full.end(), continuation.tokens.begin(), continuation.tokens.end());
  std::vector<int> ctx(model.context_len);
  std::vector<double> h, logits;
  double total = 0.0;
  for (size_t i = prefix.size(); i < full.size(); ++i) {
    window(model, full, i, ctx);
    hidden_forward(model, ctx, h);
    logits_forward(model, h, logits);
    softmax_floored_inplace(logits);
    total += -std::log(logits[full[i]]);
  }
  return total / static_cast<double>(continuation.size());
}

double lm_sequence_loss(const CharLmModel& model, const TokenSeq& tokens) {
  if (tokens.size() == 0) throw ArgumentError("lm_sequence_loss: empty sequence");
  return lm_continuation_loss(model, TokenSeq{}, tokens);
}

TokenSeq lm_greedy_extend(const CharLmModel& model, const TokenSeq& prefix, int steps,
                          ExtendMode mode) {
  if (steps < 0) throw ArgumentError("lm_greedy_extend: steps must be >= 0");
  check_tokens(model, prefix, "lm_greedy_extend");
  TokenSeq out = prefix;
  for (int s = 0; s < steps; ++s) {
    std::vector<double> dist = lm_next_distribution(model, out.tokens);
    int pick = 0;
    for (int v = 1; v < model.vocab_size; ++v) {
      bool better = mode == ExtendMode::best ? dist[v] > dist[pick] : dist[v] < dist[pick];
      if (better) pick = v;  // strict comparison keeps the lowest id on ties
    }
    out.tokens.push_back(pick);
  }
  return out;
}

}  // namespace poisonlab
