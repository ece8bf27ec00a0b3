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

#include "poisonlab/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace poisonlab {

int Ranking::rank_of(int candidate_index) const {
  for (size_t r = 0; r < order.size(); ++r)
    if (order[r] == candidate_index) return static_cast<int>(r) + 1;
  throw ArgumentError("rank_of: candidate not in ranking");
}

double logit_scale(double p) {
  constexpr double kEps = 1e-12;
  double clamped = std::clamp(p, kEps, 1.0 - kEps);
  return std::log(clamped / (1.0 - clamped));
}

double lira_mi_score(double target_score, const GaussianFit& fit_in, const GaussianFit& fit_out) {
  return gaussian_logpdf(target_score, fit_in) - gaussian_logpdf(target_score, fit_out);
}

double global_threshold_mi_score(const TrainedModel& model, const Example& target) {
  return model_true_label_prob(model, target);
}

double ai_diff_score(const MlpModel& model, std::span<const double> x0,
                     std::span<const double> x1, int y) {
  if (x0.size() != x1.size()) throw ArgumentError("ai_diff_score: version dimension mismatch");
  Example e0{std::vector<double>(x0.begin(), x0.end()), y};
  Example e1{std::vector<double>(x1.begin(), x1.end()), y};
  return mlp_loss(model, e0) - mlp_loss(model, e1);
}

AiGuess ai_likelihood_test(double diff, const GaussianFit& fit0, const GaussianFit& fit1) {
  AiGuess g;
  g.score = gaussian_logpdf(diff, fit1) - gaussian_logpdf(diff, fit0);
  g.guess = g.score > 0.0 ? 1 : 0;
  return g;
}

AiGuess ai_lowest_loss_guess(double diff) {
  // diff > 0 means the version-1 loss is lower.
  AiGuess g;
  g.score = diff;
  g.guess = diff > 0.0 ? 1 : 0;
  return g;
}

std::vector<double> imputation_input(std::span<const double> features, int attr_index, int y,
                                     int num_classes) {
  if (attr_index < 0 || attr_index >= static_cast<int>(features.size()))
    throw ArgumentError("imputation_input: attr_index out of range");
  std::vector<double> in;
  in.reserve(features.size() - 1 + num_classes);
  for (int i = 0; i < static_cast<int>(features.size()); ++i)
    if (i != attr_index) in.push_back(features[i]);
  for (int c = 0; c < num_classes; ++c) in.push_back(c == y ? 1.0 : 0.0);
  return in;
}

MlpModel imputation_train(const LabeledDataset& pool_minus_targets, int attr_index,
                          const TrainConfig& config, const std::vector<int>& hidden) {
  pool_minus_targets.validate();
  LabeledDataset task;
  task.num_classes = 2;
  task.feature_dim = pool_minus_targets.feature_dim - 1 + pool_minus_targets.num_classes;
  for (const Example& e : pool_minus_targets.examples) {
    double attr = e.features[attr_index];
    if (attr != 0.0 && attr != 1.0)
      throw ArgumentError("imputation_train: attribute must be binary 0/1");
    Example t;
    t.features = imputation_input(e.features, attr_index, e.label,
                                  pool_minus_targets.num_classes);
    t.label = attr == 1.0 ? 1 : 0;
    task.examples.push_back(std::move(t));
  }
  return train_mlp(task, config, hidden);
}

double imputation_score(const MlpModel& model, std::span<const double> features_without_attr,
                        int y, int num_classes) {
  std::vector<double> in(features_without_attr.begin(), features_without_attr.end());
  for (int c = 0; c < num_classes; ++c) in.push_back(c == y ? 1.0 : 0.0);
  return mlp_proba(model, in)[1];
}

int imputation_predict(const MlpModel& model, std::span<const double> features_without_attr, int y,
                       int num_classes) {
  return imputation_score(model, features_without_attr, y, num_classes) > 0.5 ? 1 : 0;
}

Ranking canary_rank(const CharLmModel& model, std::span<const CharLmModel> shadows,
                    const TokenSeq& prefix, const Universe& universe,
                    const TextCorpus& token_space, std::optional<int> known_suffix_tokens) {
  if (universe.kind != TargetKind::canary)
    throw ArgumentError("canary_rank: universe must be a canary universe");
  TokenSeq query_prefix = prefix;
  if (known_suffix_tokens) {
    int n = *known_suffix_tokens;
    if (n <= 0) throw ArgumentError("canary_rank: effective prefix is empty");
    if (n < static_cast<int>(prefix.size()))
      query_prefix.tokens.assign(prefix.tokens.end() - n, prefix.tokens.end());
  }
  size_t count = universe.size();
  std::vector<double> scores(count);
  for (size_t c = 0; c < count; ++c) {
    TokenSeq cand = token_space.tokens_for_digits(universe.candidates[c]);
    double target_loss = lm_continuation_loss(model, query_prefix, cand);
    double score = -target_loss;
    if (!shadows.empty()) {
      double shadow_loss = 0.0;
      for (const CharLmModel& g : shadows) shadow_loss += lm_continuation_loss(g, query_prefix, cand);
      shadow_loss /= static_cast<double>(shadows.size());
      score = shadow_loss - target_loss;
    }
    scores[c] = score;
  }
  Ranking r;
  r.order.resize(count);
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // lexicographic tie-break: candidates are already sorted
  });
  r.scores.resize(count);
  for (size_t i = 0; i < count; ++i) r.scores[i] = scores[r.order[i]];
  return r;
}

double exposure(int rank, size_t universe_size) {
  if (rank < 1 || static_cast<size_t>(rank) > universe_size)
    throw ArgumentError("exposure: rank out of range");
  return std::log2(static_cast<double>(universe_size)) - std::log2(static_cast<double>(rank));
}

ExposureReport make_exposure_report(const Ranking& ranking, int true_candidate_index,
                                    size_t universe_size) {
  ExposureReport rep;
  rep.rank = ranking.rank_of(true_candidate_index);
  rep.universe_size = universe_size;
  rep.exposure_bits = exposure(rep.rank, universe_size);
  return rep;
}

}  // namespace poisonlab
