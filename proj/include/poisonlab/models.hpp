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

#ifndef POISONLAB_MODELS_HPP_
#define POISONLAB_MODELS_HPP_

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "poisonlab/data.hpp"

namespace poisonlab {

enum class ModelKind { knn, svm, mlp, charlm };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

// Softmax probabilities are floored here before any log, keeping losses
// finite for saturated outputs.
constexpr double kProbFloor = 1e-12;

struct TrainConfig {
  int epochs = 1;
  double learning_rate = 0.1;
  int batch_size = 32;
  Rng seed{0, "train"};
  std::optional<double> loss_clip;  // per-example loss bound C

  void validate() const;
};

// --- k-nearest neighbors ----------------------------------------------------

struct KnnModel {
  int k = 1;
  LabeledDataset train_set;
};

KnnModel train_knn(const LabeledDataset& dataset, int k);

// Majority label of the k nearest by Euclidean distance. Distances are
// compared exactly on the stored doubles; neighbor ties break by lowest
// dataset index and vote ties by smallest class id.
int knn_predict(const KnnModel& model, std::span<const double> x);

// Fraction of the k nearest voting for `label` (used as a confidence score).
double knn_vote_fraction(const KnnModel& model, std::span<const double> x, int label);

// --- hard-margin linear SVM -------------------------------------------------

struct SvmModel {
  std::vector<double> w;
  double b = 0.0;
  std::vector<int> support_indices;  // into the training set it was fit on
  double margin = 0.0;
  int positive_label = 1;  // dataset label mapped to the +1 side
  int negative_label = 0;
};

// Exact maximum-margin separator. For feature_dim <= 3 the optimum is found
// by enumerating candidate support sets and solving each KKT equality
// system; higher dimensions use projected gradient on the dual (tolerance
// 1e-8). Non-separable input raises SolverError.
SvmModel train_svm_hard_margin(const LabeledDataset& dataset);

double svm_decision(const SvmModel& model, std::span<const double> x);
// Unsigned distance from x to the separating plane.
double svm_distance_to_plane(const SvmModel& model, std::span<const double> x);

// Minimum-norm w with w . a_i >= 1 for every constraint row (a plane through
// the origin separating all rows with maximum margin). Returns nullopt when
// infeasible. Shared by the SVM trainer and the protruding-point analysis.
std::optional<std::vector<double>> min_norm_separator(
    const std::vector<std::vector<double>>& constraints);

// --- feedforward classifier --------------------------------------------------

struct MlpModel {
  std::vector<int> layer_sizes;  // input, hidden..., num_classes
  // weights[l] is row-major (layer_sizes[l+1] x layer_sizes[l]).
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

MlpModel init_mlp(const std::vector<int>& layer_sizes, const Rng& seed);

// Mini-batch SGD on mean cross-entropy; deterministic given config.seed.
// With loss_clip set, each example's loss is scaled by min(1, C/loss) before
// backpropagation so its gradient contribution is capped.
MlpModel train_mlp(const LabeledDataset& dataset, const TrainConfig& config,
                   const std::vector<int>& hidden_sizes = {32});

std::vector<double> mlp_logits(const MlpModel& model, std::span<const double> x);
std::vector<double> mlp_proba(const MlpModel& model, std::span<const double> x);
double mlp_loss(const MlpModel& model, const Example& example);
int mlp_predict(const MlpModel& model, std::span<const double> x);

// --- fixed-context autoregressive LM ----------------------------------------

struct CharLmModel {
  int context_len = 8;
  int vocab_size = 0;
  int hidden = 48;
  // One-hidden-layer next-token predictor. The first layer is a per-position
  // embedding table (context_len x (vocab_size+1) x hidden); token id
  // vocab_size is the internal left-padding token, never emitted.
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;  // vocab_size x hidden, row-major
  std::vector<double> b2;

  int pad_token() const { return vocab_size; }
};

CharLmModel init_charlm(int context_len, int vocab_size, int hidden, const Rng& seed);

CharLmModel train_charlm(const TextCorpus& corpus, const TrainConfig& config,
                         int context_len = 8, int hidden = 48);

// Distribution over the next token given the trailing context (left-padded
// to context_len with the pad token).
std::vector<double> lm_next_distribution(const CharLmModel& model, std::span<const int> context);

// Mean cross-entropy over all |tokens| prediction steps, starting from the
// empty context.
double lm_sequence_loss(const CharLmModel& model, const TokenSeq& tokens);

// Mean cross-entropy of `continuation` given `prefix` (averaged over the
// continuation steps only).
double lm_continuation_loss(const CharLmModel& model, const TokenSeq& prefix,
                            const TokenSeq& continuation);

enum class ExtendMode { best, worst };

// Appends `steps` tokens, each the argmax (best) or argmin (worst) of the
// next-token distribution; ties break to the lowest token id.
TokenSeq lm_greedy_extend(const CharLmModel& model, const TokenSeq& prefix, int steps,
                          ExtendMode mode);

// --- uniform surface ---------------------------------------------------------

using TrainedModel = std::variant<KnnModel, SvmModel, MlpModel, CharLmModel>;

ModelKind model_kind(const TrainedModel& m);

// Probability the classifier assigns to the example's true label (mlp: softmax;
// knn: vote fraction). Throws for model kinds without a probability surface.
double model_true_label_prob(const TrainedModel& m, const Example& example);
double model_loss(const TrainedModel& m, const Example& example);

// --- checkpoints -------------------------------------------------------------

// Versioned structured text record; saving a loaded checkpoint reproduces the
// original file byte for byte.
struct Checkpoint {
  TrainedModel model;
  uint64_t train_seed = 0;
  std::string train_stream = "-";
};

std::string checkpoint_to_text(const Checkpoint& c);
Checkpoint checkpoint_from_text(const std::string& text);
void save_checkpoint_file(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace poisonlab

#endif  // POISONLAB_MODELS_HPP_
