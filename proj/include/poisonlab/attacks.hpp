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

#ifndef POISONLAB_ATTACKS_HPP_
#define POISONLAB_ATTACKS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poisonlab/models.hpp"
#include "poisonlab/shadow.hpp"

namespace poisonlab {

// All attack scores are oriented "higher = member / attribute-1".
struct AttackScore {
  double value = 0.0;
  std::string target_id;
  int world = 0;  // ground truth for evaluation
};

// Permutation of a Universe, best candidate first, scores non-increasing.
struct Ranking {
  std::vector<int> order;
  std::vector<double> scores;

  // 1-based position of a candidate index in the ordering.
  int rank_of(int candidate_index) const;
};

struct ExposureReport {
  int rank = 0;
  double exposure_bits = 0.0;
  size_t universe_size = 0;
};

// log(p / (1-p)) with p clamped to [eps, 1-eps], eps = 1e-12.
double logit_scale(double p);

// Log-density ratio of the IN fit over the OUT fit at the observed score.
double lira_mi_score(double target_score, const GaussianFit& fit_in, const GaussianFit& fit_out);

// The shadow-free baseline: the model's probability on the true label,
// thresholded only at ROC time.
double global_threshold_mi_score(const TrainedModel& model, const Example& target);

// loss(f(x0), y) - loss(f(x1), y).
double ai_diff_score(const MlpModel& model, std::span<const double> x0,
                     std::span<const double> x1, int y);

struct AiGuess {
  int guess = 0;       // attribute value
  double score = 0.0;  // logpdf under fit1 minus logpdf under fit0
};

// Likelihood-ratio test between the two per-target Gaussians; ties guess 0.
AiGuess ai_likelihood_test(double diff, const GaussianFit& fit0, const GaussianFit& fit1);

// The uncalibrated baseline rule: pick the attribute version with the lower
// loss (ties to 0); the diff itself serves as the ROC score.
AiGuess ai_lowest_loss_guess(double diff);

// Attribute-from-distribution baseline: a classifier over (features without
// the attribute, one-hot class label) -> attribute, trained on the pool with
// all targets removed.
MlpModel imputation_train(const LabeledDataset& pool_minus_targets, int attr_index,
                          const TrainConfig& config, const std::vector<int>& hidden = {16});
int imputation_predict(const MlpModel& model, std::span<const double> features_without_attr, int y,
                       int num_classes);
// P(attr = 1 | other features, label); the score behind imputation_predict.
double imputation_score(const MlpModel& model, std::span<const double> features_without_attr,
                        int y, int num_classes);
// Drops the attribute column from a full feature vector and appends the
// one-hot label, matching the imputation model's input layout.
std::vector<double> imputation_input(std::span<const double> features, int attr_index, int y,
                                     int num_classes);

// Ranks all universe candidates by model loss on prefix + candidate.
// Uncalibrated score: minus the target's continuation loss. Calibrated score
// additionally subtracts each candidate's mean shadow continuation loss.
// When known_suffix_tokens is set, only the last n prefix tokens are used
// for querying. Ties break to lexicographic candidate order.
Ranking canary_rank(const CharLmModel& model, std::span<const CharLmModel> shadows,
                    const TokenSeq& prefix, const Universe& universe,
                    const TextCorpus& token_space,
                    std::optional<int> known_suffix_tokens = std::nullopt);

// log2(universe_size) - log2(rank), in bits.
double exposure(int rank, size_t universe_size);

ExposureReport make_exposure_report(const Ranking& ranking, int true_candidate_index,
                                    size_t universe_size);

}  // namespace poisonlab

#endif  // POISONLAB_ATTACKS_HPP_
