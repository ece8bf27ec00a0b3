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

#ifndef POISONLAB_SHADOW_HPP_
#define POISONLAB_SHADOW_HPP_

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "poisonlab/models.hpp"
#include "poisonlab/poison.hpp"

namespace poisonlab {

struct GaussianFit {
  double mean = 0.0;
  double std = 1.0;
};

constexpr double kSigmaFloor = 1e-6;

// Sample mean and n-denominator standard deviation, floored at sigma_floor
// (degenerate score lists do occur at desk scale).
GaussianFit fit_gaussian(std::span<const double> samples, double sigma_floor = kSigmaFloor);

double gaussian_logpdf(double x, const GaussianFit& fit);

using ShadowPool = std::variant<LabeledDataset, TextCorpus>;

struct ShadowTrainMeta {
  uint64_t seed = 0;
  std::string stream;
};

struct ShadowEnsemble {
  std::vector<TrainedModel> models;
  std::vector<TargetSpec> targets;
  // membership[i][j]: whether target j (or its version-1, for attribute
  // targets) was in model i's training set. Exactly n/2 per column.
  std::vector<std::vector<uint8_t>> membership;
  std::vector<ShadowTrainMeta> train_meta;

  size_t model_count() const { return models.size(); }
  size_t target_count() const { return targets.size(); }
};

struct ShadowOptions {
  double subsample_fraction = 0.5;
  // Whether D_adv joins each shadow training set (it always joins the
  // target's).
  bool poison_shadows = true;
  std::vector<int> mlp_hidden = {32};
  int lm_context = 8;
  int lm_hidden = 48;
};

// Trains n models on seeded random pool splits plus their IN targets plus
// d_adv. Canary targets are never inserted into shadow training sets and
// their membership column is all-OUT.
ShadowEnsemble train_shadow_ensemble(const ShadowPool& pool, const std::vector<TargetSpec>& targets,
                                     const std::optional<PoisonSet>& d_adv, int n, ModelKind kind,
                                     const TrainConfig& config, const ShadowOptions& opts = {});

using ScoreFn = std::function<double(const TrainedModel&, const TargetSpec&)>;

// Scores every model on the target and partitions by the membership column.
std::pair<std::vector<double>, std::vector<double>> collect_scores(const ShadowEnsemble& ensemble,
                                                                   int target_index,
                                                                   const ScoreFn& score_fn);

// Manifest: checkpoint paths, membership matrix and seeds; enough to resume
// scoring without retraining. Checkpoints are written next to the manifest;
// targets travel with the game config, so the loader takes them separately.
void save_ensemble(const ShadowEnsemble& ensemble, const std::string& dir,
                   const std::string& manifest_name = "ensemble.manifest");
ShadowEnsemble load_ensemble(const std::string& manifest_path,
                             std::vector<TargetSpec> targets = {});

}  // namespace poisonlab

#endif  // POISONLAB_SHADOW_HPP_
