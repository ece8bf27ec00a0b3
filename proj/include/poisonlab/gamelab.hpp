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

#ifndef POISONLAB_GAMELAB_HPP_
#define POISONLAB_GAMELAB_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poisonlab/attacks.hpp"
#include "poisonlab/metrics.hpp"
#include "poisonlab/poison.hpp"
#include "poisonlab/shadow.hpp"

namespace poisonlab {

enum class GameKind { membership, attribute, canary };

std::string to_string(GameKind g);
GameKind game_kind_from_string(const std::string& s);

struct PoolConfig {
  std::string kind = "blobs";  // blobs | table | corpus | csv
  // blobs
  int classes = 2;
  int per_class = 100;
  int dim = 2;
  double spread = 1.0;
  // table
  int rows = 400;
  int features = 4;
  int attr_index = 0;
  std::string attr_mode = "independent";  // independent | derived
  // corpus
  int sequences = 120;
  int seq_len = 48;
  int vocab = 24;
  // csv
  std::string csv_path;
  std::string label_column;
  std::string attr_column;
};

struct ModelConfig {
  ModelKind kind = ModelKind::mlp;
  int k = 3;  // knn neighbor count
  std::vector<int> hidden = {32};
  int lm_context = 8;
  int lm_hidden = 48;
  int epochs = 60;
  double learning_rate = 0.1;
  int batch_size = 32;
  std::optional<double> loss_clip;
};

struct PoisonConfig {
  // none | knn | svm_protruding | label_flip_targeted | label_flip_untargeted
  // | attribute | canary_suffix
  std::string recipe = "none";
  int r = 0;
  std::string strategy = "random";  // flip choice / untargeted strategy / padding kind
  int pad_len = 6;

  bool empty() const { return recipe == "none" || (recipe != "svm_protruding" && recipe != "knn" && r == 0); }
};

struct ShadowConfig {
  int n = 16;
  double subsample = 0.5;
  bool poison_shadows = true;
};

struct CanaryGameConfig {
  int digits = 3;
  int prefix_len = 8;
  std::string prefix_strategy = "honest";  // honest | random | best | worst
  int known_prefix = 0;                    // 0 = use the full prefix
  bool calibrated = true;
  bool uncalibrated = true;
};

struct GameConfig {
  GameKind game = GameKind::membership;
  PoolConfig pool;
  ModelConfig model;
  PoisonConfig poison;
  ShadowConfig shadows;
  CanaryGameConfig canary;
  int trials = 1;             // per-trial games (knn/svm membership, canary)
  int targets = 16;           // batched targets (mlp membership, attribute); 0 = all pool points
  int target_models = 4;      // attribute game target-model count
  std::string target_mode = "sampled";  // knn: sampled | unused
  uint64_t master_seed = 1;
  int workers = 1;

  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  std::string target_id;
  int world = 0;  // membership: 1 in / 0 out; attribute: true bit; canary: secret index
  std::map<std::string, double> scores;   // method tag -> score
  std::map<std::string, double> details;  // diagnostics (margins, ranks, guesses)
  std::string poison_tag;
};

struct GameRecord {
  std::string game;
  uint64_t master_seed = 0;
  std::string config_text;  // canonical echo of the run configuration
  std::vector<TrialRecord> trials;
  std::map<std::string, RocCurve> roc;                          // per method
  std::map<std::string, std::vector<ExposureReport>> exposures;  // per method (canary)
  std::map<std::string, double> summary;
};

GameRecord run_membership_game(const GameConfig& config);
GameRecord run_attribute_game(const GameConfig& config);
GameRecord run_canary_game(const GameConfig& config);
GameRecord run_game(const GameConfig& config);

// Each ensemble member in turn is the target model, the rest calibrate;
// scores pool before any ROC. Methods depend on the targets' kind:
// membership targets get "lira" and "global", attribute targets get
// "lira-diff" and "lowest-loss".
struct LooResult {
  std::vector<TrialRecord> trials;
  std::map<std::string, RocCurve> roc;
};
LooResult leave_one_out_eval(const ShadowEnsemble& ensemble, int workers = 1);

// --- instance generators for the exact-theory suites -----------------------

struct UnusedPointInstance {
  LabeledDataset pool;  // contains a coincident same-label cluster
  Example target;       // one more point at the cluster center
};
// A target whose removal provably changes no kNN output: 3k coincident
// same-label points at the target's location, plus a far-away second class.
UnusedPointInstance make_unused_point_instance(int k, const Rng& seed);

struct ProtrudingInstance {
  LabeledDataset data;  // binary, linearly separable
  int target_index = 0;
};
// Random rotated two-band instance whose target strictly protrudes toward the
// opposite class (verified via analyze_protruding before returning).
ProtrudingInstance make_protruding_instance(int dim, const Rng& seed);

// Synthetic tabular pool for the attribute game: a binary attribute bit at
// attr_index among Gaussian features, label driven by the non-attribute
// features. Modes: "independent" (bit is a fair coin) or "derived" (bit
// equals the sign of the following feature).
LabeledDataset synth_table(int rows, int num_features, int attr_index, const std::string& attr_mode,
                           const Rng& seed);

}  // namespace poisonlab

#endif  // POISONLAB_GAMELAB_HPP_
