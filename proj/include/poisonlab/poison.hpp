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

#ifndef POISONLAB_POISON_HPP_
#define POISONLAB_POISON_HPP_

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "poisonlab/data.hpp"
#include "poisonlab/models.hpp"

namespace poisonlab {

// The adversary's contribution D_adv, tagged with the strategy that built it.
struct PoisonSet {
  std::variant<std::vector<Example>, std::vector<TokenSeq>> contents;
  std::string strategy;

  size_t size() const;
  const std::vector<Example>& examples() const;
  const std::vector<TokenSeq>& sequences() const;

  // Serializes into the core dataset/corpus text format with a strategy-tag
  // header line; the tag round-trips exactly.
  std::string to_text(int num_classes = 0, int feature_dim = 0) const;
  static PoisonSet from_text(const std::string& text);
};

enum class FlipChoice { random, best, worst, random_multi };

std::string to_string(FlipChoice c);

struct FlipStrategy {
  FlipChoice choice = FlipChoice::random;
  const MlpModel* reference = nullptr;  // required for best/worst
};

// k-1 exact copies of the target, class-balanced, plus one copy at distance
// exactly `delta` along the first axis with the flipped label. The resulting
// k points make the target a perfect membership tie-breaker.
PoisonSet knn_poison(std::span<const double> x, int y, int k, double delta, int y_prime,
                     int num_classes);

struct ProtrudingGeometry {
  std::vector<double> direction;  // unit normal of the plane through the target
  double delta = 0.0;             // distance from that plane to the nearest other point
};

// Geometry of the plane through the target that strictly separates the rest
// of the dataset; nullopt when the target is not protruding.
std::optional<ProtrudingGeometry> analyze_protruding(const LabeledDataset& dataset,
                                                     int target_index);

// The single opposite-class point at delta/2 beyond the target along the
// separating normal. Throws SolverError when the target is not protruding.
PoisonSet svm_protruding_poison(const LabeledDataset& dataset, int target_index);

// r identical copies of the target under an incorrect label chosen by the
// strategy (random/best/worst share one label; random_multi draws distinct
// incorrect labels per copy).
PoisonSet label_flip_targeted(const Example& target, int r, const FlipStrategy& strategy,
                              int num_classes, const Rng& seed);

enum class UntargetedFlip { same_class, random, next_class };

std::string to_string(UntargetedFlip s);

PoisonSet label_flip_untargeted(const LabeledDataset& pool, int n_adv, UntargetedFlip strategy,
                                const Rng& seed);

// r/2 copies of each attribute version, all under the same incorrect label.
PoisonSet attribute_poison(std::span<const double> x0, std::span<const double> x1, int y, int r,
                           int y_prime);

enum class SuffixPadding { zeros, random_rep, random_fresh, random_digits };

std::string to_string(SuffixPadding p);

// r copies of prefix + padding. `corpus` supplies the vocabulary and digit
// token map; padding tokens are drawn from it.
PoisonSet canary_suffix_poison(const TokenSeq& prefix, int r, int pad_len, SuffixPadding padding,
                               const TextCorpus& corpus, const Rng& seed);

enum class PrefixStrategy { random, best, worst };

std::string to_string(PrefixStrategy s);

// Adversary-chosen prefix: uniform tokens, or a short random segment extended
// greedily by the reference model in best/worst mode.
TokenSeq canary_prefix_make(PrefixStrategy strategy, int length, const CharLmModel& reference,
                            const Rng& seed);

}  // namespace poisonlab

#endif  // POISONLAB_POISON_HPP_
