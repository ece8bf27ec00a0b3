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

#ifndef POISONLAB_DATA_HPP_
#define POISONLAB_DATA_HPP_

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poisonlab/common.hpp"

namespace poisonlab {

struct Example {
  std::vector<double> features;
  int label = 0;
};

struct LabeledDataset {
  std::vector<Example> examples;
  int num_classes = 0;
  int feature_dim = 0;

  size_t size() const { return examples.size(); }
  // Throws ArgumentError on dimension or label violations.
  void validate() const;
};

struct TokenSeq {
  std::vector<int> tokens;

  size_t size() const { return tokens.size(); }
  bool operator==(const TokenSeq&) const = default;
};

struct TextCorpus {
  std::vector<TokenSeq> sequences;
  int vocab_size = 0;
  // digit_token_map[d] is the token id that encodes digit d.
  std::array<int, 10> digit_token_map{};

  void validate() const;
  TokenSeq tokens_for_digits(const std::string& digits) const;
};

struct CanarySpec {
  TokenSeq prefix;
  std::string secret_digits;
  int digit_count = 0;
};

struct AttributeTarget {
  std::vector<double> x0;  // version with attribute value 0
  std::vector<double> x1;  // version with attribute value 1
  int label = 0;
  int attr_index = 0;
};

enum class TargetKind { membership, attribute, canary };

std::string to_string(TargetKind k);

// The secret z of the privacy game; exactly one variant matches `kind`.
struct TargetSpec {
  TargetKind kind = TargetKind::membership;
  std::optional<Example> membership;
  std::optional<AttributeTarget> attribute;
  std::optional<CanarySpec> canary;

  void validate() const;
  static TargetSpec for_membership(Example ex);
  static TargetSpec for_attribute(AttributeTarget at);
  static TargetSpec for_canary(CanarySpec cs);
};

// The adversary's prior over the secret: 2 candidates for membership and
// attribute targets, all 10^L digit strings (lexicographic) for canaries.
struct Universe {
  TargetKind kind = TargetKind::membership;
  std::vector<std::string> candidates;

  size_t size() const { return candidates.size(); }
};

// --- synthetic data -------------------------------------------------------

// Per-class Gaussian clusters with means on a fixed integer lattice (step 4),
// so `spread` alone controls separability. Deterministic for a seed.
LabeledDataset synth_blobs(int num_classes, int per_class, int dim, double spread,
                           const Rng& seed);

// One extra draw from the synth_blobs source: a fresh labeled point that was
// not part of any earlier dataset (fresh substream).
Example synth_blob_point(int num_classes, int dim, double spread, const Rng& seed);

// The generator behind synth_corpus, exposed so tests and experiments can
// compare against the configured distribution.
struct CorpusSourceConfig {
  double digit_prob = 0.1;        // chance a step emits a digit token
  double follow_prob = 0.75;      // chance a text step follows the order-2 rule
  double digit_decay = 0.65;      // digit d has weight digit_decay^d
};

// Exact stationary unigram distribution of the corpus source, indexed by
// token id (digits are tokens 0..9, text tokens fill 10..vocab_size-1).
std::vector<double> corpus_unigram_distribution(int vocab_size,
                                                const CorpusSourceConfig& cfg = {});

// Order-2 Markov text source mixed with skewed digit emissions; learnable by
// a short-context model and with an exactly known unigram distribution.
TextCorpus synth_corpus(int num_sequences, int seq_len, int vocab_size, const Rng& seed,
                        const CorpusSourceConfig& cfg = {});

// A single fresh sequence from the same source (used for honest prefixes).
TokenSeq synth_corpus_sequence(int seq_len, int vocab_size, const Rng& seed,
                               const CorpusSourceConfig& cfg = {});

// --- dataset plumbing -----------------------------------------------------

// Disjoint partition with |left| = floor(fraction * n). Errors when either
// side would be empty, judged on the real-valued sizes.
std::pair<LabeledDataset, LabeledDataset> split_random(const LabeledDataset& dataset,
                                                       double fraction, const Rng& seed);

Universe build_universe(const TargetSpec& target);

// Text serialization for datasets and corpora. Features are written as
// hexfloats so save/load round-trips are exact and byte-stable.
std::string dataset_to_text(const LabeledDataset& d);
LabeledDataset dataset_from_text(const std::string& text);
std::string corpus_to_text(const TextCorpus& c);
TextCorpus corpus_from_text(const std::string& text);

std::string format_double(double x);  // canonical hexfloat
double parse_double(const std::string& s, int line_for_errors = 0);

}  // namespace poisonlab

#endif  // POISONLAB_DATA_HPP_
