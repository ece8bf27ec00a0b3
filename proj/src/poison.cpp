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

#include "poisonlab/poison.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace poisonlab {

size_t PoisonSet::size() const {
  if (const auto* ex = std::get_if<std::vector<Example>>(&contents)) return ex->size();
  return std::get<std::vector<TokenSeq>>(contents).size();
}

const std::vector<Example>& PoisonSet::examples() const {
  if (const auto* ex = std::get_if<std::vector<Example>>(&contents)) return *ex;
  throw ArgumentError("poison set holds sequences, not examples");
}

const std::vector<TokenSeq>& PoisonSet::sequences() const {
  if (const auto* sq = std::get_if<std::vector<TokenSeq>>(&contents)) return *sq;
  throw ArgumentError("poison set holds examples, not sequences");
}

std::string PoisonSet::to_text(int num_classes, int feature_dim) const {
  std::ostringstream out;
  out << "poisonlab-poison v1\n";
  out << "strategy " << strategy << '\n';
  if (const auto* ex = std::get_if<std::vector<Example>>(&contents)) {
    LabeledDataset d;
    d.examples = *ex;
    int max_label = 0, max_dim = 0;
    for (const Example& e : *ex) {
      max_label = std::max(max_label, e.label);
      max_dim = std::max<int>(max_dim, static_cast<int>(e.features.size()));
    }
    d.num_classes = num_classes > 0 ? num_classes : max_label + 1;
    d.feature_dim = feature_dim > 0 ? feature_dim : max_dim;
    out << dataset_to_text(d);
  } else {
    const auto& seqs = std::get<std::vector<TokenSeq>>(contents);
    TextCorpus c;
    c.sequences = seqs;
    int max_tok = 13;
    for (const TokenSeq& s : seqs)
      for (int t : s.tokens) max_tok = std::max(max_tok, t);
    c.vocab_size = max_tok + 1;
    for (int d = 0; d < 10; ++d) c.digit_token_map[d] = d;
    out << corpus_to_text(c);
  }
  return out.str();
}

PoisonSet PoisonSet::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "poisonlab-poison v1")
    throw VersionError("poison set header mismatch");
  if (!std::getline(in, line)) throw ParseError("missing strategy line", 2);
  if (line.rfind("strategy ", 0) != 0) throw ParseError("bad strategy line", 2);
  PoisonSet p;
  p.strategy = line.substr(9);
  std::ostringstream rest;
  rest << in.rdbuf();
  std::string body = rest.str();
  if (body.rfind("poisonlab-dataset", 0) == 0) {
    p.contents = dataset_from_text(body).examples;
  } else if (body.rfind("poisonlab-corpus", 0) == 0) {
    p.contents = corpus_from_text(body).sequences;
  } else {
    throw ParseError("unknown poison body format", 3);
  }
  return p;
}

std::string to_string(FlipChoice c) {
  switch (c) {
    case FlipChoice::random: return "random";
    case FlipChoice::best: return "best";
    case FlipChoice::worst: return "worst";
    case FlipChoice::random_multi: return "random_multi";
  }
  return "?";
}

std::string to_string(UntargetedFlip s) {
  switch (s) {
    case UntargetedFlip::same_class: return "same_class";
    case UntargetedFlip::random: return "random";
    case UntargetedFlip::next_class: return "next_class";
  }
  return "?";
}

std::string to_string(SuffixPadding p) {
  switch (p) {
    case SuffixPadding::zeros: return "zeros";
    case SuffixPadding::random_rep: return "random_rep";
    case SuffixPadding::random_fresh: return "random_fresh";
    case SuffixPadding::random_digits: return "random_digits";
  }
  return "?";
}

std::string to_string(PrefixStrategy s) {
  switch (s) {
    case PrefixStrategy::random: return "random";
    case PrefixStrategy::best: return "best";
    case PrefixStrategy::worst: return "worst";
  }
  return "?";
}

PoisonSet knn_poison(std::span<const double> x, int y, int k, double delta, int y_prime,
                     int num_classes) {
  if (k < 3 || k % 2 == 0) throw ArgumentError("knn_poison: k must be odd and >= 3");
  if (y_prime == y) throw ArgumentError("knn_poison: y_prime must differ from y");
  if (y < 0 || y >= num_classes || y_prime < 0 || y_prime >= num_classes)
    throw ArgumentError("knn_poison: label out of range");
  if (!(delta > 0.0)) throw ArgumentError("knn_poison: delta must be > 0");
  std::vector<Example> out;
  out.reserve(k);
  std::vector<double> xv(x.begin(), x.end());
  for (int i = 0; i < (k - 1) / 2; ++i) out.push_back(Example{xv, y});
  for (int i = 0; i < (k - 1) / 2; ++i) out.push_back(Example{xv, y_prime});
  Example offset{xv, y_prime};
  offset.features[0] += delta;
  out.push_back(std::move(offset));
  PoisonSet p;
  p.contents = std::move(out);
  std::ostringstream tag;
  tag << "knn_poison(k=" << k << ",delta=" << delta << ",y=" << y << ",y'=" << y_prime << ")";
  p.strategy = tag.str();
  return p;
}

std::optional<ProtrudingGeometry> analyze_protruding(const LabeledDataset& dataset,
                                                     int target_index) {
  dataset.validate();
  if (target_index < 0 || static_cast<size_t>(target_index) >= dataset.size())
    throw ArgumentError("analyze_protruding: target index out of range");
  const Example& target = dataset.examples[target_index];
  int dim = dataset.feature_dim;
  // Constraint rows: same-class points must fall strictly on the negative
  // side of the plane through the target, opposite-class points on the
  // positive side.
  std::vector<std::vector<double>> constraints;
  constraints.reserve(dataset.size() - 1);
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (static_cast<int>(i) == target_index) continue;
    const Example& e = dataset.examples[i];
    double sign = e.label == target.label ? -1.0 : 1.0;
    std::vector<double> row(dim);
    for (int c = 0; c < dim; ++c) row[c] = sign * (e.features[c] - target.features[c]);
    constraints.push_back(std::move(row));
  }
  std::optional<std::vector<double>> w = min_norm_separator(constraints);
  if (!w) return std::nullopt;
  double wn = 0.0;
  for (double v : *w) wn += v * v;
  wn = std::sqrt(wn);
  ProtrudingGeometry g;
  g.direction.resize(dim);
  for (int c = 0; c < dim; ++c) g.direction[c] = (*w)[c] / wn;
  // Recompute delta from the data rather than trusting 1/||w||.
  double delta = std::numeric_limits<double>::infinity();
  for (const std::vector<double>& row : constraints) {
    double d = 0.0;
    for (int c = 0; c < dim; ++c) d += g.direction[c] * row[c];
    delta = std::min(delta, d);
  }
  if (!(delta > 0.0)) return std::nullopt;
  g.delta = delta;
  return g;
}

PoisonSet svm_protruding_poison(const LabeledDataset& dataset, int target_index) {
  std::optional<ProtrudingGeometry> g = analyze_protruding(dataset, target_index);
  if (!g) throw SolverError("svm_protruding_poison: target is not protruding");
  const Example& target = dataset.examples[target_index];
  if (dataset.num_classes != 2)
    throw ArgumentError("svm_protruding_poison: dataset must be binary");
  Example poison;
  poison.features = target.features;
  for (int c = 0; c < dataset.feature_dim; ++c)
    poison.features[c] += g->direction[c] * (g->delta / 2.0);
  poison.label = 1 - target.label;
  PoisonSet p;
  p.contents = std::vector<Example>{std::move(poison)};
  std::ostringstream tag;
  tag << "svm_protruding(target=" << target_index << ",delta=" << g->delta << ")";
  p.strategy = tag.str();
  return p;
}

namespace {

int pick_incorrect_random(int y, int num_classes, Rng& rng) {
  int pick = static_cast<int>(rng.uniform_int(0, num_classes - 2));
  return pick >= y ? pick + 1 : pick;
}

int pick_by_reference(const MlpModel& reference, const Example& target, bool best) {
  std::vector<double> probs = mlp_proba(reference, target.features);
  int choice = -1;
  for (int c = 0; c < static_cast<int>(probs.size()); ++c) {
    if (c == target.label) continue;
    if (choice < 0 || (best ? probs[c] > probs[choice] : probs[c] < probs[choice])) choice = c;
  }
  return choice;
}

}  // namespace

PoisonSet label_flip_targeted(const Example& target, int r, const FlipStrategy& strategy,
                              int num_classes, const Rng& seed) {
  if (r < 1) throw ArgumentError("label_flip_targeted: r must be >= 1");
  if (num_classes < 2) throw ArgumentError("label_flip_targeted: need >= 2 classes");
  if ((strategy.choice == FlipChoice::best || strategy.choice == FlipChoice::worst) &&
      strategy.reference == nullptr)
    throw ArgumentError("label_flip_targeted: best/worst need a reference model");
  Rng rng = seed.substream("flip");
  std::vector<Example> out;
  out.reserve(r);
  if (strategy.choice == FlipChoice::random_multi) {
    if (r > num_classes - 1)
      throw ArgumentError("label_flip_targeted: random_multi needs r <= num_classes - 1");
    std::vector<int> incorrect;
    for (int c = 0; c < num_classes; ++c)
      if (c != target.label) incorrect.push_back(c);
    rng.shuffle(incorrect);
    for (int i = 0; i < r; ++i) out.push_back(Example{target.features, incorrect[i]});
  } else {
    int y_prime;
    switch (strategy.choice) {
      case FlipChoice::random: y_prime = pick_incorrect_random(target.label, num_classes, rng); break;
      case FlipChoice::best: y_prime = pick_by_reference(*strategy.reference, target, true); break;
      case FlipChoice::worst: y_prime = pick_by_reference(*strategy.reference, target, false); break;
      default: y_prime = 0; break;
    }
    for (int i = 0; i < r; ++i) out.push_back(Example{target.features, y_prime});
  }
  PoisonSet p;
  p.contents = std::move(out);
  std::ostringstream tag;
  tag << "label_flip_targeted(r=" << r << ",strategy=" << to_string(strategy.choice) << ")";
  p.strategy = tag.str();
  return p;
}

PoisonSet label_flip_untargeted(const LabeledDataset& pool, int n_adv, UntargetedFlip strategy,
                                const Rng& seed) {
  pool.validate();
  if (n_adv < 1 || static_cast<size_t>(n_adv) > pool.size())
    throw ArgumentError("label_flip_untargeted: n_adv out of range");
  Rng rng = seed.substream("untargeted");
  std::vector<size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  rng.shuffle(idx);
  int same_class_label = static_cast<int>(rng.uniform_int(0, pool.num_classes - 1));
  std::vector<Example> out;
  out.reserve(n_adv);
  for (int i = 0; i < n_adv; ++i) {
    Example e = pool.examples[idx[i]];
    switch (strategy) {
      case UntargetedFlip::same_class:
        e.label = same_class_label;
        break;
      case UntargetedFlip::random:
        e.label = pick_incorrect_random(e.label, pool.num_classes, rng);
        break;
      case UntargetedFlip::next_class:
        e.label = (e.label + 1) % pool.num_classes;
        break;
    }
    out.push_back(std::move(e));
  }
  PoisonSet p;
  p.contents = std::move(out);
  std::ostringstream tag;
  tag << "label_flip_untargeted(n=" << n_adv << ",strategy=" << to_string(strategy) << ")";
  p.strategy = tag.str();
  return p;
}

PoisonSet attribute_poison(std::span<const double> x0, std::span<const double> x1, int y, int r,
                           int y_prime) {
  if (r < 2 || r % 2 != 0) throw ArgumentError("attribute_poison: r must be even and >= 2");
  if (y_prime == y) throw ArgumentError("attribute_poison: y_prime must differ from y");
  if (x0.size() != x1.size()) throw ArgumentError("attribute_poison: version dimension mismatch");
  std::vector<Example> out;
  out.reserve(r);
  for (int i = 0; i < r / 2; ++i)
    out.push_back(Example{std::vector<double>(x0.begin(), x0.end()), y_prime});
  for (int i = 0; i < r / 2; ++i)
    out.push_back(Example{std::vector<double>(x1.begin(), x1.end()), y_prime});
  PoisonSet p;
  p.contents = std::move(out);
  std::ostringstream tag;
  tag << "attribute_poison(r=" << r << ",y'=" << y_prime << ")";
  p.strategy = tag.str();
  return p;
}

PoisonSet canary_suffix_poison(const TokenSeq& prefix, int r, int pad_len, SuffixPadding padding,
                               const TextCorpus& corpus, const Rng& seed) {
  if (r < 1 || r > 128) throw ArgumentError("canary_suffix_poison: r must be in [1, 128]");
  if (pad_len < 1) throw ArgumentError("canary_suffix_poison: pad_len must be >= 1");
  Rng rng = seed.substream("suffix");
  auto random_pad = [&]() {
    std::vector<int> pad(pad_len);
    for (int& t : pad) t = static_cast<int>(rng.uniform_int(0, corpus.vocab_size - 1));
    return pad;
  };
  std::vector<int> shared_pad;
  switch (padding) {
    case SuffixPadding::zeros:
      shared_pad.assign(pad_len, corpus.digit_token_map[0]);
      break;
    case SuffixPadding::random_rep:
      shared_pad = random_pad();
      break;
    case SuffixPadding::random_digits: {
      shared_pad.resize(pad_len);
      for (int& t : shared_pad)
        t = corpus.digit_token_map[static_cast<size_t>(rng.uniform_int(0, 9))];
      break;
    }
    case SuffixPadding::random_fresh:
      break;  // drawn per copy below
  }
  std::vector<TokenSeq> out;
  out.reserve(r);
  for (int i = 0; i < r; ++i) {
    TokenSeq s = prefix;
    const std::vector<int>& pad =
        padding == SuffixPadding::random_fresh ? (shared_pad = random_pad()) : shared_pad;
    s.tokens.insert(s.tokens.end(), pad.begin(), pad.end());
    out.push_back(std::move(s));
  }
  PoisonSet p;
  p.contents = std::move(out);
  std::ostringstream tag;
  tag << "canary_suffix(r=" << r << ",pad_len=" << pad_len << ",padding=" << to_string(padding)
      << ")";
  p.strategy = tag.str();
  return p;
}

TokenSeq canary_prefix_make(PrefixStrategy strategy, int length, const CharLmModel& reference,
                            const Rng& seed) {
  if (length < 1) throw ArgumentError("canary_prefix_make: length must be >= 1");
  Rng rng = seed.substream("prefix");
  if (strategy == PrefixStrategy::random) {
    TokenSeq out;
    out.tokens.resize(length);
    for (int& t : out.tokens) t = static_cast<int>(rng.uniform_int(0, reference.vocab_size - 1));
    return out;
  }
  int seed_len = std::min(2, length);
  TokenSeq out;
  out.tokens.resize(seed_len);
  for (int& t : out.tokens) t = static_cast<int>(rng.uniform_int(0, reference.vocab_size - 1));
  return lm_greedy_extend(reference, out, length - seed_len,
                          strategy == PrefixStrategy::best ? ExtendMode::best : ExtendMode::worst);
}

}  // namespace poisonlab
