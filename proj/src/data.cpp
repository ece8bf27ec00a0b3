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

#include "poisonlab/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace poisonlab {

void LabeledDataset::validate() const {
  if (examples.empty()) throw ArgumentError("dataset: empty");
  if (num_classes < 1) throw ArgumentError("dataset: num_classes must be positive");
  if (feature_dim < 1) throw ArgumentError("dataset: feature_dim must be positive");
  for (const Example& e : examples) {
    if (static_cast<int>(e.features.size()) != feature_dim)
      throw ArgumentError("dataset: inconsistent feature dimension");
    if (e.label < 0 || e.label >= num_classes)
      throw ArgumentError("dataset: label out of range");
  }
}

void TextCorpus::validate() const {
  if (vocab_size < 1) throw ArgumentError("corpus: vocab_size must be positive");
  std::array<bool, 10> seen{};
  for (int d = 0; d < 10; ++d) {
    int t = digit_token_map[d];
    if (t < 0 || t >= vocab_size) throw ArgumentError("corpus: digit token out of range");
    for (int e = 0; e < d; ++e)
      if (digit_token_map[e] == t) throw ArgumentError("corpus: digit token map not injective");
    seen[d] = true;
  }
  for (const TokenSeq& s : sequences)
    for (int t : s.tokens)
      if (t < 0 || t >= vocab_size) throw ArgumentError("corpus: token id out of range");
}

TokenSeq TextCorpus::tokens_for_digits(const std::string& digits) const {
  TokenSeq out;
  out.tokens.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9') throw ArgumentError("tokens_for_digits: non-digit character");
    out.tokens.push_back(digit_token_map[c - '0']);
  }
  return out;
}

std::string to_string(TargetKind k) {
  switch (k) {
    case TargetKind::membership: return "membership";
    case TargetKind::attribute: return "attribute";
    case TargetKind::canary: return "canary";
  }
  return "?";
}

void TargetSpec::validate() const {
  int populated = (membership ? 1 : 0) + (attribute ? 1 : 0) + (canary ? 1 : 0);
  if (populated != 1) throw ArgumentError("target: exactly one variant must be populated");
  bool matches = (kind == TargetKind::membership && membership) ||
                 (kind == TargetKind::attribute && attribute) ||
                 (kind == TargetKind::canary && canary);
  if (!matches) throw ArgumentError("target: populated variant does not match kind");
  if (canary) {
    if (canary->digit_count < 1) throw ArgumentError("target: digit_count must be positive");
    if (static_cast<int>(canary->secret_digits.size()) != canary->digit_count)
      throw ArgumentError("target: secret length does not match digit_count");
    for (char c : canary->secret_digits)
      if (c < '0' || c > '9') throw ArgumentError("target: secret must be decimal digits");
  }
}

TargetSpec TargetSpec::for_membership(Example ex) {
  TargetSpec t;
  t.kind = TargetKind::membership;
  t.membership = std::move(ex);
  return t;
}

TargetSpec TargetSpec::for_attribute(AttributeTarget at) {
  TargetSpec t;
  t.kind = TargetKind::attribute;
  t.attribute = std::move(at);
  return t;
}

TargetSpec TargetSpec::for_canary(CanarySpec cs) {
  TargetSpec t;
  t.kind = TargetKind::canary;
  t.canary = std::move(cs);
  return t;
}

// --- synthetic blobs -------------------------------------------------------

namespace {

constexpr double kLatticeStep = 4.0;

std::vector<double> blob_mean(int cls, int num_classes, int dim) {
  std::vector<double> mean(dim, 0.0);
  int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_classes))));
  if (dim == 1) {
    mean[0] = kLatticeStep * cls;
  } else {
    mean[0] = kLatticeStep * (cls % side);
    mean[1] = kLatticeStep * (cls / side);
  }
  return mean;
}

Example draw_blob(int cls, int num_classes, int dim, double spread, Rng& rng) {
  Example e;
  e.label = cls;
  e.features = blob_mean(cls, num_classes, dim);
  for (int j = 0; j < dim; ++j) e.features[j] += spread * rng.normal();
  return e;
}

}  // namespace

LabeledDataset synth_blobs(int num_classes, int per_class, int dim, double spread,
                           const Rng& seed) {
  if (num_classes < 2) throw ArgumentError("synth_blobs: num_classes must be >= 2");
  if (per_class < 1) throw ArgumentError("synth_blobs: per_class must be >= 1");
  if (dim < 1) throw ArgumentError("synth_blobs: dim must be >= 1");
  if (spread < 0.0) throw ArgumentError("synth_blobs: spread must be >= 0");
  Rng rng = seed.substream("blobs");
  LabeledDataset d;
  d.num_classes = num_classes;
  d.feature_dim = dim;
  d.examples.reserve(static_cast<size_t>(num_classes) * per_class);
  for (int c = 0; c < num_classes; ++c)
    for (int i = 0; i < per_class; ++i) d.examples.push_back(draw_blob(c, num_classes, dim, spread, rng));
  return d;
}

Example synth_blob_point(int num_classes, int dim, double spread, const Rng& seed) {
  if (num_classes < 2) throw ArgumentError("synth_blob_point: num_classes must be >= 2");
  Rng rng = seed.substream("point");
  int cls = static_cast<int>(rng.uniform_int(0, num_classes - 1));
  return draw_blob(cls, num_classes, dim, spread, rng);
}

// --- synthetic corpus ------------------------------------------------------

namespace {

// Multiplier for the order-2 successor rule; must be coprime with the text
// alphabet size so the rule is a bijection on context pairs (that keeps the
// uniform pair distribution exactly stationary).
int pick_coprime(int n) {
  for (int a : {3, 5, 7, 2}) {
    if (std::gcd(a, n) == 1) return a;
  }
  return 1;
}

std::vector<double> digit_weights(const CorpusSourceConfig& cfg) {
  std::vector<double> w(10);
  double total = 0.0;
  for (int d = 0; d < 10; ++d) {
    w[d] = std::pow(cfg.digit_decay, d);
    total += w[d];
  }
  for (double& x : w) x /= total;
  return w;
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

TokenSeq generate_sequence(int seq_len, int vocab_size, const CorpusSourceConfig& cfg,
                           Rng& rng) {
  int n_text = vocab_size - 10;
  int mult = pick_coprime(n_text);
  std::vector<double> dw = digit_weights(cfg);
  TokenSeq seq;
  seq.tokens.reserve(seq_len);
  // Context holds the last two *text* symbols; digits do not advance it.
  int prev2 = static_cast<int>(rng.uniform_int(0, n_text - 1));
  int prev1 = static_cast<int>(rng.uniform_int(0, n_text - 1));
  for (int i = 0; i < seq_len; ++i) {
    if (rng.uniform() < cfg.digit_prob) {
      seq.tokens.push_back(sample_index(dw, rng));  // digit tokens are ids 0..9
      continue;
    }
    int t;
    if (rng.uniform() < cfg.follow_prob) {
      t = (prev1 + mult * prev2 + 7) % n_text;
    } else {
      t = static_cast<int>(rng.uniform_int(0, n_text - 1));
    }
    seq.tokens.push_back(10 + t);
    prev2 = prev1;
    prev1 = t;
  }
  return seq;
}

}  // namespace

std::vector<double> corpus_unigram_distribution(int vocab_size, const CorpusSourceConfig& cfg) {
  if (vocab_size < 14) throw ArgumentError("corpus_unigram_distribution: vocab_size must be >= 14");
  std::vector<double> p(vocab_size, 0.0);
  std::vector<double> dw = digit_weights(cfg);
  for (int d = 0; d < 10; ++d) p[d] = cfg.digit_prob * dw[d];
  int n_text = vocab_size - 10;
  for (int t = 0; t < n_text; ++t) p[10 + t] = (1.0 - cfg.digit_prob) / n_text;
  return p;
}

TextCorpus synth_corpus(int num_sequences, int seq_len, int vocab_size, const Rng& seed,
                        const CorpusSourceConfig& cfg) {
  if (vocab_size < 14)
    throw ArgumentError("synth_corpus: vocab_size must be >= 14 (10 digits + 4 text tokens)");
  if (num_sequences < 1) throw ArgumentError("synth_corpus: num_sequences must be >= 1");
  if (seq_len < 1) throw ArgumentError("synth_corpus: seq_len must be >= 1");
  TextCorpus c;
  c.vocab_size = vocab_size;
  for (int d = 0; d < 10; ++d) c.digit_token_map[d] = d;
  c.sequences.reserve(num_sequences);
  for (int s = 0; s < num_sequences; ++s) {
    Rng rng = seed.substream("corpus").substream(static_cast<uint64_t>(s));
    c.sequences.push_back(generate_sequence(seq_len, vocab_size, cfg, rng));
  }
  return c;
}

TokenSeq synth_corpus_sequence(int seq_len, int vocab_size, const Rng& seed,
                               const CorpusSourceConfig& cfg) {
  if (vocab_size < 14) throw ArgumentError("synth_corpus_sequence: vocab_size must be >= 14");
  if (seq_len < 1) throw ArgumentError("synth_corpus_sequence: seq_len must be >= 1");
  Rng rng = seed.substream("sequence");
  return generate_sequence(seq_len, vocab_size, cfg, rng);
}

// --- splits and universes --------------------------------------------------

std::pair<LabeledDataset, LabeledDataset> split_random(const LabeledDataset& dataset,
                                                       double fraction, const Rng& seed) {
  dataset.validate();
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ArgumentError("split_random: fraction must be in (0,1)");
  double n = static_cast<double>(dataset.size());
  if (fraction * n < 1.0 || (1.0 - fraction) * n < 1.0)
    throw ArgumentError("split_random: a side would be empty");
  size_t left_size = static_cast<size_t>(std::floor(fraction * n));
  std::vector<size_t> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  Rng rng = seed.substream("split");
  rng.shuffle(idx);
  LabeledDataset left, right;
  left.num_classes = right.num_classes = dataset.num_classes;
  left.feature_dim = right.feature_dim = dataset.feature_dim;
  for (size_t i = 0; i < idx.size(); ++i) {
    (i < left_size ? left : right).examples.push_back(dataset.examples[idx[i]]);
  }
  return {std::move(left), std::move(right)};
}

Universe build_universe(const TargetSpec& target) {
  target.validate();
  Universe u;
  u.kind = target.kind;
  switch (target.kind) {
    case TargetKind::membership:
      u.candidates = {"present", "absent"};
      break;
    case TargetKind::attribute:
      u.candidates = {"version-0", "version-1"};
      break;
    case TargetKind::canary: {
      int L = target.canary->digit_count;
      if (L > 7) throw ArgumentError("build_universe: digit_count too large to enumerate");
      size_t total = 1;
      for (int i = 0; i < L; ++i) total *= 10;
      u.candidates.reserve(total);
      std::string s(L, '0');
      for (size_t v = 0; v < total; ++v) {
        size_t rem = v;
        for (int i = L - 1; i >= 0; --i) {
          s[i] = static_cast<char>('0' + rem % 10);
          rem /= 10;
        }
        u.candidates.push_back(s);
      }
      break;
    }
  }
  return u;
}

// --- text formats ----------------------------------------------------------

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", x);
  return buf;
}

double parse_double(const std::string& s, int line_for_errors) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError("expected a number, got '" + s + "'", line_for_errors);
  return v;
}

std::string dataset_to_text(const LabeledDataset& d) {
  d.validate();
  std::ostringstream out;
  out << "poisonlab-dataset v1\n";
  out << "classes " << d.num_classes << " dim " << d.feature_dim << " n " << d.size() << "\n";
  for (const Example& e : d.examples) {
    out << e.label;
    for (double f : e.features) out << ' ' << format_double(f);
    out << '\n';
  }
  return out.str();
}

LabeledDataset dataset_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty dataset document", 1);
  ++lineno;
  if (line != "poisonlab-dataset v1")
    throw VersionError("dataset header mismatch: expected 'poisonlab-dataset v1', got '" + line + "'");
  if (!std::getline(in, line)) throw ParseError("missing dataset size line", 2);
  ++lineno;
  LabeledDataset d;
  size_t n = 0;
  {
    std::istringstream hs(line);
    std::string kw1, kw2, kw3;
    if (!(hs >> kw1 >> d.num_classes >> kw2 >> d.feature_dim >> kw3 >> n) || kw1 != "classes" ||
        kw2 != "dim" || kw3 != "n")
      throw ParseError("bad dataset size line", lineno);
  }
  for (size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("truncated dataset body", lineno + 1);
    ++lineno;
    std::istringstream ls(line);
    Example e;
    if (!(ls >> e.label)) throw ParseError("bad example row", lineno);
    std::string tok;
    while (ls >> tok) e.features.push_back(parse_double(tok, lineno));
    if (static_cast<int>(e.features.size()) != d.feature_dim)
      throw ParseError("feature count mismatch", lineno);
    d.examples.push_back(std::move(e));
  }
  d.validate();
  return d;
}

std::string corpus_to_text(const TextCorpus& c) {
  c.validate();
  std::ostringstream out;
  out << "poisonlab-corpus v1\n";
  out << "vocab " << c.vocab_size << " n " << c.sequences.size() << "\ndigits";
  for (int d = 0; d < 10; ++d) out << ' ' << c.digit_token_map[d];
  out << '\n';
  for (const TokenSeq& s : c.sequences) {
    out << "seq " << s.size() << ":";
    for (int t : s.tokens) out << ' ' << t;
    out << '\n';
  }
  return out.str();
}

TextCorpus corpus_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty corpus document", 1);
  ++lineno;
  if (line != "poisonlab-corpus v1")
    throw VersionError("corpus header mismatch: expected 'poisonlab-corpus v1', got '" + line + "'");
  TextCorpus c;
  size_t n = 0;
  if (!std::getline(in, line)) throw ParseError("missing corpus size line", 2);
  ++lineno;
  {
    std::istringstream hs(line);
    std::string kw1, kw2;
    if (!(hs >> kw1 >> c.vocab_size >> kw2 >> n) || kw1 != "vocab" || kw2 != "n")
      throw ParseError("bad corpus size line", lineno);
  }
  if (!std::getline(in, line)) throw ParseError("missing digits line", 3);
  ++lineno;
  {
    std::istringstream ds(line);
    std::string kw;
    if (!(ds >> kw) || kw != "digits") throw ParseError("bad digits line", lineno);
    for (int d = 0; d < 10; ++d)
      if (!(ds >> c.digit_token_map[d])) throw ParseError("bad digits line", lineno);
  }
  for (size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("truncated corpus body", lineno + 1);
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    size_t len = 0;
    char colon;
    if (!(ls >> kw >> len >> colon) || kw != "seq" || colon != ':')
      throw ParseError("bad sequence row", lineno);
    TokenSeq s;
    int t;
    while (ls >> t) s.tokens.push_back(t);
    if (s.size() != len) throw ParseError("sequence length mismatch", lineno);
    c.sequences.push_back(std::move(s));
  }
  c.validate();
  return c;
}

}  // namespace poisonlab
