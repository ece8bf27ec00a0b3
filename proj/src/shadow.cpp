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

#include "poisonlab/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace poisonlab {

GaussianFit fit_gaussian(std::span<const double> samples, double sigma_floor) {
  if (samples.empty()) throw ArgumentError("fit_gaussian: empty sample list");
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size());
  GaussianFit fit;
  fit.mean = mean;
  fit.std = std::max(std::sqrt(var), sigma_floor);
  return fit;
}

double gaussian_logpdf(double x, const GaussianFit& fit) {
  double z = (x - fit.mean) / fit.std;
  return -0.5 * z * z - std::log(fit.std) - 0.5 * std::log(2.0 * M_PI);
}

namespace {

// IN rows for each target column: a seeded permutation of the models, first
// half IN. Canary targets are all-OUT per the calibration protocol.
std::vector<std::vector<uint8_t>> balanced_membership(const std::vector<TargetSpec>& targets,
                                                      int n, const Rng& seed) {
  std::vector<std::vector<uint8_t>> matrix(n, std::vector<uint8_t>(targets.size(), 0));
  for (size_t j = 0; j < targets.size(); ++j) {
    if (targets[j].kind == TargetKind::canary) continue;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = seed.substream("membership").substream(static_cast<uint64_t>(j));
    rng.shuffle(order);
    for (int r = 0; r < n / 2; ++r) matrix[order[r]][j] = 1;
  }
  return matrix;
}

std::vector<size_t> subsample_indices(size_t total, double fraction, Rng& rng) {
  std::vector<size_t> idx(total);
  std::iota(idx.begin(), idx.end(), size_t{0});
  rng.shuffle(idx);
  size_t keep = static_cast<size_t>(std::floor(fraction * static_cast<double>(total)));
  keep = std::max<size_t>(keep, 1);
  idx.resize(keep);
  return idx;
}

TrainedModel train_one_tabular(const LabeledDataset& pool, const std::vector<TargetSpec>& targets,
                               const std::vector<uint8_t>& in_row,
                               const std::optional<PoisonSet>& d_adv, ModelKind kind,
                               const TrainConfig& config, const ShadowOptions& opts,
                               const Rng& model_rng) {
  Rng split_rng = model_rng.substream("split");
  std::vector<size_t> keep = subsample_indices(pool.size(), opts.subsample_fraction, split_rng);
  LabeledDataset train;
  train.num_classes = pool.num_classes;
  train.feature_dim = pool.feature_dim;
  for (size_t i : keep) train.examples.push_back(pool.examples[i]);
  for (size_t j = 0; j < targets.size(); ++j) {
    const TargetSpec& t = targets[j];
    if (t.kind == TargetKind::membership) {
      if (in_row[j]) train.examples.push_back(*t.membership);
    } else if (t.kind == TargetKind::attribute) {
      const AttributeTarget& at = *t.attribute;
      train.examples.push_back(Example{in_row[j] ? at.x1 : at.x0, at.label});
    }
  }
  if (d_adv && opts.poison_shadows) {
    for (const Example& e : d_adv->examples()) train.examples.push_back(e);
  }
  TrainConfig cfg = config;
  cfg.seed = model_rng.substream("train");
  switch (kind) {
    case ModelKind::mlp: return train_mlp(train, cfg, opts.mlp_hidden);
    case ModelKind::knn: return train_knn(train, 3);
    case ModelKind::svm: return train_svm_hard_margin(train);
    default: throw ArgumentError("train_shadow_ensemble: tabular pool needs a tabular model kind");
  }
}

TrainedModel train_one_text(const TextCorpus& pool, const std::optional<PoisonSet>& d_adv,
                            const TrainConfig& config, const ShadowOptions& opts,
                            const Rng& model_rng) {
  Rng split_rng = model_rng.substream("split");
  std::vector<size_t> keep = subsample_indices(pool.sequences.size(), opts.subsample_fraction,
                                               split_rng);
  TextCorpus train;
  train.vocab_size = pool.vocab_size;
  train.digit_token_map = pool.digit_token_map;
  for (size_t i : keep) train.sequences.push_back(pool.sequences[i]);
  if (d_adv && opts.poison_shadows) {
    for (const TokenSeq& s : d_adv->sequences()) train.sequences.push_back(s);
  }
  TrainConfig cfg = config;
  cfg.seed = model_rng.substream("train");
  return train_charlm(train, cfg, opts.lm_context, opts.lm_hidden);
}

}  // namespace

ShadowEnsemble train_shadow_ensemble(const ShadowPool& pool, const std::vector<TargetSpec>& targets,
                                     const std::optional<PoisonSet>& d_adv, int n, ModelKind kind,
                                     const TrainConfig& config, const ShadowOptions& opts) {
  if (n < 2 || n % 2 != 0) throw ArgumentError("train_shadow_ensemble: n must be even and >= 2");
  for (const TargetSpec& t : targets) t.validate();
  ShadowEnsemble ensemble;
  ensemble.targets = targets;
  ensemble.membership = balanced_membership(targets, n, config.seed);
  ensemble.models.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng model_rng = config.seed.substream("shadow").substream(static_cast<uint64_t>(i));
    if (const LabeledDataset* tab = std::get_if<LabeledDataset>(&pool)) {
      ensemble.models.push_back(train_one_tabular(*tab, targets, ensemble.membership[i], d_adv,
                                                  kind, config, opts, model_rng));
    } else {
      if (kind != ModelKind::charlm)
        throw ArgumentError("train_shadow_ensemble: text pool needs the charlm model kind");
      ensemble.models.push_back(
          train_one_text(std::get<TextCorpus>(pool), d_adv, config, opts, model_rng));
    }
    ensemble.train_meta.push_back(ShadowTrainMeta{model_rng.seed(), model_rng.stream()});
  }
  return ensemble;
}

std::pair<std::vector<double>, std::vector<double>> collect_scores(const ShadowEnsemble& ensemble,
                                                                   int target_index,
                                                                   const ScoreFn& score_fn) {
  if (target_index < 0 || static_cast<size_t>(target_index) >= ensemble.target_count())
    throw ArgumentError("collect_scores: unknown target");
  std::vector<double> l_in, l_out;
  for (size_t i = 0; i < ensemble.models.size(); ++i) {
    double s = score_fn(ensemble.models[i], ensemble.targets[target_index]);
    (ensemble.membership[i][target_index] ? l_in : l_out).push_back(s);
  }
  return {std::move(l_in), std::move(l_out)};
}

void save_ensemble(const ShadowEnsemble& ensemble, const std::string& dir,
                   const std::string& manifest_name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ostringstream out;
  out << "poisonlab-ensemble v1\n";
  size_t width = ensemble.membership.empty() ? 0 : ensemble.membership[0].size();
  out << "models " << ensemble.models.size() << " targets " << width << '\n';
  for (size_t i = 0; i < ensemble.models.size(); ++i) {
    std::string name = "model_" + std::to_string(i) + ".ckpt";
    Checkpoint c{ensemble.models[i], ensemble.train_meta[i].seed, ensemble.train_meta[i].stream};
    save_checkpoint_file(c, (fs::path(dir) / name).string());
    out << "model " << i << ' ' << name << '\n';
  }
  for (size_t i = 0; i < ensemble.membership.size(); ++i) {
    out << "row " << i;
    for (uint8_t v : ensemble.membership[i]) out << ' ' << static_cast<int>(v);
    out << '\n';
  }
  std::ofstream f((fs::path(dir) / manifest_name).string());
  if (!f) throw ParseError("cannot write ensemble manifest in '" + dir + "'");
  f << out.str();
}

ShadowEnsemble load_ensemble(const std::string& manifest_path, std::vector<TargetSpec> targets) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open ensemble manifest '" + manifest_path + "'");
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line) || line != "poisonlab-ensemble v1")
    throw VersionError("ensemble manifest header mismatch");
  ++lineno;
  if (!std::getline(in, line)) throw ParseError("missing ensemble size line", 2);
  ++lineno;
  size_t n = 0, t = 0;
  {
    std::istringstream hs(line);
    std::string k1, k2;
    if (!(hs >> k1 >> n >> k2 >> t) || k1 != "models" || k2 != "targets")
      throw ParseError("bad ensemble size line", lineno);
  }
  ShadowEnsemble ensemble;
  ensemble.targets = std::move(targets);
  fs::path base = fs::path(manifest_path).parent_path();
  for (size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("truncated model list", lineno + 1);
    ++lineno;
    std::istringstream ms(line);
    std::string kw, name;
    size_t idx;
    if (!(ms >> kw >> idx >> name) || kw != "model" || idx != i)
      throw ParseError("bad model line", lineno);
    Checkpoint c = load_checkpoint_file((base / name).string());
    ensemble.models.push_back(std::move(c.model));
    ensemble.train_meta.push_back(ShadowTrainMeta{c.train_seed, c.train_stream});
  }
  for (size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("truncated matrix", lineno + 1);
    ++lineno;
    std::istringstream rs(line);
    std::string kw;
    size_t idx;
    if (!(rs >> kw >> idx) || kw != "row" || idx != i) throw ParseError("bad matrix row", lineno);
    std::vector<uint8_t> row;
    int v;
    while (rs >> v) row.push_back(static_cast<uint8_t>(v));
    if (row.size() != t) throw ParseError("matrix row length mismatch", lineno);
    ensemble.membership.push_back(std::move(row));
  }
  return ensemble;
}

}  // namespace poisonlab
