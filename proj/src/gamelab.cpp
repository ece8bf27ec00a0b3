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

#include "poisonlab/gamelab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "poisonlab/csv.hpp"

namespace poisonlab {

std::string to_string(GameKind g) {
  switch (g) {
    case GameKind::membership: return "membership";
    case GameKind::attribute: return "attribute";
    case GameKind::canary: return "canary";
  }
  return "?";
}

GameKind game_kind_from_string(const std::string& s) {
  if (s == "membership") return GameKind::membership;
  if (s == "attribute") return GameKind::attribute;
  if (s == "canary") return GameKind::canary;
  throw ArgumentError("unknown game kind '" + s + "'");
}

void GameConfig::validate() const {
  if (trials < 1) throw ArgumentError("game config: trials must be >= 1");
  if (workers < 1) throw ArgumentError("game config: workers must be >= 1");
  if (model.epochs < 0 || model.learning_rate <= 0.0 || model.batch_size < 1)
    throw ArgumentError("game config: bad training hyperparameters");
  switch (game) {
    case GameKind::membership:
      if (model.kind == ModelKind::charlm)
        throw ArgumentError("game config: membership game needs a classifier model");
      if (model.kind == ModelKind::knn) {
        if (model.k < 1 || model.k % 2 == 0) throw ArgumentError("game config: knn k must be odd");
        if (!poison.empty() && poison.recipe != "knn")
          throw ArgumentError("game config: knn game supports only the knn poison recipe");
        if (target_mode != "sampled" && target_mode != "unused")
          throw ArgumentError("game config: target_mode must be sampled or unused");
      } else if (model.kind == ModelKind::svm) {
        if (poison.recipe != "svm_protruding")
          throw ArgumentError("game config: svm game requires the svm_protruding recipe");
        if (pool.dim > 3) throw ArgumentError("game config: svm game supports dim <= 3");
      } else {
        if (!poison.empty() && poison.recipe != "label_flip_targeted" &&
            poison.recipe != "label_flip_untargeted")
          throw ArgumentError("game config: mlp membership game needs a label_flip recipe");
        if (shadows.n < 2 || shadows.n % 2 != 0)
          throw ArgumentError("game config: shadow count must be even and >= 2");
      }
      break;
    case GameKind::attribute:
      if (pool.kind != "table" && pool.kind != "csv")
        throw ArgumentError("game config: attribute game needs a table or csv pool");
      if (model.kind != ModelKind::mlp)
        throw ArgumentError("game config: attribute game needs the mlp model");
      if (!poison.empty() && poison.recipe != "attribute")
        throw ArgumentError("game config: attribute game needs the attribute poison recipe");
      if (targets < 2) throw ArgumentError("game config: attribute game needs >= 2 targets");
      if (target_models < 1) throw ArgumentError("game config: need >= 1 target model");
      if (shadows.n < 2 || shadows.n % 2 != 0)
        throw ArgumentError("game config: shadow count must be even and >= 2");
      break;
    case GameKind::canary:
      if (pool.kind != "corpus") throw ArgumentError("game config: canary game needs a corpus pool");
      if (model.kind != ModelKind::charlm)
        throw ArgumentError("game config: canary game needs the charlm model");
      if (canary.digits < 1 || canary.digits > 4)
        throw ArgumentError("game config: canary digits must be in [1, 4] at desk scale");
      if (!poison.empty() && poison.recipe != "canary_suffix")
        throw ArgumentError("game config: canary game needs the canary_suffix recipe");
      if (canary.calibrated && shadows.n < 1)
        throw ArgumentError("game config: calibrated canary attack needs shadows");
      if (!canary.calibrated && !canary.uncalibrated)
        throw ArgumentError("game config: enable at least one canary method");
      break;
  }
}

namespace {

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(err_mutex);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

Rng master_rng(const GameConfig& config) { return Rng(config.master_seed, "game"); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

RocCurve roc_from_trials(const std::vector<TrialRecord>& trials, const std::string& method) {
  std::vector<double> scores;
  std::vector<uint8_t> labels;
  for (const TrialRecord& t : trials) {
    auto it = t.scores.find(method);
    if (it == t.scores.end()) continue;
    scores.push_back(it->second);
    labels.push_back(static_cast<uint8_t>(t.world));
  }
  return roc_curve(scores, labels);
}

double guess_accuracy(const std::vector<TrialRecord>& trials, const std::string& detail_key) {
  size_t hits = 0, total = 0;
  for (const TrialRecord& t : trials) {
    auto it = t.details.find(detail_key);
    if (it == t.details.end()) continue;
    ++total;
    if (static_cast<int>(it->second) == t.world) ++hits;
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

TrainConfig model_train_config(const ModelConfig& mc, const Rng& seed) {
  TrainConfig cfg;
  cfg.epochs = mc.epochs;
  cfg.learning_rate = mc.learning_rate;
  cfg.batch_size = mc.batch_size;
  cfg.loss_clip = mc.loss_clip;
  cfg.seed = seed;
  return cfg;
}

// --- kNN membership game ---------------------------------------------------

void run_knn_trial(const GameConfig& config, int trial, const Rng& master, TrialRecord* out) {
  Rng rng = master.substream("trial").substream(static_cast<uint64_t>(trial));
  LabeledDataset pool;
  Example target;
  if (config.target_mode == "unused") {
    UnusedPointInstance inst = make_unused_point_instance(config.model.k, rng.substream("unused"));
    pool = std::move(inst.pool);
    target = std::move(inst.target);
  } else {
    pool = synth_blobs(config.pool.classes, config.pool.per_class, config.pool.dim,
                       config.pool.spread, rng.substream("pool"));
    target = synth_blob_point(config.pool.classes, config.pool.dim, config.pool.spread,
                              rng.substream("target"));
  }
  bool in_world = rng.substream("coin").uniform() < 0.5;

  LabeledDataset train = pool;
  std::string poison_tag = "none";
  if (config.poison.recipe == "knn") {
    double min_sq = std::numeric_limits<double>::infinity();
    for (const Example& e : pool.examples)
      min_sq = std::min(min_sq, squared_distance(e.features, target.features));
    double delta = 0.5 * std::sqrt(min_sq);
    if (!(delta > 0.0)) throw SolverError("knn game: target coincides with an honest point");
    int y_prime = (target.label + 1) % pool.num_classes;
    PoisonSet adv = knn_poison(target.features, target.label, config.model.k, delta, y_prime,
                               pool.num_classes);
    // The construction is only sound when no honest point sits within delta.
    for (const Example& e : pool.examples)
      if (squared_distance(e.features, target.features) <= delta * delta)
        throw SolverError("knn game: delta safety violated");
    for (const Example& e : adv.examples()) train.examples.push_back(e);
    poison_tag = adv.strategy;
  }
  if (in_world) train.examples.push_back(target);

  KnnModel model = train_knn(train, config.model.k);
  int pred = knn_predict(model, target.features);
  bool guess_member = pred == target.label;

  out->trial = trial;
  out->target_id = "trial-" + std::to_string(trial);
  out->world = in_world ? 1 : 0;
  out->scores["knn-label"] = guess_member ? 1.0 : 0.0;
  out->details["guess"] = guess_member ? 1.0 : 0.0;
  out->poison_tag = poison_tag;
}

// --- SVM membership game ----------------------------------------------------

void run_svm_trial(const GameConfig& config, int trial, const Rng& master, TrialRecord* out) {
  Rng rng = master.substream("trial").substream(static_cast<uint64_t>(trial));
  ProtrudingInstance inst = make_protruding_instance(config.pool.dim, rng.substream("instance"));
  std::optional<ProtrudingGeometry> geom = analyze_protruding(inst.data, inst.target_index);
  if (!geom) throw SolverError("svm game: generated instance is not protruding");
  PoisonSet adv = svm_protruding_poison(inst.data, inst.target_index);
  bool in_world = rng.substream("coin").uniform() < 0.5;

  LabeledDataset train;
  train.num_classes = inst.data.num_classes;
  train.feature_dim = inst.data.feature_dim;
  int target_train_index = -1;
  for (size_t i = 0; i < inst.data.size(); ++i) {
    if (static_cast<int>(i) == inst.target_index && !in_world) continue;
    if (static_cast<int>(i) == inst.target_index) target_train_index = static_cast<int>(train.size());
    train.examples.push_back(inst.data.examples[i]);
  }
  train.examples.push_back(adv.examples()[0]);

  SvmModel model = train_svm_hard_margin(train);
  double expected_in_margin = geom->delta / 4.0;
  bool guess_member = model.margin <= expected_in_margin + 1e-6;
  bool target_support = false;
  if (target_train_index >= 0)
    target_support = std::find(model.support_indices.begin(), model.support_indices.end(),
                               target_train_index) != model.support_indices.end();

  out->trial = trial;
  out->target_id = "trial-" + std::to_string(trial);
  out->world = in_world ? 1 : 0;
  out->scores["svm-margin"] = -model.margin;
  out->details["guess"] = guess_member ? 1.0 : 0.0;
  out->details["margin"] = model.margin;
  out->details["delta"] = geom->delta;
  out->details["expected_in_margin"] = expected_in_margin;
  out->details["target_is_support"] = target_support ? 1.0 : 0.0;
  out->poison_tag = adv.strategy;
}

// --- MLP membership game ----------------------------------------------------

GameRecord run_mlp_membership(const GameConfig& config) {
  Rng master = master_rng(config);
  bool untargeted = config.poison.recipe == "label_flip_untargeted";

  LabeledDataset pool = synth_blobs(config.pool.classes, config.pool.per_class, config.pool.dim,
                                    config.pool.spread, master.substream("pool"));

  std::vector<TargetSpec> targets;
  LabeledDataset shadow_pool;
  std::optional<PoisonSet> d_adv;
  std::string poison_tag = "none";

  if (untargeted) {
    // Every honest point is a target; models train on their half of the pool
    // plus the adversary's same-size share.
    for (const Example& e : pool.examples) targets.push_back(TargetSpec::for_membership(e));
    shadow_pool.num_classes = pool.num_classes;
    shadow_pool.feature_dim = pool.feature_dim;
    if (config.poison.r > 0) {
      int n_adv = static_cast<int>(std::floor(config.shadows.subsample *
                                              static_cast<double>(pool.size())));
      LabeledDataset adv_pool = synth_blobs(config.pool.classes, config.pool.per_class,
                                            config.pool.dim, config.pool.spread,
                                            master.substream("adv-pool"));
      UntargetedFlip strat = config.poison.strategy == "random"     ? UntargetedFlip::random
                             : config.poison.strategy == "next_class" ? UntargetedFlip::next_class
                                                                      : UntargetedFlip::same_class;
      d_adv = label_flip_untargeted(adv_pool, n_adv, strat, master.substream("poison"));
      poison_tag = d_adv->strategy;
    }
  } else {
    int T = config.targets;
    std::optional<MlpModel> reference;
    if (config.poison.strategy == "best" || config.poison.strategy == "worst")
      reference = train_mlp(pool, model_train_config(config.model, master.substream("reference")),
                            config.model.hidden);
    std::vector<Example> poisons;
    for (int j = 0; j < T; ++j) {
      Example t = synth_blob_point(config.pool.classes, config.pool.dim, config.pool.spread,
                                   master.substream("target").substream(static_cast<uint64_t>(j)));
      targets.push_back(TargetSpec::for_membership(t));
      if (config.poison.recipe == "label_flip_targeted" && config.poison.r > 0) {
        FlipStrategy strat;
        strat.choice = config.poison.strategy == "best"           ? FlipChoice::best
                       : config.poison.strategy == "worst"        ? FlipChoice::worst
                       : config.poison.strategy == "random_multi" ? FlipChoice::random_multi
                                                                  : FlipChoice::random;
        strat.reference = reference ? &*reference : nullptr;
        PoisonSet p = label_flip_targeted(t, config.poison.r, strat, pool.num_classes,
                                          master.substream("poison").substream(static_cast<uint64_t>(j)));
        for (const Example& e : p.examples()) poisons.push_back(e);
        poison_tag = p.strategy;
      }
    }
    shadow_pool = pool;
    if (!poisons.empty()) {
      PoisonSet p;
      p.contents = std::move(poisons);
      p.strategy = poison_tag + " x" + std::to_string(targets.size());
      poison_tag = p.strategy;
      d_adv = std::move(p);
    }
  }

  ShadowOptions opts;
  opts.subsample_fraction = config.shadows.subsample;
  opts.poison_shadows = config.shadows.poison_shadows;
  opts.mlp_hidden = config.model.hidden;
  ShadowEnsemble ensemble =
      train_shadow_ensemble(shadow_pool, targets, d_adv, config.shadows.n, ModelKind::mlp,
                            model_train_config(config.model, master.substream("ensemble")), opts);

  LooResult loo = leave_one_out_eval(ensemble, config.workers);
  GameRecord record;
  record.game = to_string(config.game);
  record.master_seed = config.master_seed;
  record.trials = std::move(loo.trials);
  for (TrialRecord& t : record.trials) t.poison_tag = poison_tag;
  record.roc = std::move(loo.roc);
  for (const auto& [method, curve] : record.roc) record.summary["auc:" + method] = curve.auc;
  return record;
}

}  // namespace

LooResult leave_one_out_eval(const ShadowEnsemble& ensemble, int workers) {
  int n = static_cast<int>(ensemble.model_count());
  int t = static_cast<int>(ensemble.target_count());
  if (n < 2) throw ArgumentError("leave_one_out_eval: need >= 2 models");
  if (t < 1) throw ArgumentError("leave_one_out_eval: need >= 1 target");
  TargetKind kind = ensemble.targets[0].kind;
  for (const TargetSpec& spec : ensemble.targets)
    if (spec.kind != kind) throw ArgumentError("leave_one_out_eval: mixed target kinds");

  // Raw per-(model, target) statistics, computed once.
  std::vector<std::vector<double>> stat(n, std::vector<double>(t, 0.0));
  std::vector<std::vector<double>> prob;  // membership only
  if (kind == TargetKind::membership) prob.assign(n, std::vector<double>(t, 0.0));
  parallel_for(n, workers, [&](int i) {
    for (int j = 0; j < t; ++j) {
      const TargetSpec& spec = ensemble.targets[j];
      if (kind == TargetKind::membership) {
        double p = model_true_label_prob(ensemble.models[i], *spec.membership);
        prob[i][j] = p;
        stat[i][j] = logit_scale(p);
      } else if (kind == TargetKind::attribute) {
        const AttributeTarget& at = *spec.attribute;
        stat[i][j] = ai_diff_score(std::get<MlpModel>(ensemble.models[i]), at.x0, at.x1, at.label);
      } else {
        throw ArgumentError("leave_one_out_eval: canary targets have no leave-one-out path");
      }
    }
  });

  // One-sided fallback when excluding the target model empties a side (N=2).
  auto two_sided = [](double s, const std::vector<double>& pos, const std::vector<double>& neg) {
    if (!pos.empty() && !neg.empty())
      return lira_mi_score(s, fit_gaussian(pos), fit_gaussian(neg));
    if (!neg.empty()) return -gaussian_logpdf(s, fit_gaussian(neg));
    return gaussian_logpdf(s, fit_gaussian(pos));
  };

  LooResult result;
  result.trials.resize(static_cast<size_t>(n) * t);
  parallel_for(n, workers, [&](int i) {
    for (int j = 0; j < t; ++j) {
      std::vector<double> side_in, side_out;
      for (int m = 0; m < n; ++m) {
        if (m == i) continue;
        (ensemble.membership[m][j] ? side_in : side_out).push_back(stat[m][j]);
      }
      TrialRecord& rec = result.trials[static_cast<size_t>(i) * t + j];
      rec.trial = i * t + j;
      rec.target_id = "model-" + std::to_string(i) + "/target-" + std::to_string(j);
      rec.world = ensemble.membership[i][j] ? 1 : 0;
      if (kind == TargetKind::membership) {
        rec.scores["lira"] = two_sided(stat[i][j], side_in, side_out);
        rec.scores["global"] = prob[i][j];
      } else {
        rec.scores["lira-diff"] = two_sided(stat[i][j], side_in, side_out);
        rec.scores["lowest-loss"] = stat[i][j];
      }
    }
  });
  for (const std::string& method : kind == TargetKind::membership
                                       ? std::vector<std::string>{"lira", "global"}
                                       : std::vector<std::string>{"lira-diff", "lowest-loss"})
    result.roc[method] = roc_from_trials(result.trials, method);
  return result;
}

GameRecord run_membership_game(const GameConfig& config) {
  config.validate();
  if (config.game != GameKind::membership)
    throw ArgumentError("run_membership_game: config is not a membership game");
  if (config.model.kind == ModelKind::mlp) return run_mlp_membership(config);

  Rng master = master_rng(config);
  GameRecord record;
  record.game = to_string(config.game);
  record.master_seed = config.master_seed;
  record.trials.resize(config.trials);
  if (config.model.kind == ModelKind::knn) {
    parallel_for(config.trials, config.workers,
                 [&](int i) { run_knn_trial(config, i, master, &record.trials[i]); });
    record.roc["knn-label"] = roc_from_trials(record.trials, "knn-label");
    record.summary["accuracy"] = guess_accuracy(record.trials, "guess");
  } else {
    parallel_for(config.trials, config.workers,
                 [&](int i) { run_svm_trial(config, i, master, &record.trials[i]); });
    record.roc["svm-margin"] = roc_from_trials(record.trials, "svm-margin");
    record.summary["accuracy"] = guess_accuracy(record.trials, "guess");
  }
  for (const auto& [method, curve] : record.roc) record.summary["auc:" + method] = curve.auc;
  return record;
}

GameRecord run_attribute_game(const GameConfig& config) {
  config.validate();
  if (config.game != GameKind::attribute)
    throw ArgumentError("run_attribute_game: config is not an attribute game");
  Rng master = master_rng(config);

  LabeledDataset pool;
  int attr_index = config.pool.attr_index;
  if (config.pool.kind == "table") {
    pool = synth_table(config.pool.rows, config.pool.features, attr_index, config.pool.attr_mode,
                       master.substream("pool"));
  } else {
    TabularData tab = load_csv_tabular(config.pool.csv_path, config.pool.label_column,
                                       {config.pool.attr_column});
    pool = std::move(tab.data);
    attr_index = tab.attr_features[0].second;
  }

  int T = config.targets;
  std::vector<TargetSpec> targets;
  std::vector<int> true_bits(T);
  std::vector<Example> poisons;
  std::string poison_tag = "none";
  for (int j = 0; j < T; ++j) {
    Rng trng = master.substream("target").substream(static_cast<uint64_t>(j));
    Example row;
    if (config.pool.kind == "table") {
      LabeledDataset one = synth_table(1, config.pool.features, attr_index, config.pool.attr_mode,
                                       trng);
      row = one.examples[0];
    } else {
      // CSV pools draw targets from the loaded rows (and remove them below).
      row = pool.examples[j % pool.size()];
    }
    AttributeTarget at;
    at.label = row.label;
    at.attr_index = attr_index;
    at.x0 = row.features;
    at.x0[attr_index] = 0.0;
    at.x1 = row.features;
    at.x1[attr_index] = 1.0;
    true_bits[j] = row.features[attr_index] >= 0.5 ? 1 : 0;
    targets.push_back(TargetSpec::for_attribute(at));
    if (config.poison.recipe == "attribute" && config.poison.r > 0) {
      int y_prime = static_cast<int>(trng.substream("ylabel").uniform_int(0, pool.num_classes - 2));
      if (y_prime >= at.label) ++y_prime;
      PoisonSet p = attribute_poison(at.x0, at.x1, at.label, config.poison.r, y_prime);
      for (const Example& e : p.examples()) poisons.push_back(e);
      poison_tag = p.strategy;
    }
  }
  if (config.pool.kind == "csv") {
    // Targets must not stay in the pool: drop the first T rows.
    pool.examples.erase(pool.examples.begin(),
                        pool.examples.begin() + std::min<size_t>(T, pool.size()));
    pool.validate();
  }

  std::optional<PoisonSet> d_adv;
  if (!poisons.empty()) {
    PoisonSet p;
    p.contents = std::move(poisons);
    p.strategy = poison_tag + " x" + std::to_string(T);
    poison_tag = p.strategy;
    d_adv = std::move(p);
  }

  ShadowOptions opts;
  opts.subsample_fraction = config.shadows.subsample;
  opts.poison_shadows = config.shadows.poison_shadows;
  opts.mlp_hidden = config.model.hidden;
  ShadowEnsemble shadows =
      train_shadow_ensemble(pool, targets, d_adv, config.shadows.n, ModelKind::mlp,
                            model_train_config(config.model, master.substream("ensemble")), opts);

  // Target models hold every target's true version (plus the poisons).
  int M = config.target_models;
  std::vector<MlpModel> target_models(M);
  parallel_for(M, config.workers, [&](int m) {
    Rng mrng = master.substream("tmodel").substream(static_cast<uint64_t>(m));
    Rng split_rng = mrng.substream("split");
    std::vector<size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    split_rng.shuffle(idx);
    size_t keep = std::max<size_t>(1, static_cast<size_t>(std::floor(
                                          config.shadows.subsample * static_cast<double>(pool.size()))));
    LabeledDataset train;
    train.num_classes = pool.num_classes;
    train.feature_dim = pool.feature_dim;
    for (size_t i = 0; i < keep; ++i) train.examples.push_back(pool.examples[idx[i]]);
    for (int j = 0; j < T; ++j) {
      const AttributeTarget& at = *targets[j].attribute;
      train.examples.push_back(Example{true_bits[j] ? at.x1 : at.x0, at.label});
    }
    if (d_adv)
      for (const Example& e : d_adv->examples()) train.examples.push_back(e);
    target_models[m] = train_mlp(train, model_train_config(config.model, mrng.substream("train")),
                                 config.model.hidden);
  });

  // Imputation baseline: the pool without targets (targets were never in it).
  MlpModel imputer = imputation_train(
      pool, attr_index, model_train_config(config.model, master.substream("imputation")));

  // Per-target Gaussian fits over the shadow diffs.
  std::vector<GaussianFit> fit0(T), fit1(T);
  parallel_for(T, config.workers, [&](int j) {
    const AttributeTarget& at = *targets[j].attribute;
    std::vector<double> l0, l1;
    for (size_t m = 0; m < shadows.models.size(); ++m) {
      double diff = ai_diff_score(std::get<MlpModel>(shadows.models[m]), at.x0, at.x1, at.label);
      (shadows.membership[m][j] ? l1 : l0).push_back(diff);
    }
    fit0[j] = fit_gaussian(l0);
    fit1[j] = fit_gaussian(l1);
  });

  GameRecord record;
  record.game = to_string(config.game);
  record.master_seed = config.master_seed;
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j < T; ++j) {
      const AttributeTarget& at = *targets[j].attribute;
      double diff = ai_diff_score(target_models[m], at.x0, at.x1, at.label);
      AiGuess lira = ai_likelihood_test(diff, fit0[j], fit1[j]);
      AiGuess base = ai_lowest_loss_guess(diff);
      std::vector<double> without;
      for (int i = 0; i < static_cast<int>(at.x0.size()); ++i)
        if (i != attr_index) without.push_back(at.x0[i]);
      double imp = imputation_score(imputer, without, at.label, pool.num_classes);
      TrialRecord rec;
      rec.trial = m * T + j;
      rec.target_id = "model-" + std::to_string(m) + "/target-" + std::to_string(j);
      rec.world = true_bits[j];
      rec.scores["lira-diff"] = lira.score;
      rec.scores["lowest-loss"] = base.score;
      rec.scores["imputation"] = imp;
      rec.details["lira-guess"] = lira.guess;
      rec.details["imputation-guess"] = imp > 0.5 ? 1.0 : 0.0;
      rec.poison_tag = poison_tag;
      record.trials.push_back(std::move(rec));
    }
  }
  for (const std::string& method : {"lira-diff", "lowest-loss", "imputation"}) {
    record.roc[method] = roc_from_trials(record.trials, method);
    record.summary["auc:" + method] = record.roc[method].auc;
  }
  return record;
}

GameRecord run_canary_game(const GameConfig& config) {
  config.validate();
  if (config.game != GameKind::canary)
    throw ArgumentError("run_canary_game: config is not a canary game");
  Rng master = master_rng(config);

  TextCorpus base = synth_corpus(config.pool.sequences, config.pool.seq_len, config.pool.vocab,
                                 master.substream("corpus"));
  int L = config.canary.digits;
  size_t universe_size = 1;
  for (int i = 0; i < L; ++i) universe_size *= 10;

  // The adversary's reference model (for crafted prefixes) trains on the base
  // corpus alone.
  std::optional<CharLmModel> reference;
  if (config.canary.prefix_strategy == "best" || config.canary.prefix_strategy == "worst")
    reference = train_charlm(base, model_train_config(config.model, master.substream("reference")),
                             config.model.lm_context, config.model.lm_hidden);

  bool poisoning = config.poison.recipe == "canary_suffix" && config.poison.r > 0;
  ShadowOptions opts;
  opts.subsample_fraction = config.shadows.subsample;
  opts.poison_shadows = config.shadows.poison_shadows;
  opts.lm_context = config.model.lm_context;
  opts.lm_hidden = config.model.lm_hidden;

  // Canary-free shadows are shared across trials unless each trial's poisons
  // must be folded in.
  bool per_trial_shadows = poisoning && opts.poison_shadows;
  int n_shadows = config.canary.calibrated ? config.shadows.n : 0;
  auto train_shadows = [&](const std::optional<PoisonSet>& d_adv, const Rng& shadow_rng) {
    std::vector<CharLmModel> out;
    out.reserve(n_shadows);
    for (int i = 0; i < n_shadows; ++i) {
      Rng mrng = shadow_rng.substream(static_cast<uint64_t>(i));
      Rng split_rng = mrng.substream("split");
      std::vector<size_t> idx(base.sequences.size());
      std::iota(idx.begin(), idx.end(), size_t{0});
      split_rng.shuffle(idx);
      size_t keep = std::max<size_t>(1, static_cast<size_t>(std::floor(
                                            opts.subsample_fraction *
                                            static_cast<double>(base.sequences.size()))));
      TextCorpus train;
      train.vocab_size = base.vocab_size;
      train.digit_token_map = base.digit_token_map;
      for (size_t s = 0; s < keep; ++s) train.sequences.push_back(base.sequences[idx[s]]);
      if (d_adv && opts.poison_shadows)
        for (const TokenSeq& s : d_adv->sequences()) train.sequences.push_back(s);
      out.push_back(train_charlm(train, model_train_config(config.model, mrng.substream("train")),
                                 opts.lm_context, opts.lm_hidden));
    }
    return out;
  };
  std::vector<CharLmModel> shared_shadows;
  if (!per_trial_shadows && n_shadows > 0)
    shared_shadows = train_shadows(std::nullopt, master.substream("shadow"));

  GameRecord record;
  record.game = to_string(config.game);
  record.master_seed = config.master_seed;
  record.trials.resize(config.trials);

  // Universe candidates are identical across trials.
  CanarySpec proto;
  proto.digit_count = L;
  proto.secret_digits = std::string(L, '0');
  Universe universe = build_universe(TargetSpec::for_canary(proto));

  std::vector<std::string> method_tags;
  std::optional<int> known;
  if (config.canary.known_prefix > 0) known = config.canary.known_prefix;
  if (config.canary.uncalibrated) method_tags.push_back("uncalibrated");
  if (n_shadows > 0) method_tags.push_back("calibrated");
  if (known) {
    if (config.canary.uncalibrated)
      method_tags.push_back("uncalibrated-n" + std::to_string(*known));
    if (n_shadows > 0) method_tags.push_back("calibrated-n" + std::to_string(*known));
  }
  std::map<std::string, std::vector<ExposureReport>> exposures;
  for (const std::string& tag : method_tags) exposures[tag].resize(config.trials);

  parallel_for(config.trials, config.workers, [&](int t) {
    Rng rng = master.substream("trial").substream(static_cast<uint64_t>(t));
    TokenSeq prefix;
    if (config.canary.prefix_strategy == "honest") {
      prefix = synth_corpus_sequence(config.canary.prefix_len, base.vocab_size,
                                     rng.substream("prefix"));
    } else {
      PrefixStrategy strat = config.canary.prefix_strategy == "random" ? PrefixStrategy::random
                             : config.canary.prefix_strategy == "best" ? PrefixStrategy::best
                                                                       : PrefixStrategy::worst;
      CharLmModel vocab_only;
      vocab_only.vocab_size = base.vocab_size;
      const CharLmModel& ref = reference ? *reference : vocab_only;
      prefix = canary_prefix_make(strat, config.canary.prefix_len, ref, rng.substream("prefix"));
    }
    int secret_index =
        static_cast<int>(rng.substream("secret").uniform_int(0, static_cast<int64_t>(universe_size) - 1));
    const std::string& secret = universe.candidates[secret_index];
    TokenSeq canary_seq = prefix;
    TokenSeq secret_tokens = base.tokens_for_digits(secret);
    canary_seq.tokens.insert(canary_seq.tokens.end(), secret_tokens.tokens.begin(),
                             secret_tokens.tokens.end());

    std::optional<PoisonSet> d_adv;
    if (poisoning) {
      SuffixPadding pad = config.poison.strategy == "random_rep"    ? SuffixPadding::random_rep
                          : config.poison.strategy == "random_fresh" ? SuffixPadding::random_fresh
                          : config.poison.strategy == "random_digits"
                              ? SuffixPadding::random_digits
                              : SuffixPadding::zeros;
      d_adv = canary_suffix_poison(prefix, config.poison.r, config.poison.pad_len, pad, base,
                                   rng.substream("suffix"));
    }

    TextCorpus target_corpus = base;
    target_corpus.sequences.push_back(canary_seq);
    if (d_adv)
      for (const TokenSeq& s : d_adv->sequences()) target_corpus.sequences.push_back(s);
    CharLmModel target_model =
        train_charlm(target_corpus, model_train_config(config.model, rng.substream("model")),
                     config.model.lm_context, config.model.lm_hidden);

    std::vector<CharLmModel> local_shadows;
    if (per_trial_shadows && n_shadows > 0)
      local_shadows = train_shadows(d_adv, rng.substream("shadow"));
    const std::vector<CharLmModel>& shadow_models =
        per_trial_shadows ? local_shadows : shared_shadows;

    TrialRecord& rec = record.trials[t];
    rec.trial = t;
    rec.target_id = "trial-" + std::to_string(t);
    rec.world = secret_index;
    rec.poison_tag = d_adv ? d_adv->strategy : "none";

    auto run_method = [&](const std::string& tag, std::span<const CharLmModel> calib,
                          std::optional<int> n_known) {
      Ranking ranking = canary_rank(target_model, calib, prefix, universe, base, n_known);
      ExposureReport rep = make_exposure_report(ranking, secret_index, universe_size);
      rec.details["rank:" + tag] = rep.rank;
      rec.details["bits:" + tag] = rep.exposure_bits;
      exposures[tag][t] = rep;
    };
    if (config.canary.uncalibrated) run_method("uncalibrated", {}, std::nullopt);
    if (n_shadows > 0) run_method("calibrated", shadow_models, std::nullopt);
    if (known) {
      if (config.canary.uncalibrated)
        run_method("uncalibrated-n" + std::to_string(*known), {}, known);
      if (n_shadows > 0) run_method("calibrated-n" + std::to_string(*known), shadow_models, known);
    }
  });

  record.exposures = std::move(exposures);
  for (const auto& [tag, list] : record.exposures) {
    double mean_bits = 0.0;
    for (const ExposureReport& r : list) mean_bits += r.exposure_bits;
    mean_bits /= static_cast<double>(list.size());
    record.summary["mean_bits:" + tag] = mean_bits;
    record.summary["budget100:" + tag] = guesses_at_budget(list, 100);
  }
  return record;
}

GameRecord run_game(const GameConfig& config) {
  switch (config.game) {
    case GameKind::membership: return run_membership_game(config);
    case GameKind::attribute: return run_attribute_game(config);
    case GameKind::canary: return run_canary_game(config);
  }
  throw ArgumentError("run_game: unknown game kind");
}

// --- theory-suite instance generators ---------------------------------------

UnusedPointInstance make_unused_point_instance(int k, const Rng& seed) {
  if (k < 1 || k % 2 == 0) throw ArgumentError("make_unused_point_instance: k must be odd");
  Rng rng = seed.substream("unused");
  UnusedPointInstance inst;
  inst.pool.num_classes = 2;
  inst.pool.feature_dim = 2;
  double cx = std::floor(rng.uniform() * 5.0);
  double cy = std::floor(rng.uniform() * 5.0);
  // A cluster of 3k coincident label-0 points; removing any single one (the
  // target) changes no neighbor set that matters.
  for (int i = 0; i < 3 * k; ++i)
    inst.pool.examples.push_back(Example{{cx, cy}, 0});
  for (int i = 0; i < 3 * k; ++i)
    inst.pool.examples.push_back(Example{{cx + 10.0, cy + 10.0}, 1});
  inst.target = Example{{cx, cy}, 0};
  return inst;
}

ProtrudingInstance make_protruding_instance(int dim, const Rng& seed) {
  if (dim != 2 && dim != 3) throw ArgumentError("make_protruding_instance: dim must be 2 or 3");
  for (uint64_t attempt = 0;; ++attempt) {
    Rng rng = seed.substream("protruding").substream(attempt);
    ProtrudingInstance inst;
    inst.data.num_classes = 2;
    inst.data.feature_dim = dim;
    auto point = [&](double x, double y, double z) {
      std::vector<double> p{x, y};
      if (dim == 3) p.push_back(z);
      return p;
    };
    int n0 = 5 + static_cast<int>(rng.uniform_int(0, 4));
    int n1 = 5 + static_cast<int>(rng.uniform_int(0, 4));
    for (int i = 0; i < n0; ++i)
      inst.data.examples.push_back(Example{point(-2.0 + 4.0 * rng.uniform(),
                                                  -0.5 + rng.uniform(),
                                                  -1.0 + 2.0 * rng.uniform()),
                                           0});
    for (int i = 0; i < n1; ++i)
      inst.data.examples.push_back(Example{point(-2.0 + 4.0 * rng.uniform(),
                                                  5.5 + rng.uniform(),
                                                  -1.0 + 2.0 * rng.uniform()),
                                           1});
    inst.target_index = static_cast<int>(inst.data.size());
    inst.data.examples.push_back(
        Example{point(-1.0 + 2.0 * rng.uniform(), 2.0 + rng.uniform(), 0.0), 0});

    // Random rotation and shift; orthogonal maps preserve the geometry.
    double theta = rng.uniform() * 2.0 * M_PI;
    double phi = rng.uniform() * 2.0 * M_PI;
    double tx = -5.0 + 10.0 * rng.uniform(), ty = -5.0 + 10.0 * rng.uniform();
    for (Example& e : inst.data.examples) {
      double x = e.features[0], y = e.features[1];
      e.features[0] = std::cos(theta) * x - std::sin(theta) * y + tx;
      e.features[1] = std::sin(theta) * x + std::cos(theta) * y + ty;
      if (dim == 3) {
        double y2 = e.features[1], z = e.features[2];
        e.features[1] = std::cos(phi) * y2 - std::sin(phi) * z;
        e.features[2] = std::sin(phi) * y2 + std::cos(phi) * z;
      }
    }
    std::optional<ProtrudingGeometry> geom = analyze_protruding(inst.data, inst.target_index);
    if (geom && geom->delta > 0.25) return inst;
  }
}

LabeledDataset synth_table(int rows, int num_features, int attr_index, const std::string& attr_mode,
                           const Rng& seed) {
  if (rows < 1) throw ArgumentError("synth_table: rows must be >= 1");
  if (num_features < 2) throw ArgumentError("synth_table: need >= 2 features");
  if (attr_index < 0 || attr_index >= num_features)
    throw ArgumentError("synth_table: attr_index out of range");
  if (attr_mode != "independent" && attr_mode != "derived")
    throw ArgumentError("synth_table: attr_mode must be independent or derived");
  Rng rng = seed.substream("table");
  LabeledDataset d;
  d.num_classes = 2;
  d.feature_dim = num_features;
  int driver = (attr_index + 1) % num_features;
  for (int r = 0; r < rows; ++r) {
    Example e;
    e.features.assign(num_features, 0.0);
    for (int f = 0; f < num_features; ++f)
      if (f != attr_index) e.features[f] = rng.normal();
    if (attr_mode == "independent") {
      e.features[attr_index] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    } else {
      e.features[attr_index] = e.features[driver] > 0.0 ? 1.0 : 0.0;
    }
    double s = 0.0;
    for (int f = 0; f < num_features; ++f)
      if (f != attr_index) s += e.features[f];
    e.label = s + 0.5 * rng.normal() > 0.0 ? 1 : 0;
    d.examples.push_back(std::move(e));
  }
  return d;
}

}  // namespace poisonlab
