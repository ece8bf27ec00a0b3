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

#include <algorithm>
#include <cmath>

#include "poisonlab/models.hpp"

namespace poisonlab {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Indices of the k nearest training points, ordered by (distance, index).
// Distance comparisons are exact on the stored doubles; no tolerance.
std::vector<int> k_nearest(const KnnModel& model, std::span<const double> x) {
  if (x.size() != static_cast<size_t>(model.train_set.feature_dim))
    throw ArgumentError("knn_predict: query dimension mismatch");
  std::vector<std::pair<double, int>> order;
  order.reserve(model.train_set.size());
  for (size_t i = 0; i < model.train_set.size(); ++i)
    order.emplace_back(squared_distance(model.train_set.examples[i].features, x),
                       static_cast<int>(i));
  std::partial_sort(order.begin(), order.begin() + model.k, order.end());
  std::vector<int> idx(model.k);
  for (int i = 0; i < model.k; ++i) idx[i] = order[i].second;
  return idx;
}

}  // namespace

KnnModel train_knn(const LabeledDataset& dataset, int k) {
  dataset.validate();
  if (k < 1 || k % 2 == 0) throw ArgumentError("train_knn: k must be odd and positive");
  if (static_cast<size_t>(k) > dataset.size())
    throw ArgumentError("train_knn: k exceeds dataset size");
  return KnnModel{k, dataset};
}

int knn_predict(const KnnModel& model, std::span<const double> x) {
  std::vector<int> idx = k_nearest(model, x);
  std::vector<int> votes(model.train_set.num_classes, 0);
  for (int i : idx) ++votes[model.train_set.examples[i].label];
  int best = 0;
  for (int c = 1; c < model.train_set.num_classes; ++c)
    if (votes[c] > votes[best]) best = c;  // vote ties break to smallest class id
  return best;
}

double knn_vote_fraction(const KnnModel& model, std::span<const double> x, int label) {
  std::vector<int> idx = k_nearest(model, x);
  int votes = 0;
  for (int i : idx)
    if (model.train_set.examples[i].label == label) ++votes;
  return static_cast<double>(votes) / model.k;
}

}  // namespace poisonlab
