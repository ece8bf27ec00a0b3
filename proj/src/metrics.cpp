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

#include "poisonlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace poisonlab {

RocCurve roc_curve(std::span<const double> scores, std::span<const uint8_t> labels) {
  if (scores.size() != labels.size()) throw ArgumentError("roc_curve: length mismatch");
  if (scores.empty()) throw ArgumentError("roc_curve: empty input");
  size_t pos = 0, neg = 0;
  for (uint8_t l : labels) (l ? pos : neg) += 1;
  if (pos == 0 || neg == 0) throw ArgumentError("roc_curve: both classes must be present");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  size_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    // Everything tied at this score crosses the threshold together.
    double v = scores[order[i]];
    while (i < order.size() && scores[order[i]] == v) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos));
  }
  double auc = 0.0;
  for (size_t p = 1; p < curve.points.size(); ++p) {
    double dx = curve.points[p].first - curve.points[p - 1].first;
    auc += dx * 0.5 * (curve.points[p].second + curve.points[p - 1].second);
  }
  curve.auc = auc;
  return curve;
}

double tpr_at_fpr(const RocCurve& curve, double fpr_target) {
  if (fpr_target < 0.0 || fpr_target > 1.0) throw ArgumentError("tpr_at_fpr: target out of [0,1]");
  double best = 0.0;
  for (const auto& [fpr, tpr] : curve.points)
    if (fpr <= fpr_target) best = std::max(best, tpr);
  return best;
}

double guesses_at_budget(std::span<const ExposureReport> reports, int budget) {
  if (budget < 1) throw ArgumentError("guesses_at_budget: budget must be >= 1");
  if (reports.empty()) return 0.0;
  size_t hits = 0;
  for (const ExposureReport& r : reports)
    if (r.rank <= budget) ++hits;
  return static_cast<double>(hits) / static_cast<double>(reports.size());
}

std::string roc_to_csv(const RocCurve& curve) {
  std::ostringstream out;
  out << "fpr,tpr\n";
  char buf[80];
  for (const auto& [fpr, tpr] : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", fpr, tpr);
    out << buf;
  }
  return out.str();
}

}  // namespace poisonlab
