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

#ifndef POISONLAB_METRICS_HPP_
#define POISONLAB_METRICS_HPP_

#include <span>
#include <string>
#include <vector>

#include "poisonlab/attacks.hpp"

namespace poisonlab {

struct RocCurve {
  // (fpr, tpr) pairs, fpr non-decreasing, from (0,0) to (1,1).
  std::vector<std::pair<double, double>> points;
  double auc = 0.0;
};

// Threshold sweep over distinct score values, descending; equal scores are
// one threshold step. AUC by the trapezoid rule.
RocCurve roc_curve(std::span<const double> scores, std::span<const uint8_t> labels);

// Maximum achievable TPR at FPR <= fpr_target; step-function reading, no
// interpolation.
double tpr_at_fpr(const RocCurve& curve, double fpr_target);

// Fraction of reports whose true secret sits within the guess budget.
double guesses_at_budget(std::span<const ExposureReport> reports, int budget);

// "fpr,tpr" rows at full precision.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace poisonlab

#endif  // POISONLAB_METRICS_HPP_
