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

#ifndef POISONLAB_CLI_HPP_
#define POISONLAB_CLI_HPP_

#include <iosfwd>
#include <string>

#include "poisonlab/gamelab.hpp"

namespace poisonlab {

// Exit-code contract: 0 success, 1 runtime failure, 2 usage/config error.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RunSpec {
  GameConfig config;
  std::string output_dir = "out";
};

// Key-value config with [section] headers; unknown keys are line-anchored
// parse errors.
RunSpec parse_config_text(const std::string& text);
RunSpec parse_config_file(const std::string& path);

// Canonical echo of a config: every field, fixed order. The run manifest
// hashes this text; output location is deliberately not part of it.
std::string config_to_canonical_text(const GameConfig& config);

uint64_t config_hash(const GameConfig& config);

// Runs the configured game, writes record/CSVs/manifest under the output
// directory (honoring the POISONLAB_OUTPUT_ROOT override for relative paths).
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err);

// metric: "tpr@fpr=<x>" | "auc" | "exposure" | "budget=<k>".
int cmd_report(const std::string& record_path, const std::string& metric,
               const std::string& csv_mirror_path, std::ostream& out, std::ostream& err);

// Loads a checkpoint, re-saves it, and verifies the bytes match.
int cmd_checkpoint(const std::string& model_path, std::ostream& out, std::ostream& err);

}  // namespace poisonlab

#endif  // POISONLAB_CLI_HPP_
