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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "poisonlab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"poisonlab: privacy-inference games with data poisoning"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run a game from a config file");
  run->add_option("config", config_path, "config file path")->required();

  std::string record_path, metric = "auc", csv_mirror;
  CLI::App* report = app.add_subcommand("report", "summarize a game record");
  report->add_option("record", record_path, "record.json path")->required();
  report->add_option("--metric", metric, "tpr@fpr=<x> | auc | exposure | budget=<k>");
  report->add_option("--csv", csv_mirror, "also write the table to this CSV file");

  std::string model_path;
  CLI::App* checkpoint = app.add_subcommand("checkpoint", "verify a model checkpoint round-trip");
  checkpoint->add_option("model", model_path, "checkpoint file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : poisonlab::kExitUsage;
  }

  if (run->parsed()) return poisonlab::cmd_run(config_path, std::cout, std::cerr);
  if (report->parsed())
    return poisonlab::cmd_report(record_path, metric, csv_mirror, std::cout, std::cerr);
  if (checkpoint->parsed()) return poisonlab::cmd_checkpoint(model_path, std::cout, std::cerr);
  return poisonlab::kExitUsage;
}
