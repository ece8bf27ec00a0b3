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

#include "poisonlab/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "poisonlab/record_io.hpp"

namespace poisonlab {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << contents;
}

fs::path resolve_output_dir(const std::string& configured) {
  fs::path dir(configured);
  if (dir.is_relative()) {
    if (const char* root = std::getenv("POISONLAB_OUTPUT_ROOT")) dir = fs::path(root) / dir;
  }
  return dir;
}

std::string hash_hex(uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  try {
    spec = parse_config_file(config_path);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    auto started = std::chrono::steady_clock::now();
    GameRecord record = run_game(spec.config);
    record.config_text = config_to_canonical_text(spec.config);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    fs::path dir = resolve_output_dir(spec.output_dir);
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    std::string record_path = (dir / "record.json").string();
    write_file(record_path, record_to_text(record));
    outputs.push_back("record.json");
    for (const auto& [method, curve] : record.roc) {
      std::string name = "roc_" + method + ".csv";
      write_file((dir / name).string(), roc_to_csv(curve));
      outputs.push_back(name);
    }
    for (const auto& [method, list] : record.exposures) {
      std::string name = "exposure_" + method + ".csv";
      write_file((dir / name).string(), exposure_csv(list));
      outputs.push_back(name);
    }

    nlohmann::json manifest;
    manifest["artifact_version"] = 1;
    manifest["config_hash"] = hash_hex(config_hash(spec.config));
    manifest["master_seed"] = spec.config.master_seed;
    manifest["wall_clock_seconds"] = wall;
    manifest["outputs"] = outputs;
    write_file((dir / "manifest.json").string(), manifest.dump(1) + "\n");

    out << "wrote " << record_path << "\n";
    for (const auto& [key, value] : record.summary) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6g", value);
      out << "  " << key << " = " << buf << "\n";
    }
    return kExitOk;
  } catch (const ArgumentError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_report(const std::string& record_path, const std::string& metric,
               const std::string& csv_mirror_path, std::ostream& out, std::ostream& err) {
  GameRecord record;
  try {
    record = record_from_text(read_file(record_path));
  } catch (const std::exception& e) {
    err << "record error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::ostringstream table;
  char buf[96];
  try {
    if (metric.rfind("tpr@fpr=", 0) == 0) {
      double fpr = std::stod(metric.substr(8));
      table << "method,tpr@fpr=" << metric.substr(8) << "\n";
      for (const auto& [method, curve] : record.roc) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g\n", method.c_str(), tpr_at_fpr(curve, fpr));
        table << buf;
      }
    } else if (metric == "auc") {
      table << "method,auc\n";
      for (const auto& [method, curve] : record.roc) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g\n", method.c_str(), curve.auc);
        table << buf;
      }
    } else if (metric == "exposure") {
      table << "method,trial,rank,bits\n";
      for (const auto& [method, list] : record.exposures) {
        double mean = 0.0;
        for (size_t t = 0; t < list.size(); ++t) {
          std::snprintf(buf, sizeof(buf), "%s,%zu,%d,%.17g\n", method.c_str(), t, list[t].rank,
                        list[t].exposure_bits);
          table << buf;
          mean += list[t].exposure_bits;
        }
        if (!list.empty()) {
          std::snprintf(buf, sizeof(buf), "%s,mean,,%.17g\n", method.c_str(),
                        mean / static_cast<double>(list.size()));
          table << buf;
        }
      }
    } else if (metric.rfind("budget=", 0) == 0) {
      int budget = std::stoi(metric.substr(7));
      table << "method,success@" << budget << "\n";
      for (const auto& [method, list] : record.exposures) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g\n", method.c_str(),
                      guesses_at_budget(list, budget));
        table << buf;
      }
    } else {
      err << "unknown metric '" << metric << "' (use tpr@fpr=<x>, auc, exposure, budget=<k>)\n";
      return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "report error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << table.str();
  if (!csv_mirror_path.empty()) {
    try {
      write_file(csv_mirror_path, table.str());
    } catch (const std::exception& e) {
      err << "csv mirror error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  return kExitOk;
}

int cmd_checkpoint(const std::string& model_path, std::ostream& out, std::ostream& err) {
  try {
    std::string original = read_file(model_path);
    Checkpoint c = checkpoint_from_text(original);
    std::string resaved = checkpoint_to_text(c);
    if (resaved != original) {
      err << "checkpoint round-trip mismatch for '" << model_path << "'\n";
      return kExitRuntime;
    }
    out << "checkpoint ok: kind=" << to_string(model_kind(c.model)) << " bytes="
        << original.size() << " (byte-identical resave)\n";
    return kExitOk;
  } catch (const VersionError& e) {
    err << "version error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "checkpoint error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace poisonlab
