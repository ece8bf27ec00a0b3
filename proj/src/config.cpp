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
#include <cstdio>
#include <fstream>
#include <sstream>

#include "poisonlab/cli.hpp"

namespace poisonlab {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& v, int line) {
  try {
    size_t pos = 0;
    int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + v + "'", line);
  }
}

uint64_t parse_u64(const std::string& v, int line) {
  try {
    size_t pos = 0;
    uint64_t out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("expected an unsigned integer, got '" + v + "'", line);
  }
}

double parse_real(const std::string& v, int line) {
  try {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + v + "'", line);
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("expected a boolean, got '" + v + "'", line);
}

std::vector<int> parse_int_list(const std::string& v, int line) {
  std::istringstream in(v);
  std::vector<int> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_int(tok, line));
  if (out.empty()) throw ParseError("expected a list of integers", line);
  return out;
}

}  // namespace

RunSpec parse_config_text(const std::string& text) {
  RunSpec spec;
  GameConfig& c = spec.config;
  bool saw_game = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section != "pool" && section != "model" && section != "poison" &&
          section != "shadows" && section != "canary")
        throw ParseError("unknown section '" + section + "'", line);
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line);
    if (value.empty()) throw ParseError("empty value for key '" + key + "'", line);

    if (section.empty()) {
      if (key == "game") {
        c.game = game_kind_from_string(value);
        saw_game = true;
      } else if (key == "trials") {
        c.trials = parse_int(value, line);
      } else if (key == "targets") {
        c.targets = parse_int(value, line);
      } else if (key == "target_models") {
        c.target_models = parse_int(value, line);
      } else if (key == "target_mode") {
        c.target_mode = value;
      } else if (key == "seed") {
        c.master_seed = parse_u64(value, line);
      } else if (key == "workers") {
        c.workers = parse_int(value, line);
      } else if (key == "output_dir") {
        spec.output_dir = value;
      } else {
        throw ParseError("unknown key '" + key + "'", line);
      }
    } else if (section == "pool") {
      if (key == "kind") c.pool.kind = value;
      else if (key == "classes") c.pool.classes = parse_int(value, line);
      else if (key == "per_class") c.pool.per_class = parse_int(value, line);
      else if (key == "dim") c.pool.dim = parse_int(value, line);
      else if (key == "spread") c.pool.spread = parse_real(value, line);
      else if (key == "rows") c.pool.rows = parse_int(value, line);
      else if (key == "features") c.pool.features = parse_int(value, line);
      else if (key == "attr_index") c.pool.attr_index = parse_int(value, line);
      else if (key == "attr_mode") c.pool.attr_mode = value;
      else if (key == "sequences") c.pool.sequences = parse_int(value, line);
      else if (key == "seq_len") c.pool.seq_len = parse_int(value, line);
      else if (key == "vocab") c.pool.vocab = parse_int(value, line);
      else if (key == "csv_path") c.pool.csv_path = value;
      else if (key == "label_column") c.pool.label_column = value;
      else if (key == "attr_column") c.pool.attr_column = value;
      else throw ParseError("unknown key '" + key + "' in [pool]", line);
    } else if (section == "model") {
      if (key == "kind") c.model.kind = model_kind_from_string(value);
      else if (key == "k") c.model.k = parse_int(value, line);
      else if (key == "hidden") c.model.hidden = parse_int_list(value, line);
      else if (key == "lm_context") c.model.lm_context = parse_int(value, line);
      else if (key == "lm_hidden") c.model.lm_hidden = parse_int(value, line);
      else if (key == "epochs") c.model.epochs = parse_int(value, line);
      else if (key == "learning_rate") c.model.learning_rate = parse_real(value, line);
      else if (key == "batch_size") c.model.batch_size = parse_int(value, line);
      else if (key == "loss_clip") c.model.loss_clip = parse_real(value, line);
      else throw ParseError("unknown key '" + key + "' in [model]", line);
    } else if (section == "poison") {
      if (key == "recipe") c.poison.recipe = value;
      else if (key == "r") c.poison.r = parse_int(value, line);
      else if (key == "strategy") c.poison.strategy = value;
      else if (key == "pad_len") c.poison.pad_len = parse_int(value, line);
      else throw ParseError("unknown key '" + key + "' in [poison]", line);
    } else if (section == "shadows") {
      if (key == "n") c.shadows.n = parse_int(value, line);
      else if (key == "subsample") c.shadows.subsample = parse_real(value, line);
      else if (key == "poison_shadows") c.shadows.poison_shadows = parse_bool(value, line);
      else throw ParseError("unknown key '" + key + "' in [shadows]", line);
    } else if (section == "canary") {
      if (key == "digits") c.canary.digits = parse_int(value, line);
      else if (key == "prefix_len") c.canary.prefix_len = parse_int(value, line);
      else if (key == "prefix_strategy") c.canary.prefix_strategy = value;
      else if (key == "known_prefix") c.canary.known_prefix = parse_int(value, line);
      else if (key == "calibrated") c.canary.calibrated = parse_bool(value, line);
      else if (key == "uncalibrated") c.canary.uncalibrated = parse_bool(value, line);
      else throw ParseError("unknown key '" + key + "' in [canary]", line);
    }
  }
  if (!saw_game) throw ParseError("config is missing the 'game' key");
  c.validate();
  return spec;
}

RunSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_canonical_text(const GameConfig& c) {
  std::ostringstream out;
  char num[64];
  auto real = [&](double v) {
    std::snprintf(num, sizeof(num), "%.17g", v);
    return std::string(num);
  };
  out << "game = " << to_string(c.game) << '\n';
  out << "seed = " << c.master_seed << '\n';
  out << "target_mode = " << c.target_mode << '\n';
  out << "target_models = " << c.target_models << '\n';
  out << "targets = " << c.targets << '\n';
  out << "trials = " << c.trials << '\n';
  out << "workers = " << c.workers << '\n';
  out << "[pool]\n";
  out << "attr_column = " << c.pool.attr_column << '\n';
  out << "attr_index = " << c.pool.attr_index << '\n';
  out << "attr_mode = " << c.pool.attr_mode << '\n';
  out << "classes = " << c.pool.classes << '\n';
  out << "csv_path = " << c.pool.csv_path << '\n';
  out << "dim = " << c.pool.dim << '\n';
  out << "features = " << c.pool.features << '\n';
  out << "kind = " << c.pool.kind << '\n';
  out << "label_column = " << c.pool.label_column << '\n';
  out << "per_class = " << c.pool.per_class << '\n';
  out << "rows = " << c.pool.rows << '\n';
  out << "seq_len = " << c.pool.seq_len << '\n';
  out << "sequences = " << c.pool.sequences << '\n';
  out << "spread = " << real(c.pool.spread) << '\n';
  out << "vocab = " << c.pool.vocab << '\n';
  out << "[model]\n";
  out << "batch_size = " << c.model.batch_size << '\n';
  out << "epochs = " << c.model.epochs << '\n';
  out << "hidden =";
  for (int h : c.model.hidden) out << ' ' << h;
  out << '\n';
  out << "k = " << c.model.k << '\n';
  out << "kind = " << to_string(c.model.kind) << '\n';
  out << "learning_rate = " << real(c.model.learning_rate) << '\n';
  out << "lm_context = " << c.model.lm_context << '\n';
  out << "lm_hidden = " << c.model.lm_hidden << '\n';
  out << "loss_clip = " << (c.model.loss_clip ? real(*c.model.loss_clip) : "none") << '\n';
  out << "[poison]\n";
  out << "pad_len = " << c.poison.pad_len << '\n';
  out << "r = " << c.poison.r << '\n';
  out << "recipe = " << c.poison.recipe << '\n';
  out << "strategy = " << c.poison.strategy << '\n';
  out << "[shadows]\n";
  out << "n = " << c.shadows.n << '\n';
  out << "poison_shadows = " << (c.shadows.poison_shadows ? "true" : "false") << '\n';
  out << "subsample = " << real(c.shadows.subsample) << '\n';
  out << "[canary]\n";
  out << "calibrated = " << (c.canary.calibrated ? "true" : "false") << '\n';
  out << "digits = " << c.canary.digits << '\n';
  out << "known_prefix = " << c.canary.known_prefix << '\n';
  out << "prefix_len = " << c.canary.prefix_len << '\n';
  out << "prefix_strategy = " << c.canary.prefix_strategy << '\n';
  out << "uncalibrated = " << (c.canary.uncalibrated ? "true" : "false") << '\n';
  return out.str();
}

uint64_t config_hash(const GameConfig& config) {
  return fnv1a64(config_to_canonical_text(config));
}

}  // namespace poisonlab
