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

#include "poisonlab/record_io.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace poisonlab {

namespace {

using nlohmann::json;

json roc_to_json(const RocCurve& curve) {
  json j;
  j["auc"] = curve.auc;
  json pts = json::array();
  for (const auto& [fpr, tpr] : curve.points) pts.push_back(json::array({fpr, tpr}));
  j["points"] = std::move(pts);
  return j;
}

RocCurve roc_from_json(const json& j) {
  RocCurve curve;
  curve.auc = j.at("auc").get<double>();
  for (const json& p : j.at("points"))
    curve.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return curve;
}

}  // namespace

std::string record_to_text(const GameRecord& record) {
  json j;
  j["artifact_version"] = 1;
  j["game"] = record.game;
  j["master_seed"] = record.master_seed;
  j["config"] = record.config_text;
  json trials = json::array();
  for (const TrialRecord& t : record.trials) {
    json jt;
    jt["trial"] = t.trial;
    jt["target_id"] = t.target_id;
    jt["world"] = t.world;
    jt["scores"] = t.scores;
    jt["details"] = t.details;
    jt["poison_tag"] = t.poison_tag;
    trials.push_back(std::move(jt));
  }
  j["trials"] = std::move(trials);
  json roc;
  for (const auto& [method, curve] : record.roc) roc[method] = roc_to_json(curve);
  j["roc"] = std::move(roc);
  json exposures;
  for (const auto& [method, list] : record.exposures) {
    json arr = json::array();
    for (const ExposureReport& r : list) {
      json jr;
      jr["rank"] = r.rank;
      jr["bits"] = r.exposure_bits;
      jr["universe"] = r.universe_size;
      arr.push_back(std::move(jr));
    }
    exposures[method] = std::move(arr);
  }
  j["exposures"] = std::move(exposures);
  j["summary"] = record.summary;
  return j.dump(1) + "\n";
}

GameRecord record_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("record is not valid JSON: ") + e.what());
  }
  if (j.value("artifact_version", 0) != 1)
    throw VersionError("record artifact_version mismatch: expected 1");
  GameRecord record;
  record.game = j.at("game").get<std::string>();
  record.master_seed = j.at("master_seed").get<uint64_t>();
  record.config_text = j.at("config").get<std::string>();
  for (const json& jt : j.at("trials")) {
    TrialRecord t;
    t.trial = jt.at("trial").get<int>();
    t.target_id = jt.at("target_id").get<std::string>();
    t.world = jt.at("world").get<int>();
    t.scores = jt.at("scores").get<std::map<std::string, double>>();
    t.details = jt.at("details").get<std::map<std::string, double>>();
    t.poison_tag = jt.at("poison_tag").get<std::string>();
    record.trials.push_back(std::move(t));
  }
  for (const auto& [method, jc] : j.at("roc").items()) record.roc[method] = roc_from_json(jc);
  for (const auto& [method, arr] : j.at("exposures").items()) {
    std::vector<ExposureReport> list;
    for (const json& jr : arr) {
      ExposureReport r;
      r.rank = jr.at("rank").get<int>();
      r.exposure_bits = jr.at("bits").get<double>();
      r.universe_size = jr.at("universe").get<size_t>();
      list.push_back(r);
    }
    record.exposures[method] = std::move(list);
  }
  record.summary = j.at("summary").get<std::map<std::string, double>>();
  return record;
}

std::string exposure_csv(const std::vector<ExposureReport>& reports) {
  std::ostringstream out;
  out << "trial,rank,bits\n";
  char buf[80];
  for (size_t i = 0; i < reports.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g\n", i, reports[i].rank,
                  reports[i].exposure_bits);
    out << buf;
  }
  return out.str();
}

}  // namespace poisonlab
