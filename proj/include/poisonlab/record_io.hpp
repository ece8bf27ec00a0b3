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

#ifndef POISONLAB_RECORD_IO_HPP_
#define POISONLAB_RECORD_IO_HPP_

#include <string>

#include "poisonlab/gamelab.hpp"

namespace poisonlab {

// GameRecord document: structured text, byte-identical for identical runs
// (no timestamps; wall-clock lives in the run manifest).
std::string record_to_text(const GameRecord& record);
GameRecord record_from_text(const std::string& text);

// "trial,rank,bits" rows at full precision.
std::string exposure_csv(const std::vector<ExposureReport>& reports);

}  // namespace poisonlab

#endif  // POISONLAB_RECORD_IO_HPP_
