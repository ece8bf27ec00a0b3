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

#ifndef POISONLAB_COMMON_HPP_
#define POISONLAB_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace poisonlab {

// Error taxonomy shared by all modules. Callers that need to distinguish
// failure modes (the CLI exit-code contract, tests) catch these by type.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_number(line) {}
  int line_number;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
  TrainingError(const std::string& msg, int epoch_index)
      : std::runtime_error(msg + " (epoch " + std::to_string(epoch_index) + ")"),
        epoch(epoch_index) {}
  int epoch;
};

struct VersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

uint64_t fnv1a64(std::string_view bytes);

// Deterministic seeded random stream. All randomness in the artifact flows
// through this type: std::mt19937_64 output is fully specified by the
// standard, and every derived draw (uniform, normal, shuffle) is implemented
// here rather than with std:: distributions, whose output is
// implementation-defined. Identical (seed, stream, call sequence) therefore
// yields identical draws on all platforms.
class Rng {
 public:
  Rng() : Rng(0, "root") {}
  Rng(uint64_t seed, std::string_view stream);

  uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  // Uniform integer in [lo, hi], inclusive, bias-free by rejection.
  int64_t uniform_int(int64_t lo, int64_t hi);
  // Standard normal via Box-Muller; one value per call, no cached spare.
  double normal();

  // Derived substreams never share state with their parent; drawing from one
  // does not perturb the other.
  Rng substream(std::string_view label) const;
  Rng substream(uint64_t index) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  uint64_t seed() const { return seed_; }
  const std::string& stream() const { return stream_; }

 private:
  uint64_t seed_;
  std::string stream_;
  std::mt19937_64 gen_;
};

}  // namespace poisonlab

#endif  // POISONLAB_COMMON_HPP_
