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

#ifndef POISONLAB_CSV_HPP_
#define POISONLAB_CSV_HPP_

#include <string>
#include <vector>

#include "poisonlab/data.hpp"

namespace poisonlab {

// How one input column maps into feature space. Numeric columns pass
// through; binary categoricals become a single 0/1 feature; wider
// categoricals are one-hot encoded.
struct ColumnEncoding {
  enum class Kind { numeric, binary, onehot };
  std::string name;
  Kind kind = Kind::numeric;
  std::vector<std::string> categories;  // index order; empty for numeric
  std::vector<int> feature_indices;     // positions in the encoded vector
};

struct EncodingManifest {
  std::vector<ColumnEncoding> columns;  // feature columns, input order
  std::string label_column;
  std::vector<std::string> label_classes;  // class id -> original value

  std::string to_text() const;
  static EncodingManifest from_text(const std::string& text);
  // Reconstructs the original row values (categoricals exactly; numerics as
  // their decimal rendering) from an encoded example.
  std::vector<std::string> decode_row(const Example& e) const;
};

struct TabularData {
  LabeledDataset data;
  EncodingManifest manifest;
  // attr column name -> encoded feature index (binary columns only).
  std::vector<std::pair<std::string, int>> attr_features;
};

// Loads a header-first comma-separated file. Column types are inferred from
// the first data row; a later non-numeric cell in a numeric column is a
// parse error. Writes the encoding manifest to `path + ".manifest"`.
TabularData load_csv_tabular(const std::string& path, const std::string& label_column,
                             const std::vector<std::string>& attr_columns);

}  // namespace poisonlab

#endif  // POISONLAB_CSV_HPP_
