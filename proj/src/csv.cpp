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

#include "poisonlab/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace poisonlab {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parses_as_number(const std::string& s, double* value) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') return false;
  *value = v;
  return true;
}

std::string kind_name(ColumnEncoding::Kind k) {
  switch (k) {
    case ColumnEncoding::Kind::numeric: return "numeric";
    case ColumnEncoding::Kind::binary: return "binary";
    case ColumnEncoding::Kind::onehot: return "onehot";
  }
  return "?";
}

ColumnEncoding::Kind kind_from_name(const std::string& s, int line) {
  if (s == "numeric") return ColumnEncoding::Kind::numeric;
  if (s == "binary") return ColumnEncoding::Kind::binary;
  if (s == "onehot") return ColumnEncoding::Kind::onehot;
  throw ParseError("unknown column kind '" + s + "'", line);
}

}  // namespace

std::string EncodingManifest::to_text() const {
  std::ostringstream out;
  out << "poisonlab-manifest v1\n";
  out << "label " << label_column;
  for (const std::string& c : label_classes) out << ' ' << c;
  out << '\n';
  for (const ColumnEncoding& col : columns) {
    out << "column " << col.name << ' ' << kind_name(col.kind) << " at";
    for (int i : col.feature_indices) out << ' ' << i;
    if (!col.categories.empty()) {
      out << " values";
      for (const std::string& v : col.categories) out << ' ' << v;
    }
    out << '\n';
  }
  return out.str();
}

EncodingManifest EncodingManifest::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line) || line != "poisonlab-manifest v1")
    throw VersionError("manifest header mismatch");
  ++lineno;
  EncodingManifest m;
  if (!std::getline(in, line)) throw ParseError("missing label line", 2);
  ++lineno;
  {
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw >> m.label_column) || kw != "label") throw ParseError("bad label line", lineno);
    std::string v;
    while (ls >> v) m.label_classes.push_back(v);
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw, name, kind, at;
    if (!(ls >> kw >> name >> kind >> at) || kw != "column" || at != "at")
      throw ParseError("bad column line", lineno);
    ColumnEncoding col;
    col.name = name;
    col.kind = kind_from_name(kind, lineno);
    std::string tok;
    bool in_values = false;
    while (ls >> tok) {
      if (tok == "values") {
        in_values = true;
        continue;
      }
      if (in_values)
        col.categories.push_back(tok);
      else
        col.feature_indices.push_back(std::stoi(tok));
    }
    m.columns.push_back(std::move(col));
  }
  return m;
}

std::vector<std::string> EncodingManifest::decode_row(const Example& e) const {
  std::vector<std::string> row;
  for (const ColumnEncoding& col : columns) {
    switch (col.kind) {
      case ColumnEncoding::Kind::numeric: {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", e.features[col.feature_indices[0]]);
        row.push_back(buf);
        break;
      }
      case ColumnEncoding::Kind::binary: {
        double v = e.features[col.feature_indices[0]];
        row.push_back(col.categories[v >= 0.5 ? 1 : 0]);
        break;
      }
      case ColumnEncoding::Kind::onehot: {
        size_t best = 0;
        double best_v = -1.0;
        for (size_t i = 0; i < col.feature_indices.size(); ++i) {
          double v = e.features[col.feature_indices[i]];
          if (v > best_v) {
            best_v = v;
            best = i;
          }
        }
        row.push_back(col.categories[best]);
        break;
      }
    }
  }
  return row;
}

TabularData load_csv_tabular(const std::string& path, const std::string& label_column,
                             const std::vector<std::string>& attr_columns) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw ParseError("empty file '" + path + "'", 1);
  std::vector<std::string> header = split_fields(line);
  auto find_col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("missing column '" + name + "' in '" + path + "'", 1);
    return static_cast<size_t>(it - header.begin());
  };
  size_t label_idx = find_col(label_column);
  for (const std::string& a : attr_columns) find_col(a);

  std::vector<std::vector<std::string>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, header has " +
                           std::to_string(header.size()),
                       lineno);
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw ParseError("no data rows in '" + path + "'", lineno);

  // Type inference from the first data row; numeric columns must stay numeric.
  std::vector<bool> numeric(header.size(), false);
  for (size_t c = 0; c < header.size(); ++c) {
    if (c == label_idx) continue;  // label is categorical by contract
    double v;
    numeric[c] = parses_as_number(rows[0][c], &v);
  }

  // Collect category sets for categorical columns and the label.
  std::vector<std::set<std::string>> cats(header.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < header.size(); ++c) {
      if (c != label_idx && numeric[c]) {
        double v;
        if (!parses_as_number(rows[r][c], &v))
          throw ParseError("non-numeric cell '" + rows[r][c] + "' in numeric column '" + header[c] + "'",
                           static_cast<int>(r) + 2);
      } else {
        cats[c].insert(rows[r][c]);
      }
    }
  }

  TabularData out;
  out.manifest.label_column = label_column;
  out.manifest.label_classes.assign(cats[label_idx].begin(), cats[label_idx].end());

  int next_feature = 0;
  for (size_t c = 0; c < header.size(); ++c) {
    if (c == label_idx) continue;
    ColumnEncoding col;
    col.name = header[c];
    if (numeric[c]) {
      col.kind = ColumnEncoding::Kind::numeric;
      col.feature_indices = {next_feature++};
    } else if (cats[c].size() == 2) {
      col.kind = ColumnEncoding::Kind::binary;
      col.categories.assign(cats[c].begin(), cats[c].end());
      col.feature_indices = {next_feature++};
    } else {
      col.kind = ColumnEncoding::Kind::onehot;
      col.categories.assign(cats[c].begin(), cats[c].end());
      for (size_t i = 0; i < col.categories.size(); ++i) col.feature_indices.push_back(next_feature++);
    }
    out.manifest.columns.push_back(std::move(col));
  }

  out.data.num_classes = static_cast<int>(out.manifest.label_classes.size());
  out.data.feature_dim = next_feature;
  for (const std::vector<std::string>& row : rows) {
    Example e;
    e.features.assign(next_feature, 0.0);
    size_t col_i = 0;
    for (size_t c = 0; c < header.size(); ++c) {
      if (c == label_idx) continue;
      const ColumnEncoding& col = out.manifest.columns[col_i++];
      switch (col.kind) {
        case ColumnEncoding::Kind::numeric: {
          double v = 0;
          parses_as_number(row[c], &v);
          e.features[col.feature_indices[0]] = v;
          break;
        }
        case ColumnEncoding::Kind::binary: {
          size_t which = row[c] == col.categories[1] ? 1 : 0;
          e.features[col.feature_indices[0]] = static_cast<double>(which);
          break;
        }
        case ColumnEncoding::Kind::onehot: {
          auto it = std::find(col.categories.begin(), col.categories.end(), row[c]);
          e.features[col.feature_indices[it - col.categories.begin()]] = 1.0;
          break;
        }
      }
    }
    auto lit = std::find(out.manifest.label_classes.begin(), out.manifest.label_classes.end(),
                         row[label_idx]);
    e.label = static_cast<int>(lit - out.manifest.label_classes.begin());
    out.data.examples.push_back(std::move(e));
  }
  out.data.validate();

  for (const std::string& a : attr_columns) {
    const ColumnEncoding* found = nullptr;
    for (const ColumnEncoding& col : out.manifest.columns)
      if (col.name == a) found = &col;
    if (!found || found->kind != ColumnEncoding::Kind::binary)
      throw ArgumentError("attribute column '" + a + "' is not binary");
    out.attr_features.emplace_back(a, found->feature_indices[0]);
  }

  std::ofstream mf(path + ".manifest");
  if (!mf) throw ParseError("cannot write manifest next to '" + path + "'");
  mf << out.manifest.to_text();
  return out;
}

}  // namespace poisonlab
