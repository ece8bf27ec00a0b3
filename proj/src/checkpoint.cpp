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

#include <fstream>
#include <sstream>

#include "poisonlab/models.hpp"

namespace poisonlab {

namespace {

constexpr const char* kHeader = "poisonlab-checkpoint v1";

void write_params(std::ostream& out, const std::vector<double>& params) {
  out << "params " << params.size() << '\n';
  for (double v : params) out << format_double(v) << '\n';
}

std::vector<double> read_params(std::istream& in, int* lineno) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing params line", *lineno + 1);
  ++*lineno;
  std::istringstream hs(line);
  std::string kw;
  size_t n = 0;
  if (!(hs >> kw >> n) || kw != "params") throw ParseError("bad params line", *lineno);
  std::vector<double> params;
  params.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("truncated params block", *lineno + 1);
    ++*lineno;
    params.push_back(parse_double(line, *lineno));
  }
  return params;
}

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::knn: return "knn";
    case ModelKind::svm: return "svm";
    case ModelKind::mlp: return "mlp";
    case ModelKind::charlm: return "charlm";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "knn") return ModelKind::knn;
  if (s == "svm") return ModelKind::svm;
  if (s == "mlp") return ModelKind::mlp;
  if (s == "charlm") return ModelKind::charlm;
  throw ArgumentError("unknown model kind '" + s + "'");
}

ModelKind model_kind(const TrainedModel& m) {
  return static_cast<ModelKind>(m.index());
}

double model_true_label_prob(const TrainedModel& m, const Example& example) {
  if (const MlpModel* mlp = std::get_if<MlpModel>(&m)) {
    return mlp_proba(*mlp, example.features)[example.label];
  }
  if (const KnnModel* knn = std::get_if<KnnModel>(&m)) {
    return knn_vote_fraction(*knn, example.features, example.label);
  }
  throw ArgumentError("model_true_label_prob: model kind has no probability surface");
}

double model_loss(const TrainedModel& m, const Example& example) {
  if (const MlpModel* mlp = std::get_if<MlpModel>(&m)) return mlp_loss(*mlp, example);
  throw ArgumentError("model_loss: unsupported model kind");
}

std::string checkpoint_to_text(const Checkpoint& c) {
  const TrainedModel& m = c.model;
  std::ostringstream out;
  out << kHeader << '\n';
  out << "kind " << to_string(model_kind(m)) << '\n';
  out << "seed " << c.train_seed << ' ' << c.train_stream << '\n';
  switch (model_kind(m)) {
    case ModelKind::knn: {
      const KnnModel& knn = std::get<KnnModel>(m);
      out << "hyper k " << knn.k << " classes " << knn.train_set.num_classes << " dim "
          << knn.train_set.feature_dim << " n " << knn.train_set.size() << '\n';
      out << "labels";
      for (const Example& e : knn.train_set.examples) out << ' ' << e.label;
      out << '\n';
      std::vector<double> params;
      for (const Example& e : knn.train_set.examples)
        params.insert(params.end(), e.features.begin(), e.features.end());
      write_params(out, params);
      break;
    }
    case ModelKind::svm: {
      const SvmModel& svm = std::get<SvmModel>(m);
      out << "hyper dim " << svm.w.size() << " positive " << svm.positive_label << " negative "
          << svm.negative_label << '\n';
      out << "support";
      for (int i : svm.support_indices) out << ' ' << i;
      out << '\n';
      std::vector<double> params = svm.w;
      params.push_back(svm.b);
      params.push_back(svm.margin);
      write_params(out, params);
      break;
    }
    case ModelKind::mlp: {
      const MlpModel& mlp = std::get<MlpModel>(m);
      out << "hyper layers";
      for (int s : mlp.layer_sizes) out << ' ' << s;
      out << '\n';
      std::vector<double> params;
      for (size_t l = 0; l < mlp.weights.size(); ++l) {
        params.insert(params.end(), mlp.weights[l].begin(), mlp.weights[l].end());
        params.insert(params.end(), mlp.biases[l].begin(), mlp.biases[l].end());
      }
      write_params(out, params);
      break;
    }
    case ModelKind::charlm: {
      const CharLmModel& lm = std::get<CharLmModel>(m);
      out << "hyper context " << lm.context_len << " vocab " << lm.vocab_size << " hidden "
          << lm.hidden << '\n';
      std::vector<double> params;
      params.insert(params.end(), lm.w1.begin(), lm.w1.end());
      params.insert(params.end(), lm.b1.begin(), lm.b1.end());
      params.insert(params.end(), lm.w2.begin(), lm.w2.end());
      params.insert(params.end(), lm.b2.begin(), lm.b2.end());
      write_params(out, params);
      break;
    }
  }
  return out.str();
}

Checkpoint checkpoint_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty checkpoint", 1);
  ++lineno;
  if (line != kHeader)
    throw VersionError("checkpoint version mismatch: expected '" + std::string(kHeader) +
                       "', got '" + line + "'");
  if (!std::getline(in, line)) throw ParseError("missing kind line", 2);
  ++lineno;
  std::string kind_str;
  {
    std::istringstream ks(line);
    std::string kw;
    if (!(ks >> kw >> kind_str) || kw != "kind") throw ParseError("bad kind line", lineno);
  }
  if (!std::getline(in, line)) throw ParseError("missing seed line", 3);
  ++lineno;
  Checkpoint out;
  {
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw >> out.train_seed >> out.train_stream) || kw != "seed")
      throw ParseError("bad seed line", lineno);
  }
  if (!std::getline(in, line)) throw ParseError("missing hyper line", 4);
  ++lineno;
  std::istringstream hs(line);
  std::string kw;
  if (!(hs >> kw) || kw != "hyper") throw ParseError("bad hyper line", lineno);

  ModelKind kind = model_kind_from_string(kind_str);
  switch (kind) {
    case ModelKind::knn: {
      KnnModel knn;
      std::string k1, k2, k3, k4;
      size_t n = 0;
      if (!(hs >> k1 >> knn.k >> k2 >> knn.train_set.num_classes >> k3 >>
            knn.train_set.feature_dim >> k4 >> n))
        throw ParseError("bad knn hyper line", lineno);
      if (!std::getline(in, line)) throw ParseError("missing labels line", lineno + 1);
      ++lineno;
      std::istringstream ls(line);
      if (!(ls >> kw) || kw != "labels") throw ParseError("bad labels line", lineno);
      std::vector<int> labels;
      int lab;
      while (ls >> lab) labels.push_back(lab);
      if (labels.size() != n) throw ParseError("label count mismatch", lineno);
      std::vector<double> params = read_params(in, &lineno);
      if (params.size() != n * knn.train_set.feature_dim)
        throw ParseError("knn param count mismatch", lineno);
      for (size_t i = 0; i < n; ++i) {
        Example e;
        e.label = labels[i];
        e.features.assign(params.begin() + i * knn.train_set.feature_dim,
                          params.begin() + (i + 1) * knn.train_set.feature_dim);
        knn.train_set.examples.push_back(std::move(e));
      }
      out.model = std::move(knn);
      return out;
    }
    case ModelKind::svm: {
      SvmModel svm;
      std::string k1, k2, k3;
      size_t dim = 0;
      if (!(hs >> k1 >> dim >> k2 >> svm.positive_label >> k3 >> svm.negative_label))
        throw ParseError("bad svm hyper line", lineno);
      if (!std::getline(in, line)) throw ParseError("missing support line", lineno + 1);
      ++lineno;
      std::istringstream ss(line);
      if (!(ss >> kw) || kw != "support") throw ParseError("bad support line", lineno);
      int si;
      while (ss >> si) svm.support_indices.push_back(si);
      std::vector<double> params = read_params(in, &lineno);
      if (params.size() != dim + 2) throw ParseError("svm param count mismatch", lineno);
      svm.w.assign(params.begin(), params.begin() + dim);
      svm.b = params[dim];
      svm.margin = params[dim + 1];
      out.model = std::move(svm);
      return out;
    }
    case ModelKind::mlp: {
      MlpModel mlp;
      std::string k1;
      if (!(hs >> k1) || k1 != "layers") throw ParseError("bad mlp hyper line", lineno);
      int s;
      while (hs >> s) mlp.layer_sizes.push_back(s);
      if (mlp.layer_sizes.size() < 2) throw ParseError("mlp needs >= 2 layers", lineno);
      std::vector<double> params = read_params(in, &lineno);
      size_t off = 0;
      for (size_t l = 0; l + 1 < mlp.layer_sizes.size(); ++l) {
        size_t wn = static_cast<size_t>(mlp.layer_sizes[l]) * mlp.layer_sizes[l + 1];
        size_t bn = mlp.layer_sizes[l + 1];
        if (off + wn + bn > params.size()) throw ParseError("mlp param count mismatch", lineno);
        mlp.weights.emplace_back(params.begin() + off, params.begin() + off + wn);
        off += wn;
        mlp.biases.emplace_back(params.begin() + off, params.begin() + off + bn);
        off += bn;
      }
      if (off != params.size()) throw ParseError("mlp param count mismatch", lineno);
      out.model = std::move(mlp);
      return out;
    }
    case ModelKind::charlm: {
      CharLmModel lm;
      std::string k1, k2, k3;
      if (!(hs >> k1 >> lm.context_len >> k2 >> lm.vocab_size >> k3 >> lm.hidden))
        throw ParseError("bad charlm hyper line", lineno);
      std::vector<double> params = read_params(in, &lineno);
      size_t n1 = static_cast<size_t>(lm.context_len) * (lm.vocab_size + 1) * lm.hidden;
      size_t n2 = static_cast<size_t>(lm.hidden);
      size_t n3 = static_cast<size_t>(lm.vocab_size) * lm.hidden;
      size_t n4 = static_cast<size_t>(lm.vocab_size);
      if (params.size() != n1 + n2 + n3 + n4) throw ParseError("charlm param count mismatch", lineno);
      auto it = params.begin();
      lm.w1.assign(it, it + n1);
      it += n1;
      lm.b1.assign(it, it + n2);
      it += n2;
      lm.w2.assign(it, it + n3);
      it += n3;
      lm.b2.assign(it, it + n4);
      out.model = std::move(lm);
      return out;
    }
  }
  throw ParseError("unreachable checkpoint kind");
}

void save_checkpoint_file(const Checkpoint& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_text(c);
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_text(buf.str());
}

}  // namespace poisonlab
