#include "hsvm/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hsvm/error.hpp"
#include "hsvm/libsvm.hpp"

namespace hsvm {

double BinaryModel::score(const SparseRow& x) const {
  if (!x.index.empty() && x.index.back() >= w.size()) {
    throw ShapeError("sample has features beyond the model dimension");
  }
  return b + x.dot(w);
}

double MultiModel::row_sum_residual() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < W.rows(); ++r) {
    double s = 0.0;
    for (double v : W.row(r)) s += v;
    worst = std::max(worst, std::fabs(s));
  }
  return worst;
}

double MultiModel::intercept_sum_residual() const {
  double s = 0.0;
  for (double v : b) s += v;
  return std::fabs(s);
}

void MultiModel::require_feasible(double tol) const {
  if (W.cols() != b.size()) throw ShapeError("W column count differs from class count");
  if (row_sum_residual() > tol || intercept_sum_residual() > tol) {
    throw ConstraintError("multi-class model violates We = 0 / e'b = 0");
  }
}

int predict_binary(const BinaryModel& model, const SparseRow& x) {
  return model.score(x) >= 0.0 ? 1 : -1;
}

int predict_multi(const MultiModel& model, const SparseRow& x) {
  const std::size_t J = model.b.size();
  if (!x.index.empty() && x.index.back() >= model.W.rows()) {
    throw ShapeError("sample has features beyond the model dimension");
  }
  std::vector<double> scores(model.b);
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    const auto wrow = model.W.row(x.index[k]);
    for (std::size_t j = 0; j < J; ++j) scores[j] += x.value[k] * wrow[j];
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < J; ++j) {
    if (scores[j] < scores[best]) best = j;
  }
  return static_cast<int>(best) + 1;
}

std::vector<int> predict(const AnyModel& model, const Dataset& data) {
  std::vector<int> out(data.rows());
  std::visit(
      [&](const auto& m) {
        for (std::size_t i = 0; i < data.rows(); ++i) {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, BinaryModel>) {
            out[i] = predict_binary(m, data.row(i));
          } else {
            out[i] = predict_multi(m, data.row(i));
          }
        }
      },
      model);
  return out;
}

Metrics evaluate(const AnyModel& model, const Dataset& test,
                 const std::optional<std::vector<FeatureIndex>>& true_support) {
  Metrics m;
  if (test.rows() == 0) throw DomainError("cannot evaluate on an empty test set");
  if (!test.has_labels()) throw LabelError("test set has no labels");
  const auto predicted = predict(model, test);
  for (std::size_t i = 0; i < test.rows(); ++i) {
    if (predicted[i] == test.label(i)) ++m.correct;
  }
  m.total = test.rows();
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.total);

  const auto& support = true_support ? true_support : test.true_support();
  std::visit(
      [&](const auto& mod) {
        using M = std::decay_t<decltype(mod)>;
        std::vector<bool> selected;
        if constexpr (std::is_same_v<M, BinaryModel>) {
          selected.resize(mod.w.size());
          for (std::size_t j = 0; j < mod.w.size(); ++j) selected[j] = mod.w[j] != 0.0;
          m.nnz = static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
          m.nnz_rows = m.nnz;
        } else {
          selected.resize(mod.W.rows());
          m.nnz_per_class.assign(mod.W.cols(), 0);
          for (std::size_t r = 0; r < mod.W.rows(); ++r) {
            const auto row = mod.W.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) {
              if (row[c] != 0.0) {
                ++m.nnz;
                ++m.nnz_per_class[c];
                selected[r] = true;
              }
            }
          }
          m.nnz_rows = static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
        }
        if (support) {
          std::vector<bool> relevant(selected.size(), false);
          for (FeatureIndex f : *support) {
            if (f < relevant.size()) relevant[f] = true;
          }
          std::size_t nt = 0, nf = 0, iz = 0;
          for (std::size_t j = 0; j < selected.size(); ++j) {
            if (selected[j] && relevant[j]) ++nt;
            if (selected[j] && !relevant[j]) ++nf;
            if (!selected[j] && relevant[j]) ++iz;
          }
          m.n_true = nt;
          m.n_false = nf;
          if constexpr (std::is_same_v<M, MultiModel>) m.incorrect_zeros = iz;
        }
      },
      model);
  return m;
}

void save_model(std::ostream& out, const AnyModel& model, const Hyperparams& hyper) {
  std::ostringstream s;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        constexpr bool binary = std::is_same_v<M, BinaryModel>;
        if constexpr (binary) {
          s << "HSVM binary p=" << m.w.size() << " J=2\n";
        } else {
          s << "HSVM multi p=" << m.W.rows() << " J=" << m.b.size() << "\n";
        }
        s << "hyper lambda1=" << format_double(hyper.lambda1)
          << " lambda2=" << format_double(hyper.lambda2)
          << " lambda3=" << format_double(hyper.lambda3)
          << " delta=" << format_double(hyper.delta) << "\n";
        if constexpr (binary) {
          s << "b " << format_double(m.b) << "\n";
          for (std::size_t j = 0; j < m.w.size(); ++j) {
            if (m.w[j] != 0.0) s << "w " << (j + 1) << ' ' << format_double(m.w[j]) << "\n";
          }
        } else {
          s << "b";
          for (double v : m.b) s << ' ' << format_double(v);
          s << "\n";
          for (std::size_t r = 0; r < m.W.rows(); ++r) {
            for (std::size_t c = 0; c < m.W.cols(); ++c) {
              if (m.W(r, c) != 0.0) {
                s << "w " << (r + 1) << ' ' << (c + 1) << ' ' << format_double(m.W(r, c)) << "\n";
              }
            }
          }
        }
        s << "end\n";
      },
      model);
  out << s.str();
  if (!out) throw IoError("I/O failure while writing model");
}

void save_model_file(const std::string& path, const AnyModel& model, const Hyperparams& hyper) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_model(out, model, hyper);
}

namespace {

double read_real(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw FormatError("bad number '" + text + "' in model file");
  }
  return v;
}

std::size_t read_count(const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("bad integer '" + text + "' in model file");
  }
  return v;
}

std::string keyed(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) throw FormatError("expected '" + key + "=' in model file");
  return token.substr(key.size() + 1);
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ls(line);
  std::vector<std::string> out;
  for (std::string t; ls >> t;) out.push_back(t);
  return out;
}

}  // namespace

SavedModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty model file");
  auto head = tokens_of(line);
  if (head.size() != 4 || head[0] != "HSVM") throw FormatError("missing HSVM header");
  const bool binary = head[1] == "binary";
  if (!binary && head[1] != "multi") throw FormatError("unknown model kind '" + head[1] + "'");
  const std::size_t p = read_count(keyed(head[2], "p"));
  const std::size_t J = read_count(keyed(head[3], "J"));
  if (binary ? J != 2 : J < 2) throw FormatError("inconsistent class count");

  if (!std::getline(in, line)) throw FormatError("truncated model: missing hyperparameters");
  auto hyp = tokens_of(line);
  if (hyp.size() != 5 || hyp[0] != "hyper") throw FormatError("malformed hyperparameter line");
  Hyperparams hyper;
  hyper.lambda1 = read_real(keyed(hyp[1], "lambda1"));
  hyper.lambda2 = read_real(keyed(hyp[2], "lambda2"));
  hyper.lambda3 = read_real(keyed(hyp[3], "lambda3"));
  hyper.delta = read_real(keyed(hyp[4], "delta"));

  if (!std::getline(in, line)) throw FormatError("truncated model: missing intercepts");
  auto bline = tokens_of(line);
  const std::size_t expected_b = binary ? 1 : J;
  if (bline.size() != expected_b + 1 || bline[0] != "b") throw FormatError("malformed intercept line");

  BinaryModel bm;
  MultiModel mm;
  if (binary) {
    bm = BinaryModel(p);
    bm.b = read_real(bline[1]);
  } else {
    mm = MultiModel(p, static_cast<int>(J));
    for (std::size_t j = 0; j < J; ++j) mm.b[j] = read_real(bline[j + 1]);
  }

  bool ended = false;
  while (std::getline(in, line)) {
    auto t = tokens_of(line);
    if (t.empty()) continue;
    if (t[0] == "end" && t.size() == 1) {
      ended = true;
      break;
    }
    if (t[0] != "w") throw FormatError("unexpected line '" + line + "'");
    if (binary) {
      if (t.size() != 3) throw FormatError("malformed weight line");
      const std::size_t r = read_count(t[1]);
      if (r < 1 || r > p) throw FormatError("weight row out of range");
      bm.w[r - 1] = read_real(t[2]);
    } else {
      if (t.size() != 4) throw FormatError("malformed weight line");
      const std::size_t r = read_count(t[1]);
      const std::size_t c = read_count(t[2]);
      if (r < 1 || r > p || c < 1 || c > J) throw FormatError("weight index out of range");
      mm.W(r - 1, c - 1) = read_real(t[3]);
    }
  }
  if (!ended) throw FormatError("truncated model: missing end marker");

  if (binary) return {std::move(bm), hyper};
  mm.require_feasible(1e-8);
  return {std::move(mm), hyper};
}

SavedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_model(in);
}

}  // namespace hsvm
