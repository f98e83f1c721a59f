#include "hsvm/libsvm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "hsvm/error.hpp"

namespace hsvm {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos])) ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

double parse_real(std::string_view token, std::size_t line_no) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw ParseError(line_no, "malformed number '" + std::string(token) + "'");
  }
  return value;
}

int parse_label(std::string_view token, std::size_t line_no) {
  const double v = parse_real(token, line_no);
  if (v != std::floor(v) || std::fabs(v) > 1e9) {
    throw ParseError(line_no, "label '" + std::string(token) + "' is not an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const ParseOptions& options) {
  Dataset::Builder builder;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<FeatureIndex, double>> entries;
  bool any_unlabeled = false;
  bool any_labeled = false;
  int max_label = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;

    std::size_t first_feature = 1;
    int label = 0;
    if (tokens[0].find(':') != std::string_view::npos) {
      if (!options.allow_missing_labels) throw ParseError(line_no, "missing label");
      first_feature = 0;
      any_unlabeled = true;
    } else {
      label = parse_label(tokens[0], line_no);
      max_label = std::max(max_label, label);
      any_labeled = true;
    }

    entries.clear();
    for (std::size_t t = first_feature; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size()) {
        throw ParseError(line_no, "malformed feature token '" + std::string(tok) + "'");
      }
      const auto idx_text = tok.substr(0, colon);
      long long idx = 0;
      const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
      if (ec != std::errc() || ptr != idx_text.data() + idx_text.size()) {
        throw ParseError(line_no, "malformed index '" + std::string(idx_text) + "'");
      }
      if (idx < 1) throw ParseError(line_no, "feature index must be >= 1");
      if (idx > static_cast<long long>(~FeatureIndex{0})) {
        throw ParseError(line_no, "feature index too large");
      }
      const auto zero_based = static_cast<FeatureIndex>(idx - 1);
      if (!entries.empty() && zero_based <= entries.back().first) {
        throw ParseError(line_no, "feature indices must be strictly ascending");
      }
      entries.emplace_back(zero_based, parse_real(tok.substr(colon + 1), line_no));
    }
    builder.add_row(label, entries);
  }
  if (in.bad()) throw IoError("I/O failure while reading LIBSVM data");
  if (any_unlabeled && any_labeled) {
    throw ParseError(line_no, "mixture of labeled and unlabeled lines");
  }
  if (any_unlabeled) builder.unlabeled();

  if (options.n_features) builder.features(*options.n_features);
  if (options.kind == LabelKind::binary) {
    builder.kind(LabelKind::binary, 2);
  } else if (options.kind == LabelKind::multiclass) {
    builder.kind(LabelKind::multiclass, options.classes.value_or(std::max(max_label, 2)));
  }
  try {
    return std::move(builder).build();
  } catch (const ShapeError& e) {
    throw ParseError(line_no, e.what());
  } catch (const LabelError& e) {
    throw ParseError(line_no, e.what());
  }
}

Dataset read_libsvm_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_libsvm(in, options);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw StateError("number formatting failed");
  return std::string(buf, ptr);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  std::string line;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    line.clear();
    if (data.has_labels()) {
      const int y = data.label(i);
      if (data.kind() == LabelKind::binary) {
        line += y > 0 ? "+1" : "-1";
      } else {
        line += std::to_string(y);
      }
    }
    const auto x = data.row(i);
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      if (!line.empty()) line += ' ';
      line += std::to_string(static_cast<unsigned long long>(x.index[k]) + 1);
      line += ':';
      line += format_double(x.value[k]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("I/O failure while writing LIBSVM data");
}

void write_libsvm_file(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_libsvm(data, out);
}

}  // namespace hsvm
