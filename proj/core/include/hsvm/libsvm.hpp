#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "hsvm/dataset.hpp"

namespace hsvm {

struct ParseOptions {
  // Feature count override; needed when a test file lacks trailing features.
  std::optional<std::size_t> n_features;
  // Forces the label kind instead of inferring it.
  std::optional<LabelKind> kind;
  std::optional<int> classes;
  // Accept lines that start directly with "idx:val" (prediction inputs).
  bool allow_missing_labels = false;
};

// Reads "label idx:val idx:val ..." lines with 1-based ascending indices.
// Blank lines are skipped. Throws ParseError carrying the line number.
Dataset parse_libsvm(std::istream& in, const ParseOptions& options = {});
Dataset read_libsvm_file(const std::string& path, const ParseOptions& options = {});

// Values are printed with 17 significant digits so parse(write(d)) == d.
void write_libsvm(const Dataset& data, std::ostream& out);
void write_libsvm_file(const Dataset& data, const std::string& path);

// Shortest-exact decimal form used by every text writer in the library.
std::string format_double(double value);

}  // namespace hsvm
