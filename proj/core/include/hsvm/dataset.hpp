#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hsvm {

using FeatureIndex = std::uint32_t;

enum class LabelKind { binary, multiclass };

// One sample: parallel arrays of 0-based feature indices (strictly
// increasing) and values.
struct SparseRow {
  std::span<const FeatureIndex> index;
  std::span<const double> value;

  std::size_t nnz() const noexcept { return index.size(); }
  double dot(std::span<const double> dense) const;
  double squared_norm() const;
};

// Immutable set of sparse samples stored in CSR form with integer labels.
//
// Binary datasets carry labels in {+1, -1}; multi-class datasets carry labels
// in {1..J}. Synthetic datasets also record the generating support.
class Dataset {
 public:
  class Builder;

  Dataset() = default;

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t features() const noexcept { return n_features_; }
  std::size_t nnz() const noexcept { return index_.size(); }

  SparseRow row(std::size_t i) const;
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return has_labels_; }

  LabelKind kind() const noexcept { return kind_; }
  // Number of classes J (2 for binary data).
  int classes() const noexcept { return classes_; }

  const std::optional<std::vector<FeatureIndex>>& true_support() const noexcept {
    return true_support_;
  }
  Dataset with_true_support(std::vector<FeatureIndex> support) const;

  // Rows in the given order; label kind and class count are kept.
  Dataset subset(std::span<const std::size_t> rows) const;

  // Keeps only the listed columns, renumbered 0..features.size()-1 in the
  // order given. features[k] is the original index of new column k.
  Dataset restrict_features(std::span<const FeatureIndex> features) const;

  // Same rows with an explicit feature count (must be >= the largest index).
  Dataset with_features(std::size_t n_features) const;

  // Throws LabelError unless labels are +1/-1.
  void require_binary() const;
  // Throws LabelError unless labels are 1..J with J >= 2.
  void require_multiclass() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::size_t> row_ptr_{0};
  std::vector<FeatureIndex> index_;
  std::vector<double> value_;
  std::vector<int> labels_;
  std::size_t n_features_ = 0;
  LabelKind kind_ = LabelKind::binary;
  int classes_ = 2;
  bool has_labels_ = true;
  std::optional<std::vector<FeatureIndex>> true_support_;
};

class Dataset::Builder {
 public:
  Builder() = default;

  // Entries must have strictly increasing 0-based indices.
  Builder& add_row(int label, std::span<const std::pair<FeatureIndex, double>> entries);
  Builder& add_row(int label, std::span<const FeatureIndex> index, std::span<const double> value);
  Builder& add_dense_row(int label, std::span<const double> values);

  Builder& features(std::size_t n_features);
  Builder& kind(LabelKind kind, int classes);
  Builder& unlabeled();
  Builder& reserve(std::size_t rows, std::size_t nnz);

  // Label kind is inferred when not set: all labels in {+1,-1} means
  // binary, otherwise multi-class with J = max label.
  Dataset build() &&;

 private:
  Dataset data_;
  std::size_t max_index_plus_one_ = 0;
  std::optional<std::size_t> explicit_features_;
  std::optional<std::pair<LabelKind, int>> explicit_kind_;
};

}  // namespace hsvm
