#include "hsvm/dataset.hpp"

#include <algorithm>
#include <string>

#include "hsvm/error.hpp"

namespace hsvm {

double SparseRow::dot(std::span<const double> dense) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) acc += value[k] * dense[index[k]];
  return acc;
}

double SparseRow::squared_norm() const {
  double acc = 0.0;
  for (double v : value) acc += v * v;
  return acc;
}

SparseRow Dataset::row(std::size_t i) const {
  const std::size_t begin = row_ptr_[i];
  const std::size_t len = row_ptr_[i + 1] - begin;
  return {std::span<const FeatureIndex>(index_.data() + begin, len),
          std::span<const double>(value_.data() + begin, len)};
}

Dataset Dataset::with_true_support(std::vector<FeatureIndex> support) const {
  std::sort(support.begin(), support.end());
  for (FeatureIndex f : support) {
    if (f >= n_features_) throw ShapeError("true support index beyond feature count");
  }
  Dataset out = *this;
  out.true_support_ = std::move(support);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.n_features_ = n_features_;
  out.kind_ = kind_;
  out.classes_ = classes_;
  out.has_labels_ = has_labels_;
  out.true_support_ = true_support_;
  out.labels_.reserve(rows.size());
  out.row_ptr_.reserve(rows.size() + 1);
  for (std::size_t r : rows) {
    if (r >= this->rows()) throw ShapeError("subset row out of range");
    const auto x = row(r);
    out.index_.insert(out.index_.end(), x.index.begin(), x.index.end());
    out.value_.insert(out.value_.end(), x.value.begin(), x.value.end());
    out.row_ptr_.push_back(out.index_.size());
    out.labels_.push_back(labels_[r]);
  }
  return out;
}

Dataset Dataset::restrict_features(std::span<const FeatureIndex> features) const {
  constexpr FeatureIndex absent = ~FeatureIndex{0};
  std::vector<FeatureIndex> remap(n_features_, absent);
  for (std::size_t k = 0; k < features.size(); ++k) {
    if (features[k] >= n_features_) throw ShapeError("restricted feature out of range");
    if (remap[features[k]] != absent) throw ShapeError("duplicate restricted feature");
    remap[features[k]] = static_cast<FeatureIndex>(k);
  }
  const bool order_preserving = std::is_sorted(features.begin(), features.end());

  Dataset out;
  out.n_features_ = features.size();
  out.kind_ = kind_;
  out.classes_ = classes_;
  out.has_labels_ = has_labels_;
  out.labels_ = labels_;
  out.row_ptr_.reserve(rows() + 1);
  std::vector<std::pair<FeatureIndex, double>> scratch;
  for (std::size_t i = 0; i < rows(); ++i) {
    const auto x = row(i);
    scratch.clear();
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      const FeatureIndex mapped = remap[x.index[k]];
      if (mapped != absent) scratch.emplace_back(mapped, x.value[k]);
    }
    if (!order_preserving) std::sort(scratch.begin(), scratch.end());
    for (const auto& [idx, val] : scratch) {
      out.index_.push_back(idx);
      out.value_.push_back(val);
    }
    out.row_ptr_.push_back(out.index_.size());
  }
  return out;
}

Dataset Dataset::with_features(std::size_t n_features) const {
  for (FeatureIndex f : index_) {
    if (f >= n_features) throw ShapeError("feature count smaller than largest index");
  }
  Dataset out = *this;
  out.n_features_ = n_features;
  return out;
}

void Dataset::require_binary() const {
  if (!has_labels_) throw LabelError("dataset has no labels");
  if (kind_ != LabelKind::binary) throw LabelError("expected binary labels (+1/-1)");
}

void Dataset::require_multiclass() const {
  if (!has_labels_) throw LabelError("dataset has no labels");
  if (kind_ != LabelKind::multiclass) throw LabelError("expected multi-class labels 1..J");
  if (classes_ < 2) throw LabelError("multi-class data needs J >= 2");
}

Dataset::Builder& Dataset::Builder::add_row(
    int label, std::span<const std::pair<FeatureIndex, double>> entries) {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].first <= entries[k - 1].first) {
      throw ShapeError("row indices must be strictly increasing");
    }
    data_.index_.push_back(entries[k].first);
    data_.value_.push_back(entries[k].second);
  }
  if (!entries.empty()) {
    max_index_plus_one_ = std::max<std::size_t>(max_index_plus_one_, entries.back().first + 1);
  }
  data_.row_ptr_.push_back(data_.index_.size());
  data_.labels_.push_back(label);
  return *this;
}

Dataset::Builder& Dataset::Builder::add_row(int label, std::span<const FeatureIndex> index,
                                            std::span<const double> value) {
  if (index.size() != value.size()) throw ShapeError("index/value length mismatch");
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (k > 0 && index[k] <= index[k - 1]) {
      throw ShapeError("row indices must be strictly increasing");
    }
  }
  data_.index_.insert(data_.index_.end(), index.begin(), index.end());
  data_.value_.insert(data_.value_.end(), value.begin(), value.end());
  if (!index.empty()) {
    max_index_plus_one_ = std::max<std::size_t>(max_index_plus_one_, index.back() + 1);
  }
  data_.row_ptr_.push_back(data_.index_.size());
  data_.labels_.push_back(label);
  return *this;
}

Dataset::Builder& Dataset::Builder::add_dense_row(int label, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] != 0.0) {
      data_.index_.push_back(static_cast<FeatureIndex>(k));
      data_.value_.push_back(values[k]);
    }
  }
  max_index_plus_one_ = std::max(max_index_plus_one_, values.size());
  data_.row_ptr_.push_back(data_.index_.size());
  data_.labels_.push_back(label);
  return *this;
}

Dataset::Builder& Dataset::Builder::features(std::size_t n_features) {
  explicit_features_ = n_features;
  return *this;
}

Dataset::Builder& Dataset::Builder::kind(LabelKind kind, int classes) {
  explicit_kind_ = std::make_pair(kind, classes);
  return *this;
}

Dataset::Builder& Dataset::Builder::unlabeled() {
  data_.has_labels_ = false;
  return *this;
}

Dataset::Builder& Dataset::Builder::reserve(std::size_t rows, std::size_t nnz) {
  data_.row_ptr_.reserve(rows + 1);
  data_.labels_.reserve(rows);
  data_.index_.reserve(nnz);
  data_.value_.reserve(nnz);
  return *this;
}

Dataset Dataset::Builder::build() && {
  if (explicit_features_) {
    if (*explicit_features_ < max_index_plus_one_) {
      throw ShapeError("explicit feature count " + std::to_string(*explicit_features_) +
                       " is below the largest index " + std::to_string(max_index_plus_one_));
    }
    data_.n_features_ = *explicit_features_;
  } else {
    data_.n_features_ = max_index_plus_one_;
  }

  if (!data_.has_labels_) {
    if (explicit_kind_) {
      data_.kind_ = explicit_kind_->first;
      data_.classes_ = explicit_kind_->second;
    }
    return std::move(data_);
  }

  if (explicit_kind_) {
    data_.kind_ = explicit_kind_->first;
    data_.classes_ = explicit_kind_->second;
    for (int y : data_.labels_) {
      const bool ok = data_.kind_ == LabelKind::binary ? (y == 1 || y == -1)
                                                       : (y >= 1 && y <= data_.classes_);
      if (!ok) throw LabelError("label " + std::to_string(y) + " outside the declared label set");
    }
    return std::move(data_);
  }

  const bool binary = std::all_of(data_.labels_.begin(), data_.labels_.end(),
                                  [](int y) { return y == 1 || y == -1; });
  if (binary) {
    data_.kind_ = LabelKind::binary;
    data_.classes_ = 2;
  } else {
    int max_label = 0;
    for (int y : data_.labels_) {
      if (y < 1) throw LabelError("multi-class labels must be >= 1, got " + std::to_string(y));
      max_label = std::max(max_label, y);
    }
    data_.kind_ = LabelKind::multiclass;
    data_.classes_ = max_label;
  }
  return std::move(data_);
}

}  // namespace hsvm
