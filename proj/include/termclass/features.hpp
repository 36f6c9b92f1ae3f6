#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "termclass/embeddings.hpp"

namespace termclass {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kIndicatorCount = 7;
inline constexpr std::size_t kHandcraftedWidth = kIndicatorCount + 3;

struct HandcraftedConfig {
  std::array<std::string, kIndicatorCount> indicators{"Inc.", "Corp", "Ltd", "Bank", "Index", "Rate", "%"};
  bool case_sensitive = true;

  /// Throws std::invalid_argument unless exactly seven strings are given.
  static HandcraftedConfig with_indicators(const std::vector<std::string>& strings, bool case_sensitive);
};

/// [7 substring indicators | character count | uppercase count | upper/max(lower,1)]
std::array<double, kHandcraftedWidth> handcrafted(std::string_view term_raw, const HandcraftedConfig& cfg);

/// 1 - cos(u, v), or 1 when either vector has zero norm.
double cosine_distance(std::span<const double> u, std::span<const double> v);

/// Ordered class labels. The order is shared by features, model and metrics.
class LabelSet {
 public:
  LabelSet() = default;
  /// Throws std::invalid_argument on fewer than two labels or duplicates.
  explicit LabelSet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& operator[](std::size_t k) const { return labels_[k]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

/// Label embeddings via embed_term, in label order.
std::vector<Vector> embed_labels(const LabelSet& labels, const EmbeddingStore& store, const OovResolver& resolver);

/// [cosine distance to each label vector | edit distance to each label string].
std::vector<double> distance_features(const TermTokens& term, std::span<const double> term_vec,
                                      const LabelSet& labels, std::span<const Vector> label_vectors);

/// Per-column affine map onto [-1, 1]. Constant columns map to 0; values
/// outside the fitted range are not clipped.
class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  MinMaxScaler(std::vector<double> mins, std::vector<double> maxs);

  static MinMaxScaler fit(const Matrix& train);

  Matrix transform(const Matrix& x) const;
  void transform_in_place(Eigen::Ref<Eigen::RowVectorXd> row) const;

  std::size_t columns() const { return mins_.size(); }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

/// Which blocks make up a feature row. The embedding block is always present.
struct FeatureLayout {
  bool handcrafted = true;
  bool cosine = true;
  bool edit = true;

  std::size_t width(std::size_t dim, std::size_t num_labels) const {
    return dim + (handcrafted ? kHandcraftedWidth : 0) + (cosine ? num_labels : 0) + (edit ? num_labels : 0);
  }
};

struct FeatureInput {
  std::string raw;   // original term, feeds the hand-crafted block
  std::string text;  // possibly augmented text, feeds embedding and distances
};

/// Computes unscaled feature rows for one configuration.
class FeatureExtractor {
 public:
  FeatureExtractor(const EmbeddingStore& store, const OovResolver& resolver, LabelSet labels,
                   FeatureLayout layout, HandcraftedConfig cfg);

  std::size_t width() const { return layout_.width(store_.dim(), labels_.size()); }
  const LabelSet& labels() const { return labels_; }
  const FeatureLayout& layout() const { return layout_; }

  Eigen::RowVectorXd row(const FeatureInput& input) const;
  Matrix matrix(std::span<const FeatureInput> inputs) const;

 private:
  const EmbeddingStore& store_;
  const OovResolver& resolver_;
  LabelSet labels_;
  FeatureLayout layout_;
  HandcraftedConfig cfg_;
  std::vector<Vector> label_vectors_;
  std::vector<std::u32string> folded_labels_;
};

struct ScaledFeatures {
  Matrix x;
  MinMaxScaler scaler;
};

/// Raw feature matrix for `inputs`, scaled by a scaler fitted on those same rows.
ScaledFeatures build_features(std::span<const FeatureInput> inputs, const FeatureExtractor& extractor);

}  // namespace termclass
