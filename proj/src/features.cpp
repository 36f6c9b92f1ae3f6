#include "termclass/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "termclass/oov.hpp"
#include "termclass/text.hpp"

namespace termclass {

HandcraftedConfig HandcraftedConfig::with_indicators(const std::vector<std::string>& strings,
                                                     bool case_sensitive) {
  if (strings.size() != kIndicatorCount) {
    throw std::invalid_argument("expected exactly " + std::to_string(kIndicatorCount) +
                                " indicator strings, got " + std::to_string(strings.size()));
  }
  HandcraftedConfig cfg;
  std::copy(strings.begin(), strings.end(), cfg.indicators.begin());
  cfg.case_sensitive = case_sensitive;
  return cfg;
}

std::array<double, kHandcraftedWidth> handcrafted(std::string_view term_raw, const HandcraftedConfig& cfg) {
  std::array<double, kHandcraftedWidth> out{};
  const std::string folded_term = cfg.case_sensitive ? std::string() : text::lower(term_raw);
  for (std::size_t k = 0; k < kIndicatorCount; ++k) {
    const auto& needle = cfg.indicators[k];
    bool present = cfg.case_sensitive ? term_raw.find(needle) != std::string_view::npos
                                      : folded_term.find(text::lower(needle)) != std::string::npos;
    out[k] = present ? 1.0 : 0.0;
  }
  const auto cps = text::decode_utf8(term_raw);
  std::size_t upper = 0;
  std::size_t lower = 0;
  for (char32_t c : cps) {
    if (text::is_upper(c)) ++upper;
    if (text::is_lower(c)) ++lower;
  }
  out[kIndicatorCount] = static_cast<double>(cps.size());
  out[kIndicatorCount + 1] = static_cast<double>(upper);
  out[kIndicatorCount + 2] = static_cast<double>(upper) / static_cast<double>(std::max<std::size_t>(lower, 1));
  return out;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine_distance: length mismatch " + std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()));
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 1.0;
  return std::clamp(1.0 - dot / (std::sqrt(nu) * std::sqrt(nv)), 0.0, 2.0);
}

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) throw std::invalid_argument("a label set needs at least two labels");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw std::invalid_argument("duplicate label '" + l + "'");
  }
}

std::optional<std::size_t> LabelSet::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<Vector> embed_labels(const LabelSet& labels, const EmbeddingStore& store, const OovResolver& resolver) {
  std::vector<Vector> out;
  out.reserve(labels.size());
  for (const auto& l : labels.labels()) out.push_back(embed_term(store, TermTokens::from(l), resolver));
  return out;
}

namespace {

void cosine_block(std::span<const double> term_vec, std::span<const Vector> label_vectors, double* out) {
  for (std::size_t i = 0; i < label_vectors.size(); ++i) out[i] = cosine_distance(term_vec, label_vectors[i]);
}

void edit_block(std::string_view term_raw, std::span<const std::u32string> folded_labels, double* out) {
  const auto folded_term = text::lower(text::decode_utf8(term_raw));
  for (std::size_t i = 0; i < folded_labels.size(); ++i) {
    out[i] = static_cast<double>(levenshtein(folded_term, folded_labels[i]));
  }
}

std::vector<std::u32string> fold_labels(const LabelSet& labels) {
  std::vector<std::u32string> out;
  for (const auto& l : labels.labels()) out.push_back(text::lower(text::decode_utf8(l)));
  return out;
}

}  // namespace

std::vector<double> distance_features(const TermTokens& term, std::span<const double> term_vec,
                                      const LabelSet& labels, std::span<const Vector> label_vectors) {
  if (label_vectors.size() != labels.size()) throw std::invalid_argument("one vector per label required");
  const std::size_t k = labels.size();
  std::vector<double> out(2 * k);
  cosine_block(term_vec, label_vectors, out.data());
  edit_block(term.raw, fold_labels(labels), out.data() + k);
  return out;
}

MinMaxScaler::MinMaxScaler(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  if (mins_.size() != maxs_.size()) throw std::invalid_argument("scaler bounds differ in length");
}

MinMaxScaler MinMaxScaler::fit(const Matrix& train) {
  if (train.rows() == 0) throw std::invalid_argument("cannot fit a scaler on zero rows");
  std::vector<double> mins(static_cast<std::size_t>(train.cols()));
  std::vector<double> maxs(mins.size());
  for (Eigen::Index c = 0; c < train.cols(); ++c) {
    mins[static_cast<std::size_t>(c)] = train.col(c).minCoeff();
    maxs[static_cast<std::size_t>(c)] = train.col(c).maxCoeff();
  }
  return MinMaxScaler(std::move(mins), std::move(maxs));
}

void MinMaxScaler::transform_in_place(Eigen::Ref<Eigen::RowVectorXd> row) const {
  if (static_cast<std::size_t>(row.size()) != mins_.size()) {
    throw std::invalid_argument("scaler fitted on " + std::to_string(mins_.size()) + " columns, got " +
                                std::to_string(row.size()));
  }
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    const double lo = mins_[static_cast<std::size_t>(c)];
    const double hi = maxs_[static_cast<std::size_t>(c)];
    row[c] = hi == lo ? 0.0 : -1.0 + 2.0 * (row[c] - lo) / (hi - lo);
  }
}

Matrix MinMaxScaler::transform(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != mins_.size()) {
    throw std::invalid_argument("scaler fitted on " + std::to_string(mins_.size()) + " columns, got " +
                                std::to_string(x.cols()));
  }
  Matrix out = x;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    Eigen::RowVectorXd row = out.row(r);
    transform_in_place(row);
    out.row(r) = row;
  }
  return out;
}

FeatureExtractor::FeatureExtractor(const EmbeddingStore& store, const OovResolver& resolver, LabelSet labels,
                                   FeatureLayout layout, HandcraftedConfig cfg)
    : store_(store), resolver_(resolver), labels_(std::move(labels)), layout_(layout), cfg_(std::move(cfg)) {
  if (layout_.cosine) label_vectors_ = embed_labels(labels_, store_, resolver_);
  folded_labels_ = fold_labels(labels_);
}

Eigen::RowVectorXd FeatureExtractor::row(const FeatureInput& input) const {
  Eigen::RowVectorXd out(static_cast<Eigen::Index>(width()));
  const auto term = TermTokens::from(input.text);
  const auto vec = embed_term(store_, term, resolver_);
  Eigen::Index pos = 0;
  for (double v : vec) out[pos++] = v;
  if (layout_.handcrafted) {
    for (double v : handcrafted(input.raw, cfg_)) out[pos++] = v;
  }
  const std::size_t k = labels_.size();
  if (layout_.cosine) {
    cosine_block(vec, label_vectors_, out.data() + pos);
    pos += static_cast<Eigen::Index>(k);
  }
  if (layout_.edit) edit_block(term.raw, folded_labels_, out.data() + pos);
  return out;
}

Matrix FeatureExtractor::matrix(std::span<const FeatureInput> inputs) const {
  Matrix x(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(width()));
  for (std::size_t i = 0; i < inputs.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = row(inputs[i]);
  return x;
}

ScaledFeatures build_features(std::span<const FeatureInput> inputs, const FeatureExtractor& extractor) {
  if (inputs.empty()) throw std::invalid_argument("cannot build features for an empty dataset");
  Matrix raw = extractor.matrix(inputs);
  auto scaler = MinMaxScaler::fit(raw);
  Matrix scaled = scaler.transform(raw);
  return {std::move(scaled), std::move(scaler)};
}

}  // namespace termclass
