#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "termclass/dataset.hpp"
#include "termclass/embeddings.hpp"

namespace termclass {

/// The 17 hypernym classes and their training-set frequencies, most frequent first.
inline constexpr std::array<std::string_view, 17> kTaskLabels{
    "Equity Index",    "Regulatory Agency",       "Credit Index", "Central Securities Depository",
    "Debt pricing and yields", "Bonds",           "Swap",         "Stock Corporation",
    "Option",          "Funds",                   "Future",       "Credit Events",
    "Stocks",          "MMIs",                    "Parametric schedules", "Forward",
    "Securities restrictions"};
inline constexpr std::array<std::size_t, 17> kTaskCounts{286, 205, 129, 107, 58, 55, 36, 25, 24,
                                                         22,  19,  18,  17,  17, 15, 9,  8};

/// Per-class row counts following kTaskCounts proportions (first k classes)
/// scaled to n, at least one row per class. Exact when n equals their sum.
std::vector<std::size_t> scaled_class_counts(std::size_t k, std::size_t n);

struct SynthConfig {
  std::size_t classes = 17;
  std::size_t rows = 1050;
  std::uint64_t seed = 42;
  std::size_t dim = 32;
  double sigma = 0.1;
  bool plant_substrings = false;
  std::size_t tokens_per_class = 12;
  double oov_rate = 0.15;  // chance that a term token is a misspelt, out-of-vocabulary variant
};

struct SynthOutput {
  EmbeddingStore store;
  Dataset data;
  std::size_t planted_class = 0;  // class whose terms carry "Inc." when planting
  std::size_t sibling_class = 0;  // class whose token pool the planted class borrows
};

/// Class anchors are unit vectors; each vocabulary token is its class anchor
/// plus N(0, sigma^2) noise per dimension; terms have one to three tokens.
/// With plant_substrings the planted class draws tokens from its sibling's
/// pool and every one of its terms ends in " Inc.", so only the substring
/// separates the two classes. Deterministic for a fixed config.
SynthOutput synthesize(const SynthConfig& cfg);

}  // namespace termclass
