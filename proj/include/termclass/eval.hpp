#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "termclass/features.hpp"

namespace termclass {

/// Rank assigned when the gold label is missing from the top-3 list.
inline constexpr std::size_t kMissRank = 4;

using RankedList = std::vector<std::size_t>;

/// Fraction of rank-1 predictions equal to gold.
double accuracy(std::span<const std::size_t> top1, std::span<const std::size_t> gold);

/// Mean 1-based position of gold within each list, kMissRank when absent.
double mean_rank(std::span<const RankedList> ranked, std::span<const std::size_t> gold);

struct F1Result {
  double macro = 0.0;
  std::vector<double> per_class;
};

/// Unweighted mean of per-class F1 over all `num_classes` classes.
/// Classes with P + R = 0 contribute 0.
F1Result macro_f1(std::span<const std::size_t> top1, std::span<const std::size_t> gold, std::size_t num_classes);

/// k disjoint folds covering [0, n). Per class, fold sizes differ by at most one.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const std::size_t> gold, std::size_t k,
                                                       std::uint64_t seed);

struct EvalReport {
  double accuracy = 0.0;
  double mean_rank = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
};

EvalReport evaluate(std::span<const RankedList> ranked, std::span<const std::size_t> gold, std::size_t num_classes);

/// Scalar metrics and per-class F1 averaged over folds; confusion matrices summed.
EvalReport average_folds(std::span<const EvalReport> folds);

nlohmann::ordered_json to_json(const EvalReport& report, const LabelSet& labels);

/// "key: value" lines.
std::string to_text(const EvalReport& report, const LabelSet& labels);

}  // namespace termclass
