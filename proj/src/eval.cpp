#include "termclass/eval.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "termclass/io.hpp"

namespace termclass {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("prediction and gold lengths differ");
  if (a == 0) throw std::invalid_argument("metrics need at least one prediction");
}

}  // namespace

double accuracy(std::span<const std::size_t> top1, std::span<const std::size_t> gold) {
  check_lengths(top1.size(), gold.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) correct += top1[i] == gold[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double mean_rank(std::span<const RankedList> ranked, std::span<const std::size_t> gold) {
  check_lengths(ranked.size(), gold.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (ranked[i].size() > 3) throw std::invalid_argument("ranked lists hold at most three labels");
    auto it = std::find(ranked[i].begin(), ranked[i].end(), gold[i]);
    total += it == ranked[i].end() ? kMissRank : static_cast<std::size_t>(it - ranked[i].begin()) + 1;
  }
  return static_cast<double>(total) / static_cast<double>(gold.size());
}

F1Result macro_f1(std::span<const std::size_t> top1, std::span<const std::size_t> gold, std::size_t num_classes) {
  if (top1.size() != gold.size()) throw std::invalid_argument("prediction and gold lengths differ");
  std::vector<std::size_t> tp(num_classes, 0);
  std::vector<std::size_t> predicted(num_classes, 0);
  std::vector<std::size_t> actual(num_classes, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (top1[i] >= num_classes || gold[i] >= num_classes) throw std::out_of_range("label index out of range");
    ++predicted[top1[i]];
    ++actual[gold[i]];
    if (top1[i] == gold[i]) ++tp[gold[i]];
  }
  F1Result out;
  out.per_class.resize(num_classes, 0.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double p = predicted[k] == 0 ? 0.0 : static_cast<double>(tp[k]) / static_cast<double>(predicted[k]);
    const double r = actual[k] == 0 ? 0.0 : static_cast<double>(tp[k]) / static_cast<double>(actual[k]);
    out.per_class[k] = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    sum += out.per_class[k];
  }
  out.macro = num_classes == 0 ? 0.0 : sum / static_cast<double>(num_classes);
  return out;
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const std::size_t> gold, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("need at least two folds");
  if (k > gold.size()) {
    throw std::invalid_argument("cannot split " + std::to_string(gold.size()) + " rows into " + std::to_string(k) +
                                " folds");
  }
  std::size_t num_classes = 0;
  for (auto g : gold) num_classes = std::max(num_classes, g + 1);
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < gold.size(); ++i) members[gold[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  // Round-robin continues across classes so overall fold sizes stay balanced too.
  std::size_t cursor = 0;
  for (auto& cls : members) {
    std::shuffle(cls.begin(), cls.end(), rng);
    for (std::size_t idx : cls) {
      folds[cursor].push_back(idx);
      cursor = (cursor + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

EvalReport evaluate(std::span<const RankedList> ranked, std::span<const std::size_t> gold, std::size_t num_classes) {
  check_lengths(ranked.size(), gold.size());
  std::vector<std::size_t> top1(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].empty()) throw std::invalid_argument("empty ranked list");
    top1[i] = ranked[i].front();
  }
  EvalReport r;
  r.accuracy = accuracy(top1, gold);
  r.mean_rank = mean_rank(ranked, gold);
  auto f1 = macro_f1(top1, gold, num_classes);
  r.macro_f1 = f1.macro;
  r.per_class_f1 = std::move(f1.per_class);
  r.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++r.confusion[gold[i]][top1[i]];
  return r;
}

EvalReport average_folds(std::span<const EvalReport> folds) {
  if (folds.empty()) throw std::invalid_argument("no folds to average");
  const std::size_t k = folds.front().per_class_f1.size();
  EvalReport out;
  out.per_class_f1.assign(k, 0.0);
  out.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (const auto& f : folds) {
    out.accuracy += f.accuracy;
    out.mean_rank += f.mean_rank;
    out.macro_f1 += f.macro_f1;
    for (std::size_t c = 0; c < k; ++c) {
      out.per_class_f1[c] += f.per_class_f1[c];
      for (std::size_t p = 0; p < k; ++p) out.confusion[c][p] += f.confusion[c][p];
    }
  }
  const auto n = static_cast<double>(folds.size());
  out.accuracy /= n;
  out.mean_rank /= n;
  out.macro_f1 /= n;
  for (auto& v : out.per_class_f1) v /= n;
  return out;
}

nlohmann::ordered_json to_json(const EvalReport& report, const LabelSet& labels) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["mean_rank"] = report.mean_rank;
  j["macro_f1"] = report.macro_f1;
  auto per_class = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < labels.size(); ++k) per_class[labels[k]] = report.per_class_f1[k];
  j["per_class_f1"] = per_class;
  j["labels"] = labels.labels();
  j["confusion"] = report.confusion;
  return j;
}

std::string to_text(const EvalReport& report, const LabelSet& labels) {
  std::ostringstream out;
  out << "accuracy: " << io::format_double(report.accuracy) << "\n";
  out << "mean_rank: " << io::format_double(report.mean_rank) << "\n";
  out << "macro_f1: " << io::format_double(report.macro_f1) << "\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    out << "f1[" << labels[k] << "]: " << io::format_double(report.per_class_f1[k]) << "\n";
  }
  for (std::size_t k = 0; k < labels.size(); ++k) {
    out << "confusion[" << labels[k] << "]:";
    for (auto c : report.confusion[k]) out << ' ' << c;
    out << "\n";
  }
  return out.str();
}

}  // namespace termclass
