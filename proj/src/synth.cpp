#include "termclass/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "termclass/text.hpp"

namespace termclass {

namespace {

constexpr std::string_view kConsonants = "bcdfghjklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::array<std::string_view, 4> kPrefixes{"asia", "euro", "global", "us"};

std::string make_word(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> syllables(2, 4);
  std::uniform_int_distribution<std::size_t> cons(0, kConsonants.size() - 1);
  std::uniform_int_distribution<std::size_t> vow(0, kVowels.size() - 1);
  std::string w;
  const int s = syllables(rng);
  for (int i = 0; i < s; ++i) {
    w.push_back(kConsonants[cons(rng)]);
    w.push_back(kVowels[vow(rng)]);
  }
  return w;
}

std::string misspell(const std::string& word, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 3);
  switch (kind(rng)) {
    case 0:
      return word + "s";
    case 1: {
      std::uniform_int_distribution<std::size_t> p(0, kPrefixes.size() - 1);
      return std::string(kPrefixes[p(rng)]) + word;
    }
    case 2: {
      if (word.size() <= 4) return word + "s";
      std::uniform_int_distribution<std::size_t> pos(1, word.size() - 2);
      std::string w = word;
      w.erase(pos(rng), 1);
      return w;
    }
    default: {
      std::uniform_int_distribution<std::size_t> pos(0, word.size() - 1);
      std::string w = word;
      const auto i = pos(rng);
      w.insert(i, 1, w[i]);
      return w;
    }
  }
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
  return w;
}

}  // namespace

std::vector<std::size_t> scaled_class_counts(std::size_t k, std::size_t n) {
  if (k < 2 || k > kTaskCounts.size()) {
    throw std::invalid_argument("class count must be in [2, " + std::to_string(kTaskCounts.size()) + "]");
  }
  if (n < k) throw std::invalid_argument("need at least one row per class");
  const std::size_t total = std::accumulate(kTaskCounts.begin(), kTaskCounts.begin() + static_cast<long>(k), std::size_t{0});

  std::vector<std::size_t> counts(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double quota = static_cast<double>(n) * static_cast<double>(kTaskCounts[c]) / static_cast<double>(total);
    counts[c] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(quota)));
    remainder[c] = quota - std::floor(quota);
    assigned += counts[c];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (assigned < n) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < n; i = (i + 1) % k, ++assigned) ++counts[order[i]];
  }
  while (assigned > n) {
    // Take from the currently largest class (lowest index on ties).
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  return counts;
}

SynthOutput synthesize(const SynthConfig& cfg) {
  const auto counts = scaled_class_counts(cfg.classes, cfg.rows);
  if (cfg.dim == 0) throw std::invalid_argument("dimension must be positive");
  if (cfg.tokens_per_class == 0) throw std::invalid_argument("tokens_per_class must be positive");
  if (!(cfg.sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");

  const std::size_t k = cfg.classes;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Vector> anchors(k, Vector(cfg.dim));
  for (auto& a : anchors) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : a) {
        v = gauss(rng);
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& v : a) v /= norm;
  }

  SynthOutput out;
  out.store = EmbeddingStore(cfg.dim);
  out.planted_class = std::min<std::size_t>(7, k - 1);
  out.sibling_class = k > 12 ? 12 : (out.planted_class == 0 ? 1 : 0);

  // Label words, so that class names themselves have embeddings.
  std::vector<std::string> labels(kTaskLabels.begin(), kTaskLabels.begin() + static_cast<long>(k));
  std::vector<std::string> label_words;
  std::set<std::string> taken;
  for (const auto& l : labels) {
    for (const auto& w : text::split_whitespace(text::lower(l))) {
      if (taken.insert(w).second) label_words.push_back(w);
    }
  }
  for (const auto& w : label_words) {
    Vector v(cfg.dim, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const auto words = text::split_whitespace(text::lower(labels[c]));
      if (std::find(words.begin(), words.end(), w) == words.end()) continue;
      for (std::size_t d = 0; d < cfg.dim; ++d) v[d] += anchors[c][d];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (auto& x : v) x /= norm;
    }
    out.store.add(w, v);
  }

  std::vector<std::vector<std::string>> pools(k);
  Vector vec(cfg.dim);
  for (std::size_t c = 0; c < k; ++c) {
    while (pools[c].size() < cfg.tokens_per_class) {
      auto w = make_word(rng);
      if (!taken.insert(w).second) continue;
      for (std::size_t d = 0; d < cfg.dim; ++d) vec[d] = anchors[c][d] + cfg.sigma * gauss(rng);
      out.store.add(w, vec);
      pools[c].push_back(std::move(w));
    }
  }

  std::uniform_int_distribution<int> term_len(1, 3);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.tokens_per_class - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 0; c < k; ++c) {
    const bool planted = cfg.plant_substrings && c == out.planted_class;
    const auto& pool = planted ? pools[out.sibling_class] : pools[c];
    for (std::size_t r = 0; r < counts[c]; ++r) {
      const int m = term_len(rng);
      const bool title = unit(rng) < 0.5;
      std::string term;
      for (int t = 0; t < m; ++t) {
        std::string tok = pool[pick(rng)];
        if (unit(rng) < cfg.oov_rate) {
          auto variant = misspell(tok, rng);
          if (!taken.contains(variant)) tok = std::move(variant);
        }
        if (title) tok = capitalize(std::move(tok));
        if (!term.empty()) term.push_back(' ');
        term += tok;
      }
      if (planted) term += " Inc.";
      out.data.rows.push_back({std::move(term), labels[c]});
    }
  }
  std::shuffle(out.data.rows.begin(), out.data.rows.end(), rng);
  return out;
}

}  // namespace termclass
