#include "termclass/oov.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "termclass/text.hpp"

namespace termclass {

void OovStrategy::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max) {
    throw std::invalid_argument("n-gram bounds must satisfy 1 <= min <= max, got [" +
                                std::to_string(ngram_min) + ", " + std::to_string(ngram_max) + "]");
  }
}

OovKind OovStrategy::parse_kind(std::string_view name) {
  if (name == "zero") return OovKind::kZeroVector;
  if (name == "levenshtein") return OovKind::kLevenshteinNearest;
  if (name == "ngram") return OovKind::kNgramSimilarity;
  throw std::invalid_argument("unknown OOV strategy '" + std::string(name) + "'");
}

std::string_view OovStrategy::kind_name(OovKind kind) {
  switch (kind) {
    case OovKind::kZeroVector:
      return "zero";
    case OovKind::kLevenshteinNearest:
      return "levenshtein";
    case OovKind::kNgramSimilarity:
      return "ngram";
  }
  return "zero";
}

namespace {

// Two-row DP. Returns a value > bound as soon as every cell of a row exceeds it.
std::size_t bounded_levenshtein(std::u32string_view a, std::u32string_view b, std::size_t bound) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > bound) return row_min;
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Candidate ordering shared by both resolvers once the primary score ties.
bool shorter_then_lexicographic(const Lexicon& lex, std::size_t a, std::size_t b) {
  if (lex.folded(a).size() != lex.folded(b).size()) return lex.folded(a).size() < lex.folded(b).size();
  return lex.key(a) < lex.key(b);
}

}  // namespace

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  return bounded_levenshtein(a, b, std::max(a.size(), b.size()));
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

Lexicon::Lexicon(std::vector<std::string> keys) : keys_(std::move(keys)) {
  folded_.reserve(keys_.size());
  for (const auto& k : keys_) folded_.push_back(text::lower(text::decode_utf8(k)));
}

std::size_t nearest_by_levenshtein(std::u32string_view folded_query, const Lexicon& lexicon) {
  if (lexicon.empty()) throw std::invalid_argument("cannot resolve against an empty vocabulary");
  std::size_t best = 0;
  std::size_t best_dist = levenshtein(folded_query, lexicon.folded(0));
  for (std::size_t id = 1; id < lexicon.size(); ++id) {
    const auto& cand = lexicon.folded(id);
    const std::size_t len_gap =
        cand.size() > folded_query.size() ? cand.size() - folded_query.size() : folded_query.size() - cand.size();
    if (len_gap > best_dist) continue;
    const std::size_t d = bounded_levenshtein(folded_query, cand, best_dist);
    if (d < best_dist || (d == best_dist && shorter_then_lexicographic(lexicon, id, best))) {
      best = id;
      best_dist = d;
    }
  }
  return best;
}

std::vector<std::u32string> char_ngrams(std::u32string_view s, std::size_t min_n, std::size_t max_n) {
  std::set<std::u32string> grams;
  for (std::size_t n = min_n; n <= max_n && n <= s.size(); ++n) {
    for (std::size_t i = 0; i + n <= s.size(); ++i) grams.emplace(s.substr(i, n));
  }
  return {grams.begin(), grams.end()};
}

NgramIndex::NgramIndex(std::shared_ptr<const Lexicon> lexicon, std::size_t min_n, std::size_t max_n)
    : lexicon_(std::move(lexicon)), min_n_(min_n), max_n_(max_n) {
  OovStrategy{OovKind::kNgramSimilarity, min_n, max_n}.validate();
  set_sizes_.resize(lexicon_->size());
  for (std::size_t id = 0; id < lexicon_->size(); ++id) {
    auto grams = char_ngrams(lexicon_->folded(id), min_n_, max_n_);
    set_sizes_[id] = grams.size();
    for (auto& g : grams) postings_[std::move(g)].push_back(id);
  }
}

const std::vector<std::size_t>& NgramIndex::postings(std::string_view gram) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = postings_.find(text::decode_utf8(gram));
  return it == postings_.end() ? kEmpty : it->second;
}

std::vector<std::string> NgramIndex::grams() const {
  std::vector<std::string> out;
  out.reserve(postings_.size());
  for (const auto& [g, ids] : postings_) out.push_back(text::encode_utf8(g));
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<NgramMatch> NgramIndex::best_match(std::string_view query) const {
  const auto folded = text::lower(text::decode_utf8(query));
  const auto grams = char_ngrams(folded, min_n_, max_n_);
  std::unordered_map<std::size_t, std::size_t> shared;
  for (const auto& g : grams) {
    auto it = postings_.find(g);
    if (it == postings_.end()) continue;
    for (std::size_t id : it->second) ++shared[id];
  }
  if (shared.empty()) return std::nullopt;

  std::optional<NgramMatch> best;
  std::size_t best_dist = 0;
  for (const auto& [id, common] : shared) {
    NgramMatch m{id, common, grams.size() + set_sizes_[id] - common};
    if (!best) {
      best = m;
      best_dist = levenshtein(folded, lexicon_->folded(id));
      continue;
    }
    // Compare common/union exactly via cross-multiplication.
    const std::size_t lhs = m.shared * best->union_size;
    const std::size_t rhs = best->shared * m.union_size;
    if (lhs < rhs) continue;
    const std::size_t d = levenshtein(folded, lexicon_->folded(id));
    if (lhs > rhs || d < best_dist || (d == best_dist && shorter_then_lexicographic(*lexicon_, id, best->id))) {
      best = m;
      best_dist = d;
    }
  }
  return best;
}

NgramIndex build_ngram_index(const EmbeddingStore& store, const OovStrategy& strategy) {
  return NgramIndex(std::make_shared<const Lexicon>(store.vocab()), strategy.ngram_min, strategy.ngram_max);
}

std::string resolve_levenshtein(std::string_view token, const EmbeddingStore& store) {
  Lexicon lex(store.vocab());
  return lex.key(nearest_by_levenshtein(text::lower(text::decode_utf8(token)), lex));
}

std::string resolve_ngram(std::string_view token, const NgramIndex& index, const EmbeddingStore& store) {
  if (store.empty()) throw std::invalid_argument("cannot resolve against an empty vocabulary");
  if (auto m = index.best_match(token)) return index.lexicon().key(m->id);
  return index.lexicon().key(nearest_by_levenshtein(text::lower(text::decode_utf8(token)), index.lexicon()));
}

OovResolver::OovResolver(const EmbeddingStore& store, OovStrategy strategy)
    : store_(store), strategy_(strategy) {
  strategy_.validate();
  if (strategy_.kind == OovKind::kZeroVector) return;
  lexicon_ = std::make_shared<const Lexicon>(store.vocab());
  if (strategy_.kind == OovKind::kNgramSimilarity) {
    index_ = std::make_unique<NgramIndex>(lexicon_, strategy_.ngram_min, strategy_.ngram_max);
  }
}

std::optional<std::size_t> OovResolver::resolve(std::string_view token) const {
  if (auto id = store_.find(token)) return id;
  if (strategy_.kind == OovKind::kZeroVector) return std::nullopt;
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(std::string(token)); it != memo_.end()) return it->second;
  }
  auto result = compute(token);
  std::lock_guard lock(mutex_);
  memo_.emplace(std::string(token), result);
  return result;
}

std::optional<std::size_t> OovResolver::compute(std::string_view token) const {
  if (store_.empty()) throw std::invalid_argument("cannot resolve against an empty vocabulary");
  if (index_) {
    if (auto m = index_->best_match(token)) return m->id;
  }
  return nearest_by_levenshtein(text::lower(text::decode_utf8(token)), *lexicon_);
}

}  // namespace termclass
