#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "termclass/embeddings.hpp"

namespace termclass {

enum class OovKind { kZeroVector, kLevenshteinNearest, kNgramSimilarity };

struct OovStrategy {
  OovKind kind = OovKind::kZeroVector;
  std::size_t ngram_min = 3;
  std::size_t ngram_max = 6;

  /// Throws std::invalid_argument unless 1 <= ngram_min <= ngram_max.
  void validate() const;

  /// "zero", "levenshtein" or "ngram".
  static OovKind parse_kind(std::string_view name);
  static std::string_view kind_name(OovKind kind);
};

/// Edit distance over Unicode scalar values.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

/// A list of candidate strings together with their case-folded code points.
class Lexicon {
 public:
  explicit Lexicon(std::vector<std::string> keys);

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  const std::string& key(std::size_t id) const { return keys_[id]; }
  const std::u32string& folded(std::size_t id) const { return folded_[id]; }

 private:
  std::vector<std::string> keys_;
  std::vector<std::u32string> folded_;
};

/// Candidate with the smallest edit distance to the folded query. Ties go to
/// the shorter candidate, then to the lexicographically smaller key.
/// Throws std::invalid_argument on an empty lexicon.
std::size_t nearest_by_levenshtein(std::u32string_view folded_query, const Lexicon& lexicon);

struct NgramMatch {
  std::size_t id = 0;
  std::size_t shared = 0;      // |G(query) ∩ G(candidate)|
  std::size_t union_size = 0;  // |G(query) ∪ G(candidate)|

  double jaccard() const {
    return union_size == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(union_size);
  }
};

/// Distinct character n-grams of `s` with lengths in [min_n, max_n].
std::vector<std::u32string> char_ngrams(std::u32string_view s, std::size_t min_n, std::size_t max_n);

/// Inverted index from character n-gram to the lexicon entries containing it.
class NgramIndex {
 public:
  NgramIndex(std::shared_ptr<const Lexicon> lexicon, std::size_t min_n, std::size_t max_n);

  /// Highest-Jaccard candidate sharing at least one n-gram with the query.
  /// Ties: smaller edit distance, then shorter, then lexicographic.
  std::optional<NgramMatch> best_match(std::string_view query) const;

  const Lexicon& lexicon() const { return *lexicon_; }
  std::size_t min_n() const { return min_n_; }
  std::size_t max_n() const { return max_n_; }

  /// Posting list for a UTF-8 gram; empty when absent. Ids are ascending.
  const std::vector<std::size_t>& postings(std::string_view gram) const;
  std::size_t gram_count() const { return postings_.size(); }
  std::vector<std::string> grams() const;

 private:
  std::shared_ptr<const Lexicon> lexicon_;
  std::size_t min_n_;
  std::size_t max_n_;
  std::unordered_map<std::u32string, std::vector<std::size_t>> postings_;
  std::vector<std::size_t> set_sizes_;
};

NgramIndex build_ngram_index(const EmbeddingStore& store, const OovStrategy& strategy);

/// Vocab token with the smallest case-folded edit distance to `token`.
std::string resolve_levenshtein(std::string_view token, const EmbeddingStore& store);

/// Best n-gram Jaccard match, falling back to resolve_levenshtein when the
/// token shares no n-gram with any vocab entry.
std::string resolve_ngram(std::string_view token, const NgramIndex& index, const EmbeddingStore& store);

/// Per-run resolver: applies the configured strategy and memoizes results.
/// Safe to share between threads.
class OovResolver {
 public:
  OovResolver(const EmbeddingStore& store, OovStrategy strategy);

  OovResolver(const OovResolver&) = delete;
  OovResolver& operator=(const OovResolver&) = delete;

  /// Vocab id of the substitute, or nullopt for the zero vector. Tokens
  /// already in the vocabulary resolve to themselves.
  std::optional<std::size_t> resolve(std::string_view token) const;

  const OovStrategy& strategy() const { return strategy_; }

 private:
  std::optional<std::size_t> compute(std::string_view token) const;

  const EmbeddingStore& store_;
  OovStrategy strategy_;
  std::shared_ptr<const Lexicon> lexicon_;
  std::unique_ptr<NgramIndex> index_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::optional<std::size_t>> memo_;
};

}  // namespace termclass
