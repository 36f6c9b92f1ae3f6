#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "termclass/oov.hpp"

namespace termclass {

/// Headword -> definition, keyed by normalized headword (lowercase, collapsed whitespace).
class DefinitionDict {
 public:
  DefinitionDict() = default;

  /// Normalizes the headword; a later insert of the same headword replaces the earlier one.
  void insert(std::string_view headword, std::string definition);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::string* find(std::string_view normalized_headword) const;

  bool operator==(const DefinitionDict&) const = default;

 private:
  std::map<std::string, std::string> entries_;
};

/// Snapshot file: a JSON object {headword: definition}, UTF-8.
DefinitionDict load_snapshot(const std::filesystem::path& path);
DefinitionDict parse_snapshot(std::string_view json);
std::string format_snapshot(const DefinitionDict& dict);
void save_snapshot(const DefinitionDict& dict, const std::filesystem::path& path);

/// Text up to and including the first '.' followed by whitespace or end of
/// text, else the whole text; trimmed. Throws std::invalid_argument on empty input.
std::string first_sentence(std::string_view definition);

struct AugmentedTerm {
  std::string raw;
  std::optional<std::string> matched_headword;
  std::optional<std::string> definition_sentence;
  std::string text;  // raw, or raw + ". " + definition_sentence
};

inline constexpr double kDefaultFuzzyThreshold = 0.2;

/// Exact headword match, then fuzzy n-gram Jaccard match over headwords.
class Augmenter {
 public:
  explicit Augmenter(DefinitionDict dict, double fuzzy_threshold = kDefaultFuzzyThreshold,
                     std::size_t ngram_min = 3, std::size_t ngram_max = 6);

  std::optional<std::string> match_term(std::string_view term) const;
  AugmentedTerm augment(std::string_view raw) const;

  const DefinitionDict& dict() const { return dict_; }

 private:
  DefinitionDict dict_;
  double threshold_;
  std::unique_ptr<NgramIndex> index_;
};

std::optional<std::string> match_term(std::string_view term, const DefinitionDict& dict,
                                      double fuzzy_threshold = kDefaultFuzzyThreshold);

struct AugmentationResult {
  std::vector<AugmentedTerm> terms;
  double coverage = 0.0;  // matched / total
};

AugmentationResult augment_dataset(std::span<const std::string> terms, const Augmenter& augmenter);

struct FetchedDefinition {
  std::string headword;
  std::string definition;
};

class FetchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Remote definition source. Returns nullopt when the term has no entry;
/// throws FetchError on transport failures.
class DefinitionFetcher {
 public:
  virtual ~DefinitionFetcher() = default;
  virtual std::optional<FetchedDefinition> fetch(const std::string& term) = 0;
  virtual std::string id() const = 0;
};

struct FetcherConfig {
  std::string base_url;
  std::string path = "/define";
  double timeout_seconds = 10.0;
  double rate_limit = 1.0;  // requests per second; <= 0 disables throttling
  std::string user_agent = "termclass/1.0";
};

/// Environment variable that overrides FetcherConfig::base_url.
inline constexpr const char* kFetcherBaseUrlEnv = "TERMCLASS_FETCH_BASE_URL";

/// GET {base_url}{path}?term=<term>. A 200 response carries
/// {"headword": ..., "definition": ...}; 404 means no entry.
class HttpDefinitionFetcher : public DefinitionFetcher {
 public:
  explicit HttpDefinitionFetcher(FetcherConfig cfg);
  std::optional<FetchedDefinition> fetch(const std::string& term) override;
  std::string id() const override { return cfg_.base_url; }

 private:
  FetcherConfig cfg_;
};

struct FetchReport {
  DefinitionDict dict;
  std::size_t warnings = 0;
  std::vector<std::string> messages;
};

/// Queries each term in order, sleeping between requests to honour
/// `rate_limit`, and writes the snapshot atomically. Transport failures are
/// counted as warnings; a snapshot write failure throws.
FetchReport fetch_definitions(std::span<const std::string> terms, DefinitionFetcher& fetcher,
                              const std::filesystem::path& snapshot_out, double rate_limit = 0.0);

}  // namespace termclass
