#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace termclass {

class OovResolver;

using Vector = std::vector<double>;

class EmbeddingFormatError : public std::runtime_error {
 public:
  EmbeddingFormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Immutable token -> dense vector table.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim);

  /// Throws std::invalid_argument on a duplicate token or wrong vector length.
  void add(std::string token, std::span<const double> vec);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vocab_.size(); }
  bool empty() const { return vocab_.empty(); }

  const std::vector<std::string>& vocab() const { return vocab_; }
  std::span<const double> vector(std::size_t id) const;

  /// Exact match first, then the lowercased token.
  std::optional<std::size_t> find(std::string_view token) const;
  std::optional<std::size_t> find_exact(std::string_view token) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> vocab_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads word2vec text format: a "<count> <dim>" header, then one
/// "<token> <dim floats>" row per entry.
EmbeddingStore load_embeddings(const std::filesystem::path& path);
EmbeddingStore parse_embeddings(std::string_view content);

/// Inverse of parse_embeddings. Values are written in shortest round-trip form.
std::string format_embeddings(const EmbeddingStore& store);
void save_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);

struct TermTokens {
  std::string raw;
  std::vector<std::string> tokens;

  static TermTokens from(std::string_view raw);
};

enum class Resolution { kInVocab, kReplaced, kZeroVector };

struct LookupResult {
  Vector vec;
  Resolution resolution = Resolution::kZeroVector;
  std::string substitute;  // set when resolution == kReplaced
};

LookupResult lookup(const EmbeddingStore& store, std::string_view token, const OovResolver& resolver);

/// Sum of per-token vectors. Throws std::invalid_argument for an empty term.
Vector embed_term(const EmbeddingStore& store, const TermTokens& term, const OovResolver& resolver);

}  // namespace termclass
