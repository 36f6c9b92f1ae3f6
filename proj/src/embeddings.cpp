#include "termclass/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "termclass/io.hpp"
#include "termclass/oov.hpp"
#include "termclass/text.hpp"

namespace termclass {

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
}

void EmbeddingStore::add(std::string token, std::span<const double> vec) {
  if (vec.size() != dim_) {
    throw std::invalid_argument("vector length " + std::to_string(vec.size()) + " != dim " +
                                std::to_string(dim_));
  }
  if (index_.contains(token)) throw std::invalid_argument("duplicate token '" + token + "'");
  index_.emplace(token, vocab_.size());
  vocab_.push_back(std::move(token));
  data_.insert(data_.end(), vec.begin(), vec.end());
}

std::span<const double> EmbeddingStore::vector(std::size_t id) const {
  return {data_.data() + id * dim_, dim_};
}

std::optional<std::size_t> EmbeddingStore::find_exact(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> EmbeddingStore::find(std::string_view token) const {
  if (auto id = find_exact(token)) return id;
  return find_exact(text::lower(token));
}

EmbeddingStore parse_embeddings(std::string_view content) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= content.size()) return false;
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    line = content.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw EmbeddingFormatError(1, "missing header");
  auto header = split_spaces(line);
  std::size_t count = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) ||
      dim == 0) {
    throw EmbeddingFormatError(1, "malformed header, expected '<count> <dim>'");
  }

  EmbeddingStore store(dim);
  Vector row(dim);
  while (next_line(line)) {
    auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (store.size() == count) {
      throw EmbeddingFormatError(line_no, "more rows than the header count " + std::to_string(count));
    }
    if (fields.size() - 1 != dim) {
      throw EmbeddingFormatError(line_no, "row length " + std::to_string(fields.size() - 1) +
                                              " != dim " + std::to_string(dim));
    }
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_number(fields[k + 1], row[k])) {
        throw EmbeddingFormatError(line_no, "unparsable value '" + std::string(fields[k + 1]) + "'");
      }
      if (!std::isfinite(row[k])) throw EmbeddingFormatError(line_no, "non-finite value");
    }
    std::string token(fields[0]);
    if (store.find_exact(token)) throw EmbeddingFormatError(line_no, "duplicate token '" + token + "'");
    store.add(std::move(token), row);
  }
  if (store.size() != count) {
    throw EmbeddingFormatError(line_no, "header declares " + std::to_string(count) + " rows, found " +
                                            std::to_string(store.size()));
  }
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(io::read_file(path));
}

std::string format_embeddings(const EmbeddingStore& store) {
  std::string out = std::to_string(store.size()) + " " + std::to_string(store.dim()) + "\n";
  for (std::size_t i = 0; i < store.size(); ++i) {
    out += store.vocab()[i];
    for (double v : store.vector(i)) {
      out.push_back(' ');
      out += io::format_double(v);
    }
    out.push_back('\n');
  }
  return out;
}

void save_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_embeddings(store));
}

TermTokens TermTokens::from(std::string_view raw) {
  return TermTokens{std::string(raw), text::split_whitespace(raw)};
}

LookupResult lookup(const EmbeddingStore& store, std::string_view token, const OovResolver& resolver) {
  LookupResult result;
  if (auto id = store.find(token)) {
    auto v = store.vector(*id);
    result.vec.assign(v.begin(), v.end());
    result.resolution = Resolution::kInVocab;
    return result;
  }
  if (auto sub = resolver.resolve(token)) {
    auto v = store.vector(*sub);
    result.vec.assign(v.begin(), v.end());
    result.resolution = Resolution::kReplaced;
    result.substitute = store.vocab()[*sub];
    return result;
  }
  result.vec.assign(store.dim(), 0.0);
  result.resolution = Resolution::kZeroVector;
  return result;
}

Vector embed_term(const EmbeddingStore& store, const TermTokens& term, const OovResolver& resolver) {
  if (term.tokens.empty()) throw std::invalid_argument("cannot embed an empty term");
  Vector sum(store.dim(), 0.0);
  for (const auto& tok : term.tokens) {
    auto r = lookup(store, tok, resolver);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += r.vec[k];
  }
  return sum;
}

}  // namespace termclass
