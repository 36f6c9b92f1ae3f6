#include "termclass/augment.hpp"

#include <cctype>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "termclass/io.hpp"
#include "termclass/text.hpp"

namespace termclass {

void DefinitionDict::insert(std::string_view headword, std::string definition) {
  entries_.insert_or_assign(text::normalize_key(headword), std::move(definition));
}

const std::string* DefinitionDict::find(std::string_view normalized_headword) const {
  auto it = entries_.find(std::string(normalized_headword));
  return it == entries_.end() ? nullptr : &it->second;
}

DefinitionDict parse_snapshot(std::string_view json) {
  const auto doc = nlohmann::json::parse(json);
  if (!doc.is_object()) throw std::runtime_error("snapshot must be a JSON object");
  DefinitionDict dict;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) throw std::runtime_error("snapshot value for '" + key + "' is not a string");
    dict.insert(key, value.get<std::string>());
  }
  return dict;
}

DefinitionDict load_snapshot(const std::filesystem::path& path) { return parse_snapshot(io::read_file(path)); }

std::string format_snapshot(const DefinitionDict& dict) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [k, v] : dict.entries()) doc[k] = v;
  return doc.dump(2) + "\n";
}

void save_snapshot(const DefinitionDict& dict, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_snapshot(dict));
}

std::string first_sentence(std::string_view definition) {
  const auto trimmed = text::trim(definition);
  if (trimmed.empty()) throw std::invalid_argument("empty definition");
  for (std::size_t i = 0; i < trimmed.size(); ++i) {
    if (trimmed[i] != '.') continue;
    if (i + 1 == trimmed.size() || std::isspace(static_cast<unsigned char>(trimmed[i + 1]))) {
      return trimmed.substr(0, i + 1);
    }
  }
  return trimmed;
}

Augmenter::Augmenter(DefinitionDict dict, double fuzzy_threshold, std::size_t ngram_min, std::size_t ngram_max)
    : dict_(std::move(dict)), threshold_(fuzzy_threshold) {
  std::vector<std::string> headwords;
  headwords.reserve(dict_.size());
  for (const auto& [k, v] : dict_.entries()) headwords.push_back(k);
  index_ = std::make_unique<NgramIndex>(std::make_shared<const Lexicon>(std::move(headwords)), ngram_min, ngram_max);
}

std::optional<std::string> Augmenter::match_term(std::string_view term) const {
  const auto key = text::normalize_key(term);
  if (dict_.find(key)) return key;
  auto m = index_->best_match(key);
  if (!m || m->jaccard() < threshold_) return std::nullopt;
  return index_->lexicon().key(m->id);
}

AugmentedTerm Augmenter::augment(std::string_view raw) const {
  AugmentedTerm out;
  out.raw = std::string(raw);
  out.text = out.raw;
  auto headword = match_term(raw);
  if (!headword) return out;
  const std::string* definition = dict_.find(*headword);
  if (definition == nullptr || text::trim(*definition).empty()) return out;
  out.definition_sentence = first_sentence(*definition);
  out.matched_headword = std::move(headword);
  out.text = out.raw + ". " + *out.definition_sentence;
  return out;
}

std::optional<std::string> match_term(std::string_view term, const DefinitionDict& dict, double fuzzy_threshold) {
  return Augmenter(dict, fuzzy_threshold).match_term(term);
}

AugmentationResult augment_dataset(std::span<const std::string> terms, const Augmenter& augmenter) {
  AugmentationResult result;
  result.terms.reserve(terms.size());
  std::size_t matched = 0;
  for (const auto& t : terms) {
    result.terms.push_back(augmenter.augment(t));
    if (result.terms.back().matched_headword) ++matched;
  }
  result.coverage = terms.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(terms.size());
  return result;
}

HttpDefinitionFetcher::HttpDefinitionFetcher(FetcherConfig cfg) : cfg_(std::move(cfg)) {
  if (const char* env = std::getenv(kFetcherBaseUrlEnv); env != nullptr && *env != '\0') cfg_.base_url = env;
  if (cfg_.base_url.empty()) throw std::invalid_argument("fetcher base URL is not configured");
}

std::optional<FetchedDefinition> HttpDefinitionFetcher::fetch(const std::string& term) {
  httplib::Client client(cfg_.base_url);
  const auto secs = static_cast<time_t>(cfg_.timeout_seconds);
  const auto usecs = static_cast<time_t>((cfg_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  httplib::Headers headers{{"User-Agent", cfg_.user_agent}};
  httplib::Params params{{"term", term}};
  auto res = client.Get(cfg_.path, params, headers);
  if (!res) throw FetchError("request for '" + term + "' failed: " + httplib::to_string(res.error()));
  if (res->status == 404) return std::nullopt;
  if (res->status != 200) throw FetchError("request for '" + term + "' returned HTTP " + std::to_string(res->status));
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw FetchError("malformed response for '" + term + "': " + e.what());
  }
  if (!body.contains("definition") || !body["definition"].is_string()) {
    throw FetchError("response for '" + term + "' lacks a definition");
  }
  FetchedDefinition out;
  out.headword = body.contains("headword") && body["headword"].is_string() ? body["headword"].get<std::string>() : term;
  out.definition = body["definition"].get<std::string>();
  return out;
}

FetchReport fetch_definitions(std::span<const std::string> terms, DefinitionFetcher& fetcher,
                              const std::filesystem::path& snapshot_out, double rate_limit) {
  FetchReport report;
  const auto interval = rate_limit > 0.0 ? std::chrono::duration<double>(1.0 / rate_limit)
                                         : std::chrono::duration<double>(0.0);
  auto next_slot = std::chrono::steady_clock::now();
  for (const auto& term : terms) {
    std::this_thread::sleep_until(next_slot);
    next_slot = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval);
    try {
      if (auto def = fetcher.fetch(term)) report.dict.insert(def->headword, std::move(def->definition));
    } catch (const FetchError& e) {
      ++report.warnings;
      report.messages.emplace_back(e.what());
    }
  }
  save_snapshot(report.dict, snapshot_out);
  return report;
}

}  // namespace termclass
