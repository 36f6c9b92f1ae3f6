#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "termclass/features.hpp"

namespace termclass {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Example {
  std::string term;
  std::string label;
};

struct Dataset {
  std::vector<Example> rows;

  std::vector<std::string> terms() const;
  /// Distinct labels in lexicographic order.
  LabelSet infer_labels() const;
  /// Label indices under `labels`; throws DataError for an unknown label.
  std::vector<std::size_t> label_indices(const LabelSet& labels) const;
};

/// CSV with header "term,label" and RFC 4180 quoting.
Dataset parse_dataset_csv(std::string_view content);
Dataset load_dataset(const std::filesystem::path& path);
std::string format_dataset_csv(const Dataset& data);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

/// RFC 4180 records; each record is a list of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view content);
std::string csv_escape(std::string_view field);

}  // namespace termclass
