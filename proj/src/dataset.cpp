#include "termclass/dataset.hpp"

#include <set>

#include "termclass/io.hpp"
#include "termclass/text.hpp"

namespace termclass {

std::vector<std::vector<std::string>> parse_csv(std::string_view content) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_record = [&] {
    if (field_started || !record.empty()) {
      record.push_back(std::move(field));
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw DataError("line " + std::to_string(line) + ": stray quote inside field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field");
  end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Dataset parse_dataset_csv(std::string_view content) {
  auto records = parse_csv(content);
  if (records.empty()) throw DataError("dataset is empty (missing header)");
  if (records[0].size() != 2 || text::trim(records[0][0]) != "term" || text::trim(records[0][1]) != "label") {
    throw DataError("dataset header must be 'term,label'");
  }
  Dataset data;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != 2) throw DataError("record " + std::to_string(r + 1) + ": expected 2 fields");
    if (text::trim(rec[0]).empty()) throw DataError("record " + std::to_string(r + 1) + ": empty term");
    data.rows.push_back({rec[0], rec[1]});
  }
  if (data.rows.empty()) throw DataError("dataset has no rows");
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  try {
    return parse_dataset_csv(io::read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_dataset_csv(const Dataset& data) {
  std::string out = "term,label\n";
  for (const auto& row : data.rows) out += csv_escape(row.term) + "," + csv_escape(row.label) + "\n";
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_dataset_csv(data));
}

std::vector<std::string> Dataset::terms() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.term);
  return out;
}

LabelSet Dataset::infer_labels() const {
  std::set<std::string> distinct;
  for (const auto& r : rows) distinct.insert(r.label);
  if (distinct.size() < 2) throw DataError("dataset needs at least two distinct labels");
  return LabelSet(std::vector<std::string>(distinct.begin(), distinct.end()));
}

std::vector<std::size_t> Dataset::label_indices(const LabelSet& labels) const {
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    auto idx = labels.index_of(r.label);
    if (!idx) throw DataError("label '" + r.label + "' is not in the configured label set");
    out.push_back(*idx);
  }
  return out;
}

}  // namespace termclass
