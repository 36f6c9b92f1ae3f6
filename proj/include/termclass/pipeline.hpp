#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "termclass/augment.hpp"
#include "termclass/dataset.hpp"
#include "termclass/embeddings.hpp"
#include "termclass/features.hpp"
#include "termclass/model.hpp"
#include "termclass/oov.hpp"

namespace termclass {

/// One rung of the ablation ladder.
struct Preset {
  std::string_view name;
  OovKind oov;
  bool handcrafted;
  bool cosine;
  bool edit;
  bool augmentation;
};

/// BL, BL.HF, BL.HF.OOVl, BL.HF.OOVl.D, BL.HF.OOVl.D2, BL.HF.OOVm.D2, BL.HF.OOVm.D2.+
const std::vector<Preset>& presets();
/// Accepts "D²" as a spelling of "D2". Throws std::invalid_argument for unknown names.
const Preset& find_preset(std::string_view name);

struct PipelineConfig {
  std::filesystem::path embedding_path;
  std::filesystem::path dataset_path;
  std::string preset;
  OovStrategy oov;
  FeatureLayout layout;
  HandcraftedConfig handcrafted;
  bool augmentation = false;
  std::filesystem::path snapshot_path;
  double fuzzy_threshold = kDefaultFuzzyThreshold;
  TrainConfig train;
  std::vector<std::string> labels;  // empty: infer from the dataset
  std::filesystem::path out_dir = "out";
  FetcherConfig fetcher;

  void apply_preset(std::string_view name);

  /// Unknown keys are rejected. A "preset" key is applied before the other keys.
  static PipelineConfig from_json(const nlohmann::json& doc);
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
};

/// Terms after optional augmentation, ready for feature extraction.
struct PreparedInputs {
  std::vector<FeatureInput> inputs;
  double coverage = 0.0;
};

PreparedInputs prepare_inputs(const PipelineConfig& cfg, const std::vector<std::string>& terms);

struct CvRun {
  GridSearchResult grid;
  LabelSet labels;
  std::size_t rows = 0;
  std::size_t feature_width = 0;
  double coverage = 0.0;
};

CvRun run_cv(const PipelineConfig& cfg, const EmbeddingStore& store, const Dataset& data);
CvRun run_cv(const PipelineConfig& cfg);

struct CvReport {
  std::string json;
  std::string text;
};

/// Metrics only; identical inputs and feature rows produce identical bytes.
CvReport format_cv_report(const CvRun& run, const PipelineConfig& cfg);

/// Writes report.json, report.txt and run.json under cfg.out_dir.
void write_cv_outputs(const CvRun& run, const PipelineConfig& cfg);

ModelBundle run_train(const PipelineConfig& cfg, const EmbeddingStore& store, const Dataset& data);

struct Prediction {
  std::string term;
  std::vector<std::string> top;
  std::vector<double> probs;
};

/// Throws DataError when the bundle disagrees with the configured labels or
/// embedding dimension.
std::vector<Prediction> run_predict(const PipelineConfig& cfg, const EmbeddingStore& store, const ModelBundle& bundle,
                                    const std::vector<std::string>& terms,
                                    const std::optional<LabelSet>& expected_labels);

std::string format_predictions_jsonl(const std::vector<Prediction>& predictions);

struct OovRow {
  std::string token;
  std::optional<std::string> substitute;  // nullopt: zero vector
};

/// Distinct out-of-vocabulary tokens across the terms, sorted, with their resolution.
std::vector<OovRow> inspect_oov(const EmbeddingStore& store, const OovStrategy& strategy,
                                const std::vector<std::string>& terms);

/// "token<TAB>substitute" lines, "ZERO" for the zero vector.
std::string format_oov_report(const std::vector<OovRow>& rows);

}  // namespace termclass
