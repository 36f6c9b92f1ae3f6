#include "termclass/pipeline.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "termclass/io.hpp"
#include "termclass/text.hpp"

namespace termclass {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "embedding_path", "dataset_path", "preset",    "oov_strategy", "ngram_min",      "ngram_max",
      "handcrafted",    "indicators",   "case_sensitive", "cosine_features", "edit_features", "augmentation",
      "snapshot_path",  "fuzzy_threshold", "c_grid", "folds",        "seed",           "max_iter",
      "grad_tol",       "labels",       "out_dir",   "fetcher"};
  return keys;
}

template <typename T>
T get_as(const Json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
  }
}

OrderedJson metrics_json(const EvalReport& r) {
  OrderedJson j;
  j["accuracy"] = r.accuracy;
  j["mean_rank"] = r.mean_rank;
  j["macro_f1"] = r.macro_f1;
  return j;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all{
      {"BL", OovKind::kZeroVector, false, false, false, false},
      {"BL.HF", OovKind::kZeroVector, true, false, false, false},
      {"BL.HF.OOVl", OovKind::kLevenshteinNearest, true, false, false, false},
      {"BL.HF.OOVl.D", OovKind::kLevenshteinNearest, true, true, false, false},
      {"BL.HF.OOVl.D2", OovKind::kLevenshteinNearest, true, true, true, false},
      {"BL.HF.OOVm.D2", OovKind::kNgramSimilarity, true, true, true, false},
      {"BL.HF.OOVm.D2.+", OovKind::kNgramSimilarity, true, true, true, true},
  };
  return all;
}

const Preset& find_preset(std::string_view name) {
  std::string canonical(name);
  if (auto pos = canonical.find("D²"); pos != std::string::npos) canonical.replace(pos, 3, "D2");
  for (const auto& p : presets()) {
    if (p.name == canonical) return p;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

void PipelineConfig::apply_preset(std::string_view name) {
  const auto& p = find_preset(name);
  preset = std::string(p.name);
  oov.kind = p.oov;
  layout = FeatureLayout{p.handcrafted, p.cosine, p.edit};
  augmentation = p.augmentation;
}

PipelineConfig PipelineConfig::from_json(const Json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  PipelineConfig cfg;
  if (doc.contains("preset")) cfg.apply_preset(get_as<std::string>(doc, "preset"));
  if (doc.contains("embedding_path")) cfg.embedding_path = get_as<std::string>(doc, "embedding_path");
  if (doc.contains("dataset_path")) cfg.dataset_path = get_as<std::string>(doc, "dataset_path");
  if (doc.contains("oov_strategy")) cfg.oov.kind = OovStrategy::parse_kind(get_as<std::string>(doc, "oov_strategy"));
  if (doc.contains("ngram_min")) cfg.oov.ngram_min = get_as<std::size_t>(doc, "ngram_min");
  if (doc.contains("ngram_max")) cfg.oov.ngram_max = get_as<std::size_t>(doc, "ngram_max");
  if (doc.contains("handcrafted")) cfg.layout.handcrafted = get_as<bool>(doc, "handcrafted");
  if (doc.contains("case_sensitive")) cfg.handcrafted.case_sensitive = get_as<bool>(doc, "case_sensitive");
  if (doc.contains("indicators")) {
    cfg.handcrafted = HandcraftedConfig::with_indicators(get_as<std::vector<std::string>>(doc, "indicators"),
                                                         cfg.handcrafted.case_sensitive);
  }
  if (doc.contains("cosine_features")) cfg.layout.cosine = get_as<bool>(doc, "cosine_features");
  if (doc.contains("edit_features")) cfg.layout.edit = get_as<bool>(doc, "edit_features");
  if (doc.contains("augmentation")) cfg.augmentation = get_as<bool>(doc, "augmentation");
  if (doc.contains("snapshot_path")) cfg.snapshot_path = get_as<std::string>(doc, "snapshot_path");
  if (doc.contains("fuzzy_threshold")) cfg.fuzzy_threshold = get_as<double>(doc, "fuzzy_threshold");
  if (doc.contains("c_grid")) cfg.train.c_grid = get_as<std::vector<double>>(doc, "c_grid");
  if (doc.contains("folds")) cfg.train.folds = get_as<std::size_t>(doc, "folds");
  if (doc.contains("seed")) cfg.train.seed = get_as<std::uint64_t>(doc, "seed");
  if (doc.contains("max_iter")) cfg.train.max_iter = get_as<std::size_t>(doc, "max_iter");
  if (doc.contains("grad_tol")) cfg.train.grad_tol = get_as<double>(doc, "grad_tol");
  if (doc.contains("labels")) cfg.labels = get_as<std::vector<std::string>>(doc, "labels");
  if (doc.contains("out_dir")) cfg.out_dir = get_as<std::string>(doc, "out_dir");
  if (doc.contains("fetcher")) {
    const auto& f = doc.at("fetcher");
    if (!f.is_object()) throw std::invalid_argument("config key 'fetcher' must be an object");
    for (const auto& [key, value] : f.items()) {
      if (key != "base_url" && key != "path" && key != "timeout_seconds" && key != "rate_limit" &&
          key != "user_agent") {
        throw std::invalid_argument("unknown fetcher key '" + key + "'");
      }
    }
    if (f.contains("base_url")) cfg.fetcher.base_url = get_as<std::string>(f, "base_url");
    if (f.contains("path")) cfg.fetcher.path = get_as<std::string>(f, "path");
    if (f.contains("timeout_seconds")) cfg.fetcher.timeout_seconds = get_as<double>(f, "timeout_seconds");
    if (f.contains("rate_limit")) cfg.fetcher.rate_limit = get_as<double>(f, "rate_limit");
    if (f.contains("user_agent")) cfg.fetcher.user_agent = get_as<std::string>(f, "user_agent");
  }
  cfg.oov.validate();
  cfg.train.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(io::read_file(path));
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

OrderedJson PipelineConfig::to_json() const {
  OrderedJson j;
  j["preset"] = preset;
  j["embedding_path"] = embedding_path.string();
  j["dataset_path"] = dataset_path.string();
  j["oov_strategy"] = std::string(OovStrategy::kind_name(oov.kind));
  j["ngram_min"] = oov.ngram_min;
  j["ngram_max"] = oov.ngram_max;
  j["handcrafted"] = layout.handcrafted;
  j["indicators"] = std::vector<std::string>(handcrafted.indicators.begin(), handcrafted.indicators.end());
  j["case_sensitive"] = handcrafted.case_sensitive;
  j["cosine_features"] = layout.cosine;
  j["edit_features"] = layout.edit;
  j["augmentation"] = augmentation;
  j["snapshot_path"] = snapshot_path.string();
  j["fuzzy_threshold"] = fuzzy_threshold;
  j["c_grid"] = train.c_grid;
  j["folds"] = train.folds;
  j["seed"] = train.seed;
  j["max_iter"] = train.max_iter;
  j["grad_tol"] = train.grad_tol;
  j["labels"] = labels;
  j["out_dir"] = out_dir.string();
  return j;
}

PreparedInputs prepare_inputs(const PipelineConfig& cfg, const std::vector<std::string>& terms) {
  PreparedInputs out;
  out.inputs.reserve(terms.size());
  if (!cfg.augmentation) {
    for (const auto& t : terms) out.inputs.push_back({t, t});
    return out;
  }
  if (cfg.snapshot_path.empty()) throw DataError("augmentation is enabled but no snapshot_path is configured");
  const Augmenter augmenter(load_snapshot(cfg.snapshot_path), cfg.fuzzy_threshold, cfg.oov.ngram_min,
                            cfg.oov.ngram_max);
  auto result = augment_dataset(terms, augmenter);
  for (auto& a : result.terms) out.inputs.push_back({std::move(a.raw), std::move(a.text)});
  out.coverage = result.coverage;
  return out;
}

namespace {

LabelSet resolve_labels(const PipelineConfig& cfg, const Dataset& data) {
  return cfg.labels.empty() ? data.infer_labels() : LabelSet(cfg.labels);
}

}  // namespace

CvRun run_cv(const PipelineConfig& cfg, const EmbeddingStore& store, const Dataset& data) {
  CvRun run;
  run.labels = resolve_labels(cfg, data);
  const auto y = data.label_indices(run.labels);
  const auto prepared = prepare_inputs(cfg, data.terms());
  run.coverage = prepared.coverage;

  const OovResolver resolver(store, cfg.oov);
  const FeatureExtractor extractor(store, resolver, run.labels, cfg.layout, cfg.handcrafted);
  const Matrix raw = extractor.matrix(prepared.inputs);
  run.rows = static_cast<std::size_t>(raw.rows());
  run.feature_width = extractor.width();
  run.grid = grid_search(raw, y, run.labels, cfg.train);
  return run;
}

CvRun run_cv(const PipelineConfig& cfg) {
  const auto store = load_embeddings(cfg.embedding_path);
  const auto data = load_dataset(cfg.dataset_path);
  return run_cv(cfg, store, data);
}

CvReport format_cv_report(const CvRun& run, const PipelineConfig& cfg) {
  const GridRow* best = nullptr;
  for (const auto& row : run.grid.rows) {
    if (row.c == run.grid.best_c) best = &row;
  }
  if (best == nullptr) throw std::logic_error("best C missing from grid report");

  OrderedJson j;
  j["best_c"] = run.grid.best_c;
  j["rows"] = run.rows;
  j["feature_width"] = run.feature_width;
  j["folds"] = cfg.train.folds;
  j["seed"] = cfg.train.seed;
  j["cv"] = to_json(best->cv, run.labels);
  auto grid = OrderedJson::array();
  for (const auto& row : run.grid.rows) {
    OrderedJson g = metrics_json(row.cv);
    g["c"] = row.c;
    auto folds = OrderedJson::array();
    for (const auto& f : row.folds) folds.push_back(metrics_json(f));
    g["folds"] = folds;
    grid.push_back(g);
  }
  j["grid"] = grid;

  std::ostringstream txt;
  txt << "best_c: " << io::format_double(run.grid.best_c) << "\n";
  txt << "rows: " << run.rows << "\n";
  txt << "feature_width: " << run.feature_width << "\n";
  txt << "folds: " << cfg.train.folds << "\n";
  txt << "seed: " << cfg.train.seed << "\n";
  txt << to_text(best->cv, run.labels);
  for (const auto& row : run.grid.rows) {
    txt << "grid[" << io::format_double(row.c) << "]: mean_rank=" << io::format_double(row.cv.mean_rank)
        << " accuracy=" << io::format_double(row.cv.accuracy) << " macro_f1=" << io::format_double(row.cv.macro_f1)
        << "\n";
    for (std::size_t f = 0; f < row.folds.size(); ++f) {
      txt << "grid[" << io::format_double(row.c) << "].fold[" << f
          << "]: mean_rank=" << io::format_double(row.folds[f].mean_rank)
          << " accuracy=" << io::format_double(row.folds[f].accuracy)
          << " macro_f1=" << io::format_double(row.folds[f].macro_f1) << "\n";
    }
  }
  return {j.dump(2) + "\n", txt.str()};
}

void write_cv_outputs(const CvRun& run, const PipelineConfig& cfg) {
  const auto report = format_cv_report(run, cfg);
  io::write_file_atomic(cfg.out_dir / "report.json", report.json);
  io::write_file_atomic(cfg.out_dir / "report.txt", report.text);
  OrderedJson meta;
  meta["config"] = cfg.to_json();
  meta["augmentation_coverage"] = run.coverage;
  meta["labels"] = run.labels.labels();
  io::write_file_atomic(cfg.out_dir / "run.json", meta.dump(2) + "\n");
}

ModelBundle run_train(const PipelineConfig& cfg, const EmbeddingStore& store, const Dataset& data) {
  const auto labels = resolve_labels(cfg, data);
  const auto y = data.label_indices(labels);
  const auto prepared = prepare_inputs(cfg, data.terms());
  const OovResolver resolver(store, cfg.oov);
  const FeatureExtractor extractor(store, resolver, labels, cfg.layout, cfg.handcrafted);
  auto grid = grid_search(extractor.matrix(prepared.inputs), y, labels, cfg.train);
  return ModelBundle{std::move(grid.model), std::move(grid.scaler), cfg.layout, store.dim()};
}

std::vector<Prediction> run_predict(const PipelineConfig& cfg, const EmbeddingStore& store, const ModelBundle& bundle,
                                    const std::vector<std::string>& terms,
                                    const std::optional<LabelSet>& expected_labels) {
  const auto& labels = bundle.model.labels;
  if (expected_labels && !(*expected_labels == labels)) {
    throw DataError("model was trained with a different label set");
  }
  if (bundle.embedding_dim != store.dim()) {
    throw DataError("model expects " + std::to_string(bundle.embedding_dim) + "-d embeddings, store has " +
                    std::to_string(store.dim()));
  }
  const OovResolver resolver(store, cfg.oov);
  const FeatureExtractor extractor(store, resolver, labels, bundle.layout, cfg.handcrafted);
  if (extractor.width() != bundle.model.dim()) throw DataError("feature width does not match the model");

  const auto prepared = prepare_inputs(cfg, terms);
  std::vector<Prediction> out;
  out.reserve(terms.size());
  for (const auto& input : prepared.inputs) {
    Eigen::RowVectorXd row = extractor.row(input);
    bundle.scaler.transform_in_place(row);
    const Eigen::VectorXd p = predict_proba(bundle.model, row);
    const auto ranked = rank_labels(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
    Prediction pred;
    pred.term = input.raw;
    for (auto k : ranked) {
      pred.top.push_back(labels[k]);
      pred.probs.push_back(p[static_cast<Eigen::Index>(k)]);
    }
    out.push_back(std::move(pred));
  }
  return out;
}

std::string format_predictions_jsonl(const std::vector<Prediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    OrderedJson j;
    j["term"] = p.term;
    j["top3"] = p.top;
    j["probs"] = p.probs;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<OovRow> inspect_oov(const EmbeddingStore& store, const OovStrategy& strategy,
                                const std::vector<std::string>& terms) {
  std::set<std::string> oov_tokens;
  for (const auto& t : terms) {
    for (const auto& tok : text::split_whitespace(t)) {
      if (!store.find(tok)) oov_tokens.insert(tok);
    }
  }
  const OovResolver resolver(store, strategy);
  std::vector<OovRow> rows;
  for (const auto& tok : oov_tokens) {
    OovRow row{tok, std::nullopt};
    if (auto id = resolver.resolve(tok)) row.substitute = store.vocab()[*id];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_oov_report(const std::vector<OovRow>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.token + "\t" + (r.substitute ? *r.substitute : std::string("ZERO")) + "\n";
  return out;
}

}  // namespace termclass
