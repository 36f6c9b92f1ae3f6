// Command-line front end: synthetic data, cross-validation, training,
// prediction, dictionary augmentation and OOV inspection.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "termclass/augment.hpp"
#include "termclass/dataset.hpp"
#include "termclass/io.hpp"
#include "termclass/pipeline.hpp"
#include "termclass/synth.hpp"
#include "termclass/text.hpp"

namespace {

using namespace termclass;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CommonOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string embeddings;
  std::string dataset;
  std::string snapshot;
  std::string strategy;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Pipeline config (JSON)");
  cmd->add_option("--preset", o.preset, "Ablation preset, e.g. BL or BL.HF.OOVm.D2.+");
  cmd->add_option("--seed", o.seed, "Fold-assignment seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--embeddings", o.embeddings, "word2vec text embeddings");
  cmd->add_option("--dataset", o.dataset, "term,label CSV");
  cmd->add_option("--snapshot", o.snapshot, "Definition snapshot (JSON)");
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PipelineConfig resolve_config(const CommonOptions& o) try {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : PipelineConfig::load(o.config);
  if (!o.preset.empty()) cfg.apply_preset(o.preset);
  if (o.seed) cfg.train.seed = *o.seed;
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (!o.embeddings.empty()) cfg.embedding_path = o.embeddings;
  if (!o.dataset.empty()) cfg.dataset_path = o.dataset;
  if (!o.snapshot.empty()) cfg.snapshot_path = o.snapshot;
  if (!o.strategy.empty()) cfg.oov.kind = OovStrategy::parse_kind(o.strategy);
  return cfg;
} catch (const std::exception& e) {
  throw UsageError(e.what());
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> out;
  const auto content = io::read_file(path);
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) nl = content.size();
    auto line = text::trim(std::string_view(content).substr(pos, nl - pos));
    if (!line.empty()) out.push_back(std::move(line));
    pos = nl + 1;
  }
  return out;
}

int cmd_synth(const SynthConfig& sc, const std::string& out_dir) {
  const auto out = synthesize(sc);
  const std::filesystem::path dir = out_dir.empty() ? "synth" : out_dir;
  save_embeddings(out.store, dir / "embeddings.txt");
  save_dataset(out.data, dir / "dataset.csv");
  std::cout << "wrote " << out.data.rows.size() << " rows and " << out.store.size() << " vectors to " << dir.string()
            << "\n";
  return 0;
}

int cmd_cv(const CommonOptions& o) {
  const auto cfg = resolve_config(o);
  const auto run = run_cv(cfg);
  write_cv_outputs(run, cfg);
  const auto& best = std::find_if(run.grid.rows.begin(), run.grid.rows.end(),
                                  [&](const GridRow& r) { return r.c == run.grid.best_c; })
                         ->cv;
  std::cout << "preset " << (cfg.preset.empty() ? "custom" : cfg.preset) << ": best C=" << run.grid.best_c
            << " accuracy=" << best.accuracy << " mean_rank=" << best.mean_rank << " macro_f1=" << best.macro_f1
            << "\n";
  if (cfg.augmentation) std::cout << "augmentation coverage " << run.coverage << "\n";
  std::cout << "reports in " << cfg.out_dir.string() << "\n";
  return 0;
}

int cmd_train(const CommonOptions& o, const std::string& model_path) {
  const auto cfg = resolve_config(o);
  const auto store = load_embeddings(cfg.embedding_path);
  const auto data = load_dataset(cfg.dataset_path);
  const auto bundle = run_train(cfg, store, data);
  const std::filesystem::path path = model_path.empty() ? cfg.out_dir / "model.txt" : std::filesystem::path(model_path);
  save_model(bundle, path);
  std::cout << "trained C=" << bundle.model.c << " on " << data.rows.size() << " rows; model written to "
            << path.string() << "\n";
  return 0;
}

int cmd_predict(const CommonOptions& o, const std::string& model_path, const std::string& terms_path) {
  const auto cfg = resolve_config(o);
  const auto store = load_embeddings(cfg.embedding_path);
  const auto bundle = load_model(model_path);
  std::optional<LabelSet> expected;
  if (!cfg.labels.empty()) {
    expected = LabelSet(cfg.labels);
  } else if (!cfg.dataset_path.empty()) {
    expected = load_dataset(cfg.dataset_path).infer_labels();
  }
  const auto predictions = run_predict(cfg, store, bundle, read_lines(terms_path), expected);
  const auto jsonl = format_predictions_jsonl(predictions);
  if (o.out.empty()) {
    std::cout << jsonl;
  } else {
    io::write_file_atomic(std::filesystem::path(o.out) / "predictions.jsonl", jsonl);
  }
  return 0;
}

int cmd_augment_fetch(const CommonOptions& o, const std::string& base_url) {
  auto cfg = resolve_config(o);
  if (!base_url.empty()) cfg.fetcher.base_url = base_url;
  if (cfg.snapshot_path.empty()) throw DataError("no snapshot path configured (--snapshot)");
  const auto data = load_dataset(cfg.dataset_path);
  HttpDefinitionFetcher fetcher(cfg.fetcher);
  const auto report = fetch_definitions(data.terms(), fetcher, cfg.snapshot_path, cfg.fetcher.rate_limit);
  for (const auto& m : report.messages) std::cerr << "warning: " << m << "\n";
  std::cout << "fetched " << report.dict.size() << " definitions; " << report.warnings << " warnings\n";
  return 0;
}

int cmd_augment_apply(const CommonOptions& o) {
  auto cfg = resolve_config(o);
  if (cfg.snapshot_path.empty()) throw DataError("no snapshot path configured (--snapshot)");
  const auto data = load_dataset(cfg.dataset_path);
  const Augmenter augmenter(load_snapshot(cfg.snapshot_path), cfg.fuzzy_threshold, cfg.oov.ngram_min,
                            cfg.oov.ngram_max);
  const auto result = augment_dataset(data.terms(), augmenter);
  std::string csv = "term,label,text\n";
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    csv += csv_escape(data.rows[i].term) + "," + csv_escape(data.rows[i].label) + "," +
           csv_escape(result.terms[i].text) + "\n";
  }
  io::write_file_atomic(cfg.out_dir / "augmented.csv", csv);
  std::cout << "coverage " << result.coverage << " (" << data.rows.size() << " terms)\n";
  return 0;
}

int cmd_inspect_oov(const CommonOptions& o) {
  const auto cfg = resolve_config(o);
  const auto store = load_embeddings(cfg.embedding_path);
  const auto data = load_dataset(cfg.dataset_path);
  const auto rows = inspect_oov(store, cfg.oov, data.terms());
  const auto report = format_oov_report(rows);
  if (o.out.empty()) {
    std::cout << report;
  } else {
    io::write_file_atomic(std::filesystem::path(o.out) / "oov.tsv", report);
  }
  std::cerr << "oov tokens: " << rows.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Financial term hypernym classifier"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string model_path;
  std::string terms_path;
  std::string base_url;
  SynthConfig synth;
  std::string synth_out;

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset and embedding store");
  synth_cmd->add_option("--classes", synth.classes, "Number of classes (2-17)");
  synth_cmd->add_option("--rows", synth.rows, "Number of rows");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--dim", synth.dim, "Embedding dimension");
  synth_cmd->add_option("--sigma", synth.sigma, "Token noise standard deviation");
  synth_cmd->add_option("--oov-rate", synth.oov_rate, "Probability of a misspelt token");
  synth_cmd->add_flag("--plant", synth.plant_substrings, "Plant the 'Inc.' substring in one class");
  synth_cmd->add_option("--out", synth_out, "Output directory");

  auto* cv_cmd = app.add_subcommand("cv", "Grid search and stratified cross-validation");
  add_common(cv_cmd, common);

  auto* train_cmd = app.add_subcommand("train", "Train on the full dataset and persist the model");
  add_common(train_cmd, common);
  train_cmd->add_option("--model", model_path, "Model output path (default OUT/model.txt)");

  auto* predict_cmd = app.add_subcommand("predict", "Rank labels for new terms");
  add_common(predict_cmd, common);
  predict_cmd->add_option("--model", model_path, "Trained model")->required();
  predict_cmd->add_option("--terms", terms_path, "Terms, one per line")->required();

  auto* fetch_cmd = app.add_subcommand("augment-fetch", "Fetch definitions into a snapshot file");
  add_common(fetch_cmd, common);
  fetch_cmd->add_option("--base-url", base_url, "Definition service base URL");

  auto* apply_cmd = app.add_subcommand("augment-apply", "Augment dataset terms from a snapshot");
  add_common(apply_cmd, common);

  auto* oov_cmd = app.add_subcommand("inspect-oov", "List out-of-vocabulary tokens and their substitutes");
  add_common(oov_cmd, common);
  oov_cmd->add_option("--strategy", common.strategy, "zero | levenshtein | ngram");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth, synth_out);
    if (cv_cmd->parsed()) return cmd_cv(common);
    if (train_cmd->parsed()) return cmd_train(common, model_path);
    if (predict_cmd->parsed()) return cmd_predict(common, model_path, terms_path);
    if (fetch_cmd->parsed()) return cmd_augment_fetch(common, base_url);
    if (apply_cmd->parsed()) return cmd_augment_apply(common);
    if (oov_cmd->parsed()) return cmd_inspect_oov(common);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
