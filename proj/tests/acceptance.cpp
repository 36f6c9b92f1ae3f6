// Acceptance gate: one [PASS]/[FAIL] line per criterion, non-zero exit on any failure.
// Usage: acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "termclass/eval.hpp"
#include "termclass/io.hpp"
#include "termclass/model.hpp"
#include "termclass/oov.hpp"
#include "termclass/pipeline.hpp"
#include "termclass/synth.hpp"
#include "termclass/text.hpp"

namespace fs = std::filesystem;
using namespace termclass;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

oracle::Rows rows_of(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  oracle::Rows r(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  }
  return r;
}

LabelSet numbered_labels(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("class" + std::to_string(i));
  return LabelSet(names);
}

std::u32string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                           std::u32string_view alphabet) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  std::u32string w(len(rng), U'a');
  for (auto& c : w) c = alphabet[ch(rng)];
  return w;
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto n = std::uniform_int_distribution<Eigen::Index>(1, 20)(rng);
    const auto d = std::uniform_int_distribution<Eigen::Index>(1, 10)(rng);
    const auto k = std::uniform_int_distribution<Eigen::Index>(2, 5)(rng);
    const double c = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 2.0)(rng));
    Matrix x = Matrix::NullaryExpr(n, d, [&] { return g(rng); });
    std::vector<std::size_t> y(static_cast<std::size_t>(n));
    for (auto& v : y) v = std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(k) - 1)(rng);
    Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(k, d, [&] { return 0.5 * g(rng); });
    Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(k, [&] { return 0.5 * g(rng); });

    ObjectiveGradient grad;
    objective(x, y, w, b, c, &grad);
    const auto fd = oracle::finite_difference(rows_of(x), y, rows_of(w), std::vector<double>(b.data(), b.data() + k), c);
    auto rel = [](double a, double f) { return std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1.0}); };
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index e = 0; e < d; ++e) worst = std::max(worst, rel(grad.weights(j, e), fd.w[j][e]));
      worst = std::max(worst, rel(grad.bias(j), fd.b[j]));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-5 && secs < 5.0, "max rel err " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome optimum_agreement() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index n = 20, d = 3, k = 3;
  Matrix x(n, d);
  std::vector<std::size_t> y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = static_cast<std::size_t>(i % k);
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = g(rng) + (j == static_cast<Eigen::Index>(y[i]) ? 1.0 : 0.0);
  }
  const double c = 1.0;
  const auto model = train(x, y, numbered_labels(k), c, TrainConfig{});
  const long double trained =
      oracle::loss(rows_of(x), y, rows_of(model.weights),
                   std::vector<double>(model.bias.data(), model.bias.data() + k), c);

  const double lipschitz = 0.5 * (x.squaredNorm() + static_cast<double>(n)) + 1.0 / c;
  const long double reference = oracle::gd_minimum(rows_of(x), y, k, c, 0.5 / lipschitz, 2'000'000);
  const double gap = static_cast<double>(std::abs(trained - reference));
  const double secs = seconds_since(t0);
  return {gap <= 1e-6 && secs < 10.0, "loss " + fmt(static_cast<double>(trained)) + " vs oracle " +
                                          fmt(static_cast<double>(reference)) + ", gap " + fmt(gap) + ", " +
                                          fmt(secs) + " s"};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(31);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
    std::vector<std::size_t> gold(n), top1(n);
    std::vector<RankedList> ranked(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
      RankedList perm(k);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      perm.resize(std::min<std::size_t>(k, 3));
      ranked[i] = perm;
      top1[i] = perm[0];
    }
    const auto o = oracle::count_metrics(ranked, gold, k);
    const double nd = static_cast<double>(n);
    const double acc = accuracy(top1, gold);
    const double mr = mean_rank(ranked, gold);
    const auto f1 = macro_f1(top1, gold, k);
    bool ok = acc == static_cast<double>(o.correct) / nd && mr == static_cast<double>(o.rank_sum) / nd;
    ok = ok && mr >= 1.0 && mr <= 4.0 && std::abs(f1.macro - o.macro) <= 1e-12;
    for (std::size_t c = 0; c < k; ++c) ok = ok && std::abs(f1.per_class[c] - o.f1[c]) <= 1e-12;
    if (!ok) ++mismatches;
  }
  const std::vector<RankedList> example{{0, 1, 2}, {1, 0, 2}, {1, 2, 3}};
  const double seven_thirds = mean_rank(example, std::vector<std::size_t>{0, 0, 0});
  const bool ok = mismatches == 0 && seven_thirds == 7.0 / 3.0;
  return {ok, std::to_string(mismatches) + " mismatching sets of 100; (1+2+4)/3 = " + fmt(seven_thirds)};
}

Outcome edit_distance_oracle() {
  std::mt19937_64 rng(4);
  const std::u32string alphabet = U"abcxyzéüßλωжя€";
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_word(rng, 0, 12, alphabet);
    const auto b = random_word(rng, 0, 12, alphabet);
    const auto expect = oracle::levenshtein(a, b);
    if (levenshtein(a, b) != expect || levenshtein(text::encode_utf8(a), text::encode_utf8(b)) != expect) {
      ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 1000 pairs"};
}

Outcome oov_identity_and_optimality() {
  std::mt19937_64 rng(5);
  const std::u32string alphabet = U"abcdeorstéж";
  std::size_t identity_failures = 0;
  std::size_t argmin_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t size = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
    std::set<std::u32string> uniq;
    while (uniq.size() < size) uniq.insert(random_word(rng, 1, 8, alphabet));
    std::vector<std::u32string> words(uniq.begin(), uniq.end());
    std::shuffle(words.begin(), words.end(), rng);
    EmbeddingStore store(1);
    std::vector<std::string> keys;
    for (const auto& w : words) {
      keys.push_back(text::encode_utf8(w));
      store.add(keys.back(), std::vector<double>{static_cast<double>(keys.size())});
    }

    const OovResolver lev(store, OovStrategy{OovKind::kLevenshteinNearest});
    const OovResolver ngram(store, OovStrategy{OovKind::kNgramSimilarity});
    const OovResolver zero(store, OovStrategy{});
    for (std::size_t i = 0; i < keys.size(); i += 7) {
      for (const OovResolver* r : {&lev, &ngram, &zero}) {
        if (r->resolve(keys[i]) != i) ++identity_failures;
      }
      if (resolve_levenshtein(keys[i], store) != keys[i]) ++identity_failures;
    }

    for (int q = 0; q < 5; ++q) {
      const auto query = random_word(rng, 1, 10, alphabet);
      if (uniq.contains(query)) continue;
      if (resolve_levenshtein(text::encode_utf8(query), store) != keys[oracle::nearest(query, words)]) {
        ++argmin_failures;
      }
    }
  }

  EmbeddingStore fixture(1);
  fixture.add("corporate", std::vector<double>{1});
  fixture.add("bond", std::vector<double>{2});
  fixture.add("option", std::vector<double>{3});
  const auto fixture_case = resolve_levenshtein("asiacorporate", fixture);

  const bool ok = identity_failures == 0 && argmin_failures == 0 && fixture_case == "corporate";
  return {ok, std::to_string(identity_failures) + " identity failures, " + std::to_string(argmin_failures) +
                  " argmin failures; asiacorporate -> " + fixture_case};
}

Outcome stratification() {
  std::vector<std::size_t> gold;
  for (std::size_t c = 0; c < kTaskCounts.size(); ++c) gold.insert(gold.end(), kTaskCounts[c], c);
  if (gold.size() != 1050) return {false, "task counts sum to " + std::to_string(gold.size())};
  bool ok = true;
  std::size_t worst_spread = 0;
  for (std::uint64_t seed : {0u, 1u, 42u}) {
    const auto folds = stratified_kfold(gold, 5, seed);
    std::vector<std::size_t> all;
    for (const auto& f : folds) all.insert(all.end(), f.begin(), f.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(gold.size());
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    ok = ok && folds.size() == 5 && all == expect;
    for (std::size_t c = 0; c < kTaskCounts.size(); ++c) {
      std::vector<std::size_t> per;
      for (const auto& f : folds) {
        per.push_back(static_cast<std::size_t>(std::count_if(f.begin(), f.end(), [&](auto i) { return gold[i] == c; })));
      }
      worst_spread = std::max(worst_spread, *std::max_element(per.begin(), per.end()) -
                                                *std::min_element(per.begin(), per.end()));
    }
  }
  ok = ok && worst_spread <= 1;
  return {ok, "partition " + std::string(ok ? "ok" : "broken") + ", max per-class spread " +
                  std::to_string(worst_spread)};
}

Outcome scaler() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  std::size_t outside = 0;
  std::size_t constant_bad = 0;
  std::size_t cells = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = std::uniform_int_distribution<Eigen::Index>(1, 60)(rng);
    const auto d = std::uniform_int_distribution<Eigen::Index>(1, 12)(rng);
    const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-6.0, 6.0)(rng));
    Matrix m(n, d);
    std::vector<bool> constant(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
      constant[j] = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
      const double fixed = scale * g(rng);
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = constant[j] ? fixed : scale * g(rng);
    }
    const auto t = MinMaxScaler::fit(m).transform(m);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        ++cells;
        if (!(t(i, j) >= -1.0 && t(i, j) <= 1.0)) ++outside;
        if (constant[j] && t(i, j) != 0.0) ++constant_bad;
      }
    }
  }
  return {outside == 0 && constant_bad == 0, std::to_string(outside) + " of " + std::to_string(cells) +
                                                 " cells outside [-1,1], " + std::to_string(constant_bad) +
                                                 " non-zero constant cells"};
}

struct EndToEnd {
  fs::path work;
  fs::path first_run;
  PipelineConfig cfg;
};

const EvalReport& best_cv(const CvRun& run) {
  for (const auto& row : run.grid.rows) {
    if (row.c == run.grid.best_c) return row.cv;
  }
  throw std::logic_error("best C missing");
}

PipelineConfig synthetic_config(const fs::path& data_dir, std::string_view preset, const fs::path& out) {
  PipelineConfig cfg;
  cfg.apply_preset(preset);
  cfg.embedding_path = data_dir / "embeddings.txt";
  cfg.dataset_path = data_dir / "dataset.csv";
  cfg.out_dir = out;
  return cfg;
}

Outcome end_to_end(EndToEnd& state) {
  const auto t0 = Clock::now();
  const fs::path data_dir = state.work / "synth";
  SynthConfig sc;
  sc.classes = 17;
  sc.rows = 1050;
  sc.sigma = 0.1;
  sc.seed = 42;
  const auto synth = synthesize(sc);
  save_embeddings(synth.store, data_dir / "embeddings.txt");
  save_dataset(synth.data, data_dir / "dataset.csv");

  state.first_run = state.work / "run1";
  state.cfg = synthetic_config(data_dir, "BL.HF.OOVm.D²", state.first_run);
  const auto run = run_cv(state.cfg);
  write_cv_outputs(run, state.cfg);
  const double secs = seconds_since(t0);
  const auto& cv = best_cv(run);
  const bool ok = cv.accuracy >= 0.95 && cv.mean_rank <= 1.15 && secs < 60.0;
  return {ok, "C=" + fmt(run.grid.best_c) + " accuracy " + fmt(cv.accuracy) + ", mean rank " + fmt(cv.mean_rank) +
                  ", " + fmt(secs) + " s"};
}

Outcome ablation_direction() {
  std::ostringstream detail;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig sc;
    sc.seed = seed;
    sc.plant_substrings = true;
    const auto synth = synthesize(sc);
    double acc[2] = {0.0, 0.0};
    int i = 0;
    for (std::string_view preset : {"BL", "BL.HF"}) {
      PipelineConfig cfg;
      cfg.apply_preset(preset);
      acc[i++] = best_cv(run_cv(cfg, synth.store, synth.data)).accuracy;
    }
    ok = ok && acc[1] >= acc[0];
    detail << (seed > 1 ? "; " : "") << "seed " << seed << ": " << fmt(acc[0]) << " -> " << fmt(acc[1]);
  }
  return {ok, detail.str()};
}

bool same_reports(const fs::path& a, const fs::path& b, std::string& why) {
  for (const char* name : {"report.json", "report.txt"}) {
    if (io::read_file(a / name) != io::read_file(b / name)) {
      why = std::string(name) + " differs";
      return false;
    }
  }
  why = "report.json and report.txt identical";
  return true;
}

Outcome augmentation_equivalence(const EndToEnd& state) {
  const fs::path snapshot = state.work / "empty_snapshot.json";
  io::write_file_atomic(snapshot, "{}\n");
  auto cfg = synthetic_config(state.work / "synth", "BL.HF.OOVm.D2.+", state.work / "run_augmented");
  cfg.snapshot_path = snapshot;
  const auto run = run_cv(cfg);
  write_cv_outputs(run, cfg);
  std::string why;
  const bool ok = same_reports(state.first_run, cfg.out_dir, why) && run.coverage == 0.0;
  return {ok, why + ", coverage " + fmt(run.coverage)};
}

Outcome determinism(const EndToEnd& state) {
  auto cfg = state.cfg;
  cfg.out_dir = state.work / "run2";
  const auto run = run_cv(cfg);
  write_cv_outputs(run, cfg);
  std::string why;
  const bool ok = same_reports(state.first_run, cfg.out_dir, why);
  return {ok, why};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "termclass-acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  EndToEnd state{work, {}, {}};
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << name << ": " << o.detail << std::endl;
  };

  report(1, "gradient correctness", gradient_check);
  report(2, "convex optimum agreement", optimum_agreement);
  report(3, "metric oracles", metric_oracles);
  report(4, "edit distance oracle", edit_distance_oracle);
  report(5, "OOV identity and optimality", oov_identity_and_optimality);
  report(6, "stratification", stratification);
  report(7, "scaler", scaler);
  bool have_first_run = false;
  report(8, "end-to-end synthetic", [&] {
    auto o = end_to_end(state);
    have_first_run = fs::exists(state.first_run / "report.json");
    return o;
  });
  report(9, "ablation direction on planted data", ablation_direction);
  report(10, "augmentation equivalence", [&] {
    return have_first_run ? augmentation_equivalence(state) : Outcome{false, "criterion 8 produced no report"};
  });
  report(11, "determinism", [&] {
    return have_first_run ? determinism(state) : Outcome{false, "criterion 8 produced no report"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
