#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "termclass/eval.hpp"
#include "termclass/synth.hpp"

using namespace termclass;

TEST_SUITE("eval") {
  TEST_CASE("accuracy") {
    const std::vector<std::size_t> gold{0, 1, 2, 0};
    CHECK(accuracy(std::vector<std::size_t>{0, 1, 2, 1}, gold) == 0.75);
    CHECK(accuracy(gold, gold) == 1.0);
    CHECK(accuracy(std::vector<std::size_t>{1, 0, 0, 1}, gold) == 0.0);
    CHECK_THROWS(accuracy(std::vector<std::size_t>{}, std::vector<std::size_t>{}));
  }

  TEST_CASE("mean rank") {
    const std::vector<RankedList> ranked{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
    CHECK(mean_rank(ranked, std::vector<std::size_t>{0, 1, 3}) == 7.0 / 3.0);
    CHECK(mean_rank(ranked, std::vector<std::size_t>{0, 0, 0}) == 1.0);
    CHECK(mean_rank(ranked, std::vector<std::size_t>{5, 5, 5}) == 4.0);
    const std::vector<RankedList> too_long{{0, 1, 2, 3}};
    CHECK_THROWS(mean_rank(too_long, std::vector<std::size_t>{0}));
  }

  TEST_CASE("macro F1") {
    // class 0: P=1 R=1; class 1: P=0.5 R=0.5
    const std::vector<std::size_t> gold{0, 0, 1, 1, 2};
    const std::vector<std::size_t> pred{0, 0, 1, 2, 1};
    const auto r = macro_f1(pred, gold, 2 + 1);
    CHECK(r.per_class[0] == 1.0);
    CHECK(r.per_class[1] == doctest::Approx(0.5));
    CHECK(macro_f1(gold, gold, 3).macro == 1.0);
    // class 3 never predicted, never gold
    CHECK(macro_f1(gold, gold, 4).macro == 0.75);
    CHECK(macro_f1(std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0, 0}, 2).per_class[1] == 0.0);
  }

  TEST_CASE("metrics agree with counting oracles") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
      const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
      std::vector<std::size_t> gold(n);
      std::vector<RankedList> ranked(n);
      std::vector<std::size_t> top1(n);
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
      CHECK(accuracy(top1, gold) == static_cast<double>(o.correct) / static_cast<double>(n));
      const double mr = mean_rank(ranked, gold);
      CHECK(mr == static_cast<double>(o.rank_sum) / static_cast<double>(n));
      CHECK(mr >= 1.0);
      CHECK(mr <= 4.0);
      const auto f = macro_f1(top1, gold, k);
      CHECK(std::abs(f.macro - o.macro) <= 1e-12);
      const auto rep = evaluate(ranked, gold, k);
      CHECK(rep.accuracy == accuracy(top1, gold));
      std::size_t total = 0;
      for (const auto& row : rep.confusion) total += std::accumulate(row.begin(), row.end(), std::size_t{0});
      CHECK(total == n);
    }
  }

  TEST_CASE("stratified folds") {
    std::vector<std::size_t> gold(8, 0);
    auto folds = stratified_kfold(gold, 5, 1);
    std::vector<std::size_t> sizes;
    for (const auto& f : folds) sizes.push_back(f.size());
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{1, 1, 2, 2, 2});

    gold.assign(286, 0);
    sizes.clear();
    for (const auto& f : stratified_kfold(gold, 5, 1)) sizes.push_back(f.size());
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{57, 57, 57, 57, 58});

    gold.assign(5, 0);
    for (const auto& f : stratified_kfold(gold, 5, 1)) CHECK(f.size() == 1);

    CHECK_THROWS(stratified_kfold(gold, 1, 0));
    CHECK_THROWS(stratified_kfold(gold, 6, 0));
  }

  TEST_CASE("stratification on the task class distribution") {
    std::vector<std::size_t> gold;
    for (std::size_t c = 0; c < kTaskCounts.size(); ++c) gold.insert(gold.end(), kTaskCounts[c], c);
    for (std::uint64_t seed : {0u, 1u, 99u}) {
      const auto folds = stratified_kfold(gold, 5, seed);
      std::vector<std::size_t> all;
      for (const auto& f : folds) all.insert(all.end(), f.begin(), f.end());
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> expect(gold.size());
      std::iota(expect.begin(), expect.end(), std::size_t{0});
      CHECK(all == expect);
      for (std::size_t c = 0; c < kTaskCounts.size(); ++c) {
        std::vector<std::size_t> per;
        for (const auto& f : folds) per.push_back(std::count_if(f.begin(), f.end(), [&](auto i) { return gold[i] == c; }));
        CHECK(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()) <= 1);
      }
    }
    CHECK(stratified_kfold(gold, 5, 3) == stratified_kfold(gold, 5, 3));
  }

  TEST_CASE("fold averaging") {
    EvalReport a{1.0, 1.0, 1.0, {1.0, 1.0}, {{1, 0}, {0, 1}}};
    EvalReport b{0.5, 2.0, 0.0, {0.0, 0.0}, {{0, 1}, {1, 0}}};
    const std::vector<EvalReport> both{a, b};
    const auto avg = average_folds(both);
    CHECK(avg.accuracy == 0.75);
    CHECK(avg.mean_rank == 1.5);
    CHECK(avg.per_class_f1 == std::vector<double>{0.5, 0.5});
    CHECK(avg.confusion == std::vector<std::vector<std::size_t>>{{1, 1}, {1, 1}});
    const LabelSet labels({"x", "y"});
    CHECK(to_json(avg, labels)["accuracy"] == 0.75);
    CHECK(to_text(avg, labels).find("mean_rank: 1.5") != std::string::npos);
  }
}
