#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kupu/diachrone.hpp"

using namespace kupu;
using namespace kupu::diachrone;

namespace {

embed::TrainConfig drift_config(uint64_t seed) {
    embed::TrainConfig cfg;
    cfg.dim = 32;
    cfg.window = 4;
    cfg.min_count = 1;
    cfg.epochs = 4;
    cfg.arch = embed::Arch::sgns;
    cfg.seed = seed;
    cfg.subsample = 0.0;
    return cfg;
}

// One period of the planted-drift corpus: the source word co-occurs with
// target A in a fraction `share_a` of its sentences and with target B in
// the rest; both targets also appear in their own background sentences so
// they stay in vocabulary everywhere.
std::vector<std::vector<std::string>> drift_period(double share_a,
                                                   int sentences,
                                                   uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<std::string>> docs;
    int with_a = static_cast<int>(std::lround(share_a * sentences));
    for (int s = 0; s < sentences; ++s) {
        std::string target = s < with_a ? "ta" : "tb";
        std::vector<std::string> sent = {"src", target};
        for (int w = 0; w < 6; ++w)
            sent.push_back("f" + std::to_string(rng.uniform(30)));
        docs.push_back(sent);
        // background sentences keep both targets and filler in vocab
        docs.push_back({"ta", "bg" + std::to_string(rng.uniform(10))});
        docs.push_back({"tb", "bg" + std::to_string(rng.uniform(10))});
    }
    rng.shuffle(docs);
    return docs;
}

PeriodPartition planted_partition(int periods, int sentences, uint64_t seed) {
    PeriodPartition partition;
    partition.periods.resize(periods);
    for (int p = 0; p < periods; ++p) {
        double share_a = 1.0 - static_cast<double>(p) / (periods - 1);
        auto docs = drift_period(share_a, sentences, seed * 1000 + p);
        auto& period = partition.periods[p];
        period.start_ts = p * 1000;
        period.end_ts = p * 1000 + 999;
        period.docs = std::move(docs);
        for (const auto& d : period.docs)
            period.words += static_cast<int64_t>(d.size());
    }
    return partition;
}

PeriodPartition stationary_partition(int periods, int sentences, uint64_t seed) {
    PeriodPartition partition;
    partition.periods.resize(periods);
    for (int p = 0; p < periods; ++p) {
        auto docs = drift_period(0.5, sentences, seed * 500 + p);
        auto& period = partition.periods[p];
        period.start_ts = p * 1000;
        period.end_ts = p * 1000 + 999;
        period.docs = std::move(docs);
        for (const auto& d : period.docs)
            period.words += static_cast<int64_t>(d.size());
    }
    return partition;
}

TimedDoc timed(int64_t ts, int words) {
    TimedDoc d;
    d.created_utc = ts;
    for (int i = 0; i < words; ++i) d.tokens.push_back("w");
    return d;
}

}  // namespace

TEST_SUITE_BEGIN("diachrone");

TEST_CASE("partition assigns one equal doc per period") {
    std::vector<TimedDoc> docs;
    for (int i = 0; i < 4; ++i) docs.push_back(timed(100 + i, 100));
    auto partition = partition_equal_words(docs, 4);
    REQUIRE(partition.periods.size() == 4);
    for (const auto& p : partition.periods) {
        CHECK(p.words == 100);
        CHECK(p.docs.size() == 1);
    }
}

TEST_CASE("greedy cut balances word budgets (hand-traced case)") {
    // ten 1-word docs then one 10-word doc, k=2 -> budgets 10/10
    std::vector<TimedDoc> docs;
    for (int i = 0; i < 10; ++i) docs.push_back(timed(i, 1));
    docs.push_back(timed(100, 10));
    auto partition = partition_equal_words(docs, 2);
    REQUIRE(partition.periods.size() == 2);
    CHECK(partition.periods[0].words == 10);
    CHECK(partition.periods[1].words == 10);
}

TEST_CASE("partition is chronological and covers every document") {
    Rng rng(7);
    std::vector<TimedDoc> docs;
    for (int i = 0; i < 200; ++i)
        docs.push_back(timed(static_cast<int64_t>(rng.uniform(100000)),
                             1 + static_cast<int>(rng.uniform(50))));
    auto partition = partition_equal_words(docs, 7);
    size_t total_docs = 0;
    int64_t total_words = 0, expect_words = 0;
    for (const auto& d : docs) expect_words += static_cast<int64_t>(d.tokens.size());
    int64_t last_end = -1;
    for (const auto& p : partition.periods) {
        CHECK(p.start_ts >= last_end);  // boundaries never move backwards
        CHECK(p.start_ts <= p.end_ts);
        last_end = p.end_ts;
        total_docs += p.docs.size();
        total_words += p.words;
    }
    CHECK(total_docs == docs.size());
    CHECK(total_words == expect_words);

    CHECK_THROWS_AS(partition_equal_words({timed(1, 5)}, 2), DataError);
}

TEST_CASE("period manifest lists ranges and word counts") {
    std::vector<TimedDoc> docs;
    for (int i = 0; i < 6; ++i) docs.push_back(timed(i * 10, 20));
    auto partition = partition_equal_words(docs, 3);
    std::ostringstream out;
    write_period_manifest(out, partition);
    CHECK(out.str().rfind("period,start_ts,end_ts,words\n", 0) == 0);
    CHECK(out.str().find("1,0,10,40") != std::string::npos);
}

TEST_CASE("sequential training is independent per period") {
    auto partition = stationary_partition(3, 150, 11);
    auto models = train_sequential(partition, drift_config(5));
    REQUIRE(models.size() == 3);
    // stationary corpora: per-period pair evaluation stays put
    std::vector<std::pair<std::string, std::string>> pairs = {{"src", "ta"},
                                                              {"src", "tb"}};
    std::vector<double> means;
    for (const auto& m : models) means.push_back(m.evaluate_pairs(pairs).mean_cosine);
    for (double m : means) CHECK(std::fabs(m - means[0]) <= 0.05);
}

TEST_CASE("k=1 sequential degenerates to a single plain training run") {
    auto partition = stationary_partition(1, 150, 13);
    auto models = train_sequential(partition, drift_config(9));
    REQUIRE(models.size() == 1);
    auto direct = embed::train(partition.periods[0].docs, [&] {
        auto c = drift_config(9);
        c.seed += 0;  // train_sequential uses seed + period index = seed
        return c;
    }());
    CHECK(models[0].vocab().size() == direct.vocab().size());
    for (size_t i = 0; i < direct.vocab().size(); ++i)
        for (int d = 0; d < direct.dim(); ++d)
            CHECK(models[0].vector(static_cast<int>(i))[d] ==
                  direct.vector(static_cast<int>(i))[d]);
}

TEST_CASE("incremental vocabularies grow weakly when tokens persist") {
    auto partition = planted_partition(4, 120, 3);
    // later periods reuse all filler/background tokens plus new ones
    auto models = train_incremental(partition, drift_config(21));
    REQUIRE(models.size() == 4);
    for (size_t p = 1; p < models.size(); ++p) {
        // every token of the previous *model* that still occurs in this
        // period's corpus is retained; check the planted anchors
        for (const auto& word : {"src", "ta", "tb"})
            CHECK(models[p].vocab().find(word) >= 0);
    }
}

TEST_CASE("planted drift yields opposite monotone series") {
    auto partition = planted_partition(5, 200, 17);
    auto models = train_incremental(partition, drift_config(29));
    auto series = shift_series(models, "src", {"ta", "tb"});
    REQUIRE(series.size() == 2);
    REQUIRE(series[0].cosine.size() == 5);
    CHECK(monotonic_trend(series[0]) == Trend::decreasing);
    CHECK(monotonic_trend(series[1]) == Trend::increasing);
}

TEST_CASE("stationary corpus stays within the drift band") {
    auto partition = stationary_partition(5, 200, 23);
    auto models = train_incremental(partition, drift_config(31));
    auto series = shift_series(models, "src", {"ta", "tb"});
    for (const auto& s : series) {
        REQUIRE(s.cosine[0].has_value());
        for (const auto& c : s.cosine) {
            REQUIRE(c.has_value());
            CHECK(std::fabs(*c - *s.cosine[0]) <= 0.15);
        }
    }
}

TEST_CASE("shift_series marks OOV periods and keeps series length") {
    auto partition = stationary_partition(3, 100, 37);
    auto models = train_incremental(partition, drift_config(41));
    auto series = shift_series(models, "src", {"ta", "nonexistent"});
    REQUIRE(series.size() == 2);
    CHECK(series[1].cosine.size() == 3);
    for (const auto& c : series[1].cosine) CHECK(!c.has_value());

    CHECK_THROWS_AS(shift_series(models, "neverseen", {"ta"}), DataError);
}

TEST_CASE("monotonic_trend classification rules") {
    auto mk = [](std::vector<double> values) {
        DiachronicSeries s;
        for (double v : values) s.cosine.push_back(v);
        return s;
    };
    CHECK(monotonic_trend(mk({0.1, 0.2, 0.3})) == Trend::increasing);
    CHECK(monotonic_trend(mk({0.3, 0.1, 0.2})) == Trend::none);
    CHECK(monotonic_trend(mk({0.5, 0.4, 0.4, 0.1})) == Trend::decreasing);
    // plateaus allowed (non-strict)
    CHECK(monotonic_trend(mk({0.1, 0.1, 0.3})) == Trend::increasing);
    CHECK_THROWS_AS(monotonic_trend(mk({0.1})), DataError);

    // the published reference direction: a series rising from 0.388 to
    // 0.429 counts as an increase, one falling 0.418 to 0.341 a decrease
    CHECK(monotonic_trend(mk({0.388, 0.401, 0.415, 0.429})) == Trend::increasing);
    CHECK(monotonic_trend(mk({0.418, 0.39, 0.36, 0.341})) == Trend::decreasing);
}

TEST_CASE("series csv renders OOV gaps and trends") {
    DiachronicSeries s;
    s.source = "snapper";
    s.target = "fish";
    s.cosine = {0.388, std::nullopt, 0.429};
    std::ostringstream out;
    write_series_csv(out, {s});
    CHECK(out.str().find("source,target,period_1,period_2,period_3,trend") !=
          std::string::npos);
    CHECK(out.str().find("snapper,fish,0.388000,-,0.429000,increasing") !=
          std::string::npos);
}

TEST_SUITE_END();
