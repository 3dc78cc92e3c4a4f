#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kupu/classify.hpp"
#include "kupu/textprep.hpp"

using namespace kupu;
using namespace kupu::classify;

namespace {

// Synthetic blob generator: class c centred at distinct corners of a cube.
void make_blobs(int per_class, int n_classes, int dim, uint64_t seed,
                std::vector<FeatureVector>& features,
                std::vector<std::string>& labels) {
    Rng rng(seed);
    for (int i = 0; i < per_class; ++i) {
        for (int c = 0; c < n_classes; ++c) {
            FeatureVector fv;
            fv.dim = dim;
            for (int d = 0; d < dim; ++d) {
                double centre = (c == d % n_classes) ? 3.0 : 0.0;
                double noise = rng.uniform_real() - 0.5;
                fv.entries.emplace_back(d, static_cast<float>(centre + noise));
            }
            features.push_back(std::move(fv));
            labels.push_back("class" + std::to_string(c));
        }
    }
}

}  // namespace

TEST_SUITE_BEGIN("classify");

TEST_CASE("count featurizer produces term frequencies") {
    CountFeaturizer featurizer;
    auto fv = featurizer.add({"a", "b", "a"});
    REQUIRE(fv.entries.size() == 2);
    CHECK(featurizer.name(fv.entries[0].first) == "a");
    CHECK(fv.entries[0].second == doctest::Approx(2.0f));
    CHECK(fv.entries[1].second == doctest::Approx(1.0f));

    // transform never grows the vocabulary
    auto fv2 = featurizer.transform({"a", "unseen"});
    CHECK(fv2.entries.size() == 1);
    CHECK(featurizer.dim() == 2);
}

TEST_CASE("embedding featurizer averages in-vocabulary vectors") {
    // two-word corpus so vector values are reproducible
    std::vector<std::vector<std::string>> corpus;
    for (int i = 0; i < 30; ++i) corpus.push_back({"alpha", "beta", "gamma"});
    embed::TrainConfig cfg;
    cfg.dim = 8;
    cfg.min_count = 1;
    cfg.epochs = 1;
    cfg.seed = 4;
    cfg.subsample = 0.0;
    auto model = embed::train(corpus, cfg);

    auto fv = featurize_embedding({"alpha", "beta"}, model);
    CHECK(!fv.oov);
    REQUIRE(fv.entries.size() == 8);
    int ia = model.vocab().find("alpha");
    int ib = model.vocab().find("beta");
    for (int d = 0; d < 8; ++d) {
        double expect = (model.vector(ia)[d] + model.vector(ib)[d]) / 2.0;
        CHECK(fv.entries[d].second == doctest::Approx(expect).epsilon(1e-6));
    }

    auto oov = featurize_embedding({"zzz"}, model);
    CHECK(oov.oov);
    for (const auto& [i, v] : oov.entries) CHECK(v == 0.0f);
}

TEST_CASE("training reaches full accuracy on a separable toy set") {
    std::vector<FeatureVector> features;
    std::vector<std::string> labels;
    for (int i = 0; i < 40; ++i) {
        FeatureVector fv;
        fv.dim = 2;
        bool pos = i % 2 == 0;
        fv.entries = {{0, pos ? 1.0f : -1.0f}, {1, 1.0f}};
        features.push_back(fv);
        labels.push_back(pos ? "P" : "N");
    }
    auto model = train(features, labels, {}, 1);
    auto metrics = evaluate(model, features, labels);
    CHECK(metrics.weighted_f1 == doctest::Approx(1.0));

    // sign of the learned weight follows the single informative feature
    int p_idx = model.classes[0] == "N" ? 1 : 0;
    CHECK(model.weights[p_idx][0] > 0.0);
    CHECK(model.weights[1 - p_idx][0] < 0.0);
}

TEST_CASE("three synthetic blobs reach F1 >= 0.95") {
    std::vector<FeatureVector> train_f, test_f;
    std::vector<std::string> train_y, test_y;
    make_blobs(60, 3, 6, 21, train_f, train_y);
    make_blobs(30, 3, 6, 22, test_f, test_y);
    auto model = train(train_f, train_y, {}, 3);
    auto metrics = evaluate(model, test_f, test_y);
    CHECK(metrics.weighted_f1 >= 0.95);
    CHECK(metrics.macro_f1 >= 0.95);
}

TEST_CASE("larger separable training samples never hurt") {
    std::vector<FeatureVector> pool_f, test_f;
    std::vector<std::string> pool_y, test_y;
    make_blobs(100, 3, 6, 31, pool_f, pool_y);
    make_blobs(40, 3, 6, 32, test_f, test_y);
    double last = 0.0;
    for (int n : {30, 90, 300}) {
        std::vector<FeatureVector> sub_f(pool_f.begin(), pool_f.begin() + n);
        std::vector<std::string> sub_y(pool_y.begin(), pool_y.begin() + n);
        // nested prefixes keep class balance because blobs interleave
        auto model = train(sub_f, sub_y, {}, 3);
        double f1 = evaluate(model, test_f, test_y).weighted_f1;
        CHECK(f1 >= last - 1e-9);
        last = f1;
    }
}

TEST_CASE("metrics match the F1 formula on simple cases") {
    // P = R = 1 -> F1 = 1
    auto perfect = metrics_from_predictions({"a", "b"}, {0, 0, 1, 1}, {0, 0, 1, 1});
    CHECK(*perfect.per_class[0].f1 == doctest::Approx(1.0));

    // P = 0.5, R = 0.5 -> F1 = 0.5
    auto half = metrics_from_predictions({"a", "b"}, {0, 0, 1, 1}, {0, 1, 1, 0});
    CHECK(*half.per_class[0].precision == doctest::Approx(0.5));
    CHECK(*half.per_class[0].recall == doctest::Approx(0.5));
    CHECK(*half.per_class[0].f1 == doctest::Approx(0.5));
}

TEST_CASE("metrics equal an independent scalar computation exactly") {
    // fixed 3-class confusion built from label pairs; the oracle below
    // recomputes every figure from raw tp/fp/fn arithmetic
    std::vector<int> gold, predicted;
    auto emit = [&](int g, int p, int times) {
        for (int i = 0; i < times; ++i) {
            gold.push_back(g);
            predicted.push_back(p);
        }
    };
    emit(0, 0, 5); emit(0, 1, 3); emit(0, 2, 2);
    emit(1, 0, 1); emit(1, 1, 7); emit(1, 2, 2);
    emit(2, 0, 0); emit(2, 1, 1); emit(2, 2, 9);
    auto m = metrics_from_predictions({"x", "y", "z"}, gold, predicted);

    double macro = 0.0, weighted = 0.0;
    for (int c = 0; c < 3; ++c) {
        int64_t tp = 0, fp = 0, fn = 0, support = 0;
        for (size_t i = 0; i < gold.size(); ++i) {
            if (gold[i] == c) ++support;
            if (gold[i] == c && predicted[i] == c) ++tp;
            if (gold[i] != c && predicted[i] == c) ++fp;
            if (gold[i] == c && predicted[i] != c) ++fn;
        }
        double precision = static_cast<double>(tp) / (tp + fp);
        double recall = static_cast<double>(tp) / (tp + fn);
        double f1 = 2.0 * precision * recall / (precision + recall);
        CHECK(*m.per_class[c].precision == doctest::Approx(precision).epsilon(1e-12));
        CHECK(*m.per_class[c].recall == doctest::Approx(recall).epsilon(1e-12));
        CHECK(*m.per_class[c].f1 == doctest::Approx(f1).epsilon(1e-12));
        CHECK(m.per_class[c].support == support);
        macro += f1 / 3.0;
        weighted += f1 * support / 30.0;
    }
    CHECK(m.macro_f1 == doctest::Approx(macro).epsilon(1e-12));
    CHECK(m.weighted_f1 == doctest::Approx(weighted).epsilon(1e-12));
}

TEST_CASE("weighted equals macro F1 when supports are equal") {
    std::vector<int> gold, predicted;
    Rng rng(6);
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 20; ++i) {
            gold.push_back(c);
            predicted.push_back(rng.uniform(4) == 0 ? (c + 1) % 3 : c);
        }
    }
    auto m = metrics_from_predictions({"a", "b", "c"}, gold, predicted);
    CHECK(m.macro_f1 == doctest::Approx(m.weighted_f1).epsilon(1e-12));
}

TEST_CASE("zero-support zero-prediction classes render as '-'") {
    auto m = metrics_from_predictions({"a", "b", "ghost"}, {0, 0, 1}, {0, 1, 1});
    CHECK(!m.per_class[2].precision.has_value());
    std::ostringstream csv;
    write_metrics_csv(csv, m);
    CHECK(csv.str().find("ghost,-,-,-,0") != std::string::npos);
}

TEST_CASE("top_features ranks a planted marker first") {
    CountFeaturizer featurizer;
    std::vector<FeatureVector> features;
    std::vector<std::string> labels;
    Rng rng(12);
    for (int i = 0; i < 120; ++i) {
        bool is_a = i % 2 == 0;
        std::vector<std::string> tokens = {"common", "words", "here"};
        if (is_a) tokens.push_back("marker");
        else tokens.push_back("w" + std::to_string(rng.uniform(6)));
        features.push_back(featurizer.add(tokens));
        labels.push_back(is_a ? "A" : "B");
    }
    for (auto& fv : features) fv.dim = featurizer.dim();
    auto model = train(features, labels, {}, 8);
    auto top = top_features(model, "A", 3);
    REQUIRE(!top.empty());
    CHECK(featurizer.name(top[0].first) == "marker");

    // k beyond the feature count returns the full list
    auto all = top_features(model, "A", 10000);
    CHECK(all.size() == static_cast<size_t>(featurizer.dim()));
}

TEST_CASE("top_features tie-break is by feature id") {
    LinearModel model;
    model.classes = {"a", "b"};
    model.dim = 4;
    model.weights = {{0.5, 0.5, 0.5, 0.5}, {0.1, 0.2, 0.3, 0.4}};
    model.bias = {0.0, 0.0};
    auto top = top_features(model, "a", 4);
    for (int i = 0; i < 4; ++i) CHECK(top[i].first == i);
}

TEST_CASE("model save/load round-trip preserves predictions") {
    std::vector<FeatureVector> features;
    std::vector<std::string> labels;
    make_blobs(30, 3, 5, 44, features, labels);
    auto model = train(features, labels, {}, 2);
    std::stringstream file;
    model.save(file);
    auto loaded = LinearModel::load(file);
    CHECK(loaded.classes == model.classes);
    for (const auto& fv : features)
        CHECK(loaded.predict(fv) == model.predict(fv));
}

TEST_CASE("degenerate datasets are rejected") {
    std::vector<FeatureVector> features(3, FeatureVector{{{0, 1.0f}}, 1, false});
    CHECK_THROWS_AS(train(features, {"a", "a", "a"}, {}, 1), DataError);
    CHECK_THROWS_AS(train({}, {}, {}, 1), DataError);
}

TEST_SUITE_END();
