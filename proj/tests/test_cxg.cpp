#include <doctest.h>

#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "kupu/cxg.hpp"

using namespace kupu;
using namespace kupu::cxg;

namespace {

AnnotatedDoc doc_of(const std::string& text, const std::string& tags = "") {
    AnnotatedDoc d;
    d.tokens = split_ws(text);
    if (!tags.empty()) d.tags = split_ws(tags);
    d.community = "nz";
    d.user = "u";
    d.created_utc = 1600000000;
    return d;
}

Construction cx(const std::string& id, std::vector<Slot> slots) {
    Construction c;
    c.id = id;
    c.slots = std::move(slots);
    return c;
}

}  // namespace

TEST_SUITE_BEGIN("cxg");

TEST_CASE("lexical matching counts overlapping windows") {
    auto c = cx("c1", {{SlotKind::lex, "of"}, {SlotKind::lex, "the"}});
    CHECK(match(doc_of("of the of the"), c) == 2);
    CHECK(match(doc_of("of of the the"), c) == 1);
    CHECK(match(doc_of("nothing here"), c) == 0);

    // translation invariance: prepending tokens never decreases the count
    CHECK(match(doc_of("x y z of the of the"), c) == 2);
}

TEST_CASE("syntactic slots require the tag layer") {
    auto c = cx("c2", {{SlotKind::syn, "VB"}, {SlotKind::syn, "IN"}});
    auto tagged = doc_of("it breaks down fast", "PRP VB IN RB");
    CHECK(match(tagged, c) == 1);

    auto untagged = doc_of("it breaks down fast");
    CHECK_THROWS_AS(match(untagged, c), DataError);
}

TEST_CASE("semantic slots use induced cluster ids") {
    auto d = doc_of("the lockdown the pandemic");
    annotate_sem(d, {{"lockdown", 7}, {"pandemic", 7}, {"the", 2}});
    auto c = cx("c3", {{SlotKind::lex, "the"}, {SlotKind::sem, "7"}});
    CHECK(match(d, c) == 2);

    AnnotatedDoc missing = doc_of("the lockdown");
    CHECK_THROWS_AS(match(missing, c), DataError);
}

TEST_CASE("match equals brute-force enumeration on a 200-token doc") {
    Rng rng(3);
    std::vector<std::string> lex_pool = {"of", "the", "in", "a", "to", "kia",
                                         "ora", "need", "want", "x", "y", "z"};
    std::vector<std::string> tag_pool = {"NN", "VB", "IN", "DET", "PRP"};
    AnnotatedDoc d;
    for (int i = 0; i < 200; ++i) {
        d.tokens.push_back(lex_pool[rng.uniform(lex_pool.size())]);
        d.tags.push_back(tag_pool[rng.uniform(tag_pool.size())]);
    }
    d.sem.resize(200);
    for (int i = 0; i < 200; ++i) d.sem[i] = static_cast<int>(rng.uniform(4));

    for (int trial = 0; trial < 20; ++trial) {
        Construction c;
        c.id = "t" + std::to_string(trial);
        size_t len = 2 + rng.uniform(3);
        for (size_t s = 0; s < len; ++s) {
            switch (rng.uniform(3)) {
                case 0:
                    c.slots.push_back({SlotKind::lex,
                                       lex_pool[rng.uniform(lex_pool.size())]});
                    break;
                case 1:
                    c.slots.push_back({SlotKind::syn,
                                       tag_pool[rng.uniform(tag_pool.size())]});
                    break;
                default:
                    c.slots.push_back(
                        {SlotKind::sem, std::to_string(rng.uniform(4))});
            }
        }
        // oracle: direct window enumeration
        int64_t expect = 0;
        for (size_t i = 0; i + c.slots.size() <= d.tokens.size(); ++i) {
            bool ok = true;
            for (size_t k = 0; k < c.slots.size() && ok; ++k) {
                const Slot& slot = c.slots[k];
                if (slot.kind == SlotKind::lex) ok = d.tokens[i + k] == slot.value;
                else if (slot.kind == SlotKind::syn) ok = d.tags[i + k] == slot.value;
                else ok = std::to_string(d.sem[i + k]) == slot.value;
            }
            if (ok) ++expect;
        }
        CAPTURE(trial);
        CHECK(match(d, c) == expect);
    }
}

TEST_CASE("parse_counts groups by community-month and user") {
    Constructicon con;
    con.items.push_back(cx("kia_ora", {{SlotKind::lex, "kia"}, {SlotKind::lex, "ora"}}));

    auto d1 = doc_of("kia ora bro");
    d1.community = "nz";
    d1.user = "alice";
    auto d2 = doc_of("kia ora kia ora");
    d2.community = "nz";
    d2.user = "bob";
    auto d3 = doc_of("hello there");
    d3.community = "au";
    d3.user = "alice";

    auto by_month = parse_counts({d1, d2, d3}, con, GroupBy::community_month);
    REQUIRE(by_month.counts.size() == 2);
    const auto& nz_row = by_month.counts.at("nz\t2020-09");
    CHECK(nz_row[0] == 3);
    CHECK(by_month.tokens.at("nz\t2020-09") == 7);
    CHECK(by_month.counts.at("au\t2020-09")[0] == 0);  // zero vector group

    auto by_user = parse_counts({d1, d2, d3}, con, GroupBy::user);
    CHECK(by_user.counts.at("alice")[0] == 1);
    CHECK(by_user.counts.at("bob")[0] == 2);

    // per-1,000-token normalization
    auto rate = by_user.per_thousand("bob");
    CHECK(rate[0] == doctest::Approx(2.0 * 1000 / 4));
}

TEST_CASE("parse_counts vectors are additive over disjoint sub-corpora") {
    Constructicon con;
    con.items.push_back(cx("c", {{SlotKind::lex, "a"}, {SlotKind::lex, "b"}}));
    auto d1 = doc_of("a b a b");
    auto d2 = doc_of("a b");
    auto pooled = parse_counts({d1, d2}, con, GroupBy::community_month);
    auto first = parse_counts({d1}, con, GroupBy::community_month);
    auto second = parse_counts({d2}, con, GroupBy::community_month);
    CHECK(pooled.counts.begin()->second[0] ==
          first.counts.begin()->second[0] + second.counts.begin()->second[0]);
}

TEST_CASE("mining finds a planted collocation") {
    std::vector<AnnotatedDoc> docs;
    Rng rng(5);
    for (int i = 0; i < 40; ++i) {
        std::string filler1 = "w" + std::to_string(rng.uniform(20));
        std::string filler2 = "w" + std::to_string(rng.uniform(20));
        docs.push_back(doc_of("kia ora " + filler1 + " " + filler2));
    }
    MineConfig cfg;
    cfg.min_freq = 10;
    cfg.association_threshold = 0.8;
    cfg.rounds = 2;
    auto con = mine_constructions(docs, cfg);
    bool found = false;
    for (const auto& c : con.items) {
        if (c.slots.size() == 2 && c.slots[0].kind == SlotKind::lex &&
            c.slots[0].value == "kia" && c.slots[1].kind == SlotKind::lex &&
            c.slots[1].value == "ora")
            found = true;
    }
    CHECK(found);
}

TEST_CASE("an infinite association threshold mines nothing") {
    std::vector<AnnotatedDoc> docs(10, doc_of("kia ora kia ora"));
    MineConfig cfg;
    cfg.association_threshold = std::numeric_limits<double>::infinity();
    CHECK(mine_constructions(docs, cfg).items.empty());
    CHECK(mine_constructions({}, cfg).items.empty());
}

TEST_CASE("mined set equals brute-force candidate scoring on a toy corpus") {
    // lexical-only corpus (no tag/sem layers) keeps the oracle tractable
    std::vector<AnnotatedDoc> docs = {
        doc_of("kia ora bro"), doc_of("kia ora mate"), doc_of("kia ora bro"),
        doc_of("sweet as bro"), doc_of("sweet as"),    doc_of("kia ora sweet as"),
    };
    MineConfig cfg;
    cfg.min_freq = 3;
    cfg.association_threshold = 0.5;
    cfg.rounds = 1;
    cfg.max_len = 2;
    auto mined = mine_constructions(docs, cfg);

    // oracle: enumerate every adjacent lexical pair, score with delta_p
    std::map<std::pair<std::string, std::string>, int64_t> pair_count;
    std::map<std::string, int64_t> first_count, second_count;
    int64_t total = 0;
    for (const auto& d : docs) {
        for (size_t i = 0; i + 1 < d.tokens.size(); ++i) {
            ++pair_count[{d.tokens[i], d.tokens[i + 1]}];
            ++first_count[d.tokens[i]];
            ++second_count[d.tokens[i + 1]];
            ++total;
        }
    }
    std::set<std::pair<std::string, std::string>> expect;
    for (const auto& [pair, c] : pair_count) {
        if (c < cfg.min_freq) continue;
        double dp = delta_p(c, first_count[pair.first], second_count[pair.second],
                            total);
        if (dp >= cfg.association_threshold) expect.insert(pair);
    }
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& c : mined.items) {
        REQUIRE(c.slots.size() == 2);
        got.insert({c.slots[0].value, c.slots[1].value});
    }
    CHECK(got == expect);
}

TEST_CASE("mining is deterministic") {
    std::vector<AnnotatedDoc> docs;
    Rng rng(9);
    for (int i = 0; i < 30; ++i) {
        docs.push_back(doc_of("kia ora w" + std::to_string(rng.uniform(8)) +
                              " sweet as"));
    }
    MineConfig cfg;
    cfg.min_freq = 5;
    cfg.association_threshold = 0.3;
    auto a = mine_constructions(docs, cfg);
    auto b = mine_constructions(docs, cfg);
    REQUIRE(a.items.size() == b.items.size());
    for (size_t i = 0; i < a.items.size(); ++i)
        CHECK(a.items[i].repr() == b.items[i].repr());
}

TEST_CASE("constructicon file round-trip") {
    Constructicon con;
    con.items.push_back(cx("cx1", {{SlotKind::lex, "of"}, {SlotKind::lex, "the"}}));
    con.items.push_back(cx("cx2", {{SlotKind::syn, "V"}, {SlotKind::syn, "PRP"}}));
    con.items.push_back(cx("cx3", {{SlotKind::sem, "17"},
                                   {SlotKind::lex, "the"},
                                   {SlotKind::syn, "NN"}}));
    std::stringstream file;
    con.save(file);
    auto loaded = Constructicon::load(file);
    CHECK(loaded.provenance == "loaded");
    REQUIRE(loaded.items.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(loaded.items[i].id == con.items[i].id);
        CHECK(loaded.items[i].slots == con.items[i].slots);
    }

    std::istringstream dup("a\tlex:x;lex:y\na\tlex:p;lex:q\n");
    CHECK_THROWS_AS(Constructicon::load(dup), FormatError);
    std::istringstream bad_len("a\tlex:x\n");
    CHECK_THROWS_AS(Constructicon::load(bad_len), FormatError);
}

TEST_CASE("feature sets classify slot composition") {
    CHECK(cx("a", {{SlotKind::lex, "x"}, {SlotKind::lex, "y"}}).feature_set() ==
          FeatureSet::lex_only);
    CHECK(cx("b", {{SlotKind::syn, "V"}, {SlotKind::syn, "PRP"}}).feature_set() ==
          FeatureSet::syn_only);
    CHECK(cx("c", {{SlotKind::sem, "1"}, {SlotKind::lex, "x"}}).feature_set() ==
          FeatureSet::sem_plus);
    CHECK(cx("d", {{SlotKind::syn, "V"}, {SlotKind::lex, "x"}}).feature_set() ==
          FeatureSet::sem_plus);
}

TEST_CASE("induced semantic clusters coincide with embedding topics") {
    // two-topic corpus; tokens of one topic never co-occur with the other
    Rng rng(13);
    std::vector<std::vector<std::string>> corpus;
    for (int s = 0; s < 400; ++s) {
        int topic = s % 2;
        std::vector<std::string> sent;
        for (int w = 0; w < 10; ++w)
            sent.push_back((topic ? "b" : "a") + std::to_string(rng.uniform(8)));
        corpus.push_back(sent);
    }
    embed::TrainConfig cfg;
    cfg.dim = 24;
    cfg.min_count = 1;
    cfg.epochs = 5;
    cfg.seed = 3;
    cfg.subsample = 0.0;
    auto model = embed::train(corpus, cfg);
    auto clusters = induce_sem_clusters(model, 2, 7);
    std::set<int> a_clusters, b_clusters;
    for (const auto& [token, cluster] : clusters) {
        (token[0] == 'a' ? a_clusters : b_clusters).insert(cluster);
    }
    CHECK(a_clusters.size() == 1);
    CHECK(b_clusters.size() == 1);
    CHECK(*a_clusters.begin() != *b_clusters.begin());

    // k=1 puts everything in one cluster; determinism under seed
    auto one = induce_sem_clusters(model, 1, 9);
    for (const auto& [token, cluster] : one) CHECK(cluster == 0);
    auto again = induce_sem_clusters(model, 2, 7);
    CHECK(clusters == again);
    CHECK_THROWS_AS(induce_sem_clusters(model, 1000, 1), DataError);
}

TEST_CASE("similarity network edges follow the threshold") {
    std::map<std::string, std::vector<double>> vectors;
    vectors["a"] = {1, 0, 0};
    vectors["b"] = {1, 0, 0};
    vectors["c"] = {0, 1, 0};
    auto complete = similarity_network(vectors, 0.99);
    REQUIRE(complete.edges.size() == 1);  // only a-b at cosine 1

    auto all = similarity_network(vectors, -1.0);
    CHECK(all.edges.size() == 3);  // complete graph

    // orthogonal vectors at a high threshold: empty edge set
    std::map<std::string, std::vector<double>> ortho;
    ortho["x"] = {1, 0};
    ortho["y"] = {0, 1};
    CHECK(similarity_network(ortho, 0.99).edges.empty());
}

TEST_CASE("stricter thresholds give subset edge sets") {
    Rng rng(17);
    std::map<std::string, std::vector<double>> vectors;
    for (int i = 0; i < 12; ++i) {
        std::vector<double> v;
        for (int d = 0; d < 5; ++d) v.push_back(rng.uniform_real());
        vectors["g" + std::to_string(i)] = v;
    }
    auto loose = similarity_network(vectors, 0.6);
    auto strict = similarity_network(vectors, 0.9);
    std::set<std::pair<int, int>> loose_edges, strict_edges;
    for (const auto& e : loose.edges) loose_edges.insert({e.a, e.b});
    for (const auto& e : strict.edges) strict_edges.insert({e.a, e.b});
    for (const auto& e : strict_edges) CHECK(loose_edges.count(e) == 1);
    CHECK(strict_edges.size() <= loose_edges.size());
}

TEST_CASE("planted two-block vectors split into two components") {
    std::map<std::string, std::vector<double>> vectors;
    Rng rng(21);
    for (int i = 0; i < 6; ++i) {
        std::vector<double> v1 = {10 + rng.uniform_real(), rng.uniform_real(), 0};
        std::vector<double> v2 = {rng.uniform_real(), 10 + rng.uniform_real(), 0};
        vectors["x" + std::to_string(i)] = v1;
        vectors["y" + std::to_string(i)] = v2;
    }
    auto g = similarity_network(vectors, 0.95);
    auto result = netstats::louvain(g, 1);
    std::set<int> x_comms, y_comms;
    for (size_t i = 0; i < g.nodes.size(); ++i)
        (g.nodes[i][0] == 'x' ? x_comms : y_comms).insert(result.community[i]);
    CHECK(x_comms.size() == 1);
    CHECK(y_comms.size() == 1);
    CHECK(*x_comms.begin() != *y_comms.begin());
}

TEST_SUITE_END();
