// kupu: corpus dialectology toolkit command-line interface.
//
// Subcommands compose through files: `ingest` turns archive dumps into a
// typed unit stream, every other command consumes unit streams or earlier
// outputs and writes CSV artifacts plus a run manifest.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "kupu/classify.hpp"
#include "kupu/common.hpp"
#include "kupu/corpus.hpp"
#include "kupu/cxg.hpp"
#include "kupu/diachrone.hpp"
#include "kupu/embed.hpp"
#include "kupu/netstats.hpp"
#include "kupu/sampling.hpp"
#include "kupu/textprep.hpp"
#include "kupu/variables.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace kupu;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

// Raised while resolving and validating the run configuration; everything
// after validation is a data error.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunContext {
    fs::path out_dir;
    uint64_t seed = 1;
    json resolved_config = json::object();
    std::vector<fs::path> outputs;

    fs::path path(const std::string& name) const { return out_dir / name; }

    std::ofstream open(const std::string& name) {
        fs::create_directories(out_dir);
        fs::path p = path(name);
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot write " + p.string());
        outputs.push_back(p);
        return out;
    }

    void write_manifest(const std::string& command) {
        json manifest;
        manifest["command"] = command;
        manifest["config_hash"] =
            "fnv1a:" + std::to_string(fnv1a(resolved_config.dump()));
        manifest["seed"] = seed;
        manifest["version"] = kVersion;
        std::vector<std::string> names;
        for (const auto& p : outputs) names.push_back(p.filename().string());
        manifest["outputs"] = names;
        auto out = open("manifest.json");
        out << manifest.dump(2) << '\n';
        outputs.pop_back();  // the manifest itself is not listed
    }

    // removes everything written so far (called on error)
    void cleanup() {
        for (const auto& p : outputs) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

// --- config file ------------------------------------------------------

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object())
        throw FormatError("config " + path + " is not a JSON object");
    return cfg;
}

template <typename T>
T config_or(const json& cfg, const std::string& key, T fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end() || it->is_null()) return fallback;
    return it->get<T>();
}

// --- unit stream I/O ----------------------------------------------------

json unit_to_json(const corpus::TextUnit& u) {
    json j;
    j["record_id"] = u.record_id;
    j["community"] = u.community;
    j["text_type"] = corpus::to_string(u.type);
    j["text"] = u.text;
    j["created_utc"] = u.created_utc;
    j["author"] = u.author;
    j["score"] = u.score;
    if (u.distinguished) j["distinguished"] = true;
    return j;
}

std::optional<corpus::TextUnit> unit_from_json(const json& j) {
    if (!j.is_object() || !j.contains("text_type")) return std::nullopt;
    corpus::TextUnit u;
    u.record_id = j.value("record_id", "");
    u.community = j.value("community", "");
    auto type = corpus::text_type_from_string(j.value("text_type", ""));
    if (!type) return std::nullopt;
    u.type = *type;
    u.text = j.value("text", "");
    u.created_utc = j.value("created_utc", static_cast<int64_t>(0));
    u.author = j.value("author", "");
    u.score = j.value("score", static_cast<int64_t>(0));
    u.distinguished = j.value("distinguished", false);
    return u;
}

std::vector<corpus::TextUnit> derive_all(const std::vector<corpus::RedditRecord>& records) {
    std::vector<corpus::TextUnit> units;
    for (const auto& rec : records) {
        auto derived = corpus::derive_text_units(rec);
        units.insert(units.end(), derived.begin(), derived.end());
    }
    return units;
}

// Loads a unit stream; raw archive dumps are ingested, cleaned and
// derived transparently (detected by the absence of a text_type field).
std::vector<corpus::TextUnit> load_units(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw IoError("cannot open " + path);
    std::string first_line;
    while (std::getline(probe, first_line)) {
        if (!trim(first_line).empty()) break;
    }
    probe.close();
    bool is_units = first_line.find("\"text_type\"") != std::string::npos;

    if (!is_units) {
        auto ingested = corpus::ingest_file(path);
        return derive_all(corpus::clean(std::move(ingested.records)));
    }
    std::ifstream in(path);
    std::vector<corpus::TextUnit> units;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        auto unit = unit_from_json(j);
        if (unit) units.push_back(std::move(*unit));
    }
    if (units.empty()) throw DataError("no text units in " + path);
    return units;
}

std::vector<corpus::TextUnit> apply_unit_filters(
    std::vector<corpus::TextUnit> units, const std::vector<std::string>& communities,
    const std::vector<std::string>& text_types) {
    if (!communities.empty()) {
        std::set<std::string> keep(communities.begin(), communities.end());
        std::vector<corpus::TextUnit> filtered;
        for (auto& u : units)
            if (keep.count(u.community)) filtered.push_back(std::move(u));
        units = std::move(filtered);
    }
    if (!text_types.empty()) {
        std::set<std::string> keep(text_types.begin(), text_types.end());
        std::vector<corpus::TextUnit> filtered;
        for (auto& u : units)
            if (keep.count(corpus::to_string(u.type))) filtered.push_back(std::move(u));
        units = std::move(filtered);
    }
    return units;
}

std::vector<std::string> sorted_communities(const std::vector<corpus::TextUnit>& units) {
    std::set<std::string> names;
    for (const auto& u : units) names.insert(u.community);
    return {names.begin(), names.end()};
}

std::vector<variables::VariableDoc> to_variable_docs(
    const std::vector<corpus::TextUnit>& units) {
    std::vector<variables::VariableDoc> docs;
    docs.reserve(units.size());
    for (const auto& u : units) {
        variables::VariableDoc d;
        d.community = u.community;
        d.tokens = textprep::tokenize(textprep::normalize(u.text));
        d.created_utc = u.created_utc;
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<std::vector<std::string>> to_token_docs(
    const std::vector<corpus::TextUnit>& units,
    const std::vector<textprep::Gazetteer>& gazetteers, size_t chunk_words) {
    std::vector<std::vector<std::string>> docs;
    for (const auto& u : units) {
        auto tokens = textprep::tokenize(textprep::normalize(u.text));
        if (!gazetteers.empty()) tokens = textprep::mask_entities(tokens, gazetteers);
        if (tokens.empty()) continue;
        if (chunk_words > 0 && tokens.size() > chunk_words) {
            for (auto& piece : textprep::chunk(tokens, chunk_words))
                docs.push_back(std::move(piece));
        } else {
            docs.push_back(std::move(tokens));
        }
    }
    return docs;
}

std::optional<textprep::Tagger> load_tagger(const std::string& weights_path,
                                            const std::string& seed_path) {
    if (!weights_path.empty()) {
        std::ifstream in(weights_path);
        if (!in) throw IoError("cannot open tagger " + weights_path);
        return textprep::Tagger::load(in);
    }
    if (!seed_path.empty()) return textprep::Tagger::from_seed_corpus(seed_path);
    return std::nullopt;
}

std::vector<textprep::Gazetteer> load_gazetteers(const std::string& gpe_path,
                                                 const std::string& loc_path) {
    std::vector<textprep::Gazetteer> gazetteers;
    if (!gpe_path.empty())
        gazetteers.push_back(
            textprep::Gazetteer::load(gpe_path, textprep::GazetteerLabel::GPE));
    if (!loc_path.empty())
        gazetteers.push_back(
            textprep::Gazetteer::load(loc_path, textprep::GazetteerLabel::LOC));
    return gazetteers;
}

// --- subcommand implementations -----------------------------------------

void cmd_ingest(RunContext& ctx, const std::string& input) {
    auto ingested = corpus::ingest_file(input);
    auto cleaned = corpus::clean(std::move(ingested.records));
    auto units = derive_all(cleaned);
    auto out = ctx.open("units.ndjson");
    for (const auto& u : units) out << unit_to_json(u).dump() << '\n';
    std::cerr << "ingest: " << ingested.total_lines << " lines, "
              << ingested.skipped << " skipped, " << cleaned.size()
              << " records, " << units.size() << " units\n";
}

void cmd_stats(RunContext& ctx, const std::vector<corpus::TextUnit>& units) {
    auto rows = corpus::corpus_stats(units);
    auto out = ctx.open("corpus_stats.csv");
    corpus::write_stats_csv(out, rows);

    auto hourly = ctx.open("hourly_profile.csv");
    hourly << "community,hour,proportion\n";
    for (const auto& community : sorted_communities(units)) {
        std::vector<corpus::TextUnit> slice;
        for (const auto& u : units)
            if (u.community == community) slice.push_back(u);
        auto profile = corpus::hourly_profile(slice, 0);
        for (int h = 0; h < 24; ++h)
            hourly << csv_field(community) << ',' << h << ','
                   << format_fixed(profile[h], 6) << '\n';
    }
}

void cmd_variables(RunContext& ctx, const std::vector<corpus::TextUnit>& units,
                   const std::string& specs_path) {
    auto specs = variables::load_specs(specs_path);
    auto docs = to_variable_docs(units);
    auto communities = sorted_communities(units);
    auto counts = variables::count_variants(docs, specs);

    auto table = ctx.open("variant_counts.csv");
    variables::write_counts_csv(table, counts, specs, communities);

    auto patterns = ctx.open("patterns.csv");
    patterns << "variable,pattern,detail\n";
    for (const auto& spec : specs) {
        std::string pattern = "-", detail;
        try {
            auto p = variables::classify_distribution(counts, spec, communities);
            pattern = variables::to_string(p.pattern);
            if (p.outlier) detail = *p.outlier;
            else if (p.pattern == variables::Pattern::community_grouping)
                detail = join(p.conservative_side, "|");
        } catch (const DataError&) {
            // fewer than two communities with data: leave the hyphen
        }
        patterns << csv_field(spec.id) << ',' << pattern << ','
                 << csv_field(detail) << '\n';
    }
}

void cmd_classify(RunContext& ctx, const std::vector<corpus::TextUnit>& units,
                  const std::string& plan, double fraction,
                  const std::vector<textprep::Gazetteer>& gazetteers,
                  const classify::ClassifierConfig& clf_config, int top_k) {
    sampling::UnitsByClass by_class;
    for (const auto& u : units) by_class[u.community].push_back(u);
    if (by_class.size() < 2)
        throw DataError("classify: need at least two communities");

    sampling::SplitDataset split;
    if (plan == "balanced")
        split = sampling::balanced_sample(by_class, ctx.seed);
    else if (plan == "proportional")
        split = sampling::proportional_sample(by_class, fraction, ctx.seed);
    else if (plan == "random")
        split = sampling::random_sample(by_class, ctx.seed);
    else
        throw DataError("classify: unknown sampling plan '" + plan + "'");

    classify::CountFeaturizer featurizer;
    std::vector<classify::FeatureVector> train_x;
    std::vector<std::string> train_y;
    for (const auto& lu : split.train) {
        auto tokens = textprep::tokenize(textprep::normalize(lu.unit.text));
        if (!gazetteers.empty())
            tokens = textprep::mask_entities(tokens, gazetteers);
        train_x.push_back(featurizer.add(tokens));
        train_y.push_back(lu.label);
    }
    for (auto& fv : train_x) fv.dim = featurizer.dim();
    std::vector<classify::FeatureVector> test_x;
    std::vector<std::string> test_y;
    for (const auto& lu : split.test) {
        auto tokens = textprep::tokenize(textprep::normalize(lu.unit.text));
        if (!gazetteers.empty())
            tokens = textprep::mask_entities(tokens, gazetteers);
        test_x.push_back(featurizer.transform(tokens));
        test_y.push_back(lu.label);
    }

    auto model = classify::train(train_x, train_y, clf_config, ctx.seed);
    auto metrics = classify::evaluate(model, test_x, test_y);

    auto metrics_csv = ctx.open("metrics.csv");
    classify::write_metrics_csv(metrics_csv, metrics);

    auto model_file = ctx.open("model.txt");
    model.save(model_file);

    auto features_csv = ctx.open("top_features.csv");
    features_csv << "class,rank,feature,weight\n";
    for (const auto& cls : model.classes) {
        auto top = classify::top_features(model, cls, static_cast<size_t>(top_k));
        for (size_t r = 0; r < top.size(); ++r)
            features_csv << csv_field(cls) << ',' << (r + 1) << ','
                         << csv_field(featurizer.name(top[r].first)) << ','
                         << format_fixed(top[r].second, 6) << '\n';
    }

    auto plan_file = ctx.open("sampling_plan.txt");
    plan_file << "plan " << sampling::to_string(split.plan) << "\nfraction "
              << format_double(fraction) << "\nseed " << ctx.seed
              << "\ntrain " << split.train.size() << "\ntest "
              << split.test.size() << '\n';
}

embed::TrainConfig embed_config_from(const json& cfg, uint64_t seed) {
    embed::TrainConfig ec;
    ec.dim = config_or(cfg, "dim", 300);
    ec.window = config_or(cfg, "window", 5);
    ec.min_count = config_or(cfg, "min_count", 5);
    ec.negatives = config_or(cfg, "negatives", 5);
    ec.epochs = config_or(cfg, "epochs", 5);
    std::string arch = config_or<std::string>(cfg, "arch", "sgns");
    if (arch != "sgns" && arch != "cbow")
        throw FormatError("embedding arch must be sgns or cbow");
    ec.arch = arch == "cbow" ? embed::Arch::cbow : embed::Arch::sgns;
    ec.learning_rate =
        config_or(cfg, "learning_rate", ec.arch == embed::Arch::cbow ? 0.05 : 0.025);
    ec.subsample = config_or(cfg, "subsample", 1e-4);
    ec.seed = seed;
    return ec;
}

void cmd_embed_train(RunContext& ctx, const std::vector<corpus::TextUnit>& units,
                     const json& embed_cfg,
                     const std::vector<textprep::Gazetteer>& gazetteers,
                     const std::string& init_path, bool binary) {
    auto config = embed_config_from(embed_cfg, ctx.seed);
    auto docs = to_token_docs(units, gazetteers, 500);
    std::optional<embed::EmbeddingModel> init;
    if (!init_path.empty()) init = embed::EmbeddingModel::load_file(init_path);
    auto model = embed::train(docs, config, init ? &*init : nullptr);
    std::string name = binary ? "model.bin" : "model.txt";
    auto out = ctx.open(name);
    if (binary)
        model.save_binary(out);
    else
        model.save_text(out);
    std::cerr << "embed-train: vocabulary " << model.vocab().size() << ", dim "
              << model.dim() << '\n';
}

void cmd_embed_eval(RunContext& ctx, const std::string& model_path,
                    const std::string& pairs_path) {
    auto model = embed::EmbeddingModel::load_file(model_path);
    auto pairs = embed::load_pair_list(pairs_path);
    auto eval = model.evaluate_pairs(pairs);
    auto out = ctx.open("pair_scores.csv");
    out << "word_a,word_b,cosine\n";
    for (const auto& [pair, score] : eval.per_pair)
        out << csv_field(pair.first) << ',' << csv_field(pair.second) << ','
            << (score ? format_fixed(*score, 6) : std::string("-")) << '\n';
    out << "mean,," << format_fixed(eval.mean_cosine, 6) << '\n';
    out << "oov_pairs,," << eval.oov_pairs << '\n';
}

void cmd_drift(RunContext& ctx, const std::vector<corpus::TextUnit>& units,
               const json& embed_cfg, int periods, const std::string& mode,
               const std::string& source, const std::vector<std::string>& targets,
               const std::vector<textprep::Gazetteer>& gazetteers) {
    auto config = embed_config_from(embed_cfg, ctx.seed);
    std::vector<diachrone::TimedDoc> docs;
    for (const auto& u : units) {
        diachrone::TimedDoc d;
        d.created_utc = u.created_utc;
        d.tokens = textprep::tokenize(textprep::normalize(u.text));
        if (!gazetteers.empty())
            d.tokens = textprep::mask_entities(d.tokens, gazetteers);
        if (!d.tokens.empty()) docs.push_back(std::move(d));
    }
    auto partition = diachrone::partition_equal_words(std::move(docs), periods);

    auto manifest = ctx.open("periods.csv");
    diachrone::write_period_manifest(manifest, partition);

    std::vector<embed::EmbeddingModel> models;
    diachrone::TrainMode train_mode;
    if (mode == "sequential") {
        models = diachrone::train_sequential(partition, config);
        train_mode = diachrone::TrainMode::sequential;
    } else if (mode == "incremental") {
        models = diachrone::train_incremental(partition, config);
        train_mode = diachrone::TrainMode::incremental;
    } else {
        throw DataError("drift: mode must be sequential or incremental");
    }

    auto series = diachrone::shift_series(models, source, targets, train_mode);
    auto out = ctx.open("series.csv");
    diachrone::write_series_csv(out, series);
}

void cmd_cxg_mine(RunContext& ctx, const std::vector<corpus::TextUnit>& units,
                  const cxg::MineConfig& config, const textprep::Tagger* tagger) {
    std::vector<cxg::AnnotatedDoc> docs;
    for (const auto& u : units) {
        cxg::AnnotatedDoc d;
        d.tokens = textprep::tokenize(textprep::normalize(u.text));
        if (d.tokens.empty()) continue;
        if (tagger) d.tags = tagger->tag(d.tokens);
        d.community = u.community;
        d.user = u.author;
        d.created_utc = u.created_utc;
        docs.push_back(std::move(d));
    }
    auto constructicon = cxg::mine_constructions(docs, config);
    auto out = ctx.open("constructicon.tsv");
    constructicon.save(out);
    std::cerr << "cxg-mine: " << constructicon.items.size() << " constructions\n";
}

void cmd_cxg_parse(RunContext& ctx, const std::vector<corpus::TextUnit>& units,
                   const std::string& constructicon_path, const std::string& group_by,
                   const textprep::Tagger* tagger) {
    auto constructicon = cxg::Constructicon::load_file(constructicon_path);
    bool needs_tags = false;
    for (const auto& c : constructicon.items)
        for (const auto& s : c.slots)
            if (s.kind == cxg::SlotKind::syn) needs_tags = true;
    std::vector<cxg::AnnotatedDoc> docs;
    for (const auto& u : units) {
        cxg::AnnotatedDoc d;
        d.tokens = textprep::tokenize(textprep::normalize(u.text));
        if (d.tokens.empty()) continue;
        if (needs_tags && tagger) d.tags = tagger->tag(d.tokens);
        d.community = u.community;
        d.user = u.author;
        d.created_utc = u.created_utc;
        docs.push_back(std::move(d));
    }
    auto group = group_by == "user" ? cxg::GroupBy::user
                                    : cxg::GroupBy::community_month;
    auto counts = cxg::parse_counts(docs, constructicon, group);
    auto out = ctx.open("cxg_counts.csv");
    cxg::write_counts_csv(out, counts);
}

void cmd_network(RunContext& ctx, const std::vector<corpus::TextUnit>& units,
                 const std::string& mode, double threshold,
                 const std::string& vectors_path) {
    netstats::Graph graph;
    if (mode == "jaccard") {
        std::map<std::string, std::set<std::string>> user_sets;
        for (const auto& u : units) {
            if (u.type == corpus::TextType::rstext ||
                u.type == corpus::TextType::rcomm)
                user_sets[u.community].insert(u.author);
        }
        graph = netstats::overlap_graph(user_sets, threshold);
    } else if (mode == "cosine") {
        // wide CSV: group, one column per construction id, tokens
        std::ifstream in(vectors_path);
        if (!in) throw IoError("cannot open " + vectors_path);
        std::string header;
        if (!std::getline(in, header))
            throw FormatError(vectors_path + " is empty");
        std::map<std::string, std::vector<double>> vectors;
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            auto cols = split(line, ',');
            if (cols.size() < 3)
                throw FormatError(vectors_path + ": need group + counts columns");
            std::vector<double> v;
            for (size_t i = 1; i + 1 < cols.size(); ++i)
                v.push_back(std::stod(cols[i]));
            vectors[cols[0]] = std::move(v);
        }
        graph = cxg::similarity_network(vectors, threshold);
    } else {
        throw DataError("network: mode must be jaccard or cosine");
    }

    auto partition = netstats::louvain(graph, ctx.seed);
    auto edges = ctx.open("edges.csv");
    netstats::write_graph_csv(edges, graph);
    auto parts = ctx.open("partition.csv");
    netstats::write_partition_csv(parts, graph, partition.community);
    auto summary = ctx.open("network_summary.txt");
    std::set<int> comms(partition.community.begin(), partition.community.end());
    summary << "nodes " << graph.nodes.size() << "\nedges " << graph.edges.size()
            << "\ncommunities " << comms.size() << "\nmodularity "
            << format_fixed(partition.modularity, 6) << '\n';
}

void cmd_cohorts(RunContext& ctx, const std::vector<corpus::TextUnit>& units) {
    auto filtered = corpus::filter_authors(units, {"spam", "bot"});
    auto profiles = netstats::build_profiles(filtered);
    auto out = ctx.open("profiles.csv");
    netstats::write_profiles_csv(out, profiles);
}

void cmd_ols(RunContext& ctx, const std::string& table_path,
             const std::string& response,
             const std::vector<std::string>& predictors) {
    std::ifstream in(table_path);
    if (!in) throw IoError("cannot open " + table_path);
    std::string header;
    if (!std::getline(in, header)) throw FormatError(table_path + " is empty");
    auto cols = split(trim(header), ',');
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < cols.size(); ++i) index[cols[i]] = i;
    if (!index.count(response))
        throw DataError("ols: response column '" + response + "' not found");
    for (const auto& p : predictors)
        if (!index.count(p))
            throw DataError("ols: predictor column '" + p + "' not found");

    std::vector<double> y;
    std::vector<std::vector<double>> X(predictors.size());
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto values = split(line, ',');
        y.push_back(std::stod(values.at(index[response])));
        for (size_t p = 0; p < predictors.size(); ++p)
            X[p].push_back(std::stod(values.at(index[predictors[p]])));
    }
    auto result = netstats::ols(y, X, predictors);
    auto out = ctx.open("ols.csv");
    out << "term,coef,stderr,t,p\n";
    for (size_t i = 0; i < result.names.size(); ++i)
        out << csv_field(result.names[i]) << ',' << format_fixed(result.coef[i], 9)
            << ',' << format_fixed(result.stderr_[i], 9) << ','
            << format_fixed(result.t_value[i], 6) << ','
            << format_fixed(result.p_value[i], 9) << '\n';
    out << "r2,," << format_fixed(result.r2, 9) << ",,\n";
    out << "adj_r2,," << format_fixed(result.adj_r2, 9) << ",,\n";
    out << "f_stat,," << format_fixed(result.f_stat, 6) << ",,\n";
    out << "resid_stderr,," << format_fixed(result.resid_stderr, 9) << ",,\n";
    out << "n,," << result.n << ",,\n";
}

void cmd_report(RunContext& ctx, const std::vector<corpus::TextUnit>& units,
                const std::string& specs_path) {
    cmd_stats(ctx, units);
    if (!specs_path.empty()) cmd_variables(ctx, units, specs_path);
    cmd_cohorts(ctx, units);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kupu: corpus dialectology toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", input, specs_path;
    std::string gpe_path, loc_path;
    uint64_t seed = 1;
    std::vector<std::string> communities, text_types;

    app.add_option("--config", config_path, "declarative run config (JSON)");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--communities", communities, "communities filter")
        ->delimiter(',');
    app.add_option("--text-types", text_types, "text-type filter")
        ->delimiter(',');

    auto* ingest = app.add_subcommand("ingest", "ingest an archive dump");
    ingest->add_option("--input", input, "archive dump (ndjson, optionally gzip)");

    auto* stats = app.add_subcommand("stats", "corpus statistics");
    stats->add_option("--input", input, "units or dump file");

    auto* vars = app.add_subcommand("variables", "variant frequency analysis");
    vars->add_option("--input", input, "units or dump file");
    vars->add_option("--specs", specs_path, "variable spec CSV");

    auto* clf = app.add_subcommand("classify", "train and evaluate a classifier");
    std::string plan = "balanced";
    double fraction = 0.01;
    int epochs = 5, top_k = 10;
    double learning_rate = 0.1, l2 = 1e-4;
    clf->add_option("--input", input, "units or dump file");
    clf->add_option("--plan", plan, "balanced | proportional | random");
    clf->add_option("--fraction", fraction, "proportional sampling fraction");
    clf->add_option("--epochs", epochs, "SGD epochs");
    clf->add_option("--learning-rate", learning_rate, "initial learning rate");
    clf->add_option("--l2", l2, "L2 regularization strength");
    clf->add_option("--top-k", top_k, "top features per class");
    clf->add_option("--gazetteer-gpe", gpe_path, "GPE gazetteer for masking");
    clf->add_option("--gazetteer-loc", loc_path, "LOC gazetteer for masking");

    auto* etrain = app.add_subcommand("embed-train", "train an embedding model");
    int dim = 300, window = 5, min_count = 5, negatives = 5, e_epochs = 5;
    std::string arch = "sgns", init_path;
    bool binary = false;
    etrain->add_option("--input", input, "units or dump file");
    etrain->add_option("--dim", dim, "vector dimensionality");
    etrain->add_option("--window", window, "context window");
    etrain->add_option("--min-count", min_count, "minimum word frequency");
    etrain->add_option("--negatives", negatives, "negative samples");
    etrain->add_option("--epochs", e_epochs, "training epochs");
    etrain->add_option("--arch", arch, "sgns | cbow");
    etrain->add_option("--init", init_path, "model to continue from");
    etrain->add_flag("--binary", binary, "write the binary model format");
    etrain->add_option("--gazetteer-gpe", gpe_path, "GPE gazetteer for masking");
    etrain->add_option("--gazetteer-loc", loc_path, "LOC gazetteer for masking");

    auto* eeval = app.add_subcommand("embed-eval", "evaluate word pairs");
    std::string model_path, pairs_path;
    eeval->add_option("--model", model_path, "embedding model file");
    eeval->add_option("--pairs", pairs_path, "word-pair list");

    auto* drift = app.add_subcommand("drift", "diachronic shift series");
    int periods = 4;
    std::string mode = "incremental", source;
    std::vector<std::string> targets;
    drift->add_option("--input", input, "units or dump file");
    drift->add_option("--periods", periods, "number of periods");
    drift->add_option("--mode", mode, "sequential | incremental");
    drift->add_option("--source", source, "source word");
    drift->add_option("--targets", targets, "target words")->delimiter(',');
    drift->add_option("--dim", dim, "vector dimensionality");
    drift->add_option("--window", window, "context window");
    drift->add_option("--min-count", min_count, "minimum word frequency");
    drift->add_option("--epochs", e_epochs, "training epochs");
    drift->add_option("--arch", arch, "sgns | cbow");
    drift->add_option("--gazetteer-gpe", gpe_path, "GPE gazetteer for masking");
    drift->add_option("--gazetteer-loc", loc_path, "LOC gazetteer for masking");

    auto* cmine = app.add_subcommand("cxg-mine", "mine candidate constructions");
    int rounds = 5;
    int64_t min_freq = 2;
    double assoc = 0.2;
    std::string tagger_path, tagger_seed_path;
    cmine->add_option("--input", input, "units or dump file");
    cmine->add_option("--rounds", rounds, "mining rounds");
    cmine->add_option("--min-freq", min_freq, "minimum frequency");
    cmine->add_option("--association-threshold", assoc, "minimum delta-P");
    cmine->add_option("--tagger", tagger_path, "tagger weights file");
    cmine->add_option("--tagger-seed", tagger_seed_path,
                      "word/TAG seed corpus to train a tagger from");

    auto* cparse = app.add_subcommand("cxg-parse", "parse construction counts");
    std::string constructicon_path, group_by = "community-month";
    cparse->add_option("--input", input, "units or dump file");
    cparse->add_option("--constructicon", constructicon_path, "constructicon file");
    cparse->add_option("--group-by", group_by, "community-month | user");
    cparse->add_option("--tagger", tagger_path, "tagger weights file");
    cparse->add_option("--tagger-seed", tagger_seed_path,
                       "word/TAG seed corpus to train a tagger from");

    auto* net = app.add_subcommand("network", "similarity network + Louvain");
    std::string net_mode = "jaccard", vectors_path;
    double threshold = 0.05;
    net->add_option("--input", input, "units or dump file (jaccard mode)");
    net->add_option("--mode", net_mode, "jaccard | cosine");
    net->add_option("--threshold", threshold, "edge threshold");
    net->add_option("--vectors", vectors_path, "count vectors CSV (cosine mode)");

    auto* cohorts = app.add_subcommand("cohorts", "user behaviour profiles");
    cohorts->add_option("--input", input, "units or dump file");

    auto* olscmd = app.add_subcommand("ols", "OLS regression over a CSV table");
    std::string table_path, response;
    std::vector<std::string> predictors;
    olscmd->add_option("--table", table_path, "input CSV");
    olscmd->add_option("--response", response, "response column");
    olscmd->add_option("--predictors", predictors, "predictor columns")
        ->delimiter(',');

    auto* report = app.add_subcommand("report", "stats + variables + cohorts");
    report->add_option("--input", input, "units or dump file");
    report->add_option("--specs", specs_path, "variable spec CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfig : kExitOk;
    }

    RunContext ctx;
    try {
        json cfg;
        try {
            cfg = load_config(config_path);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        // config file supplies defaults; explicit flags win
        if (input.empty()) input = config_or<std::string>(cfg, "input", "");
        if (specs_path.empty())
            specs_path = config_or<std::string>(cfg, "specs", "");
        if (gpe_path.empty())
            gpe_path = config_or<std::string>(cfg, "gazetteer_gpe", "");
        if (loc_path.empty())
            loc_path = config_or<std::string>(cfg, "gazetteer_loc", "");
        if (communities.empty())
            communities = config_or<std::vector<std::string>>(cfg, "communities", {});
        if (text_types.empty())
            text_types = config_or<std::vector<std::string>>(cfg, "text_types", {});
        if (app.count("--seed") == 0)
            seed = config_or<uint64_t>(cfg, "seed", seed);
        if (app.count("--out") == 0)
            out_dir = config_or<std::string>(cfg, "out", out_dir);

        ctx.out_dir = out_dir;
        ctx.seed = seed;
        ctx.resolved_config = cfg;
        ctx.resolved_config["input"] = input;
        ctx.resolved_config["seed"] = seed;
        ctx.resolved_config["communities"] = communities;
        ctx.resolved_config["text_types"] = text_types;

        json embed_cfg = cfg.contains("embedding") ? cfg["embedding"] : json::object();
        if (etrain->parsed() || drift->parsed()) {
            if (etrain->count("--dim") || drift->count("--dim")) embed_cfg["dim"] = dim;
            if (etrain->count("--window") || drift->count("--window"))
                embed_cfg["window"] = window;
            if (etrain->count("--min-count") || drift->count("--min-count"))
                embed_cfg["min_count"] = min_count;
            if (etrain->count("--negatives")) embed_cfg["negatives"] = negatives;
            if (etrain->count("--epochs") || drift->count("--epochs"))
                embed_cfg["epochs"] = e_epochs;
            if (etrain->count("--arch") || drift->count("--arch"))
                embed_cfg["arch"] = arch;
            if (!embed_cfg.contains("dim")) embed_cfg["dim"] = dim;
            ctx.resolved_config["embedding"] = embed_cfg;
        }

        auto need_input = [&](const char* cmd) {
            if (input.empty())
                throw ConfigError(std::string(cmd) +
                                  ": --input (or config input) is required");
            if (!fs::exists(input))
                throw ConfigError(std::string(cmd) + ": input file '" + input +
                                  "' does not exist");
        };

        if (ingest->parsed()) {
            need_input("ingest");
            cmd_ingest(ctx, input);
        } else if (stats->parsed()) {
            need_input("stats");
            cmd_stats(ctx, apply_unit_filters(load_units(input), communities, text_types));
        } else if (vars->parsed()) {
            need_input("variables");
            if (specs_path.empty())
                throw ConfigError("variables: --specs (or config specs) is required");
            cmd_variables(ctx, apply_unit_filters(load_units(input), communities, text_types),
                          specs_path);
        } else if (clf->parsed()) {
            need_input("classify");
            classify::ClassifierConfig cc;
            cc.epochs = epochs;
            cc.learning_rate = learning_rate;
            cc.l2 = l2;
            cmd_classify(ctx, apply_unit_filters(load_units(input), communities, text_types),
                         plan, fraction, load_gazetteers(gpe_path, loc_path), cc, top_k);
        } else if (etrain->parsed()) {
            need_input("embed-train");
            auto units = apply_unit_filters(load_units(input), communities, text_types);
            units = corpus::filter_authors(units, {"spam", "bot"});
            cmd_embed_train(ctx, units, embed_cfg, load_gazetteers(gpe_path, loc_path),
                            init_path, binary);
        } else if (eeval->parsed()) {
            if (model_path.empty() || pairs_path.empty())
                throw ConfigError("embed-eval: --model and --pairs are required");
            cmd_embed_eval(ctx, model_path, pairs_path);
        } else if (drift->parsed()) {
            need_input("drift");
            if (source.empty() || targets.empty())
                throw ConfigError("drift: --source and --targets are required");
            auto units = apply_unit_filters(load_units(input), communities, text_types);
            units = corpus::filter_authors(units, {"spam", "bot"});
            cmd_drift(ctx, units, embed_cfg, periods, mode, source, targets,
                      load_gazetteers(gpe_path, loc_path));
        } else if (cmine->parsed()) {
            need_input("cxg-mine");
            cxg::MineConfig mc;
            mc.rounds = rounds;
            mc.min_freq = min_freq;
            mc.association_threshold = assoc;
            auto tagger = load_tagger(tagger_path, tagger_seed_path);
            cmd_cxg_mine(ctx, apply_unit_filters(load_units(input), communities, text_types),
                         mc, tagger ? &*tagger : nullptr);
        } else if (cparse->parsed()) {
            need_input("cxg-parse");
            if (constructicon_path.empty())
                throw ConfigError("cxg-parse: --constructicon is required");
            auto tagger = load_tagger(tagger_path, tagger_seed_path);
            cmd_cxg_parse(ctx, apply_unit_filters(load_units(input), communities, text_types),
                          constructicon_path, group_by, tagger ? &*tagger : nullptr);
        } else if (net->parsed()) {
            if (net_mode == "jaccard") need_input("network");
            std::vector<corpus::TextUnit> units;
            if (!input.empty())
                units = apply_unit_filters(load_units(input), communities, text_types);
            if (net_mode == "jaccard")
                units = corpus::filter_authors(units, {"spam", "bot"});
            cmd_network(ctx, units, net_mode, threshold, vectors_path);
        } else if (cohorts->parsed()) {
            need_input("cohorts");
            cmd_cohorts(ctx, apply_unit_filters(load_units(input), communities, text_types));
        } else if (olscmd->parsed()) {
            if (table_path.empty() || response.empty() || predictors.empty())
                throw ConfigError("ols: --table, --response and --predictors are required");
            cmd_ols(ctx, table_path, response, predictors);
        } else if (report->parsed()) {
            need_input("report");
            cmd_report(ctx, apply_unit_filters(load_units(input), communities, text_types),
                       specs_path);
        }

        ctx.write_manifest(app.get_subcommands().front()->get_name());
        return kExitOk;
    } catch (const ConfigError& e) {
        ctx.cleanup();
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        ctx.cleanup();
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
