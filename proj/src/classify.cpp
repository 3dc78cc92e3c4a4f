#include "kupu/classify.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace kupu::classify {

FeatureVector CountFeaturizer::add(const std::vector<std::string>& tokens) {
    std::map<int, float> counts;
    for (const auto& tok : tokens) {
        auto [it, inserted] = index_.try_emplace(tok, static_cast<int>(names_.size()));
        if (inserted) names_.push_back(tok);
        counts[it->second] += 1.0f;
    }
    FeatureVector fv;
    fv.dim = dim();
    fv.entries.assign(counts.begin(), counts.end());
    return fv;
}

FeatureVector CountFeaturizer::transform(const std::vector<std::string>& tokens) const {
    std::map<int, float> counts;
    for (const auto& tok : tokens) {
        auto it = index_.find(tok);
        if (it != index_.end()) counts[it->second] += 1.0f;
    }
    FeatureVector fv;
    fv.dim = dim();
    fv.entries.assign(counts.begin(), counts.end());
    return fv;
}

FeatureVector featurize_embedding(const std::vector<std::string>& tokens,
                                  const embed::EmbeddingModel& model) {
    FeatureVector fv;
    fv.dim = model.dim();
    std::vector<double> sum(model.dim(), 0.0);
    int64_t hits = 0;
    for (const auto& tok : tokens) {
        int i = model.vocab().find(tok);
        if (i < 0) continue;
        const float* v = model.vector(i);
        for (int d = 0; d < model.dim(); ++d) sum[d] += v[d];
        ++hits;
    }
    fv.oov = hits == 0;
    fv.entries.reserve(model.dim());
    for (int d = 0; d < model.dim(); ++d) {
        float value = hits ? static_cast<float>(sum[d] / hits) : 0.0f;
        fv.entries.emplace_back(d, value);
    }
    return fv;
}

double LinearModel::score(const FeatureVector& x, int cls) const {
    double s = bias[cls];
    const auto& w = weights[cls];
    for (const auto& [i, v] : x.entries) s += w[i] * v;
    return s;
}

int LinearModel::predict(const FeatureVector& x) const {
    int best = 0;
    double best_score = score(x, 0);
    for (int c = 1; c < static_cast<int>(classes.size()); ++c) {
        double s = score(x, c);
        if (s > best_score) {
            best = c;
            best_score = s;
        }
    }
    return best;
}

LinearModel train(const std::vector<FeatureVector>& features,
                  const std::vector<std::string>& labels,
                  const ClassifierConfig& config, uint64_t seed) {
    if (features.size() != labels.size() || features.empty())
        throw DataError("train: features and labels must be non-empty and aligned");

    std::set<std::string> label_set(labels.begin(), labels.end());
    if (label_set.size() < 2)
        throw DataError("train: need at least two classes");

    LinearModel model;
    model.classes.assign(label_set.begin(), label_set.end());
    model.config = config;
    std::map<std::string, int> class_index;
    for (size_t i = 0; i < model.classes.size(); ++i)
        class_index[model.classes[i]] = static_cast<int>(i);

    int dim = 0;
    for (const auto& f : features) dim = std::max(dim, f.dim);
    for (const auto& f : features)
        for (const auto& [i, v] : f.entries)
            dim = std::max(dim, i + 1);
    model.dim = dim;
    model.weights.assign(model.classes.size(), std::vector<double>(dim, 0.0));
    model.bias.assign(model.classes.size(), 0.0);

    std::vector<int> y(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) y[i] = class_index[labels[i]];

    std::vector<size_t> order(features.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    Rng rng(seed);
    const double n = static_cast<double>(features.size());
    int64_t t = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t idx : order) {
            const FeatureVector& x = features[idx];
            double lr = config.learning_rate /
                        (1.0 + static_cast<double>(t) / n);
            ++t;
            for (size_t c = 0; c < model.classes.size(); ++c) {
                double target = y[idx] == static_cast<int>(c) ? 1.0 : -1.0;
                double margin = target * model.score(x, static_cast<int>(c));
                auto& w = model.weights[c];
                // L2 shrink on every step
                double shrink = 1.0 - lr * config.l2;
                if (shrink < 0.0) shrink = 0.0;
                for (const auto& [i, v] : x.entries) w[i] *= shrink;
                if (margin < 1.0) {
                    for (const auto& [i, v] : x.entries)
                        w[i] += lr * target * v;
                    model.bias[c] += lr * target;
                }
            }
        }
    }
    return model;
}

Metrics metrics_from_predictions(const std::vector<std::string>& classes,
                                 const std::vector<int>& gold,
                                 const std::vector<int>& predicted) {
    if (gold.size() != predicted.size() || gold.empty())
        throw DataError("metrics: gold and predicted must be non-empty and aligned");
    const size_t k = classes.size();
    Metrics m;
    m.classes = classes;
    m.confusion.assign(k, std::vector<int64_t>(k, 0));
    for (size_t i = 0; i < gold.size(); ++i)
        ++m.confusion[gold[i]][predicted[i]];

    double macro_sum = 0.0;
    int64_t macro_n = 0;
    double weighted_sum = 0.0;
    int64_t total_support = 0;

    for (size_t c = 0; c < k; ++c) {
        int64_t tp = m.confusion[c][c];
        int64_t support = 0, predicted_as = 0;
        for (size_t j = 0; j < k; ++j) {
            support += m.confusion[c][j];
            predicted_as += m.confusion[j][c];
        }
        ClassMetrics cm;
        cm.label = classes[c];
        cm.support = support;
        if (support == 0 && predicted_as == 0) {
            // no truth and no predictions: rendered "-"
            m.per_class.push_back(cm);
            continue;
        }
        double precision = predicted_as ? static_cast<double>(tp) / predicted_as : 0.0;
        double recall = support ? static_cast<double>(tp) / support : 0.0;
        double f1 = (precision + recall) > 0.0
                        ? 2.0 * precision * recall / (precision + recall)
                        : 0.0;
        cm.precision = precision;
        cm.recall = recall;
        cm.f1 = f1;
        m.per_class.push_back(cm);
        macro_sum += f1;
        ++macro_n;
        weighted_sum += f1 * static_cast<double>(support);
        total_support += support;
    }
    m.macro_f1 = macro_n ? macro_sum / static_cast<double>(macro_n) : 0.0;
    m.weighted_f1 =
        total_support ? weighted_sum / static_cast<double>(total_support) : 0.0;
    return m;
}

Metrics evaluate(const LinearModel& model,
                 const std::vector<FeatureVector>& features,
                 const std::vector<std::string>& labels) {
    if (features.empty() || features.size() != labels.size())
        throw DataError("evaluate: empty or misaligned test set");
    std::map<std::string, int> class_index;
    for (size_t i = 0; i < model.classes.size(); ++i)
        class_index[model.classes[i]] = static_cast<int>(i);
    std::vector<int> gold(labels.size()), predicted(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        auto it = class_index.find(labels[i]);
        if (it == class_index.end())
            throw DataError("evaluate: unseen label " + labels[i]);
        gold[i] = it->second;
        predicted[i] = model.predict(features[i]);
    }
    return metrics_from_predictions(model.classes, gold, predicted);
}

void write_metrics_csv(std::ostream& out, const Metrics& m) {
    out << "class,precision,recall,f1,support\n";
    auto cell = [](const std::optional<double>& v) {
        return v ? format_fixed(*v, 6) : std::string("-");
    };
    for (const auto& cm : m.per_class)
        out << csv_field(cm.label) << ',' << cell(cm.precision) << ','
            << cell(cm.recall) << ',' << cell(cm.f1) << ',' << cm.support << '\n';
    int64_t total = 0;
    for (const auto& cm : m.per_class) total += cm.support;
    out << "macro_avg,,," << format_fixed(m.macro_f1, 6) << ',' << total << '\n';
    out << "weighted_avg,,," << format_fixed(m.weighted_f1, 6) << ',' << total
        << '\n';
}

std::vector<std::pair<int, double>> top_features(const LinearModel& model,
                                                 const std::string& cls,
                                                 size_t k) {
    auto it = std::find(model.classes.begin(), model.classes.end(), cls);
    if (it == model.classes.end())
        throw DataError("top_features: unknown class " + cls);
    const auto& w = model.weights[it - model.classes.begin()];
    std::vector<std::pair<int, double>> ranked;
    ranked.reserve(w.size());
    for (size_t i = 0; i < w.size(); ++i)
        ranked.emplace_back(static_cast<int>(i), w[i]);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

void LinearModel::save(std::ostream& out) const {
    out << "classes";
    for (const auto& c : classes) out << ' ' << c;
    out << "\ndim " << dim << "\nfeaturizer " << featurizer_id << '\n';
    for (size_t c = 0; c < classes.size(); ++c) {
        out << "bias " << format_double(bias[c]) << '\n';
        for (int i = 0; i < dim; ++i)
            out << format_double(weights[c][i]) << (i + 1 == dim ? '\n' : ' ');
    }
}

LinearModel LinearModel::load(std::istream& in) {
    LinearModel m;
    std::string line;
    if (!std::getline(in, line) || line.rfind("classes ", 0) != 0)
        throw FormatError("model file: missing classes header");
    for (const auto& c : split_ws(line.substr(8))) m.classes.push_back(c);
    if (!std::getline(in, line) || line.rfind("dim ", 0) != 0)
        throw FormatError("model file: missing dim header");
    m.dim = std::stoi(line.substr(4));
    if (!std::getline(in, line) || line.rfind("featurizer ", 0) != 0)
        throw FormatError("model file: missing featurizer header");
    m.featurizer_id = trim(line.substr(11));
    for (size_t c = 0; c < m.classes.size(); ++c) {
        if (!std::getline(in, line) || line.rfind("bias ", 0) != 0)
            throw FormatError("model file: missing bias row");
        m.bias.push_back(std::stod(line.substr(5)));
        if (!std::getline(in, line))
            throw FormatError("model file: missing weight row");
        auto values = split_ws(line);
        if (static_cast<int>(values.size()) != m.dim)
            throw FormatError("model file: weight row length mismatch");
        std::vector<double> w(m.dim);
        for (int i = 0; i < m.dim; ++i) w[i] = std::stod(values[i]);
        m.weights.push_back(std::move(w));
    }
    return m;
}

}  // namespace kupu::classify
