#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kupu/common.hpp"
#include "kupu/embed.hpp"

namespace kupu::classify {

// Sparse feature vector: (index, value) pairs, index < dim. Dense vectors
// use contiguous indices 0..dim-1.
struct FeatureVector {
    std::vector<std::pair<int, float>> entries;
    int dim = 0;
    bool oov = false;  // embedding featurizer found no in-vocabulary token
};

// Maps tokens to feature indices, growing as documents arrive.
class CountFeaturizer {
public:
    FeatureVector add(const std::vector<std::string>& tokens);       // grows vocab
    FeatureVector transform(const std::vector<std::string>& tokens) const;
    int dim() const { return static_cast<int>(names_.size()); }
    const std::string& name(int index) const { return names_[index]; }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::unordered_map<std::string, int> index_;
    std::vector<std::string> names_;
};

// Mean of in-vocabulary token vectors; zero vector (flagged) when none.
FeatureVector featurize_embedding(const std::vector<std::string>& tokens,
                                  const embed::EmbeddingModel& model);

struct ClassifierConfig {
    int epochs = 5;
    double learning_rate = 0.1;  // decays as lr0 / (1 + t/n)
    double l2 = 1e-4;
};

struct LinearModel {
    std::vector<std::string> classes;
    int dim = 0;
    std::vector<std::vector<double>> weights;  // one row per class
    std::vector<double> bias;
    ClassifierConfig config;
    std::string featurizer_id = "counts";

    int predict(const FeatureVector& x) const;  // index into classes
    double score(const FeatureVector& x, int cls) const;

    void save(std::ostream& out) const;
    static LinearModel load(std::istream& in);
};

// One-vs-rest hinge-loss SGD with L2 regularization; deterministic under
// the seed.
LinearModel train(const std::vector<FeatureVector>& features,
                  const std::vector<std::string>& labels,
                  const ClassifierConfig& config, uint64_t seed);

struct ClassMetrics {
    std::string label;
    std::optional<double> precision;  // nullopt = zero predictions & support
    std::optional<double> recall;
    std::optional<double> f1;
    int64_t support = 0;
};

struct Metrics {
    std::vector<ClassMetrics> per_class;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    // confusion[i][j]: true class i predicted as class j
    std::vector<std::vector<int64_t>> confusion;
    std::vector<std::string> classes;
};

Metrics evaluate(const LinearModel& model,
                 const std::vector<FeatureVector>& features,
                 const std::vector<std::string>& labels);

// Metrics from gold/predicted label pairs (shared by evaluate and tests).
Metrics metrics_from_predictions(const std::vector<std::string>& classes,
                                 const std::vector<int>& gold,
                                 const std::vector<int>& predicted);

void write_metrics_csv(std::ostream& out, const Metrics& m);

// k largest-weight features of a class, descending; ties broken by
// feature index.
std::vector<std::pair<int, double>> top_features(const LinearModel& model,
                                                 const std::string& cls,
                                                 size_t k);

}  // namespace kupu::classify
