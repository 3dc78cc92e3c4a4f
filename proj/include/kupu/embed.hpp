#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kupu/common.hpp"

namespace kupu::embed {

enum class Arch { cbow, sgns };

std::string to_string(Arch a);

struct TrainConfig {
    int dim = 300;
    int window = 5;
    int min_count = 5;
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025;   // classic default; 0.05 works for CBOW
    double subsample = 1e-4;        // frequent-word subsampling threshold
    double unigram_power = 0.75;    // negative-sampling noise exponent
    Arch arch = Arch::sgns;
    uint64_t seed = 1;
};

struct Vocab {
    std::vector<std::string> words;   // frequency-sorted, ties by token
    std::vector<int64_t> counts;
    std::unordered_map<std::string, int> index;
    int64_t total_tokens = 0;         // sum of kept-token counts

    int find(const std::string& w) const {
        auto it = index.find(w);
        return it == index.end() ? -1 : it->second;
    }
    size_t size() const { return words.size(); }
};

// Tokens with frequency >= min_count, sorted by descending frequency.
Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus,
                  int min_count);

class EmbeddingModel {
public:
    EmbeddingModel() = default;

    const Vocab& vocab() const { return vocab_; }
    int dim() const { return dim_; }
    const TrainConfig& config() const { return config_; }

    // Input (query) vector of a token by vocabulary index.
    const float* vector(int index) const { return &syn0_[static_cast<size_t>(index) * dim_]; }
    float* vector(int index) { return &syn0_[static_cast<size_t>(index) * dim_]; }

    double cosine(const std::string& a, const std::string& b) const;

    struct Neighbour {
        std::string token;
        double cosine;
    };
    std::vector<Neighbour> most_similar(const std::string& token, size_t k) const;

    // Ranks candidates by cosine to vec(a) + vec(b) - vec(c), excluding
    // a, b and c.
    std::vector<Neighbour> analogy(const std::string& a, const std::string& b,
                                   const std::string& c, size_t k) const;

    struct PairEvaluation {
        double mean_cosine = 0.0;
        size_t oov_pairs = 0;
        std::vector<std::pair<std::pair<std::string, std::string>,
                              std::optional<double>>> per_pair;
    };
    PairEvaluation evaluate_pairs(
        const std::vector<std::pair<std::string, std::string>>& pairs) const;

    // Text format: "<vocab_size> <dim>" then one token + dim reals per line.
    void save_text(std::ostream& out) const;
    static EmbeddingModel load_text(std::istream& in);
    // Binary variant with the same logical layout.
    void save_binary(std::ostream& out) const;
    static EmbeddingModel load_binary(std::istream& in);

    void save_file(const std::string& path, bool binary = false) const;
    static EmbeddingModel load_file(const std::string& path);

    friend EmbeddingModel train(const std::vector<std::vector<std::string>>& corpus,
                                const TrainConfig& config,
                                const EmbeddingModel* init);

private:
    Vocab vocab_;
    int dim_ = 0;
    std::vector<float> syn0_;  // input vectors
    std::vector<float> syn1_;  // output vectors (negative-sampling layer)
    TrainConfig config_;
};

// Trains a model with negative sampling (single-threaded, deterministic
// under the seed). When `init` is given, vectors of shared-vocabulary
// tokens are copied before training and new tokens are randomly
// initialized; dimensions must match.
EmbeddingModel train(const std::vector<std::vector<std::string>>& corpus,
                     const TrainConfig& config,
                     const EmbeddingModel* init = nullptr);

// Two whitespace-separated tokens per line; '#' lines are comments.
std::vector<std::pair<std::string, std::string>> load_pair_list(
    const std::string& path);

}  // namespace kupu::embed
