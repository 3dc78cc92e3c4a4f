#include "kupu/embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace kupu::embed {

std::string to_string(Arch a) { return a == Arch::cbow ? "cbow" : "sgns"; }

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus,
                  int min_count) {
    if (min_count < 1) throw DataError("build_vocab: min_count must be >= 1");
    std::unordered_map<std::string, int64_t> counts;
    for (const auto& doc : corpus)
        for (const auto& tok : doc) ++counts[tok];

    std::vector<std::pair<std::string, int64_t>> kept;
    for (auto& [tok, c] : counts)
        if (c >= min_count) kept.emplace_back(tok, c);
    if (kept.empty()) throw DataError("build_vocab: empty vocabulary");

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab v;
    v.words.reserve(kept.size());
    v.counts.reserve(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) {
        v.words.push_back(kept[i].first);
        v.counts.push_back(kept[i].second);
        v.index[kept[i].first] = static_cast<int>(i);
        v.total_tokens += kept[i].second;
    }
    return v;
}

namespace {

constexpr int kExpTableSize = 1000;
constexpr double kMaxExp = 6.0;

const std::vector<float>& sigmoid_table() {
    static const std::vector<float> table = [] {
        std::vector<float> t(kExpTableSize);
        for (int i = 0; i < kExpTableSize; ++i) {
            double x = (static_cast<double>(i) / kExpTableSize * 2.0 - 1.0) * kMaxExp;
            double e = std::exp(x);
            t[i] = static_cast<float>(e / (e + 1.0));
        }
        return t;
    }();
    return table;
}

inline float sigmoid(float x) {
    if (x >= kMaxExp) return 1.0f;
    if (x <= -kMaxExp) return 0.0f;
    int idx = static_cast<int>((x + kMaxExp) * (kExpTableSize / kMaxExp / 2.0));
    return sigmoid_table()[std::clamp(idx, 0, kExpTableSize - 1)];
}

// Cumulative noise distribution over the vocabulary, f^power.
struct NoiseSampler {
    std::vector<double> cdf;

    NoiseSampler(const Vocab& vocab, double power) {
        cdf.resize(vocab.size());
        double total = 0.0;
        for (size_t i = 0; i < vocab.size(); ++i) {
            total += std::pow(static_cast<double>(vocab.counts[i]), power);
            cdf[i] = total;
        }
        for (auto& c : cdf) c /= total;
    }

    int sample(Rng& rng) const {
        double u = rng.uniform_real();
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) return static_cast<int>(cdf.size()) - 1;
        return static_cast<int>(it - cdf.begin());
    }
};

}  // namespace

EmbeddingModel train(const std::vector<std::vector<std::string>>& corpus,
                     const TrainConfig& config, const EmbeddingModel* init) {
    EmbeddingModel model;
    model.config_ = config;
    model.dim_ = config.dim;
    model.vocab_ = build_vocab(corpus, config.min_count);
    const Vocab& vocab = model.vocab_;
    const size_t vsize = vocab.size();
    const int dim = config.dim;

    if (init && init->dim() != dim)
        throw DataError("train: init model dimension " +
                        std::to_string(init->dim()) + " != config dim " +
                        std::to_string(dim));

    Rng rng(config.seed);
    model.syn0_.resize(vsize * dim);
    model.syn1_.assign(vsize * dim, 0.0f);
    for (size_t i = 0; i < vsize; ++i) {
        for (int d = 0; d < dim; ++d) {
            model.syn0_[i * dim + d] = static_cast<float>(
                (rng.uniform_real() - 0.5) / dim);
        }
    }
    if (init) {
        for (size_t i = 0; i < vsize; ++i) {
            int j = init->vocab().find(vocab.words[i]);
            if (j < 0) continue;
            std::memcpy(&model.syn0_[i * dim], init->vector(j),
                        sizeof(float) * dim);
            if (!init->syn1_.empty())
                std::memcpy(&model.syn1_[i * dim],
                            &init->syn1_[static_cast<size_t>(j) * dim],
                            sizeof(float) * dim);
        }
    }
    if (config.epochs <= 0) return model;

    // sentence encoding with subsampling probabilities
    std::vector<double> keep_prob(vsize, 1.0);
    if (config.subsample > 0) {
        for (size_t i = 0; i < vsize; ++i) {
            double f = static_cast<double>(vocab.counts[i]) /
                       static_cast<double>(vocab.total_tokens);
            double p = (std::sqrt(f / config.subsample) + 1.0) *
                       (config.subsample / f);
            keep_prob[i] = std::min(1.0, p);
        }
    }

    NoiseSampler noise(vocab, config.unigram_power);
    const double alpha0 = config.learning_rate;
    const int64_t plan = std::max<int64_t>(1, vocab.total_tokens) *
                         std::max(1, config.epochs);
    int64_t processed = 0;
    bool any_pair = false;

    std::vector<float> hidden(dim), grad(dim);
    std::vector<int> sentence;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& doc : corpus) {
            sentence.clear();
            for (const auto& tok : doc) {
                int wi = vocab.find(tok);
                if (wi < 0) continue;
                ++processed;
                if (keep_prob[wi] < 1.0 && rng.uniform_real() > keep_prob[wi])
                    continue;
                sentence.push_back(wi);
            }
            const int slen = static_cast<int>(sentence.size());
            for (int pos = 0; pos < slen; ++pos) {
                double alpha = alpha0 *
                               std::max(0.0001, 1.0 - static_cast<double>(processed) /
                                                          (static_cast<double>(plan) + 1.0));
                int reduce = static_cast<int>(rng.uniform(config.window));
                int lo = std::max(0, pos - config.window + reduce);
                int hi = std::min(slen - 1, pos + config.window - reduce);
                const int center = sentence[pos];

                if (config.arch == Arch::sgns) {
                    for (int c = lo; c <= hi; ++c) {
                        if (c == pos) continue;
                        any_pair = true;
                        const int context = sentence[c];
                        float* v_in = &model.syn0_[static_cast<size_t>(center) * dim];
                        std::fill(grad.begin(), grad.end(), 0.0f);
                        for (int nk = 0; nk <= config.negatives; ++nk) {
                            int target;
                            float label;
                            if (nk == 0) {
                                target = context;
                                label = 1.0f;
                            } else {
                                target = noise.sample(rng);
                                if (target == context) continue;
                                label = 0.0f;
                            }
                            float* v_out =
                                &model.syn1_[static_cast<size_t>(target) * dim];
                            float dot = 0.0f;
                            for (int d = 0; d < dim; ++d) dot += v_in[d] * v_out[d];
                            float g = (label - sigmoid(dot)) *
                                      static_cast<float>(alpha);
                            for (int d = 0; d < dim; ++d) {
                                grad[d] += g * v_out[d];
                                v_out[d] += g * v_in[d];
                            }
                        }
                        for (int d = 0; d < dim; ++d) v_in[d] += grad[d];
                    }
                } else {  // CBOW: mean of context predicts the center word
                    int cw = 0;
                    std::fill(hidden.begin(), hidden.end(), 0.0f);
                    for (int c = lo; c <= hi; ++c) {
                        if (c == pos) continue;
                        const float* v = &model.syn0_[static_cast<size_t>(sentence[c]) * dim];
                        for (int d = 0; d < dim; ++d) hidden[d] += v[d];
                        ++cw;
                    }
                    if (cw == 0) continue;
                    any_pair = true;
                    for (int d = 0; d < dim; ++d) hidden[d] /= static_cast<float>(cw);
                    std::fill(grad.begin(), grad.end(), 0.0f);
                    for (int nk = 0; nk <= config.negatives; ++nk) {
                        int target;
                        float label;
                        if (nk == 0) {
                            target = center;
                            label = 1.0f;
                        } else {
                            target = noise.sample(rng);
                            if (target == center) continue;
                            label = 0.0f;
                        }
                        float* v_out = &model.syn1_[static_cast<size_t>(target) * dim];
                        float dot = 0.0f;
                        for (int d = 0; d < dim; ++d) dot += hidden[d] * v_out[d];
                        float g = (label - sigmoid(dot)) * static_cast<float>(alpha);
                        for (int d = 0; d < dim; ++d) {
                            grad[d] += g * v_out[d];
                            v_out[d] += g * hidden[d];
                        }
                    }
                    for (int c = lo; c <= hi; ++c) {
                        if (c == pos) continue;
                        float* v = &model.syn0_[static_cast<size_t>(sentence[c]) * dim];
                        for (int d = 0; d < dim; ++d) v[d] += grad[d];
                    }
                }
            }
        }
    }
    if (!any_pair)
        throw DataError("train: corpus produced no context pairs");
    return model;
}

static double cosine_raw(const float* a, const float* b, int dim) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int d = 0; d < dim; ++d) {
        dot += static_cast<double>(a[d]) * b[d];
        na += static_cast<double>(a[d]) * a[d];
        nb += static_cast<double>(b[d]) * b[d];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double EmbeddingModel::cosine(const std::string& a, const std::string& b) const {
    int ia = vocab_.find(a);
    if (ia < 0) throw DataError("out-of-vocabulary token: " + a);
    int ib = vocab_.find(b);
    if (ib < 0) throw DataError("out-of-vocabulary token: " + b);
    return cosine_raw(vector(ia), vector(ib), dim_);
}

static std::vector<EmbeddingModel::Neighbour> rank_by_cosine(
    const EmbeddingModel& model, const std::vector<float>& query,
    const std::vector<int>& exclude, size_t k) {
    std::vector<EmbeddingModel::Neighbour> scored;
    const auto& vocab = model.vocab();
    scored.reserve(vocab.size());
    for (size_t i = 0; i < vocab.size(); ++i) {
        if (std::find(exclude.begin(), exclude.end(), static_cast<int>(i)) !=
            exclude.end())
            continue;
        scored.push_back({vocab.words[i],
                          cosine_raw(query.data(), model.vector(static_cast<int>(i)),
                                     model.dim())});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.cosine > b.cosine; });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

std::vector<EmbeddingModel::Neighbour> EmbeddingModel::most_similar(
    const std::string& token, size_t k) const {
    int i = vocab_.find(token);
    if (i < 0) throw DataError("out-of-vocabulary token: " + token);
    std::vector<float> query(vector(i), vector(i) + dim_);
    return rank_by_cosine(*this, query, {i}, k);
}

std::vector<EmbeddingModel::Neighbour> EmbeddingModel::analogy(
    const std::string& a, const std::string& b, const std::string& c,
    size_t k) const {
    int ia = vocab_.find(a), ib = vocab_.find(b), ic = vocab_.find(c);
    for (const auto& [token, idx] :
         {std::pair{a, ia}, std::pair{b, ib}, std::pair{c, ic}})
        if (idx < 0) throw DataError("out-of-vocabulary token: " + token);
    std::vector<float> query(dim_);
    for (int d = 0; d < dim_; ++d)
        query[d] = vector(ia)[d] + vector(ib)[d] - vector(ic)[d];
    return rank_by_cosine(*this, query, {ia, ib, ic}, k);
}

EmbeddingModel::PairEvaluation EmbeddingModel::evaluate_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) const {
    if (pairs.empty()) throw DataError("evaluate_pairs: empty pair list");
    PairEvaluation eval;
    double sum = 0.0;
    size_t scored = 0;
    for (const auto& [a, b] : pairs) {
        if (vocab_.find(a) < 0 || vocab_.find(b) < 0) {
            ++eval.oov_pairs;
            eval.per_pair.push_back({{a, b}, std::nullopt});
            continue;
        }
        double c = cosine(a, b);
        eval.per_pair.push_back({{a, b}, c});
        sum += c;
        ++scored;
    }
    if (scored == 0) throw DataError("evaluate_pairs: every pair is out of vocabulary");
    eval.mean_cosine = sum / static_cast<double>(scored);
    return eval;
}

void EmbeddingModel::save_text(std::ostream& out) const {
    out << vocab_.size() << ' ' << dim_ << '\n';
    for (size_t i = 0; i < vocab_.size(); ++i) {
        out << vocab_.words[i];
        const float* v = vector(static_cast<int>(i));
        for (int d = 0; d < dim_; ++d) out << ' ' << format_double(v[d]);
        out << '\n';
    }
}

static void read_header(std::istream& in, size_t& vsize, int& dim) {
    std::string header;
    if (!std::getline(in, header))
        throw FormatError("embedding file: missing header");
    std::istringstream hs(header);
    if (!(hs >> vsize >> dim) || dim <= 0)
        throw FormatError("embedding file: bad header '" + header + "'");
}

EmbeddingModel EmbeddingModel::load_text(std::istream& in) {
    size_t vsize = 0;
    int dim = 0;
    read_header(in, vsize, dim);
    EmbeddingModel model;
    model.dim_ = dim;
    model.config_.dim = dim;
    model.syn0_.resize(vsize * dim);
    std::string line;
    for (size_t i = 0; i < vsize; ++i) {
        if (!std::getline(in, line))
            throw FormatError("embedding file: truncated at row " +
                              std::to_string(i));
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        model.vocab_.words.push_back(token);
        model.vocab_.counts.push_back(0);
        model.vocab_.index[token] = static_cast<int>(i);
        for (int d = 0; d < dim; ++d) {
            double v;
            if (!(ls >> v))
                throw FormatError("embedding file: short row for '" + token + "'");
            model.syn0_[i * dim + d] = static_cast<float>(v);
        }
    }
    return model;
}

void EmbeddingModel::save_binary(std::ostream& out) const {
    out << vocab_.size() << ' ' << dim_ << '\n';
    for (size_t i = 0; i < vocab_.size(); ++i) {
        out << vocab_.words[i] << ' ';
        out.write(reinterpret_cast<const char*>(vector(static_cast<int>(i))),
                  static_cast<std::streamsize>(sizeof(float) * dim_));
        out << '\n';
    }
}

EmbeddingModel EmbeddingModel::load_binary(std::istream& in) {
    size_t vsize = 0;
    int dim = 0;
    read_header(in, vsize, dim);
    EmbeddingModel model;
    model.dim_ = dim;
    model.config_.dim = dim;
    model.syn0_.resize(vsize * dim);
    for (size_t i = 0; i < vsize; ++i) {
        std::string token;
        char c;
        while (in.get(c) && c != ' ') token += c;
        if (token.empty()) throw FormatError("embedding file: truncated");
        model.vocab_.words.push_back(token);
        model.vocab_.counts.push_back(0);
        model.vocab_.index[token] = static_cast<int>(i);
        in.read(reinterpret_cast<char*>(&model.syn0_[i * dim]),
                static_cast<std::streamsize>(sizeof(float) * dim));
        if (!in) throw FormatError("embedding file: truncated vector row");
        in.get(c);  // trailing newline
    }
    return model;
}

void EmbeddingModel::save_file(const std::string& path, bool binary) const {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot write " + path);
    if (binary)
        save_binary(out);
    else
        save_text(out);
}

EmbeddingModel EmbeddingModel::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    // sniff: text rows never contain control bytes, raw float rows almost
    // always do; fall back to a binary parse if the text parse fails
    std::string header, second;
    std::getline(in, header);
    std::getline(in, second);
    bool looks_binary = false;
    for (unsigned char c : second) {
        if (c < 0x20 && c != '\t' && c != '\r') {
            looks_binary = true;
            break;
        }
    }
    in.clear();
    in.seekg(0);
    if (looks_binary) return load_binary(in);
    try {
        return load_text(in);
    } catch (const FormatError&) {
        in.clear();
        in.seekg(0);
        return load_binary(in);
    }
}

std::vector<std::pair<std::string, std::string>> load_pair_list(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pair list " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto parts = split_ws(line);
        if (parts.size() < 2)
            throw FormatError("pair list " + path + ": bad line '" + line + "'");
        pairs.emplace_back(utf8_to_lower(parts[0]), utf8_to_lower(parts[1]));
    }
    if (pairs.empty()) throw FormatError("pair list " + path + " is empty");
    return pairs;
}

}  // namespace kupu::embed
