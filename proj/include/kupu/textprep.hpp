#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "kupu/common.hpp"

namespace kupu::textprep {

// Tokens with optional parallel POS tags.
struct TokenizedDoc {
    std::vector<std::string> tokens;
    std::vector<std::string> tags;  // empty or same length as tokens
};

// Strips URLs, u/ and r/ handles and non-Latin characters (keeping
// diacritics, so macronised vowels survive), then lowercases.
std::string normalize(std::string_view text);

// Whitespace-and-punctuation tokenizer. Punctuation-only runs are dropped.
// Underscores survive (phrase-merged tokens) and the placeholder tokens
// <gpe>/<loc> are kept atomic. Optional stopword removal.
std::vector<std::string> tokenize(std::string_view text,
                                  bool remove_stopwords = false);

bool is_stopword(const std::string& token);

// {name, name with macrons flattened to plain vowels}.
std::set<std::string> expand_macron_variants(const std::string& name);

enum class GazetteerLabel { GPE, LOC };

struct Gazetteer {
    std::set<std::string> entries;  // lowercase, may be multi-word
    GazetteerLabel label = GazetteerLabel::GPE;

    // Loads one lowercase name per line; macron variants are added so that
    // spellings with and without the tohutō both match.
    static Gazetteer load(const std::string& path, GazetteerLabel label);

    std::string placeholder() const {
        return label == GazetteerLabel::GPE ? "<gpe>" : "<loc>";
    }
};

// Longest-match-first replacement of gazetteer n-grams with placeholder
// tokens. Multi-word names are matched before shorter ones.
std::vector<std::string> mask_entities(const std::vector<std::string>& tokens,
                                       const std::vector<Gazetteer>& gazetteers);

// Collocation model. A bigram (a,b) is merged to "a_b" when
//   score(a,b) = (count(ab) - min_count) * V / (count(a) * count(b))
// reaches the threshold, V being the vocabulary size. Applying the
// procedure twice yields trigrams.
struct PhraseModel {
    std::unordered_map<std::string, int64_t> unigrams;
    std::map<std::pair<std::string, std::string>, int64_t> bigrams;
    // non-empty when loaded from file: replays stored merge decisions
    std::set<std::pair<std::string, std::string>> forced_merges;
    int64_t min_count = 1;
    double threshold = 50.0;
    int pass = 1;  // 1 = bigram stage, 2 = trigram stage

    double score(const std::string& a, const std::string& b) const;
    bool should_merge(const std::string& a, const std::string& b) const;

    void save(std::ostream& out) const;
    static PhraseModel load(std::istream& in, int64_t min_count,
                            double threshold);
};

PhraseModel learn_phrases(const std::vector<std::vector<std::string>>& corpus,
                          int64_t min_count, double threshold);

// Greedy left-to-right merge; a merged pair consumes both tokens.
std::vector<std::string> apply_phrases(const std::vector<std::string>& tokens,
                                       const PhraseModel& model);

// Coarse tagset consumed by the variables and construction modules:
// NN NNS VB VBD VBN VBG JJ RB IN DET PRP MOD OTHER
extern const std::vector<std::string> kTagset;

// Averaged perceptron tagger over the coarse tagset, with a closed-class
// lexicon and suffix fallback for unknown words.
class Tagger {
public:
    // Trains on tagged sentences: each sentence is a list of (word, tag).
    void train(const std::vector<std::vector<std::pair<std::string, std::string>>>&
                   sentences,
               int epochs = 8, uint64_t seed = 7);

    std::vector<std::string> tag(const std::vector<std::string>& tokens) const;

    void save(std::ostream& out) const;
    static Tagger load(std::istream& in);

    // Trains from a word/TAG seed-corpus file (one sentence per line).
    static Tagger from_seed_corpus(const std::string& path);

    bool trained() const { return !weights_.empty(); }

private:
    std::string predict(const std::vector<std::string>& features) const;
    static std::vector<std::string> features_at(
        const std::vector<std::string>& tokens, size_t i,
        const std::string& prev, const std::string& prev2);

    std::unordered_map<std::string, std::unordered_map<std::string, double>>
        weights_;  // feature -> tag -> weight
};

// Rule-based fallback used for unknown words and as the final back-off.
std::string suffix_tag(const std::string& word);

TokenizedDoc pos_tag(const std::vector<std::string>& tokens,
                     const Tagger& tagger);

// Non-overlapping chunks; all but the last have exactly max_words tokens.
std::vector<std::vector<std::string>> chunk(const std::vector<std::string>& tokens,
                                            size_t max_words = 500);

}  // namespace kupu::textprep
