#include "kupu/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace kupu::textprep {

static bool looks_like_url(std::string_view chunk) {
    return chunk.rfind("http://", 0) == 0 || chunk.rfind("https://", 0) == 0 ||
           chunk.rfind("www.", 0) == 0;
}

static bool is_handle(std::string_view chunk) {
    if (chunk.rfind("u/", 0) == 0 || chunk.rfind("r/", 0) == 0) return true;
    // also the fully qualified forms /u/name and /r/name
    if (chunk.rfind("/u/", 0) == 0 || chunk.rfind("/r/", 0) == 0) return true;
    return false;
}

std::string normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool first = true;
    for (const auto& chunk : split_ws(text)) {
        if (looks_like_url(chunk) || is_handle(chunk)) continue;
        std::string kept;
        size_t i = 0;
        while (i < chunk.size()) {
            uint32_t cp = utf8_decode(chunk, i);
            if (cp < 0x80 || is_latin_letter(cp)) utf8_encode(cp, kept);
        }
        if (kept.empty()) continue;
        if (!first) out += ' ';
        out += kept;
        first = false;
    }
    return utf8_to_lower(out);
}

// Small function-word list; enough for the optional stopword flag without
// pulling in an external resource.
static const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "a",    "an",   "and",  "are",  "as",   "at",   "be",   "but",
        "by",   "for",  "from", "had",  "has",  "have", "he",   "her",
        "his",  "i",    "if",   "in",   "is",   "it",   "its",  "of",
        "on",   "or",   "she",  "so",   "that", "the",  "their", "them",
        "they", "this", "to",   "was",  "we",   "were", "with", "you"};
    return words;
}

bool is_stopword(const std::string& token) {
    return stopwords().count(token) > 0;
}

static bool is_word_cp(uint32_t cp) {
    if (cp == '_') return true;
    if (cp >= '0' && cp <= '9') return true;
    return is_latin_letter(cp);
}

std::vector<std::string> tokenize(std::string_view text, bool remove_stopwords) {
    std::vector<std::string> tokens;
    std::string current;
    size_t i = 0;
    auto flush = [&] {
        if (!current.empty()) {
            if (!remove_stopwords || !is_stopword(current))
                tokens.push_back(current);
            current.clear();
        }
    };
    while (i < text.size()) {
        // keep <gpe>/<loc> placeholders atomic
        if (text[i] == '<') {
            size_t close = text.find('>', i);
            if (close != std::string_view::npos && close - i <= 8) {
                std::string ph(text.substr(i, close - i + 1));
                if (ph == "<gpe>" || ph == "<loc>") {
                    flush();
                    tokens.push_back(ph);
                    i = close + 1;
                    continue;
                }
            }
        }
        size_t before = i;
        uint32_t cp = utf8_decode(text, i);
        if (is_word_cp(cp)) {
            current.append(text.substr(before, i - before));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::set<std::string> expand_macron_variants(const std::string& name) {
    static const std::map<uint32_t, char> flat = {
        {0x101, 'a'}, {0x113, 'e'}, {0x12B, 'i'}, {0x14D, 'o'}, {0x16B, 'u'}};
    std::string plain;
    bool changed = false;
    size_t i = 0;
    while (i < name.size()) {
        uint32_t cp = utf8_decode(name, i);
        auto it = flat.find(cp);
        if (it != flat.end()) {
            plain += it->second;
            changed = true;
        } else {
            utf8_encode(cp, plain);
        }
    }
    std::set<std::string> out{name};
    if (changed) out.insert(plain);
    return out;
}

Gazetteer Gazetteer::load(const std::string& path, GazetteerLabel label) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open gazetteer " + path);
    Gazetteer g;
    g.label = label;
    std::string line;
    while (std::getline(in, line)) {
        std::string name = trim(line);
        if (name.empty() || name[0] == '#') continue;
        for (auto& variant : expand_macron_variants(utf8_to_lower(name)))
            g.entries.insert(variant);
    }
    if (g.entries.empty()) throw FormatError("empty gazetteer " + path);
    return g;
}

std::vector<std::string> mask_entities(const std::vector<std::string>& tokens,
                                       const std::vector<Gazetteer>& gazetteers) {
    size_t max_len = 1;
    for (const auto& g : gazetteers)
        for (const auto& e : g.entries)
            max_len = std::max(max_len, split_ws(e).size());

    std::vector<std::string> out;
    out.reserve(tokens.size());
    size_t i = 0;
    while (i < tokens.size()) {
        bool matched = false;
        for (size_t len = std::min(max_len, tokens.size() - i); len >= 1 && !matched; --len) {
            std::string candidate;
            for (size_t k = 0; k < len; ++k) {
                if (k) candidate += ' ';
                candidate += tokens[i + k];
            }
            for (const auto& g : gazetteers) {
                if (g.entries.count(candidate)) {
                    out.push_back(g.placeholder());
                    i += len;
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            out.push_back(tokens[i]);
            ++i;
        }
    }
    return out;
}

double PhraseModel::score(const std::string& a, const std::string& b) const {
    auto ab = bigrams.find({a, b});
    if (ab == bigrams.end()) return 0.0;
    auto ca = unigrams.find(a);
    auto cb = unigrams.find(b);
    if (ca == unigrams.end() || cb == unigrams.end()) return 0.0;
    double v = static_cast<double>(unigrams.size());
    return (static_cast<double>(ab->second) - static_cast<double>(min_count)) *
           v /
           (static_cast<double>(ca->second) * static_cast<double>(cb->second));
}

bool PhraseModel::should_merge(const std::string& a, const std::string& b) const {
    if (!forced_merges.empty()) return forced_merges.count({a, b}) > 0;
    auto ab = bigrams.find({a, b});
    if (ab == bigrams.end() || ab->second < min_count) return false;
    return score(a, b) >= threshold;
}

PhraseModel learn_phrases(const std::vector<std::vector<std::string>>& corpus,
                          int64_t min_count, double threshold) {
    if (min_count < 1) throw DataError("learn_phrases: min_count must be >= 1");
    PhraseModel m;
    m.min_count = min_count;
    m.threshold = threshold;
    for (const auto& doc : corpus) {
        for (size_t i = 0; i < doc.size(); ++i) {
            ++m.unigrams[doc[i]];
            if (i + 1 < doc.size()) ++m.bigrams[{doc[i], doc[i + 1]}];
        }
    }
    return m;
}

std::vector<std::string> apply_phrases(const std::vector<std::string>& tokens,
                                       const PhraseModel& model) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    size_t i = 0;
    while (i < tokens.size()) {
        if (i + 1 < tokens.size() && model.should_merge(tokens[i], tokens[i + 1])) {
            out.push_back(tokens[i] + "_" + tokens[i + 1]);
            i += 2;
        } else {
            out.push_back(tokens[i]);
            ++i;
        }
    }
    return out;
}

void PhraseModel::save(std::ostream& out) const {
    for (const auto& [pair, count] : bigrams) {
        if (count < min_count) continue;
        double s = score(pair.first, pair.second);
        if (s < threshold) continue;
        out << pair.first << ' ' << pair.second << ' ' << count << ' '
            << format_double(s) << '\n';
    }
}

PhraseModel PhraseModel::load(std::istream& in, int64_t min_count,
                              double threshold) {
    // the saved file lists the merged pairs; a loaded model replays
    // exactly those decisions
    PhraseModel m;
    m.min_count = min_count;
    m.threshold = threshold;
    std::string line;
    while (std::getline(in, line)) {
        auto parts = split_ws(line);
        if (parts.size() != 4) continue;
        m.bigrams[{parts[0], parts[1]}] = std::stoll(parts[2]);
        m.forced_merges.insert({parts[0], parts[1]});
    }
    return m;
}

const std::vector<std::string> kTagset = {"NN", "NNS", "VB",  "VBD", "VBN",
                                          "VBG", "JJ", "RB",  "IN",  "DET",
                                          "PRP", "MOD", "OTHER"};

// Closed-class lexicon: unambiguous function words.
static const std::unordered_map<std::string, std::string>& closed_class() {
    static const std::unordered_map<std::string, std::string> lex = {
        {"the", "DET"},   {"a", "DET"},      {"an", "DET"},
        {"this", "DET"},  {"that", "DET"},   {"these", "DET"},
        {"those", "DET"}, {"his", "DET"},    {"her", "DET"},
        {"its", "DET"},   {"their", "DET"},  {"my", "DET"},
        {"your", "DET"},  {"our", "DET"},    {"some", "DET"},
        {"i", "PRP"},     {"you", "PRP"},    {"he", "PRP"},
        {"she", "PRP"},   {"it", "PRP"},     {"we", "PRP"},
        {"they", "PRP"},  {"me", "PRP"},     {"him", "PRP"},
        {"them", "PRP"},  {"us", "PRP"},     {"in", "IN"},
        {"on", "IN"},     {"at", "IN"},      {"of", "IN"},
        {"for", "IN"},    {"with", "IN"},    {"by", "IN"},
        {"from", "IN"},   {"to", "IN"},      {"into", "IN"},
        {"over", "IN"},   {"under", "IN"},   {"about", "IN"},
        {"after", "IN"},  {"before", "IN"},  {"between", "IN"},
        {"through", "IN"},{"against", "IN"},
        {"can", "MOD"},   {"could", "MOD"},  {"will", "MOD"},
        {"would", "MOD"}, {"may", "MOD"},    {"might", "MOD"},
        {"must", "MOD"},  {"shall", "MOD"},  {"should", "MOD"},
        {"not", "RB"},    {"very", "RB"},    {"never", "RB"},
        {"always", "RB"}, {"often", "RB"},   {"again", "RB"}};
    return lex;
}

std::string suffix_tag(const std::string& w) {
    auto it = closed_class().find(w);
    if (it != closed_class().end()) return it->second;
    auto ends = [&](std::string_view suf) {
        return w.size() > suf.size() &&
               w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (!w.empty() && std::isdigit(static_cast<unsigned char>(w[0]))) return "OTHER";
    if (ends("ing")) return "VBG";
    if (ends("ed")) return "VBD";
    if (ends("ly")) return "RB";
    if (ends("tion") || ends("ment") || ends("ness") || ends("ity")) return "NN";
    if (ends("ous") || ends("ful") || ends("ive") || ends("ical") || ends("able"))
        return "JJ";
    if (ends("s") && !ends("ss") && !ends("us") && !ends("is")) return "NNS";
    return "NN";
}

std::vector<std::string> Tagger::features_at(
    const std::vector<std::string>& tokens, size_t i, const std::string& prev,
    const std::string& prev2) {
    const std::string& w = tokens[i];
    std::string suffix3 = w.size() > 3 ? w.substr(w.size() - 3) : w;
    std::string suffix2 = w.size() > 2 ? w.substr(w.size() - 2) : w;
    std::vector<std::string> feats;
    feats.reserve(10);
    feats.push_back("bias");
    feats.push_back("w=" + w);
    feats.push_back("suf3=" + suffix3);
    feats.push_back("suf2=" + suffix2);
    feats.push_back("pre1=" + (w.empty() ? std::string() : w.substr(0, 1)));
    feats.push_back("t-1=" + prev);
    feats.push_back("t-2=" + prev2);
    feats.push_back("t-1w=" + prev + "|" + w);
    feats.push_back("w-1=" + (i > 0 ? tokens[i - 1] : std::string("-S-")));
    feats.push_back("w+1=" + (i + 1 < tokens.size() ? tokens[i + 1]
                                                    : std::string("-E-")));
    return feats;
}

std::string Tagger::predict(const std::vector<std::string>& features) const {
    std::unordered_map<std::string, double> scores;
    for (const auto& f : features) {
        auto it = weights_.find(f);
        if (it == weights_.end()) continue;
        for (const auto& [tag, w] : it->second) scores[tag] += w;
    }
    if (scores.empty()) return "";
    std::string best;
    double best_score = 0.0;
    for (const auto& tag : kTagset) {
        auto it = scores.find(tag);
        double s = it == scores.end() ? 0.0 : it->second;
        if (best.empty() || s > best_score) {
            best = tag;
            best_score = s;
        }
    }
    return best;
}

void Tagger::train(
    const std::vector<std::vector<std::pair<std::string, std::string>>>& sentences,
    int epochs, uint64_t seed) {
    // averaged perceptron: accumulate weight * survival time
    std::unordered_map<std::string, std::unordered_map<std::string, double>> w;
    std::unordered_map<std::string, std::unordered_map<std::string, double>> totals;
    std::unordered_map<std::string, std::unordered_map<std::string, int64_t>> stamps;
    int64_t step = 0;

    auto bump = [&](const std::string& feat, const std::string& tag, double delta) {
        auto& cell = w[feat][tag];
        auto& total = totals[feat][tag];
        auto& stamp = stamps[feat][tag];
        total += static_cast<double>(step - stamp) * cell;
        stamp = step;
        cell += delta;
    };

    std::vector<size_t> order(sentences.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t idx : order) {
            const auto& sent = sentences[idx];
            std::vector<std::string> tokens(sent.size());
            for (size_t i = 0; i < sent.size(); ++i) tokens[i] = sent[i].first;
            std::string prev = "-S-", prev2 = "-S2-";
            for (size_t i = 0; i < sent.size(); ++i) {
                ++step;
                auto feats = features_at(tokens, i, prev, prev2);
                std::string guess;
                {
                    std::unordered_map<std::string, double> scores;
                    for (const auto& f : feats) {
                        auto it = w.find(f);
                        if (it == w.end()) continue;
                        for (const auto& [tag, wt] : it->second)
                            scores[tag] += wt;
                    }
                    double best = 0.0;
                    for (const auto& tag : kTagset) {
                        auto it = scores.find(tag);
                        double s = it == scores.end() ? 0.0 : it->second;
                        if (guess.empty() || s > best) {
                            guess = tag;
                            best = s;
                        }
                    }
                }
                const std::string& truth = sent[i].second;
                if (guess != truth) {
                    for (const auto& f : feats) {
                        bump(f, truth, 1.0);
                        bump(f, guess, -1.0);
                    }
                }
                prev2 = prev;
                prev = guess;
            }
        }
    }

    weights_.clear();
    for (auto& [feat, tags] : w) {
        for (auto& [tag, wt] : tags) {
            double total = totals[feat][tag] +
                           static_cast<double>(step - stamps[feat][tag]) * wt;
            double avg = total / static_cast<double>(step);
            if (avg != 0.0) weights_[feat][tag] = avg;
        }
    }
}

std::vector<std::string> Tagger::tag(const std::vector<std::string>& tokens) const {
    std::vector<std::string> tags(tokens.size());
    std::string prev = "-S-", prev2 = "-S2-";
    for (size_t i = 0; i < tokens.size(); ++i) {
        std::string t;
        auto closed = closed_class().find(tokens[i]);
        if (closed != closed_class().end()) {
            t = closed->second;
        } else if (!weights_.empty()) {
            t = predict(features_at(tokens, i, prev, prev2));
        }
        if (t.empty()) t = suffix_tag(tokens[i]);
        tags[i] = t;
        prev2 = prev;
        prev = t;
    }
    return tags;
}

void Tagger::save(std::ostream& out) const {
    std::map<std::string, std::map<std::string, double>> sorted;
    for (const auto& [feat, tags] : weights_)
        for (const auto& [tag, w] : tags) sorted[feat][tag] = w;
    for (const auto& [feat, tags] : sorted)
        for (const auto& [tag, w] : tags)
            out << feat << '\t' << tag << '\t' << format_double(w) << '\n';
}

Tagger Tagger::load(std::istream& in) {
    Tagger t;
    std::string line;
    while (std::getline(in, line)) {
        auto parts = split(line, '\t');
        if (parts.size() != 3) continue;
        t.weights_[parts[0]][parts[1]] = std::stod(parts[2]);
    }
    return t;
}

Tagger Tagger::from_seed_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tagger seed corpus " + path);
    std::vector<std::vector<std::pair<std::string, std::string>>> sentences;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::pair<std::string, std::string>> sent;
        for (const auto& item : split_ws(line)) {
            auto slash = item.rfind('/');
            if (slash == std::string::npos) continue;
            sent.emplace_back(item.substr(0, slash), item.substr(slash + 1));
        }
        if (!sent.empty()) sentences.push_back(std::move(sent));
    }
    if (sentences.empty()) throw FormatError("no tagged sentences in " + path);
    Tagger t;
    t.train(sentences);
    return t;
}

TokenizedDoc pos_tag(const std::vector<std::string>& tokens, const Tagger& tagger) {
    TokenizedDoc doc;
    doc.tokens = tokens;
    doc.tags = tagger.tag(tokens);
    return doc;
}

std::vector<std::vector<std::string>> chunk(const std::vector<std::string>& tokens,
                                            size_t max_words) {
    if (max_words < 1) throw DataError("chunk: max_words must be >= 1");
    std::vector<std::vector<std::string>> chunks;
    for (size_t i = 0; i < tokens.size(); i += max_words) {
        size_t end = std::min(tokens.size(), i + max_words);
        chunks.emplace_back(tokens.begin() + i, tokens.begin() + end);
    }
    return chunks;
}

}  // namespace kupu::textprep
