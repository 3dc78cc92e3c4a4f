#include "kupu/cxg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace kupu::cxg {

std::string to_string(SlotKind k) {
    switch (k) {
        case SlotKind::lex: return "lex";
        case SlotKind::syn: return "syn";
        case SlotKind::sem: return "sem";
    }
    return "?";
}

static SlotKind slot_kind_from(const std::string& s, const std::string& origin) {
    if (s == "lex") return SlotKind::lex;
    if (s == "syn") return SlotKind::syn;
    if (s == "sem") return SlotKind::sem;
    throw FormatError(origin + ": unknown slot kind '" + s + "'");
}

FeatureSet Construction::feature_set() const {
    bool all_lex = true, all_syn = true;
    for (const auto& s : slots) {
        if (s.kind != SlotKind::lex) all_lex = false;
        if (s.kind != SlotKind::syn) all_syn = false;
    }
    if (all_lex) return FeatureSet::lex_only;
    if (all_syn) return FeatureSet::syn_only;
    return FeatureSet::sem_plus;
}

std::string Construction::repr() const {
    std::string out = "[ ";
    for (size_t i = 0; i < slots.size(); ++i) {
        if (i) out += " -- ";
        out += slots[i].repr();
    }
    out += " ]";
    return out;
}

void Constructicon::save(std::ostream& out) const {
    for (const auto& c : items) {
        out << c.id << '\t';
        for (size_t i = 0; i < c.slots.size(); ++i) {
            if (i) out << ';';
            out << c.slots[i].repr();
        }
        out << '\n';
    }
}

Constructicon Constructicon::load(std::istream& in) {
    Constructicon con;
    con.provenance = "loaded";
    std::set<std::string> ids;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw FormatError("constructicon line " + std::to_string(lineno) +
                              ": expected id<TAB>slots");
        Construction c;
        c.id = trim(line.substr(0, tab));
        if (!ids.insert(c.id).second)
            throw FormatError("constructicon: duplicate id " + c.id);
        for (const auto& part : split(line.substr(tab + 1), ';')) {
            auto colon = part.find(':');
            if (colon == std::string::npos)
                throw FormatError("constructicon line " + std::to_string(lineno) +
                                  ": slot '" + part + "' lacks kind:value");
            Slot s;
            s.kind = slot_kind_from(trim(part.substr(0, colon)), "constructicon");
            s.value = trim(part.substr(colon + 1));
            c.slots.push_back(std::move(s));
        }
        if (c.slots.size() < 2 || c.slots.size() > 4)
            throw FormatError("constructicon: construction " + c.id +
                              " must have 2-4 slots");
        con.items.push_back(std::move(c));
    }
    return con;
}

Constructicon Constructicon::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open constructicon " + path);
    return load(in);
}

std::map<std::string, int> induce_sem_clusters(const embed::EmbeddingModel& model,
                                               int k, uint64_t seed) {
    const auto& vocab = model.vocab();
    if (k < 1 || static_cast<size_t>(k) > vocab.size())
        throw DataError("induce_sem_clusters: k must be in [1, |V|]");
    std::vector<std::vector<double>> points;
    points.reserve(vocab.size());
    for (size_t i = 0; i < vocab.size(); ++i) {
        const float* v = model.vector(static_cast<int>(i));
        points.emplace_back(v, v + model.dim());
    }
    auto res = netstats::kmeans(points, k, seed);
    std::map<std::string, int> clusters;
    for (size_t i = 0; i < vocab.size(); ++i)
        clusters[vocab.words[i]] = res.assignment[i];
    return clusters;
}

void annotate_sem(AnnotatedDoc& doc, const std::map<std::string, int>& clusters) {
    doc.sem.resize(doc.tokens.size());
    for (size_t i = 0; i < doc.tokens.size(); ++i) {
        auto it = clusters.find(doc.tokens[i]);
        doc.sem[i] = it == clusters.end() ? -1 : it->second;
    }
}

static bool slot_holds(const AnnotatedDoc& doc, size_t pos, const Slot& slot) {
    switch (slot.kind) {
        case SlotKind::lex:
            return doc.tokens[pos] == slot.value;
        case SlotKind::syn:
            return doc.tags[pos] == slot.value;
        case SlotKind::sem:
            return doc.sem[pos] >= 0 &&
                   std::to_string(doc.sem[pos]) == slot.value;
    }
    return false;
}

int64_t match(const AnnotatedDoc& doc, const Construction& construction) {
    bool needs_syn = false, needs_sem = false;
    for (const auto& s : construction.slots) {
        if (s.kind == SlotKind::syn) needs_syn = true;
        if (s.kind == SlotKind::sem) needs_sem = true;
    }
    if (needs_syn && doc.tags.size() != doc.tokens.size())
        throw DataError("match: construction " + construction.id +
                        " requires POS tags but the document is untagged");
    if (needs_sem && doc.sem.size() != doc.tokens.size())
        throw DataError("match: construction " + construction.id +
                        " requires semantic ids but the document has none");

    const size_t len = construction.slots.size();
    if (len == 0 || doc.tokens.size() < len) return 0;
    int64_t count = 0;
    for (size_t i = 0; i + len <= doc.tokens.size(); ++i) {
        bool ok = true;
        for (size_t k = 0; k < len && ok; ++k)
            ok = slot_holds(doc, i + k, construction.slots[k]);
        if (ok) ++count;
    }
    return count;
}

std::vector<double> ParseResult::per_thousand(const std::string& group) const {
    std::vector<double> out;
    auto cit = counts.find(group);
    auto tit = tokens.find(group);
    if (cit == counts.end() || tit == tokens.end()) return out;
    double denom = static_cast<double>(std::max<int64_t>(1, tit->second));
    for (int64_t c : cit->second)
        out.push_back(1000.0 * static_cast<double>(c) / denom);
    return out;
}

ParseResult parse_counts(const std::vector<AnnotatedDoc>& docs,
                         const Constructicon& constructicon, GroupBy group_by) {
    ParseResult result;
    for (const auto& c : constructicon.items)
        result.construction_ids.push_back(c.id);
    for (const auto& doc : docs) {
        std::string key = group_by == GroupBy::user
                              ? doc.user
                              : doc.community + "\t" + month_key(doc.created_utc);
        auto [it, inserted] = result.counts.try_emplace(
            key, std::vector<int64_t>(constructicon.items.size(), 0));
        auto& row = it->second;
        for (size_t ci = 0; ci < constructicon.items.size(); ++ci)
            row[ci] += match(doc, constructicon.items[ci]);
        result.tokens[key] += static_cast<int64_t>(doc.tokens.size());
    }
    return result;
}

void write_counts_csv(std::ostream& out, const ParseResult& result) {
    out << "group";
    for (const auto& id : result.construction_ids) out << ',' << csv_field(id);
    out << ",tokens\n";
    for (const auto& [group, row] : result.counts) {
        std::string label = group;
        std::replace(label.begin(), label.end(), '\t', '|');
        out << csv_field(label);
        for (int64_t c : row) out << ',' << c;
        out << ',' << result.tokens.at(group) << '\n';
    }
}

double delta_p(int64_t count_ab, int64_t count_a_first, int64_t count_b_second,
               int64_t total_adjacent) {
    if (count_a_first <= 0) return 0.0;
    double p_given = static_cast<double>(count_ab) /
                     static_cast<double>(count_a_first);
    int64_t not_a = total_adjacent - count_a_first;
    double p_other =
        not_a > 0 ? static_cast<double>(count_b_second - count_ab) /
                        static_cast<double>(not_a)
                  : 0.0;
    return p_given - p_other;
}

namespace {

// Slot realizations of a token position, in deterministic order.
std::vector<Slot> realizations(const AnnotatedDoc& doc, size_t i) {
    std::vector<Slot> out;
    out.push_back({SlotKind::lex, doc.tokens[i]});
    if (doc.tags.size() == doc.tokens.size())
        out.push_back({SlotKind::syn, doc.tags[i]});
    if (doc.sem.size() == doc.tokens.size() && doc.sem[i] >= 0)
        out.push_back({SlotKind::sem, std::to_string(doc.sem[i])});
    return out;
}

struct CandidateStats {
    int64_t freq = 0;
    // spans as (doc index, start position); filled on demand
    std::vector<std::pair<size_t, size_t>> spans;
};

using SlotSeq = std::vector<Slot>;

void enumerate_at(const AnnotatedDoc& doc, size_t doc_idx, size_t pos,
                  int max_len, const std::vector<std::vector<bool>>& claimed,
                  std::map<SlotSeq, CandidateStats>& stats) {
    const size_t n = doc.tokens.size();
    std::vector<SlotSeq> partial{{}};
    for (size_t len = 1; len <= static_cast<size_t>(max_len) && pos + len <= n;
         ++len) {
        size_t at = pos + len - 1;
        if (claimed[doc_idx][at]) break;
        auto reals = realizations(doc, at);
        std::vector<SlotSeq> next;
        next.reserve(partial.size() * reals.size());
        for (const auto& seq : partial) {
            for (const auto& slot : reals) {
                SlotSeq ext = seq;
                ext.push_back(slot);
                next.push_back(std::move(ext));
            }
        }
        partial = std::move(next);
        if (len >= 2) {
            for (const auto& seq : partial) {
                auto& cs = stats[seq];
                ++cs.freq;
                cs.spans.emplace_back(doc_idx, pos);
            }
        }
    }
}

}  // namespace

Constructicon mine_constructions(const std::vector<AnnotatedDoc>& docs,
                                 const MineConfig& config) {
    Constructicon result;
    result.provenance = "mined";
    if (docs.empty()) return result;
    if (config.max_len < 2 || config.max_len > 4)
        throw DataError("mine_constructions: max_len must be in [2, 4]");

    // adjacency statistics for delta-P are computed once over the full
    // corpus (association is a corpus-level property)
    std::map<Slot, int64_t> first_counts, second_counts;
    std::map<std::pair<Slot, Slot>, int64_t> pair_counts;
    int64_t total_adjacent = 0;
    for (const auto& doc : docs) {
        if (doc.tokens.size() < 2) continue;
        for (size_t i = 0; i + 1 < doc.tokens.size(); ++i) {
            auto a = realizations(doc, i);
            auto b = realizations(doc, i + 1);
            ++total_adjacent;
            for (const auto& sa : a) ++first_counts[sa];
            for (const auto& sb : b) ++second_counts[sb];
            for (const auto& sa : a)
                for (const auto& sb : b) ++pair_counts[{sa, sb}];
        }
    }

    auto score_of = [&](const SlotSeq& seq) {
        double score = 2.0;  // above any possible delta-P
        for (size_t i = 0; i + 1 < seq.size(); ++i) {
            auto it = pair_counts.find({seq[i], seq[i + 1]});
            int64_t ab = it == pair_counts.end() ? 0 : it->second;
            double dp = delta_p(ab, first_counts[seq[i]],
                                second_counts[seq[i + 1]], total_adjacent);
            score = std::min(score, dp);
        }
        return score;
    };

    std::vector<std::vector<bool>> claimed;
    claimed.reserve(docs.size());
    for (const auto& doc : docs)
        claimed.emplace_back(doc.tokens.size(), false);

    std::set<SlotSeq> kept_seqs;
    std::vector<std::pair<SlotSeq, CandidateStats>> kept;

    for (int round = 0; round < config.rounds; ++round) {
        std::map<SlotSeq, CandidateStats> stats;
        for (size_t di = 0; di < docs.size(); ++di)
            for (size_t pos = 0; pos < docs[di].tokens.size(); ++pos)
                enumerate_at(docs[di], di, pos, config.max_len, claimed, stats);

        struct Scored {
            SlotSeq seq;
            double score;
            CandidateStats stats;
        };
        std::vector<Scored> passing;
        for (auto& [seq, cs] : stats) {
            if (kept_seqs.count(seq)) continue;
            if (cs.freq < config.min_freq) continue;
            double s = score_of(seq);
            if (s < config.association_threshold) continue;
            passing.push_back({seq, s, std::move(cs)});
        }
        if (passing.empty()) break;

        std::stable_sort(passing.begin(), passing.end(),
                         [](const Scored& a, const Scored& b) {
                             if (a.score != b.score) return a.score > b.score;
                             if (a.stats.freq != b.stats.freq)
                                 return a.stats.freq > b.stats.freq;
                             return a.seq < b.seq;
                         });

        // subsumption pruning: drop a candidate whose every span lies
        // within the span of an already-accepted, at-least-as-good
        // candidate this round
        std::vector<Scored> accepted;
        for (auto& cand : passing) {
            bool subsumed = false;
            for (const auto& winner : accepted) {
                if (winner.seq.size() < cand.seq.size()) continue;
                if (winner.score < cand.score) break;  // sorted descending
                bool all_inside = true;
                for (const auto& [d, s] : cand.stats.spans) {
                    bool inside = false;
                    for (const auto& [wd, ws] : winner.stats.spans) {
                        if (wd == d && ws <= s &&
                            s + cand.seq.size() <= ws + winner.seq.size()) {
                            inside = true;
                            break;
                        }
                    }
                    if (!inside) {
                        all_inside = false;
                        break;
                    }
                }
                if (all_inside) {
                    subsumed = true;
                    break;
                }
            }
            if (!subsumed) accepted.push_back(std::move(cand));
        }

        // accepted constructions claim their spans for later rounds
        for (const auto& acc : accepted) {
            kept_seqs.insert(acc.seq);
            kept.push_back({acc.seq, acc.stats});
            for (const auto& [d, s] : acc.stats.spans)
                for (size_t k = 0; k < acc.seq.size(); ++k)
                    claimed[d][s + k] = true;
        }
    }

    for (size_t i = 0; i < kept.size(); ++i) {
        Construction c;
        c.id = "cx" + std::to_string(i + 1);
        c.slots = kept[i].first;
        result.items.push_back(std::move(c));
    }
    return result;
}

netstats::Graph similarity_network(
    const std::map<std::string, std::vector<double>>& vectors, double threshold) {
    if (vectors.size() < 2)
        throw DataError("similarity_network: need at least two vectors");
    netstats::Graph g;
    std::vector<const std::vector<double>*> rows;
    for (const auto& [name, vec] : vectors) {
        g.add_node(name);
        rows.push_back(&vec);
    }
    auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        if (na == 0.0 || nb == 0.0) return 0.0;
        return dot / (std::sqrt(na) * std::sqrt(nb));
    };
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = i + 1; j < rows.size(); ++j) {
            if (rows[i]->size() != rows[j]->size())
                throw DataError("similarity_network: vector length mismatch");
            double w = cosine(*rows[i], *rows[j]);
            if (w >= threshold)
                g.add_edge(static_cast<int>(i), static_cast<int>(j), w);
        }
    }
    return g;
}

}  // namespace kupu::cxg
