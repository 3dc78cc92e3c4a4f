#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "kupu/common.hpp"
#include "kupu/embed.hpp"
#include "kupu/netstats.hpp"

namespace kupu::cxg {

enum class SlotKind { lex, syn, sem };

std::string to_string(SlotKind k);

struct Slot {
    SlotKind kind = SlotKind::lex;
    std::string value;  // token (lex), coarse tag (syn) or cluster id (sem)

    bool operator==(const Slot&) const = default;
    bool operator<(const Slot& o) const {
        if (kind != o.kind) return kind < o.kind;
        return value < o.value;
    }
    std::string repr() const { return to_string(kind) + ":" + value; }
};

enum class FeatureSet { lex_only, syn_only, sem_plus };

struct Construction {
    std::string id;
    std::vector<Slot> slots;  // length 2..4

    FeatureSet feature_set() const;
    std::string repr() const;
};

struct Constructicon {
    std::vector<Construction> items;
    std::string provenance = "mined";  // or "loaded"

    // One construction per line: id<TAB>slot;slot;slot
    void save(std::ostream& out) const;
    static Constructicon load(std::istream& in);
    static Constructicon load_file(const std::string& path);
};

// A document with the annotation layers slot kinds can require.
struct AnnotatedDoc {
    std::vector<std::string> tokens;
    std::vector<std::string> tags;  // empty when untagged
    std::vector<int> sem;           // empty when no semantic layer; -1 = none
    std::string community;
    std::string user;
    int64_t created_utc = 0;
};

// Assigns every vocabulary token a cluster id via k-means over the
// embedding vectors.
std::map<std::string, int> induce_sem_clusters(const embed::EmbeddingModel& model,
                                               int k, uint64_t seed);

// Applies a token->cluster map to a doc (unknown tokens get -1).
void annotate_sem(AnnotatedDoc& doc, const std::map<std::string, int>& clusters);

// Number of contiguous token windows where every slot constraint holds;
// overlapping matches count. Raises DataError when a required annotation
// layer is missing.
int64_t match(const AnnotatedDoc& doc, const Construction& construction);

enum class GroupBy { community_month, user };

struct ParseResult {
    std::vector<std::string> construction_ids;
    // group key -> raw counts per construction
    std::map<std::string, std::vector<int64_t>> counts;
    std::map<std::string, int64_t> tokens;  // per group, for normalization

    std::vector<double> per_thousand(const std::string& group) const;
};

ParseResult parse_counts(const std::vector<AnnotatedDoc>& docs,
                         const Constructicon& constructicon, GroupBy group_by);

void write_counts_csv(std::ostream& out, const ParseResult& result);

struct MineConfig {
    int rounds = 5;
    int64_t min_freq = 2;
    double association_threshold = 0.2;  // minimum pairwise delta-P
    int max_len = 4;
};

// Simplified candidate miner: slot sequences of length 2..max_len scored
// by directional association (minimum pairwise delta-P over adjacent
// slots), with subsumption pruning; rounds re-score over spans not yet
// claimed by kept constructions. Deterministic.
Constructicon mine_constructions(const std::vector<AnnotatedDoc>& docs,
                                 const MineConfig& config);

// Exposed for the exhaustive miner oracle in tests.
double delta_p(int64_t count_ab, int64_t count_a_first, int64_t count_b_second,
               int64_t total_adjacent);

// Nodes are group names, undirected edges where cosine >= threshold.
netstats::Graph similarity_network(
    const std::map<std::string, std::vector<double>>& vectors, double threshold);

}  // namespace kupu::cxg
