#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kupu/common.hpp"
#include "kupu/corpus.hpp"

namespace kupu::netstats {

// Undirected weighted graph without self-loops.
struct Graph {
    std::vector<std::string> nodes;
    struct Edge {
        int a, b;
        double weight;
    };
    std::vector<Edge> edges;

    int add_node(const std::string& label);
    void add_edge(int a, int b, double weight);
    double total_weight() const;
};

struct UserProfile {
    std::string author;
    int64_t first_ts = 0;
    int64_t last_ts = 0;
    double lifespan_days = 0.0;
    int64_t total_score = 0;
    int64_t interactions = 0;  // selfposts (rstext) + comments (rcomm)
    double engagement_ratio = 0.0;
    int lifespan_decile = 0;    // 1 = longest-lived
    int engagement_decile = 0;  // 1 = most engaged
};

// Aggregates per-author behaviour; moderator-distinguished units are
// expected to be filtered upstream. Decile fields are filled when there
// are at least 10 users.
std::vector<UserProfile> build_profiles(const std::vector<corpus::TextUnit>& units);

// Rank-based decile ids (1 = highest value); populations differ by at
// most one; ties broken by original position.
std::vector<int> decile_assign(const std::vector<double>& values);

void write_profiles_csv(std::ostream& out, const std::vector<UserProfile>& profiles);

// |A ∩ B| / |A ∪ B|; both empty -> 0 by convention.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Edge (i,j) with weight jaccard(U_i, U_j) when the weight reaches the
// threshold.
Graph overlap_graph(const std::map<std::string, std::set<std::string>>& user_sets,
                    double threshold);

struct LouvainResult {
    std::vector<int> community;  // per node, 0-based contiguous ids
    double modularity = 0.0;
};

double modularity(const Graph& g, const std::vector<int>& community);

// Standard two-phase Louvain: local moves until no modularity gain, then
// aggregation; repeats until stable. Deterministic under seed.
LouvainResult louvain(const Graph& g, uint64_t seed);

void write_graph_csv(std::ostream& out, const Graph& g);
void write_partition_csv(std::ostream& out, const Graph& g,
                         const std::vector<int>& community);

struct OlsResult {
    std::vector<std::string> names;  // "intercept" then predictor names
    std::vector<double> coef;
    std::vector<double> stderr_;
    std::vector<double> t_value;
    std::vector<double> p_value;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double f_stat = 0.0;
    double resid_stderr = 0.0;
    int n = 0;
    int df_resid = 0;
};

// OLS via the normal equations; X holds predictor columns, an intercept
// is prepended. Rank-deficient designs raise DataError naming the column.
OlsResult ols(const std::vector<double>& y,
              const std::vector<std::vector<double>>& X,
              const std::vector<std::string>& names = {});

double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct KMeansResult {
    std::vector<int> assignment;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    int iterations = 0;
};

// k-means++ seeding, Lloyd iterations to convergence (tol 1e-6, max 300).
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k,
                    uint64_t seed);

struct PcaResult {
    std::vector<std::vector<double>> projected;   // n x d
    std::vector<std::vector<double>> components;  // d x dim, row-major
    std::vector<double> explained_variance;       // ratios, descending
};

// PCA via eigen-decomposition of the covariance matrix; component signs
// fixed so the largest-magnitude coordinate is positive.
PcaResult pca(const std::vector<std::vector<double>>& points, int d);

// Student-t distribution CDF (exposed for the OLS oracle tests).
double student_t_cdf(double t, double dof);

}  // namespace kupu::netstats
