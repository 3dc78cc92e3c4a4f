#include "kupu/netstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace kupu::netstats {

int Graph::add_node(const std::string& label) {
    nodes.push_back(label);
    return static_cast<int>(nodes.size()) - 1;
}

void Graph::add_edge(int a, int b, double weight) {
    if (a == b) throw DataError("graph: self-loops are not allowed");
    if (!std::isfinite(weight)) throw DataError("graph: non-finite edge weight");
    edges.push_back({a, b, weight});
}

double Graph::total_weight() const {
    double m = 0.0;
    for (const auto& e : edges) m += e.weight;
    return m;
}

std::vector<UserProfile> build_profiles(const std::vector<corpus::TextUnit>& units) {
    std::map<std::string, UserProfile> by_author;
    for (const auto& u : units) {
        if (u.author.empty()) continue;
        auto [it, inserted] = by_author.try_emplace(u.author);
        UserProfile& p = it->second;
        if (inserted) {
            p.author = u.author;
            p.first_ts = u.created_utc;
            p.last_ts = u.created_utc;
        } else {
            p.first_ts = std::min(p.first_ts, u.created_utc);
            p.last_ts = std::max(p.last_ts, u.created_utc);
        }
        if (u.type == corpus::TextType::rstext || u.type == corpus::TextType::rcomm) {
            p.total_score += u.score;
            p.interactions += 1;
        }
    }

    std::vector<UserProfile> profiles;
    for (auto& [author, p] : by_author) {
        if (p.interactions < 1) continue;
        p.lifespan_days =
            static_cast<double>(p.last_ts - p.first_ts) / 86400.0;
        p.engagement_ratio = static_cast<double>(p.total_score) /
                             static_cast<double>(p.interactions);
        profiles.push_back(std::move(p));
    }

    if (profiles.size() >= 10) {
        std::vector<double> lifespan, engagement;
        for (const auto& p : profiles) {
            lifespan.push_back(p.lifespan_days);
            engagement.push_back(p.engagement_ratio);
        }
        auto ld = decile_assign(lifespan);
        auto ed = decile_assign(engagement);
        for (size_t i = 0; i < profiles.size(); ++i) {
            profiles[i].lifespan_decile = ld[i];
            profiles[i].engagement_decile = ed[i];
        }
    }
    return profiles;
}

std::vector<int> decile_assign(const std::vector<double>& values) {
    if (values.size() < 10)
        throw DataError("decile_assign: need at least 10 values");
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return values[a] > values[b];  // rank 0 = highest
    });
    std::vector<int> out(n);
    size_t base = n / 10, extra = n % 10, pos = 0;
    for (int d = 1; d <= 10; ++d) {
        size_t size = base + (static_cast<size_t>(d - 1) < extra ? 1 : 0);
        for (size_t i = 0; i < size; ++i, ++pos) out[order[pos]] = d;
    }
    return out;
}

void write_profiles_csv(std::ostream& out, const std::vector<UserProfile>& profiles) {
    out << "author,first_ts,last_ts,lifespan_days,score,interactions,ratio,"
           "lifespan_decile,engagement_decile\n";
    for (const auto& p : profiles) {
        out << csv_field(p.author) << ',' << p.first_ts << ',' << p.last_ts << ','
            << format_fixed(p.lifespan_days, 3) << ',' << p.total_score << ','
            << p.interactions << ',' << format_fixed(p.engagement_ratio, 3) << ','
            << p.lifespan_decile << ',' << p.engagement_decile << '\n';
    }
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    size_t intersection = 0;
    for (const auto& x : a)
        if (b.count(x)) ++intersection;
    size_t unions = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(unions);
}

Graph overlap_graph(const std::map<std::string, std::set<std::string>>& user_sets,
                    double threshold) {
    if (user_sets.size() < 2)
        throw DataError("overlap_graph: need at least two communities");
    Graph g;
    std::vector<const std::set<std::string>*> sets;
    for (const auto& [name, users] : user_sets) {
        g.add_node(name);
        sets.push_back(&users);
    }
    for (size_t i = 0; i < sets.size(); ++i) {
        for (size_t j = i + 1; j < sets.size(); ++j) {
            double w = jaccard(*sets[i], *sets[j]);
            if (w >= threshold)
                g.add_edge(static_cast<int>(i), static_cast<int>(j), w);
        }
    }
    return g;
}

double modularity(const Graph& g, const std::vector<int>& community) {
    double m = g.total_weight();
    if (m <= 0.0) return 0.0;
    std::unordered_map<int, double> within, degree;
    std::vector<double> node_degree(g.nodes.size(), 0.0);
    for (const auto& e : g.edges) {
        node_degree[e.a] += e.weight;
        node_degree[e.b] += e.weight;
        if (community[e.a] == community[e.b]) within[community[e.a]] += e.weight;
    }
    for (size_t i = 0; i < g.nodes.size(); ++i)
        degree[community[i]] += node_degree[i];
    double q = 0.0;
    std::set<int> comms(community.begin(), community.end());
    for (int c : comms) {
        double e_in = within.count(c) ? within[c] : 0.0;
        double a = degree.count(c) ? degree[c] : 0.0;
        q += e_in / m - (a / (2.0 * m)) * (a / (2.0 * m));
    }
    return q;
}

namespace {

// Adjacency for one Louvain level.
struct Level {
    int n;
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> self_loop;  // aggregated internal weight
};

Level level_from_graph(const Graph& g) {
    Level lv;
    lv.n = static_cast<int>(g.nodes.size());
    lv.adj.resize(lv.n);
    lv.self_loop.assign(lv.n, 0.0);
    for (const auto& e : g.edges) {
        lv.adj[e.a].push_back({e.b, e.weight});
        lv.adj[e.b].push_back({e.a, e.weight});
    }
    return lv;
}

// One pass of local moves; returns true if anything moved.
bool local_moves(const Level& lv, std::vector<int>& community, double m2,
                 Rng& rng) {
    std::vector<double> k(lv.n, 0.0);  // weighted degree incl. self-loops
    for (int i = 0; i < lv.n; ++i) {
        k[i] = 2.0 * lv.self_loop[i];
        for (const auto& [j, w] : lv.adj[i]) k[i] += w;
    }
    std::vector<double> sigma_tot(lv.n, 0.0);
    for (int i = 0; i < lv.n; ++i) sigma_tot[community[i]] += k[i];

    std::vector<int> order(lv.n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    bool moved_any = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (int node : order) {
            int current = community[node];
            // weights from node to each neighbouring community
            std::map<int, double> links;
            links[current] += 0.0;
            for (const auto& [j, w] : lv.adj[node])
                if (j != node) links[community[j]] += w;

            sigma_tot[current] -= k[node];
            double best_gain = 0.0;
            int best_comm = current;
            double link_current = links.count(current) ? links[current] : 0.0;
            for (const auto& [comm, link] : links) {
                double gain = (link - link_current) -
                              k[node] * (sigma_tot[comm] - sigma_tot[current]) / m2;
                if (gain > best_gain + 1e-12 ||
                    (gain > best_gain - 1e-12 && comm < best_comm && gain > 1e-12)) {
                    best_gain = gain;
                    best_comm = comm;
                }
            }
            sigma_tot[best_comm] += k[node];
            if (best_comm != current) {
                community[node] = best_comm;
                improved = true;
                moved_any = true;
            }
        }
    }
    return moved_any;
}

}  // namespace

LouvainResult louvain(const Graph& g, uint64_t seed) {
    LouvainResult result;
    result.community.resize(g.nodes.size());
    std::iota(result.community.begin(), result.community.end(), 0);
    if (g.edges.empty()) {
        result.modularity = 0.0;
        return result;  // singleton partition
    }

    Rng rng(seed);
    double m2 = 2.0 * g.total_weight();

    Level lv = level_from_graph(g);
    // mapping from original nodes to current-level nodes
    std::vector<int> node_of(g.nodes.size());
    std::iota(node_of.begin(), node_of.end(), 0);

    while (true) {
        std::vector<int> community(lv.n);
        std::iota(community.begin(), community.end(), 0);
        bool moved = local_moves(lv, community, m2, rng);
        if (!moved) break;

        // renumber communities contiguously
        std::map<int, int> renumber;
        for (int c : community)
            renumber.emplace(c, static_cast<int>(renumber.size()));
        for (auto& c : community) c = renumber[c];

        for (auto& nc : node_of) nc = community[nc];

        // aggregate the level
        int nc = static_cast<int>(renumber.size());
        Level next;
        next.n = nc;
        next.adj.resize(nc);
        next.self_loop.assign(nc, 0.0);
        std::map<std::pair<int, int>, double> agg;
        for (int i = 0; i < lv.n; ++i) {
            next.self_loop[community[i]] += lv.self_loop[i];
            for (const auto& [j, w] : lv.adj[i]) {
                if (j < i) continue;  // undirected edges stored twice
                int ci = community[i], cj = community[j];
                if (ci == cj)
                    next.self_loop[ci] += w;
                else
                    agg[{std::min(ci, cj), std::max(ci, cj)}] += w;
            }
        }
        for (const auto& [key, w] : agg) {
            next.adj[key.first].push_back({key.second, w});
            next.adj[key.second].push_back({key.first, w});
        }
        if (nc == lv.n) break;
        lv = std::move(next);
    }

    // contiguous ids over original nodes
    std::map<int, int> renumber;
    for (int c : node_of) renumber.emplace(c, static_cast<int>(renumber.size()));
    for (size_t i = 0; i < node_of.size(); ++i)
        result.community[i] = renumber[node_of[i]];
    result.modularity = modularity(g, result.community);
    return result;
}

void write_graph_csv(std::ostream& out, const Graph& g) {
    out << "src,dst,weight\n";
    for (const auto& e : g.edges)
        out << csv_field(g.nodes[e.a]) << ',' << csv_field(g.nodes[e.b]) << ','
            << format_fixed(e.weight, 6) << '\n';
}

void write_partition_csv(std::ostream& out, const Graph& g,
                         const std::vector<int>& community) {
    out << "node,community\n";
    for (size_t i = 0; i < g.nodes.size(); ++i)
        out << csv_field(g.nodes[i]) << ',' << community[i] << '\n';
}

// --- OLS --------------------------------------------------------------

// Regularized incomplete beta function by continued fraction.
static double betacf(double a, double b, double x) {
    const int max_iter = 200;
    const double eps = 3e-14, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

static double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                   a * std::log(x) + b * std::log(1.0 - x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    double x = dof / (dof + t * t);
    double p = 0.5 * incbeta(dof / 2.0, 0.5, x);
    return t > 0 ? 1.0 - p : p;
}

OlsResult ols(const std::vector<double>& y,
              const std::vector<std::vector<double>>& X,
              const std::vector<std::string>& names) {
    const int n = static_cast<int>(y.size());
    const int k = static_cast<int>(X.size());  // predictors
    const int p = k + 1;                       // + intercept
    if (n == 0) throw DataError("ols: empty response");
    for (const auto& col : X)
        if (static_cast<int>(col.size()) != n)
            throw DataError("ols: predictor column length mismatch");
    if (n <= p) throw DataError("ols: need more observations than parameters");

    OlsResult r;
    r.n = n;
    r.names.push_back("intercept");
    for (int j = 0; j < k; ++j)
        r.names.push_back(j < static_cast<int>(names.size())
                              ? names[j]
                              : "x" + std::to_string(j + 1));

    // design matrix with intercept
    auto design = [&](int row, int col) -> double {
        return col == 0 ? 1.0 : X[col - 1][row];
    };

    // XtX and Xty
    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < p; ++a) {
            xty[a] += design(i, a) * y[i];
            for (int b = 0; b < p; ++b) xtx[a][b] += design(i, a) * design(i, b);
        }
    }

    // invert XtX by Gauss-Jordan with partial pivoting
    std::vector<std::vector<double>> inv(p, std::vector<double>(p, 0.0));
    for (int i = 0; i < p; ++i) inv[i][i] = 1.0;
    std::vector<std::vector<double>> a = xtx;
    for (int col = 0; col < p; ++col) {
        int pivot = col;
        for (int row = col + 1; row < p; ++row)
            if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
        double scale = 0.0;
        for (int row = 0; row < p; ++row) scale = std::max(scale, std::fabs(xtx[row][col]));
        if (std::fabs(a[pivot][col]) < 1e-10 * std::max(1.0, scale))
            throw DataError("ols: design matrix is rank deficient at column '" +
                            r.names[col] + "'");
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        double d = a[col][col];
        for (int j = 0; j < p; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (int row = 0; row < p; ++row) {
            if (row == col) continue;
            double f = a[row][col];
            if (f == 0.0) continue;
            for (int j = 0; j < p; ++j) {
                a[row][j] -= f * a[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }

    r.coef.assign(p, 0.0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) r.coef[i] += inv[i][j] * xty[j];

    double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double rss = 0.0, tss = 0.0;
    for (int i = 0; i < n; ++i) {
        double fit = 0.0;
        for (int j = 0; j < p; ++j) fit += design(i, j) * r.coef[j];
        rss += (y[i] - fit) * (y[i] - fit);
        tss += (y[i] - y_mean) * (y[i] - y_mean);
    }
    r.df_resid = n - p;
    double sigma2 = rss / r.df_resid;
    r.resid_stderr = std::sqrt(sigma2);
    r.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    r.adj_r2 = 1.0 - (1.0 - r.r2) * (n - 1) / static_cast<double>(r.df_resid);
    r.f_stat = k > 0 ? (r.r2 / k) / ((1.0 - r.r2) / r.df_resid) : 0.0;

    r.stderr_.assign(p, 0.0);
    r.t_value.assign(p, 0.0);
    r.p_value.assign(p, 0.0);
    for (int j = 0; j < p; ++j) {
        r.stderr_[j] = std::sqrt(sigma2 * inv[j][j]);
        r.t_value[j] = r.stderr_[j] > 0.0 ? r.coef[j] / r.stderr_[j] : 0.0;
        r.p_value[j] = 2.0 * (1.0 - student_t_cdf(std::fabs(r.t_value[j]),
                                                  r.df_resid));
    }
    return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DataError("pearson: need two aligned series of length >= 2");
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DataError("pearson: zero variance input");
    return sxy / std::sqrt(sxx * syy);
}

static double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k,
                    uint64_t seed) {
    const int n = static_cast<int>(points.size());
    if (k < 1 || k > n)
        throw DataError("kmeans: k must be in [1, n]");
    const size_t dim = points.empty() ? 0 : points[0].size();
    for (const auto& pt : points)
        if (pt.size() != dim) throw DataError("kmeans: ragged points");

    Rng rng(seed);
    KMeansResult res;

    // k-means++ seeding
    res.centroids.push_back(points[rng.uniform(n)]);
    std::vector<double> dist(n);
    while (static_cast<int>(res.centroids.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = sq_dist(points[i], res.centroids[0]);
            for (size_t c = 1; c < res.centroids.size(); ++c)
                best = std::min(best, sq_dist(points[i], res.centroids[c]));
            dist[i] = best;
            total += best;
        }
        int chosen = 0;
        if (total > 0.0) {
            double u = rng.uniform_real() * total, acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += dist[i];
                if (acc >= u) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = static_cast<int>(rng.uniform(n));
        }
        res.centroids.push_back(points[chosen]);
    }

    res.assignment.assign(n, 0);
    const double tol = 1e-6;
    for (int iter = 0; iter < 300; ++iter) {
        res.iterations = iter + 1;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points[i], res.centroids[0]);
            for (int c = 1; c < k; ++c) {
                double d = sq_dist(points[i], res.centroids[c]);
                if (d < best_d) {
                    best = c;
                    best_d = d;
                }
            }
            res.assignment[i] = best;
        }
        std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            ++counts[res.assignment[i]];
            for (size_t d = 0; d < dim; ++d)
                next[res.assignment[i]][d] += points[i][d];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // re-seed an empty cluster at the point farthest from its
                // centroid
                int far = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    double d = sq_dist(points[i], res.centroids[res.assignment[i]]);
                    if (d > far_d) {
                        far = i;
                        far_d = d;
                    }
                }
                next[c] = points[far];
            } else {
                for (size_t d = 0; d < dim; ++d)
                    next[c][d] /= static_cast<double>(counts[c]);
            }
        }
        double movement = 0.0;
        for (int c = 0; c < k; ++c) movement += sq_dist(res.centroids[c], next[c]);
        res.centroids = std::move(next);
        if (movement < tol * tol) break;
    }

    res.inertia = 0.0;
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_d = sq_dist(points[i], res.centroids[0]);
        for (int c = 1; c < k; ++c) {
            double d = sq_dist(points[i], res.centroids[c]);
            if (d < best_d) {
                best = c;
                best_d = d;
            }
        }
        res.assignment[i] = best;
        res.inertia += best_d;
    }
    return res;
}

// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
static void jacobi_eigen(std::vector<std::vector<double>> a,
                         std::vector<double>& eigenvalues,
                         std::vector<std::vector<double>>& eigenvectors) {
    const int n = static_cast<int>(a.size());
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-24) break;
        for (int pq = 0; pq < n * n; ++pq) {
            int p = pq / n, q = pq % n;
            if (p >= q) continue;
            if (std::fabs(a[p][q]) < 1e-18) continue;
            double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            double t = (theta >= 0 ? 1.0 : -1.0) /
                       (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
            double c = 1.0 / std::sqrt(t * t + 1.0);
            double s = t * c;
            for (int i = 0; i < n; ++i) {
                double aip = a[i][p], aiq = a[i][q];
                a[i][p] = c * aip - s * aiq;
                a[i][q] = s * aip + c * aiq;
            }
            for (int i = 0; i < n; ++i) {
                double api = a[p][i], aqi = a[q][i];
                a[p][i] = c * api - s * aqi;
                a[q][i] = s * api + c * aqi;
            }
            for (int i = 0; i < n; ++i) {
                double vip = eigenvectors[i][p], viq = eigenvectors[i][q];
                eigenvectors[i][p] = c * vip - s * viq;
                eigenvectors[i][q] = s * vip + c * viq;
            }
        }
    }
    eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

PcaResult pca(const std::vector<std::vector<double>>& points, int d) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw DataError("pca: need at least two points");
    const int dim = static_cast<int>(points[0].size());
    if (d < 1 || d > dim) throw DataError("pca: d must be in [1, dim]");
    for (const auto& pt : points)
        if (static_cast<int>(pt.size()) != dim)
            throw DataError("pca: ragged points");

    std::vector<double> mean(dim, 0.0);
    for (const auto& pt : points)
        for (int j = 0; j < dim; ++j) mean[j] += pt[j];
    for (auto& m : mean) m /= n;

    std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
    for (const auto& pt : points)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                cov[i][j] += (pt[i] - mean[i]) * (pt[j] - mean[j]);
    for (auto& row : cov)
        for (auto& v : row) v /= (n - 1);

    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;  // columns are vectors
    jacobi_eigen(cov, eigenvalues, eigenvectors);

    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return eigenvalues[a] > eigenvalues[b];
    });

    double total_var = 0.0;
    for (double ev : eigenvalues) total_var += std::max(0.0, ev);

    PcaResult res;
    for (int c = 0; c < d; ++c) {
        int col = order[c];
        std::vector<double> comp(dim);
        for (int i = 0; i < dim; ++i) comp[i] = eigenvectors[i][col];
        // sign convention: largest-magnitude coordinate positive
        int arg = 0;
        for (int i = 1; i < dim; ++i)
            if (std::fabs(comp[i]) > std::fabs(comp[arg])) arg = i;
        if (comp[arg] < 0.0)
            for (auto& v : comp) v = -v;
        res.components.push_back(std::move(comp));
        res.explained_variance.push_back(
            total_var > 0.0 ? std::max(0.0, eigenvalues[col]) / total_var : 0.0);
    }

    res.projected.assign(n, std::vector<double>(d, 0.0));
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c)
            for (int j = 0; j < dim; ++j)
                res.projected[i][c] +=
                    (points[i][j] - mean[j]) * res.components[c][j];
    return res;
}

}  // namespace kupu::netstats
