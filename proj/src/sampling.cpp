#include "kupu/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace kupu::sampling {

std::string to_string(Plan p) {
    switch (p) {
        case Plan::balanced: return "balanced";
        case Plan::proportional: return "proportional";
        case Plan::random_pool: return "random";
    }
    return "?";
}

int64_t min_group_size(const std::map<std::string, int64_t>& class_counts) {
    int64_t min_count = -1;
    for (const auto& [label, count] : class_counts) {
        if (count <= 0) continue;
        if (min_count < 0 || count < min_count) min_count = count;
    }
    if (min_count < 0) throw DataError("min_group_size: all class counts are zero");
    return min_count / 4;
}

static std::map<std::string, int64_t> counts_of(const UnitsByClass& units) {
    std::map<std::string, int64_t> counts;
    for (const auto& [label, v] : units)
        counts[label] = static_cast<int64_t>(v.size());
    return counts;
}

// Draws n indices without replacement from [0, total), deterministically.
static std::vector<size_t> draw_indices(size_t total, size_t n, Rng& rng) {
    std::vector<size_t> idx(total);
    for (size_t i = 0; i < total; ++i) idx[i] = i;
    for (size_t i = 0; i < n; ++i) {
        size_t j = i + static_cast<size_t>(rng.uniform(total - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    return idx;
}

// Splits one class's draw into train/test; the last ceil(0.2*n) drawn
// units form the test side.
static void split_class(const std::string& label,
                        const std::vector<corpus::TextUnit>& pool,
                        const std::vector<size_t>& picked, SplitDataset& out) {
    size_t n = picked.size();
    size_t n_test = static_cast<size_t>(
        std::llround(kTestFraction * static_cast<double>(n)));
    size_t n_train = n - n_test;
    for (size_t i = 0; i < n; ++i) {
        LabeledUnit lu{pool[picked[i]], label};
        if (i < n_train)
            out.train.push_back(std::move(lu));
        else
            out.test.push_back(std::move(lu));
    }
}

SplitDataset balanced_sample(const UnitsByClass& units_by_class, uint64_t seed) {
    int64_t mgs = min_group_size(counts_of(units_by_class));
    if (mgs < 1)
        throw DataError("balanced_sample: minimum group size is zero");
    SplitDataset out;
    out.plan = Plan::balanced;
    out.seed = seed;
    Rng rng(seed);
    for (const auto& [label, pool] : units_by_class) {
        if (static_cast<int64_t>(pool.size()) < mgs)
            throw DataError("balanced_sample: class " + label +
                            " smaller than requested sample");
        auto picked = draw_indices(pool.size(), static_cast<size_t>(mgs), rng);
        split_class(label, pool, picked, out);
    }
    return out;
}

SplitDataset proportional_sample(const UnitsByClass& units_by_class,
                                 double fraction, uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw DataError("proportional_sample: fraction must be in (0, 1]");
    SplitDataset out;
    out.plan = Plan::proportional;
    out.seed = seed;
    Rng rng(seed);
    size_t drawn_total = 0;
    for (const auto& [label, pool] : units_by_class) {
        size_t n = static_cast<size_t>(
            std::llround(fraction * static_cast<double>(pool.size())));
        n = std::min(n, pool.size());
        drawn_total += n;
        auto picked = draw_indices(pool.size(), n, rng);
        split_class(label, pool, picked, out);
    }
    if (drawn_total == 0)
        throw DataError("proportional_sample: fraction yields zero units for every class");
    return out;
}

SplitDataset random_sample(const UnitsByClass& units_by_class, uint64_t seed) {
    int64_t mgs = min_group_size(counts_of(units_by_class));
    int64_t want = mgs * static_cast<int64_t>(units_by_class.size());
    std::vector<LabeledUnit> pool;
    for (const auto& [label, units] : units_by_class)
        for (const auto& u : units) pool.push_back({u, label});
    if (static_cast<int64_t>(pool.size()) < want || want < 1)
        throw DataError("random_sample: insufficient units for " +
                        std::to_string(want) + " draws");
    SplitDataset out;
    out.plan = Plan::random_pool;
    out.seed = seed;
    Rng rng(seed);
    auto picked = draw_indices(pool.size(), static_cast<size_t>(want), rng);
    size_t n_test = static_cast<size_t>(
        std::llround(kTestFraction * static_cast<double>(picked.size())));
    size_t n_train = picked.size() - n_test;
    for (size_t i = 0; i < picked.size(); ++i) {
        if (i < n_train)
            out.train.push_back(pool[picked[i]]);
        else
            out.test.push_back(pool[picked[i]]);
    }
    return out;
}

static int64_t word_count(const corpus::TextUnit& u) {
    return static_cast<int64_t>(split_ws(u.text).size());
}

std::vector<std::vector<corpus::TextUnit>> length_quantiles(
    const std::vector<corpus::TextUnit>& units, int k) {
    if (k < 2) throw DataError("length_quantiles: k must be >= 2");
    if (static_cast<int>(units.size()) < k)
        throw DataError("length_quantiles: fewer units than quantiles");
    std::vector<std::pair<int64_t, size_t>> order;
    order.reserve(units.size());
    for (size_t i = 0; i < units.size(); ++i)
        order.emplace_back(word_count(units[i]), i);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<std::vector<corpus::TextUnit>> buckets(k);
    size_t n = units.size();
    size_t base = n / k, extra = n % k;
    size_t pos = 0;
    for (int b = 0; b < k; ++b) {
        size_t size = base + (static_cast<size_t>(b) < extra ? 1 : 0);
        for (size_t i = 0; i < size; ++i, ++pos)
            buckets[b].push_back(units[order[pos].second]);
    }
    return buckets;
}

TemporalSplit temporal_split(const std::vector<corpus::TextUnit>& units,
                             int64_t cutoff_ts) {
    TemporalSplit out;
    std::map<std::string, std::vector<corpus::TextUnit>> quarters;
    for (const auto& u : units) {
        if (u.created_utc < cutoff_ts)
            out.train.push_back(u);
        else
            quarters[quarter_key(u.created_utc)].push_back(u);
    }
    if (out.train.empty())
        throw DataError("temporal_split: no units before the cutoff");
    for (auto& [key, bucket] : quarters) {
        std::stable_sort(bucket.begin(), bucket.end(),
                         [](const corpus::TextUnit& a, const corpus::TextUnit& b) {
                             return a.created_utc < b.created_utc;
                         });
        out.bucket_keys.push_back(key);
        out.buckets.push_back(std::move(bucket));
    }
    return out;
}

}  // namespace kupu::sampling
