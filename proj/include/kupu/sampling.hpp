#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kupu/common.hpp"
#include "kupu/corpus.hpp"

namespace kupu::sampling {

enum class Plan { balanced, proportional, random_pool };

std::string to_string(Plan p);

struct LabeledUnit {
    corpus::TextUnit unit;
    std::string label;
};

struct SplitDataset {
    std::vector<LabeledUnit> train;
    std::vector<LabeledUnit> test;
    Plan plan = Plan::balanced;
    uint64_t seed = 0;
};

using UnitsByClass = std::map<std::string, std::vector<corpus::TextUnit>>;

// floor(min class count / 4): the quarter-of-minority rule.
int64_t min_group_size(const std::map<std::string, int64_t>& class_counts);

// Train/test fraction used by every sampler, stratified by class.
inline constexpr double kTestFraction = 0.2;

// Exactly min_group_size units per class, drawn uniformly without
// replacement, then split 0.8/0.2 per class. Deterministic under seed.
SplitDataset balanced_sample(const UnitsByClass& units_by_class, uint64_t seed);

// round(count * fraction) units per class.
SplitDataset proportional_sample(const UnitsByClass& units_by_class,
                                 double fraction, uint64_t seed);

// min_group_size * n_classes units drawn from the pooled corpus
// regardless of class.
SplitDataset random_sample(const UnitsByClass& units_by_class, uint64_t seed);

// Sorts by word count and cuts into k equal-population buckets
// (populations differ by at most one).
std::vector<std::vector<corpus::TextUnit>> length_quantiles(
    const std::vector<corpus::TextUnit>& units, int k = 10);

struct TemporalSplit {
    std::vector<corpus::TextUnit> train;               // before cutoff
    std::vector<std::string> bucket_keys;              // "YYYYQn", chronological
    std::vector<std::vector<corpus::TextUnit>> buckets;  // quarterly test sets
};

// Train = units strictly before the cutoff; units at or after the cutoff
// form chronological quarterly test buckets.
TemporalSplit temporal_split(const std::vector<corpus::TextUnit>& units,
                             int64_t cutoff_ts);

}  // namespace kupu::sampling
