#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "kupu/common.hpp"
#include "kupu/corpus.hpp"
#include "kupu/textprep.hpp"

namespace kupu::variables {

enum class Category { lexical, morphosyntactic, semantic };
enum class Role { conservative, innovative };

std::string to_string(Category c);
std::string to_string(Role r);

// One variant of a variable: a label, its role, and the surface forms
// (single tokens or adjacent token pairs) that realize it.
struct Variant {
    std::string label;
    Role role = Role::conservative;
    std::vector<std::vector<std::string>> surface_forms;  // 1 or 2 tokens
    std::optional<std::string> pos;  // coarse tag class constraint
};

struct VariableSpec {
    std::string id;
    Category category = Category::lexical;
    std::vector<Variant> variants;

    bool has_role(Role r) const;
};

// Loads specs from delimited text with columns
//   variable,category,variant_label,role,surface_form,pos
// One row per surface form; rows for the same variable/variant aggregate.
std::vector<VariableSpec> load_specs(const std::string& path);
std::vector<VariableSpec> parse_specs(std::istream& in, const std::string& origin);

// A tokenized (optionally tagged) doc with its community and timestamp.
struct VariableDoc {
    std::string community;
    std::vector<std::string> tokens;
    std::vector<std::string> tags;  // may be empty
    int64_t created_utc = 0;
};

struct VariantCounts {
    // (community, variable id, variant label) -> token frequency
    std::map<std::tuple<std::string, std::string, std::string>, int64_t> n;

    int64_t count(const std::string& community, const std::string& variable,
                  const std::string& variant) const;
    int64_t variable_total(const std::string& community,
                           const std::string& variable) const;
    // Percentage of the variant within its variable, or nullopt when the
    // variable has zero tokens in the community (rendered "-").
    std::optional<double> proportion(const std::string& community,
                                     const std::string& variable,
                                     const std::string& variant) const;

    void merge(const VariantCounts& other);
};

// Counts exact surface-form occurrences (unigram and adjacent bigram),
// longest match first within each variable, honoring POS constraints.
VariantCounts count_variants(const std::vector<VariableDoc>& docs,
                             const std::vector<VariableSpec>& specs);

void write_counts_csv(std::ostream& out, const VariantCounts& counts,
                      const std::vector<VariableSpec>& specs,
                      const std::vector<std::string>& communities);

enum class Pattern {
    conservative_dominant,
    innovative_dominant,
    community_grouping,
    community_outlier,
};

std::string to_string(Pattern p);

struct DistributionPattern {
    std::string variable;
    Pattern pattern = Pattern::community_grouping;
    // communities on the conservative-majority side (grouping detail)
    std::vector<std::string> conservative_side;
    std::vector<std::string> innovative_side;
    std::optional<std::string> outlier;  // set for community_outlier
};

// Classifies the distributional pattern of one variable over communities
// with defined proportions:
//   conservative_dominant: conservative share > 50% everywhere
//   innovative_dominant:   innovative share > 50% everywhere
//   community_outlier:     exactly one community deviates from the rest
//   community_grouping:    anything else
DistributionPattern classify_distribution(const VariantCounts& counts,
                                          const VariableSpec& spec,
                                          const std::vector<std::string>& communities);

// Innovative share per hour bin; nullopt where the hour has no tokens.
struct HourlyVariantProfile {
    std::array<std::optional<double>, 24> innovative_share;
    std::array<int64_t, 24> tokens{};
};

HourlyVariantProfile hourly_variant_profile(const std::vector<VariableDoc>& docs,
                                            const VariableSpec& spec,
                                            const std::string& community,
                                            int utc_offset_hours = 0);

// Monthly counts for each term pattern over the corpus month range.
struct EmergenceSeries {
    std::vector<std::string> months;  // "YYYY-MM", contiguous
    std::map<std::string, std::vector<int64_t>> counts;  // pattern -> series
};

EmergenceSeries emergence_series(
    const std::vector<std::vector<std::string>>& term_patterns,
    const std::vector<VariableDoc>& docs);

}  // namespace kupu::variables
