#include "kupu/variables.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace kupu::variables {

std::string to_string(Category c) {
    switch (c) {
        case Category::lexical: return "lexical";
        case Category::morphosyntactic: return "morphosyntactic";
        case Category::semantic: return "semantic";
    }
    return "?";
}

std::string to_string(Role r) {
    return r == Role::conservative ? "conservative" : "innovative";
}

std::string to_string(Pattern p) {
    switch (p) {
        case Pattern::conservative_dominant: return "conservative_dominant";
        case Pattern::innovative_dominant: return "innovative_dominant";
        case Pattern::community_grouping: return "community_grouping";
        case Pattern::community_outlier: return "community_outlier";
    }
    return "?";
}

bool VariableSpec::has_role(Role r) const {
    for (const auto& v : variants)
        if (v.role == r) return true;
    return false;
}

static Category parse_category(const std::string& s, const std::string& origin) {
    if (s == "lexical") return Category::lexical;
    if (s == "morphosyntactic") return Category::morphosyntactic;
    if (s == "semantic") return Category::semantic;
    throw FormatError(origin + ": unknown category '" + s + "'");
}

static Role parse_role(const std::string& s, const std::string& origin) {
    if (s == "conservative") return Role::conservative;
    if (s == "innovative") return Role::innovative;
    throw FormatError(origin + ": unknown role '" + s + "'");
}

std::vector<VariableSpec> parse_specs(std::istream& in, const std::string& origin) {
    std::vector<VariableSpec> specs;
    std::map<std::string, size_t> by_id;
    std::string line;
    size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("variable,", 0) == 0) continue;  // header row
        }
        auto cols = split(line, ',');
        if (cols.size() < 5)
            throw FormatError(origin + ":" + std::to_string(lineno) +
                              ": expected at least 5 columns");
        std::string id = trim(cols[0]);
        Category cat = parse_category(trim(cols[1]), origin);
        std::string label = trim(cols[2]);
        Role role = parse_role(trim(cols[3]), origin);
        std::string surface = utf8_to_lower(trim(cols[4]));
        std::string pos = cols.size() > 5 ? trim(cols[5]) : "";
        if (surface.empty())
            throw FormatError(origin + ":" + std::to_string(lineno) +
                              ": empty surface form");
        auto form = split_ws(surface);
        if (form.size() > 2)
            throw FormatError(origin + ":" + std::to_string(lineno) +
                              ": surface forms are tokens or token pairs");

        size_t idx;
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            idx = specs.size();
            by_id[id] = idx;
            specs.push_back({id, cat, {}});
        } else {
            idx = it->second;
            if (specs[idx].category != cat)
                throw FormatError(origin + ": variable " + id +
                                  " listed under two categories");
        }
        auto& spec = specs[idx];
        Variant* variant = nullptr;
        for (auto& v : spec.variants)
            if (v.label == label) variant = &v;
        if (!variant) {
            spec.variants.push_back(
                {label, role, {}, pos.empty() ? std::nullopt
                                              : std::make_optional(pos)});
            variant = &spec.variants.back();
        } else if (variant->role != role) {
            throw FormatError(origin + ": variant " + id + "/" + label +
                              " listed with two roles");
        }
        variant->surface_forms.push_back(std::move(form));
    }
    for (const auto& spec : specs) {
        if (spec.variants.size() < 2)
            throw FormatError(origin + ": variable " + spec.id +
                              " needs at least two variants");
        if (!spec.has_role(Role::conservative))
            throw FormatError(origin + ": variable " + spec.id +
                              " has no conservative variant");
        if (!spec.has_role(Role::innovative))
            throw FormatError(origin + ": variable " + spec.id +
                              " has no innovative variant");
    }
    return specs;
}

std::vector<VariableSpec> load_specs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open variable spec file " + path);
    return parse_specs(in, path);
}

int64_t VariantCounts::count(const std::string& community,
                             const std::string& variable,
                             const std::string& variant) const {
    auto it = n.find({community, variable, variant});
    return it == n.end() ? 0 : it->second;
}

int64_t VariantCounts::variable_total(const std::string& community,
                                      const std::string& variable) const {
    int64_t total = 0;
    for (auto it = n.lower_bound({community, variable, ""});
         it != n.end() && std::get<0>(it->first) == community &&
         std::get<1>(it->first) == variable;
         ++it)
        total += it->second;
    return total;
}

std::optional<double> VariantCounts::proportion(const std::string& community,
                                                const std::string& variable,
                                                const std::string& variant) const {
    int64_t total = variable_total(community, variable);
    if (total == 0) return std::nullopt;
    return 100.0 * static_cast<double>(count(community, variable, variant)) /
           static_cast<double>(total);
}

void VariantCounts::merge(const VariantCounts& other) {
    for (const auto& [key, value] : other.n) n[key] += value;
}

// Does the coarse tag at position fit the constraint class?
// NN covers NN/NNS, VB covers VB/VBD/VBN/VBG; other constraints are exact.
static bool tag_matches(const std::string& constraint, const std::string& tag) {
    if (constraint == tag) return true;
    if (constraint == "NN") return tag == "NNS";
    if (constraint == "VB")
        return tag == "VBD" || tag == "VBN" || tag == "VBG";
    return false;
}

VariantCounts count_variants(const std::vector<VariableDoc>& docs,
                             const std::vector<VariableSpec>& specs) {
    VariantCounts counts;
    for (const auto& doc : docs) {
        const bool tagged = !doc.tags.empty();
        for (const auto& spec : specs) {
            size_t i = 0;
            while (i < doc.tokens.size()) {
                // longest match first within the variable
                const Variant* hit = nullptr;
                size_t hit_len = 0;
                for (size_t len = 2; len >= 1 && !hit; --len) {
                    if (i + len > doc.tokens.size()) continue;
                    for (const auto& variant : spec.variants) {
                        for (const auto& form : variant.surface_forms) {
                            if (form.size() != len) continue;
                            bool match = true;
                            for (size_t k = 0; k < len && match; ++k)
                                match = form[k] == doc.tokens[i + k];
                            if (match && variant.pos) {
                                if (!tagged ||
                                    !tag_matches(*variant.pos, doc.tags[i]))
                                    match = false;
                            }
                            if (match) {
                                hit = &variant;
                                hit_len = len;
                                break;
                            }
                        }
                        if (hit) break;
                    }
                    if (len == 1) break;
                }
                if (hit) {
                    counts.n[{doc.community, spec.id, hit->label}] += 1;
                    i += hit_len;
                } else {
                    ++i;
                }
            }
        }
    }
    return counts;
}

void write_counts_csv(std::ostream& out, const VariantCounts& counts,
                      const std::vector<VariableSpec>& specs,
                      const std::vector<std::string>& communities) {
    out << "variable,variant,role";
    for (const auto& c : communities) out << ',' << csv_field(c);
    out << ",n\n";
    for (const auto& spec : specs) {
        for (const auto& variant : spec.variants) {
            out << csv_field(spec.id) << ',' << csv_field(variant.label) << ','
                << to_string(variant.role);
            int64_t total = 0;
            for (const auto& c : communities) {
                auto p = counts.proportion(c, spec.id, variant.label);
                out << ',' << (p ? format_fixed(*p, 1) : "-");
                total += counts.count(c, spec.id, variant.label);
            }
            out << ',' << total << '\n';
        }
    }
}

DistributionPattern classify_distribution(
    const VariantCounts& counts, const VariableSpec& spec,
    const std::vector<std::string>& communities) {
    DistributionPattern result;
    result.variable = spec.id;

    // conservative share per community, over defined communities only
    std::vector<std::pair<std::string, double>> shares;
    for (const auto& c : communities) {
        int64_t total = counts.variable_total(c, spec.id);
        if (total == 0) continue;
        double cons = 0.0;
        for (const auto& v : spec.variants)
            if (v.role == Role::conservative)
                cons += static_cast<double>(counts.count(c, spec.id, v.label));
        shares.emplace_back(c, 100.0 * cons / static_cast<double>(total));
    }
    if (shares.size() < 2)
        throw DataError("classify_distribution: variable " + spec.id +
                        " has defined proportions in fewer than 2 communities");

    size_t cons_majority = 0;
    for (const auto& [c, share] : shares) {
        if (share > 50.0) {
            ++cons_majority;
            result.conservative_side.push_back(c);
        } else {
            result.innovative_side.push_back(c);
        }
    }

    if (cons_majority == shares.size()) {
        result.pattern = Pattern::conservative_dominant;
    } else if (cons_majority == 0) {
        result.pattern = Pattern::innovative_dominant;
    } else if (cons_majority == 1 && shares.size() > 2) {
        result.pattern = Pattern::community_outlier;
        result.outlier = result.conservative_side.front();
    } else if (cons_majority == shares.size() - 1 && shares.size() > 2) {
        result.pattern = Pattern::community_outlier;
        result.outlier = result.innovative_side.front();
    } else {
        result.pattern = Pattern::community_grouping;
    }
    return result;
}

HourlyVariantProfile hourly_variant_profile(const std::vector<VariableDoc>& docs,
                                            const VariableSpec& spec,
                                            const std::string& community,
                                            int utc_offset_hours) {
    std::array<int64_t, 24> innovative{};
    std::array<int64_t, 24> total{};
    std::vector<VariableDoc> filtered;
    for (const auto& doc : docs)
        if (doc.community == community) filtered.push_back(doc);

    for (const auto& doc : filtered) {
        int h = (hour_of_day_utc(doc.created_utc) + utc_offset_hours) % 24;
        if (h < 0) h += 24;
        VariantCounts c = count_variants({doc}, {spec});
        for (const auto& v : spec.variants) {
            int64_t k = c.count(community, spec.id, v.label);
            total[h] += k;
            if (v.role == Role::innovative) innovative[h] += k;
        }
    }

    HourlyVariantProfile profile;
    for (int h = 0; h < 24; ++h) {
        profile.tokens[h] = total[h];
        if (total[h] > 0)
            profile.innovative_share[h] =
                static_cast<double>(innovative[h]) / static_cast<double>(total[h]);
    }
    return profile;
}

static int64_t month_index(const CivilDate& d) {
    return static_cast<int64_t>(d.year) * 12 + (d.month - 1);
}

EmergenceSeries emergence_series(
    const std::vector<std::vector<std::string>>& term_patterns,
    const std::vector<VariableDoc>& docs) {
    EmergenceSeries series;
    if (docs.empty() || term_patterns.empty()) return series;

    int64_t lo = month_index(civil_from_unix(docs.front().created_utc));
    int64_t hi = lo;
    for (const auto& doc : docs) {
        int64_t m = month_index(civil_from_unix(doc.created_utc));
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    for (int64_t m = lo; m <= hi; ++m) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d", static_cast<int>(m / 12),
                      static_cast<int>(m % 12) + 1);
        series.months.emplace_back(buf);
    }

    std::vector<std::string> keys;
    for (const auto& p : term_patterns) keys.push_back(join(p, " "));
    for (const auto& k : keys)
        series.counts[k] = std::vector<int64_t>(series.months.size(), 0);

    for (const auto& doc : docs) {
        int64_t m = month_index(civil_from_unix(doc.created_utc)) - lo;
        for (size_t pi = 0; pi < term_patterns.size(); ++pi) {
            const auto& pat = term_patterns[pi];
            if (pat.empty() || pat.size() > doc.tokens.size()) continue;
            for (size_t i = 0; i + pat.size() <= doc.tokens.size(); ++i) {
                bool match = true;
                for (size_t k = 0; k < pat.size() && match; ++k)
                    match = doc.tokens[i + k] == pat[k];
                if (match) ++series.counts[keys[pi]][m];
            }
        }
    }
    return series;
}

}  // namespace kupu::variables
