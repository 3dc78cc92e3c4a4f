#include "kupu/corpus.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace kupu::corpus {

using json = nlohmann::json;

std::string to_string(TextType t) {
    switch (t) {
        case TextType::rpost: return "rpost";
        case TextType::rstitle: return "rstitle";
        case TextType::rstext: return "rstext";
        case TextType::rcomm: return "rcomm";
    }
    return "?";
}

std::optional<TextType> text_type_from_string(std::string_view s) {
    if (s == "rpost") return TextType::rpost;
    if (s == "rstitle") return TextType::rstitle;
    if (s == "rstext") return TextType::rstext;
    if (s == "rcomm") return TextType::rcomm;
    return std::nullopt;
}

static std::optional<std::string> opt_string(const json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    return std::nullopt;
}

static int64_t int_field(const json& j, const std::string& key, int64_t fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (it->is_number_integer()) return it->get<int64_t>();
    if (it->is_number_float()) return static_cast<int64_t>(it->get<double>());
    if (it->is_string()) {
        try {
            return std::stoll(it->get<std::string>());
        } catch (...) {
            return fallback;
        }
    }
    return fallback;
}

static bool parse_record(const std::string& line, const Schema& schema,
                         RedditRecord& rec) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return false;

    auto id = opt_string(j, schema.id);
    if (!id || id->empty()) return false;
    rec.id = *id;
    rec.author = opt_string(j, schema.author).value_or("");
    rec.subreddit = opt_string(j, schema.subreddit).value_or("");
    rec.created_utc = int_field(j, schema.created_utc, 0);
    if (rec.created_utc <= 0) return false;
    rec.title = opt_string(j, schema.title);
    rec.selftext = opt_string(j, schema.selftext);
    rec.body = opt_string(j, schema.body);
    rec.score = int_field(j, schema.score, 0);
    rec.url = opt_string(j, schema.url);
    rec.distinguished = opt_string(j, schema.distinguished);

    // submissions carry a title, comments carry a body
    if (rec.title.has_value()) {
        rec.kind = Kind::submission;
    } else if (rec.body.has_value()) {
        rec.kind = Kind::comment;
    } else {
        return false;
    }
    return true;
}

IngestResult ingest(std::istream& in, const Schema& schema) {
    if (!in.good()) throw IoError("ingest: unreadable input stream");
    IngestResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++result.total_lines;
        RedditRecord rec;
        if (parse_record(line, schema, rec)) {
            result.records.push_back(std::move(rec));
        } else {
            ++result.skipped;
        }
    }
    if (in.bad()) throw IoError("ingest: read failure");
    if (result.total_lines > 0 && result.skipped * 2 > result.total_lines) {
        throw FormatError("ingest: more than 50% of lines are malformed (" +
                          std::to_string(result.skipped) + "/" +
                          std::to_string(result.total_lines) + ")");
    }
    return result;
}

// Inflates a gzip file into a string. Archive dumps at desk scale fit in
// memory; the CLI streams communities one file at a time.
static std::string gunzip_file(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, n);
    if (n < 0) {
        int err = 0;
        std::string msg = gzerror(f, &err);
        gzclose(f);
        throw IoError("gzip read error in " + path + ": " + msg);
    }
    gzclose(f);
    return out;
}

IngestResult ingest_file(const std::string& path, const Schema& schema) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path);
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();
    if (magic[0] == 0x1f && magic[1] == 0x8b) {
        std::istringstream in(gunzip_file(path));
        return ingest(in, schema);
    }
    std::ifstream in(path);
    return ingest(in, schema);
}

static bool is_deletion_sentinel(const std::string& s) {
    return s == "[deleted]" || s == "[removed]";
}

std::vector<RedditRecord> clean(std::vector<RedditRecord> records) {
    std::vector<RedditRecord> out;
    out.reserve(records.size());
    std::unordered_set<std::string> seen;
    for (auto& rec : records) {
        if (is_deletion_sentinel(rec.author)) continue;
        const std::optional<std::string>& text =
            rec.kind == Kind::submission ? rec.selftext : rec.body;
        if (text && is_deletion_sentinel(*text)) continue;
        if (!seen.insert(rec.id).second) continue;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TextUnit> derive_text_units(const RedditRecord& rec) {
    std::vector<TextUnit> units;
    auto push = [&](TextType type, const std::string& text) {
        std::string t = trim(text);
        if (t.empty()) return;
        TextUnit u;
        u.record_id = rec.id;
        u.community = rec.subreddit;
        u.type = type;
        u.text = std::move(t);
        u.created_utc = rec.created_utc;
        u.author = rec.author;
        u.score = rec.score;
        u.distinguished = rec.distinguished.has_value();
        units.push_back(std::move(u));
    };

    if (rec.kind == Kind::comment) {
        push(TextType::rcomm, rec.body.value_or(""));
        return units;
    }
    const bool has_selftext = rec.selftext && !trim(*rec.selftext).empty();
    if (has_selftext) {
        push(TextType::rstitle, rec.title.value_or(""));
        push(TextType::rstext, *rec.selftext);
    } else {
        // link posts and title-only posts both become rpost
        push(TextType::rpost, rec.title.value_or(""));
    }
    return units;
}

double ttr(const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw DataError("ttr: empty token sequence");
    std::unordered_set<std::string> distinct(tokens.begin(), tokens.end());
    return static_cast<double>(distinct.size()) /
           static_cast<double>(tokens.size());
}

std::vector<StatsRow> corpus_stats(const std::vector<TextUnit>& units) {
    struct Acc {
        int64_t n = 0;
        int64_t words = 0;
        int64_t max_words = 0;
        std::unordered_set<std::string> types;
    };
    std::map<std::pair<std::string, int>, Acc> groups;
    for (const auto& u : units) {
        auto& acc = groups[{u.community, static_cast<int>(u.type)}];
        int64_t w = 0;
        for (const auto& tok : split_ws(u.text)) {
            acc.types.insert(to_lower_ascii(tok));
            ++w;
        }
        acc.n += 1;
        acc.words += w;
        acc.max_words = std::max(acc.max_words, w);
    }
    std::vector<StatsRow> rows;
    for (const auto& [key, acc] : groups) {
        StatsRow r;
        r.community = key.first;
        r.type = static_cast<TextType>(key.second);
        r.n = acc.n;
        r.words = acc.words;
        r.mean_words = acc.n ? static_cast<double>(acc.words) / acc.n : 0.0;
        r.max_words = acc.max_words;
        r.ttr = acc.words ? static_cast<double>(acc.types.size()) / acc.words : 0.0;
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_stats_csv(std::ostream& out, const std::vector<StatsRow>& rows) {
    out << "community,text_type,n,words,mean,max,ttr\n";
    for (const auto& r : rows) {
        out << csv_field(r.community) << ',' << to_string(r.type) << ',' << r.n
            << ',' << r.words << ',' << format_fixed(r.mean_words, 1) << ','
            << r.max_words << ',' << format_fixed(r.ttr, 6) << '\n';
    }
}

std::vector<double> hourly_profile(const std::vector<TextUnit>& units,
                                   int utc_offset_hours) {
    if (units.empty()) throw DataError("hourly_profile: no units");
    std::vector<double> bins(24, 0.0);
    for (const auto& u : units) {
        int h = (hour_of_day_utc(u.created_utc) + utc_offset_hours) % 24;
        if (h < 0) h += 24;
        bins[h] += 1.0;
    }
    for (auto& b : bins) b /= static_cast<double>(units.size());
    return bins;
}

std::vector<TextUnit> filter_authors(const std::vector<TextUnit>& units,
                                     const std::vector<std::string>& patterns) {
    std::vector<TextUnit> out;
    out.reserve(units.size());
    for (const auto& u : units) {
        if (u.distinguished) continue;
        bool hit = false;
        for (const auto& p : patterns) {
            if (!p.empty() && contains_ci(u.author, p)) {
                hit = true;
                break;
            }
        }
        if (!hit) out.push_back(u);
    }
    return out;
}

std::vector<TextUnit> filter_local_hours(const std::vector<TextUnit>& units,
                                         int start_hour, int end_hour,
                                         int utc_offset_hours) {
    if (!(0 <= start_hour && start_hour < end_hour && end_hour <= 24))
        throw DataError("filter_local_hours: need 0 <= start < end <= 24");
    std::vector<TextUnit> out;
    out.reserve(units.size());
    for (const auto& u : units) {
        int h = (hour_of_day_utc(u.created_utc) + utc_offset_hours) % 24;
        if (h < 0) h += 24;
        if (h >= start_hour && h < end_hour) out.push_back(u);
    }
    return out;
}

}  // namespace kupu::corpus
