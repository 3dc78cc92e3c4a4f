#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kupu/common.hpp"

namespace kupu::corpus {

enum class Kind { submission, comment };

// One raw archive record, submission or comment.
struct RedditRecord {
    std::string id;
    std::string author;
    std::string subreddit;
    int64_t created_utc = 0;
    Kind kind = Kind::comment;
    std::optional<std::string> title;
    std::optional<std::string> selftext;
    std::optional<std::string> body;
    int64_t score = 0;
    std::optional<std::string> url;
    std::optional<std::string> distinguished;
};

// The four text types, by production circumstance: link-post titles,
// selfpost titles, selfpost bodies, and comments.
enum class TextType { rpost, rstitle, rstext, rcomm };

std::string to_string(TextType t);
std::optional<TextType> text_type_from_string(std::string_view s);

// The atom of every downstream analysis.
struct TextUnit {
    std::string record_id;
    std::string community;
    TextType type = TextType::rcomm;
    std::string text;
    int64_t created_utc = 0;
    std::string author;
    int64_t score = 0;
    bool distinguished = false;  // moderator marker carried from the record
};

// Maps archive field names onto the record schema. Values are the names
// used in the input; keys are the canonical names below.
struct Schema {
    std::string id = "id";
    std::string author = "author";
    std::string subreddit = "subreddit";
    std::string created_utc = "created_utc";
    std::string title = "title";
    std::string selftext = "selftext";
    std::string body = "body";
    std::string score = "score";
    std::string url = "url";
    std::string distinguished = "distinguished";
};

struct IngestResult {
    std::vector<RedditRecord> records;
    size_t skipped = 0;  // malformed lines
    size_t total_lines = 0;
};

// Reads newline-delimited JSON records from a stream. Malformed lines are
// counted and skipped; more than 50% malformed raises FormatError.
IngestResult ingest(std::istream& in, const Schema& schema = {});

// Opens a path (plain or gzip-compressed, detected by magic bytes) and
// ingests it.
IngestResult ingest_file(const std::string& path, const Schema& schema = {});

// Drops records whose author or text field equals a deletion sentinel
// ("[deleted]"/"[removed]") and removes duplicate ids, keeping the first
// occurrence. Idempotent.
std::vector<RedditRecord> clean(std::vector<RedditRecord> records);

// Splits a cleaned record into typed text units:
//   submission with url and empty selftext -> rpost (title)
//   submission with selftext              -> rstitle (title) + rstext (body)
//   submission with neither               -> rpost (title)
//   comment                               -> rcomm (body)
// Units whose text is empty after trimming are not emitted.
std::vector<TextUnit> derive_text_units(const RedditRecord& record);

// Type-token ratio: distinct / total over whitespace tokens, lowercased.
double ttr(const std::vector<std::string>& tokens);

// Per community x text type descriptive statistics.
struct StatsRow {
    std::string community;
    TextType type;
    int64_t n = 0;
    int64_t words = 0;
    double mean_words = 0.0;
    int64_t max_words = 0;
    double ttr = 0.0;
};

std::vector<StatsRow> corpus_stats(const std::vector<TextUnit>& units);
void write_stats_csv(std::ostream& out, const std::vector<StatsRow>& rows);

// 24 proportions summing to 1; bin = (hour_utc + offset) mod 24.
std::vector<double> hourly_profile(const std::vector<TextUnit>& units,
                                   int utc_offset_hours);

// Removes units whose author contains any pattern (case-insensitive
// substring) and units from moderator-distinguished records.
std::vector<TextUnit> filter_authors(const std::vector<TextUnit>& units,
                                     const std::vector<std::string>& patterns);

// Keeps units whose local hour h satisfies start <= h < end.
std::vector<TextUnit> filter_local_hours(const std::vector<TextUnit>& units,
                                         int start_hour, int end_hour,
                                         int utc_offset_hours);

}  // namespace kupu::corpus
