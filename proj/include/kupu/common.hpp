#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kupu {

// Error raised when an input file or stream cannot be read.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Error raised when input data is structurally unusable (e.g. mostly
// malformed lines, bad spec files).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Error raised when an operation is called with data that violates its
// contract (empty input, OOV token, rank-deficient matrix, ...).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic 64-bit RNG (splitmix64). All sampling and training code
// uses this generator so that results are reproducible from a seed alone,
// independent of the standard library implementation.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n). n must be > 0.
    uint64_t uniform(uint64_t n) {
        // multiply-shift; bias is negligible for n << 2^64 and the result
        // is fully deterministic
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform real in [0, 1).
    double uniform_real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

// FNV-1a hash, used for config fingerprints in run manifests.
uint64_t fnv1a(std::string_view data);

// --- string helpers -------------------------------------------------------

std::vector<std::string> split_ws(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);

// --- UTF-8 ----------------------------------------------------------------

// Decodes one UTF-8 code point starting at `i`, advancing `i` past it.
// Invalid bytes decode as U+FFFD and advance by one.
uint32_t utf8_decode(std::string_view s, size_t& i);
void utf8_encode(uint32_t cp, std::string& out);

// Lowercases ASCII plus Latin-1 Supplement and Latin Extended-A letters,
// which covers the macronised vowels used in te reo Māori loanwords.
std::string utf8_to_lower(std::string_view s);

// True for letters of the Latin script (ASCII letters plus Latin-1 and
// Latin Extended-A letters).
bool is_latin_letter(uint32_t cp);

// --- civil time -----------------------------------------------------------

struct CivilDate {
    int year;
    int month;  // 1..12
    int day;    // 1..31
};

CivilDate civil_from_unix(int64_t ts);
int64_t unix_from_civil(const CivilDate& d);
int hour_of_day_utc(int64_t ts);

// "YYYY-MM" month key for a unix timestamp.
std::string month_key(int64_t ts);
// "YYYYQn" calendar-quarter key.
std::string quarter_key(int64_t ts);

// --- formatting -----------------------------------------------------------

// Fixed-precision decimal formatting; deterministic across runs.
std::string format_fixed(double v, int decimals);
// Shortest round-trip formatting for doubles in CSV output.
std::string format_double(double v);

// CSV field quoting (RFC-4180 style, only when needed).
std::string csv_field(std::string_view s);

}  // namespace kupu
