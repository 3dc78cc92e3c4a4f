#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kupu/common.hpp"
#include "kupu/embed.hpp"

namespace kupu::diachrone {

// A timestamped tokenized document.
struct TimedDoc {
    int64_t created_utc = 0;
    std::vector<std::string> tokens;
};

struct Period {
    int64_t start_ts = 0;
    int64_t end_ts = 0;  // inclusive of the last document's timestamp
    int64_t words = 0;
    std::vector<std::vector<std::string>> docs;
};

struct PeriodPartition {
    std::vector<Period> periods;
};

// Chronological sort, then greedy cuts so each period's word total is
// within one document's length of total/k.
PeriodPartition partition_equal_words(std::vector<TimedDoc> docs, int k);

void write_period_manifest(std::ostream& out, const PeriodPartition& partition);

// Independent models, fresh random init per period (seed + period index).
std::vector<embed::EmbeddingModel> train_sequential(
    const PeriodPartition& partition, const embed::TrainConfig& config);

// model_1 fresh; model_{i+1} initialized from model_i.
std::vector<embed::EmbeddingModel> train_incremental(
    const PeriodPartition& partition, const embed::TrainConfig& config);

enum class TrainMode { sequential, incremental };

enum class Trend { increasing, decreasing, none };

std::string to_string(Trend t);

struct DiachronicSeries {
    std::string source;
    std::string target;
    std::vector<std::optional<double>> cosine;  // one slot per period
    TrainMode mode = TrainMode::incremental;
};

// Cosine of (source, target) per period; OOV periods carry no value.
// Raises if the source is out of vocabulary in every period.
std::vector<DiachronicSeries> shift_series(
    const std::vector<embed::EmbeddingModel>& models, const std::string& source,
    const std::vector<std::string>& targets,
    TrainMode mode = TrainMode::incremental);

// Non-strict monotone classification over the scored periods.
Trend monotonic_trend(const DiachronicSeries& series);

void write_series_csv(std::ostream& out,
                      const std::vector<DiachronicSeries>& series);

}  // namespace kupu::diachrone
