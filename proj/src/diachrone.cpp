#include "kupu/diachrone.hpp"

#include <algorithm>
#include <ostream>

namespace kupu::diachrone {

std::string to_string(Trend t) {
    switch (t) {
        case Trend::increasing: return "increasing";
        case Trend::decreasing: return "decreasing";
        case Trend::none: return "none";
    }
    return "?";
}

PeriodPartition partition_equal_words(std::vector<TimedDoc> docs, int k) {
    if (k < 1) throw DataError("partition_equal_words: k must be >= 1");
    if (static_cast<int>(docs.size()) < k)
        throw DataError("partition_equal_words: fewer documents than periods");

    std::stable_sort(docs.begin(), docs.end(),
                     [](const TimedDoc& a, const TimedDoc& b) {
                         return a.created_utc < b.created_utc;
                     });

    int64_t total_words = 0;
    for (const auto& d : docs) total_words += static_cast<int64_t>(d.tokens.size());

    PeriodPartition partition;
    partition.periods.resize(k);
    size_t pos = 0;
    int64_t remaining_words = total_words;
    for (int p = 0; p < k; ++p) {
        Period& period = partition.periods[p];
        int remaining_periods = k - p;
        // leave at least one document for every later period
        size_t reserve = static_cast<size_t>(remaining_periods - 1);
        int64_t target =
            remaining_words / remaining_periods;  // recomputed per period
        bool first = true;
        while (pos < docs.size() - reserve) {
            if (!first && p + 1 < k && period.words >= target) break;
            auto& doc = docs[pos];
            if (first) {
                period.start_ts = doc.created_utc;
                first = false;
            }
            period.end_ts = doc.created_utc;
            period.words += static_cast<int64_t>(doc.tokens.size());
            period.docs.push_back(std::move(doc.tokens));
            ++pos;
        }
        remaining_words -= period.words;
    }
    // any reserved leftovers belong to the final period
    while (pos < docs.size()) {
        Period& last = partition.periods.back();
        last.end_ts = docs[pos].created_utc;
        last.words += static_cast<int64_t>(docs[pos].tokens.size());
        last.docs.push_back(std::move(docs[pos].tokens));
        ++pos;
    }
    return partition;
}

void write_period_manifest(std::ostream& out, const PeriodPartition& partition) {
    out << "period,start_ts,end_ts,words\n";
    for (size_t p = 0; p < partition.periods.size(); ++p) {
        const auto& period = partition.periods[p];
        out << (p + 1) << ',' << period.start_ts << ',' << period.end_ts << ','
            << period.words << '\n';
    }
}

std::vector<embed::EmbeddingModel> train_sequential(
    const PeriodPartition& partition, const embed::TrainConfig& config) {
    std::vector<embed::EmbeddingModel> models;
    for (size_t p = 0; p < partition.periods.size(); ++p) {
        embed::TrainConfig cfg = config;
        cfg.seed = config.seed + p;
        try {
            models.push_back(embed::train(partition.periods[p].docs, cfg));
        } catch (const DataError& e) {
            throw DataError("period " + std::to_string(p + 1) + ": " + e.what());
        }
    }
    return models;
}

std::vector<embed::EmbeddingModel> train_incremental(
    const PeriodPartition& partition, const embed::TrainConfig& config) {
    std::vector<embed::EmbeddingModel> models;
    for (size_t p = 0; p < partition.periods.size(); ++p) {
        embed::TrainConfig cfg = config;
        cfg.seed = config.seed + p;
        const embed::EmbeddingModel* init = models.empty() ? nullptr : &models.back();
        try {
            models.push_back(embed::train(partition.periods[p].docs, cfg, init));
        } catch (const DataError& e) {
            throw DataError("period " + std::to_string(p + 1) + ": " + e.what());
        }
    }
    return models;
}

std::vector<DiachronicSeries> shift_series(
    const std::vector<embed::EmbeddingModel>& models, const std::string& source,
    const std::vector<std::string>& targets, TrainMode mode) {
    if (models.empty()) throw DataError("shift_series: no models");
    bool source_seen = false;
    for (const auto& m : models)
        if (m.vocab().find(source) >= 0) source_seen = true;
    if (!source_seen)
        throw DataError("shift_series: source '" + source +
                        "' is out of vocabulary in every period");

    std::vector<DiachronicSeries> out;
    for (const auto& target : targets) {
        DiachronicSeries series;
        series.source = source;
        series.target = target;
        series.mode = mode;
        for (const auto& m : models) {
            if (m.vocab().find(source) < 0 || m.vocab().find(target) < 0) {
                series.cosine.push_back(std::nullopt);
            } else {
                series.cosine.push_back(m.cosine(source, target));
            }
        }
        out.push_back(std::move(series));
    }
    return out;
}

Trend monotonic_trend(const DiachronicSeries& series) {
    std::vector<double> scored;
    for (const auto& c : series.cosine)
        if (c) scored.push_back(*c);
    if (scored.size() < 2)
        throw DataError("monotonic_trend: fewer than two scored periods");
    bool non_decreasing = true, non_increasing = true;
    for (size_t i = 1; i < scored.size(); ++i) {
        if (scored[i] < scored[i - 1]) non_decreasing = false;
        if (scored[i] > scored[i - 1]) non_increasing = false;
    }
    if (non_decreasing && non_increasing) return Trend::none;  // flat
    if (non_decreasing) return Trend::increasing;
    if (non_increasing) return Trend::decreasing;
    return Trend::none;
}

void write_series_csv(std::ostream& out,
                      const std::vector<DiachronicSeries>& series) {
    if (series.empty()) return;
    out << "source,target";
    for (size_t p = 0; p < series.front().cosine.size(); ++p)
        out << ",period_" << (p + 1);
    out << ",trend\n";
    for (const auto& s : series) {
        out << csv_field(s.source) << ',' << csv_field(s.target);
        for (const auto& c : s.cosine)
            out << ',' << (c ? format_fixed(*c, 6) : std::string("-"));
        std::string trend = "none";
        try {
            trend = to_string(monotonic_trend(s));
        } catch (const DataError&) {
            trend = "-";
        }
        out << ',' << trend << '\n';
    }
}

}  // namespace kupu::diachrone
