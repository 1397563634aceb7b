// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Aggregation of per-sample verdicts into the quantitative suite: accuracy
// per (dataset, k), deltas against the k=1 baseline, mean completion length,
// the remain-rate curve, and the question-count-weighted Overall row.
//
// Accuracy pools slots across compounds and replicates (micro-average):
// Sum(indicators) / Sum(slots). For uniform k and balanced replicates this
// equals the mean of per-compound means, and it degrades gracefully when some
// samples are missing.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqa/errors.hpp"
#include "cqa/jsonl.hpp"

namespace cqa {

/// One model completion for one compound at one replicate, reduced to what the
/// aggregator needs.
struct SampleRecord {
    std::string dataset;
    int k = 1;
    int replicate = 0;
    std::string compound_id;
    std::vector<int> indicators;  // length k, values 0/1
    std::optional<long long> length_tokens;
    long long length_chars = 0;
};

struct AccuracyCell {
    std::string dataset;
    int k = 1;
    double acc = 0.0;
    double delta_acc = 0.0;  // acc - acc at k=1 (0 at k=1)
    double mean_len = 0.0;
    double delta_len = 0.0;
    long long n_samples = 0;
};

struct RemainRatePoint {
    std::string dataset;
    int k = 1;
    double remain_rate = 1.0;  // acc_k / acc_k1
};

/// Slot-weighted mean of all indicators for one (dataset, k) slice.
inline double accuracy(const std::vector<SampleRecord>& records) {
    if (records.empty()) throw NoData("accuracy over empty record set");
    long long hits = 0;
    long long slots = 0;
    for (const auto& r : records) {
        for (int ind : r.indicators) hits += ind;
        slots += static_cast<long long>(r.indicators.size());
    }
    if (slots == 0) throw NoData("accuracy over records with no slots");
    return static_cast<double>(hits) / static_cast<double>(slots);
}

inline double delta_acc(double acc_k, double acc_k1) { return acc_k - acc_k1; }

/// acc_k / acc_k1; callers must skip the point when acc_k1 == 0.
inline double remain_rate(double acc_k, double acc_k1) {
    if (acc_k1 == 0.0) throw NoData("remain rate undefined: k=1 accuracy is zero");
    return acc_k / acc_k1;
}

struct LengthStats {
    double mean_len = 0.0;
    double delta_len = 0.0;
    bool used_tokens = false;   // false = character lengths
    bool mixed_fallback = false;  // tokens were present on some but not all records
};

/// Mean completion length. Token counts are used when every record has one,
/// otherwise character counts (flagged when availability was mixed).
inline LengthStats length_stats(const std::vector<SampleRecord>& records,
                                std::optional<double> mean_len_k1 = std::nullopt) {
    if (records.empty()) throw NoData("length stats over empty record set");
    bool all_tokens = std::all_of(records.begin(), records.end(),
                                  [](const SampleRecord& r) { return r.length_tokens.has_value(); });
    bool any_tokens = std::any_of(records.begin(), records.end(),
                                  [](const SampleRecord& r) { return r.length_tokens.has_value(); });
    LengthStats stats;
    stats.used_tokens = all_tokens;
    stats.mixed_fallback = any_tokens && !all_tokens;
    double sum = 0.0;
    for (const auto& r : records) {
        sum += all_tokens ? static_cast<double>(*r.length_tokens)
                          : static_cast<double>(r.length_chars);
    }
    stats.mean_len = sum / static_cast<double>(records.size());
    stats.delta_len = mean_len_k1 ? stats.mean_len - *mean_len_k1 : 0.0;
    return stats;
}

/// Question-count-weighted mean across datasets at a fixed k. The weights are
/// the dataset sizes (e.g. 500 / 30 / 198), which is the aggregation that
/// reproduces the published Overall row, unlike the unweighted mean.
inline double overall(const std::vector<std::pair<double, double>>& acc_and_weight) {
    if (acc_and_weight.empty()) throw NoData("overall over empty cell set");
    double num = 0.0;
    double den = 0.0;
    for (const auto& [acc, w] : acc_and_weight) {
        if (w <= 0) throw IncompleteRow("overall weights must be positive");
        num += acc * w;
        den += w;
    }
    return num / den;
}

struct MetricsTable {
    std::vector<AccuracyCell> cells;            // dataset asc, k asc
    std::vector<AccuracyCell> overall_cells;    // one per k, when weights cover all datasets
    std::vector<RemainRatePoint> remain_rates;  // includes "overall" series when available
    bool used_tokens = false;
    bool mixed_length_fallback = false;
};

inline const std::string kOverallSeries = "overall";

/// Builds every (dataset, k) cell plus remain-rate curves. Permutation
/// invariant over input records. Each dataset present must include k=1
/// records; `weights` (dataset -> question count) enables the Overall rows
/// and may be empty.
inline MetricsTable build_table(const std::vector<SampleRecord>& records,
                                const std::map<std::string, long long>& weights = {}) {
    MetricsTable table;
    if (records.empty()) return table;

    std::map<std::pair<std::string, int>, std::vector<SampleRecord>> slices;
    for (const auto& r : records) slices[{r.dataset, r.k}].push_back(r);

    std::map<std::string, double> acc_k1;
    std::map<std::string, double> len_k1;
    for (const auto& [key, slice] : slices) {
        if (key.second == 1) {
            acc_k1[key.first] = accuracy(slice);
            len_k1[key.first] = length_stats(slice).mean_len;
        }
    }
    for (const auto& [key, slice] : slices) {
        if (!acc_k1.count(key.first)) throw NoBaseline(key.first);
        (void)slice;
    }

    bool any_mixed = false;
    bool all_tokens = true;
    for (const auto& [key, slice] : slices) {
        const auto& [dataset, k] = key;
        AccuracyCell cell;
        cell.dataset = dataset;
        cell.k = k;
        cell.acc = accuracy(slice);
        cell.delta_acc = delta_acc(cell.acc, acc_k1[dataset]);
        LengthStats len = length_stats(slice, len_k1[dataset]);
        cell.mean_len = len.mean_len;
        cell.delta_len = len.delta_len;
        cell.n_samples = static_cast<long long>(slice.size());
        any_mixed = any_mixed || len.mixed_fallback;
        all_tokens = all_tokens && len.used_tokens;
        table.cells.push_back(cell);

        if (acc_k1[dataset] > 0.0) {
            table.remain_rates.push_back({dataset, k, remain_rate(cell.acc, acc_k1[dataset])});
        }
    }
    table.used_tokens = all_tokens;
    table.mixed_length_fallback = any_mixed;

    // Overall rows: only when weights cover every dataset at that k.
    std::vector<std::string> datasets;
    for (const auto& [name, acc] : acc_k1) {
        (void)acc;
        datasets.push_back(name);
    }
    std::map<int, std::vector<const AccuracyCell*>> by_k;
    for (const auto& cell : table.cells) by_k[cell.k].push_back(&cell);

    bool weights_ok = !weights.empty() &&
                      std::all_of(datasets.begin(), datasets.end(),
                                  [&](const std::string& d) { return weights.count(d) > 0; });
    if (weights_ok && datasets.size() >= 1) {
        std::optional<double> overall_k1;
        for (const auto& [k, cells] : by_k) {
            if (cells.size() != datasets.size()) continue;  // incomplete row, skip
            std::vector<std::pair<double, double>> acc_w;
            double len_sum = 0.0;
            long long n = 0;
            for (const auto* cell : cells) {
                acc_w.emplace_back(cell->acc, static_cast<double>(weights.at(cell->dataset)));
                len_sum += cell->mean_len * static_cast<double>(cell->n_samples);
                n += cell->n_samples;
            }
            AccuracyCell cell;
            cell.dataset = kOverallSeries;
            cell.k = k;
            cell.acc = overall(acc_w);
            cell.mean_len = n > 0 ? len_sum / static_cast<double>(n) : 0.0;
            cell.n_samples = n;
            if (k == 1) overall_k1 = cell.acc;
            table.overall_cells.push_back(cell);
        }
        if (overall_k1) {
            std::optional<double> len_k1_overall;
            for (auto& cell : table.overall_cells) {
                if (cell.k == 1) len_k1_overall = cell.mean_len;
            }
            for (auto& cell : table.overall_cells) {
                cell.delta_acc = delta_acc(cell.acc, *overall_k1);
                if (len_k1_overall) cell.delta_len = cell.mean_len - *len_k1_overall;
                if (*overall_k1 > 0.0) {
                    table.remain_rates.push_back(
                        {kOverallSeries, cell.k, remain_rate(cell.acc, *overall_k1)});
                }
            }
        }
    }

    std::sort(table.remain_rates.begin(), table.remain_rates.end(),
              [](const RemainRatePoint& a, const RemainRatePoint& b) {
                  return std::tie(a.dataset, a.k) < std::tie(b.dataset, b.k);
              });
    return table;
}

// --- record (de)serialization -------------------------------------------------

inline json sample_record_to_json(const SampleRecord& r) {
    json j{{"dataset", r.dataset},
           {"k", r.k},
           {"replicate", r.replicate},
           {"compound_id", r.compound_id},
           {"indicators", r.indicators},
           {"length_chars", r.length_chars}};
    if (r.length_tokens) j["length_tokens"] = *r.length_tokens;
    return j;
}

inline SampleRecord sample_record_from_json(const json& j, const std::string& path, int line) {
    SampleRecord r;
    try {
        r.dataset = j.at("dataset").get<std::string>();
        r.k = j.at("k").get<int>();
        r.replicate = j.at("replicate").get<int>();
        r.compound_id = j.at("compound_id").get<std::string>();
        r.indicators = j.at("indicators").get<std::vector<int>>();
        r.length_chars = j.at("length_chars").get<long long>();
        if (j.contains("length_tokens")) r.length_tokens = j["length_tokens"].get<long long>();
    } catch (const json::exception& ex) {
        throw ParseError(path, line, std::string("bad sample record: ") + ex.what());
    }
    return r;
}

inline void write_records(const std::vector<SampleRecord>& records, const std::string& path) {
    std::vector<json> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(sample_record_to_json(r));
    write_jsonl(path, out);
}

inline std::vector<SampleRecord> read_records(const std::string& path) {
    std::vector<SampleRecord> records;
    for_each_jsonl(path, [&](const json& j, int line) {
        records.push_back(sample_record_from_json(j, path, line));
    });
    return records;
}

}  // namespace cqa
