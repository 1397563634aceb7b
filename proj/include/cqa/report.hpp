// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// File renderings of scored runs: the per-slot verdict CSV, the accuracy /
// delta / length table (CSV and Markdown), the remain-rate curve (CSV and a
// dependency-free SVG line chart), and the failure-label CSV.
//
// Everything here is deterministic: re-rendering the same inputs is
// byte-identical, which the cache-idempotence acceptance check relies on.

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "cqa/csv.hpp"
#include "cqa/errors.hpp"
#include "cqa/metrics.hpp"
#include "cqa/trace.hpp"

namespace cqa {

/// One scored slot of one sample, as persisted in verdicts.csv.
struct VerdictRow {
    std::string compound_id;
    int sample_index = 0;
    int slot = 1;
    int indicator = 0;
    std::string reason;
    std::string raw;
    std::string normalized;
};

inline const std::vector<std::string> kVerdictHeader = {
    "compound_id", "sample_index", "slot", "indicator", "reason", "raw", "normalized"};

inline std::string render_verdicts_csv(const std::vector<VerdictRow>& rows) {
    std::string out = csv_row(kVerdictHeader);
    for (const auto& r : rows) {
        out += csv_row({r.compound_id, std::to_string(r.sample_index), std::to_string(r.slot),
                        std::to_string(r.indicator), r.reason, r.raw, r.normalized});
    }
    return out;
}

inline void write_verdicts_csv(const std::string& path, const std::vector<VerdictRow>& rows) {
    write_text_file(path, render_verdicts_csv(rows));
}

inline std::vector<VerdictRow> read_verdicts_csv(const std::string& path) {
    CsvTable table = read_csv(path);
    if (table.header != kVerdictHeader) {
        throw ParseError(path, 1, "unexpected verdict CSV header");
    }
    std::vector<VerdictRow> rows;
    rows.reserve(table.rows.size());
    int line = 1;
    for (const auto& cells : table.rows) {
        ++line;
        if (cells.size() != kVerdictHeader.size()) {
            throw ParseError(path, line, "expected " + std::to_string(kVerdictHeader.size()) +
                                             " cells, got " + std::to_string(cells.size()));
        }
        try {
            rows.push_back({cells[0], std::stoi(cells[1]), std::stoi(cells[2]), std::stoi(cells[3]),
                            cells[4], cells[5], cells[6]});
        } catch (const std::exception&) {
            throw ParseError(path, line, "non-numeric cell in verdict row");
        }
    }
    return rows;
}

// --- metric table renderings -----------------------------------------------------

namespace detail {

inline std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string fixed1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

inline std::string signed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.4f", v);
    return buf;
}

}  // namespace detail

/// dataset,k,acc,delta_acc,mean_len,delta_len,n_samples; per-dataset cells
/// first (dataset asc, k asc), then the weighted overall rows when present.
inline std::string render_table_csv(const MetricsTable& table) {
    std::string out =
        csv_row({"dataset", "k", "acc", "delta_acc", "mean_len", "delta_len", "n_samples"});
    auto emit = [&out](const AccuracyCell& c) {
        out += csv_row({c.dataset, std::to_string(c.k), detail::fixed4(c.acc),
                        detail::fixed4(c.delta_acc), detail::fixed1(c.mean_len),
                        detail::fixed1(c.delta_len), std::to_string(c.n_samples)});
    };
    for (const auto& c : table.cells) emit(c);
    for (const auto& c : table.overall_cells) emit(c);
    return out;
}

inline std::string render_table_md(const MetricsTable& table) {
    std::string unit = table.used_tokens ? "tokens" : "chars";
    std::string out = "| dataset | k | Acc | dAcc | Len (" + unit + ") | dLen | n |\n";
    out += "|---|---:|---:|---:|---:|---:|---:|\n";
    auto emit = [&out](const AccuracyCell& c) {
        out += "| " + c.dataset + " | " + std::to_string(c.k) + " | " + detail::fixed4(c.acc) +
               " | " + (c.k == 1 ? std::string("-") : detail::signed4(c.delta_acc)) + " | " +
               detail::fixed1(c.mean_len) + " | " +
               (c.k == 1 ? std::string("-") : detail::signed4(c.delta_len)) + " | " +
               std::to_string(c.n_samples) + " |\n";
    };
    for (const auto& c : table.cells) emit(c);
    for (const auto& c : table.overall_cells) emit(c);
    if (table.mixed_length_fallback) {
        out += "\nLengths fell back to characters: token usage was not reported for every sample.\n";
    }
    return out;
}

inline std::string render_remain_rate_csv(const MetricsTable& table) {
    std::string out = csv_row({"dataset", "k", "remain_rate"});
    for (const auto& p : table.remain_rates) {
        out += csv_row({p.dataset, std::to_string(p.k), detail::fixed4(p.remain_rate)});
    }
    return out;
}

/// Line chart of remain rate vs k, one polyline per dataset. Pure SVG text,
/// no external assets, deterministic output.
inline std::string render_remain_rate_svg(const MetricsTable& table) {
    constexpr int width = 640, height = 400;
    constexpr double ml = 56, mr = 160, mt = 24, mb = 44;  // margins
    const double plot_w = width - ml - mr, plot_h = height - mt - mb;

    int k_min = 1, k_max = 1;
    double y_max = 1.0;
    for (const auto& p : table.remain_rates) {
        k_max = std::max(k_max, p.k);
        y_max = std::max(y_max, p.remain_rate);
    }
    k_max = std::max(k_max, 2);
    y_max = y_max * 1.02;

    auto x_of = [&](double k) { return ml + (k - k_min) / double(k_max - k_min) * plot_w; };
    auto y_of = [&](double v) { return mt + (1.0 - v / y_max) * plot_h; };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", v);
        return std::string(buf);
    };

    std::map<std::string, std::vector<const RemainRatePoint*>> series;
    for (const auto& p : table.remain_rates) series[p.dataset].push_back(&p);

    const std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b"};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
           " " + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(ml) + "\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">"
           "Remain rate vs combination factor k</text>\n";

    // axes
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(ml) + "\" y2=\"" +
           fmt(mt + plot_h) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt + plot_h) + "\" x2=\"" + fmt(ml + plot_w) +
           "\" y2=\"" + fmt(mt + plot_h) + "\" stroke=\"black\"/>\n";
    for (int k = k_min; k <= k_max; ++k) {
        double x = x_of(k);
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(mt + plot_h) + "\" x2=\"" + fmt(x) +
               "\" y2=\"" + fmt(mt + plot_h + 4) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(mt + plot_h + 18) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
               std::to_string(k) + "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        double v = y_max * i / 5.0;
        double y = y_of(v);
        char label[16];
        std::snprintf(label, sizeof(label), "%.2f", v);
        svg += "<line x1=\"" + fmt(ml - 4) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(ml) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"black\"/>\n";
        svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(ml + plot_w) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + fmt(ml - 8) + "\" y=\"" + fmt(y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + label +
               "</text>\n";
    }
    svg += "<text x=\"" + fmt(ml + plot_w / 2) + "\" y=\"" + fmt(height - 8) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">k</text>\n";

    std::size_t idx = 0;
    for (const auto& [name, points] : series) {
        const std::string& color = palette[idx % palette.size()];
        std::string poly;
        for (const auto* p : points) {
            poly += fmt(x_of(p->k)) + "," + fmt(y_of(p->remain_rate)) + " ";
        }
        svg += "<polyline points=\"" + poly + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        for (const auto* p : points) {
            svg += "<circle cx=\"" + fmt(x_of(p->k)) + "\" cy=\"" + fmt(y_of(p->remain_rate)) +
                   "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        double ly = mt + 16 + 18 * double(idx);
        svg += "<line x1=\"" + fmt(ml + plot_w + 12) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
               fmt(ml + plot_w + 32) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(ml + plot_w + 38) + "\" y=\"" + fmt(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + name + "</text>\n";
        ++idx;
    }
    svg += "</svg>\n";
    return svg;
}

// --- failure labels ----------------------------------------------------------------

inline const std::vector<std::string> kLabelHeader = {
    "compound_id", "sample_index", "label", "switch_count", "marker_count", "answered_slots"};

inline std::string render_labels_csv(const std::vector<LabelRecord>& labels) {
    std::string out = csv_row(kLabelHeader);
    for (const auto& l : labels) {
        out += csv_row({l.compound_id, std::to_string(l.sample_index), to_string(l.label),
                        std::to_string(l.switch_count), std::to_string(l.marker_count),
                        answered_slots_field(l.answered_slots)});
    }
    return out;
}

inline void write_labels_csv(const std::string& path, const std::vector<LabelRecord>& labels) {
    write_text_file(path, render_labels_csv(labels));
}

}  // namespace cqa
