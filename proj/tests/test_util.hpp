// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for test binaries only.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "cqa/dataset.hpp"

namespace cqatest {

/// Self-deleting unique temp directory.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        for (;;) {
            auto candidate = base / ("cqatest-" + std::to_string(rng()));
            if (std::filesystem::create_directory(candidate)) {
                path = candidate;
                return;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }

    /// Writes `content` under the directory and returns the full path.
    std::string file(const std::string& name, const std::string& content) const {
        std::string p = file(name);
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

/// Arithmetic dataset: question i asks a sum whose gold answer is unique.
inline cqa::Dataset make_math_dataset(const std::string& name, int n) {
    cqa::Dataset d;
    d.name = name;
    for (int i = 0; i < n; ++i) {
        cqa::Question q;
        q.id = name + "-" + std::to_string(i);
        q.text = "Compute " + std::to_string(3 + i) + " + " + std::to_string(11 + 2 * i) + ".";
        q.gold_answer = std::to_string(14 + 3 * i);
        q.answer_kind = cqa::AnswerKind::FREEFORM_MATH;
        q.source_dataset = name;
        d.questions.push_back(q);
    }
    return d;
}

/// Four-way multiple choice; gold label cycles A..D.
inline cqa::Dataset make_mc_dataset(const std::string& name, int n) {
    cqa::Dataset d;
    d.name = name;
    const char* labels[] = {"A", "B", "C", "D"};
    for (int i = 0; i < n; ++i) {
        cqa::Question q;
        q.id = name + "-" + std::to_string(i);
        q.text = "Pick the marked option for item " + std::to_string(i) + ".";
        q.answer_kind = cqa::AnswerKind::MULTIPLE_CHOICE;
        for (int c = 0; c < 4; ++c) {
            q.choices.push_back({labels[c], "option " + std::string(labels[c]) + " for item " +
                                                std::to_string(i)});
        }
        q.gold_answer = labels[i % 4];
        q.source_dataset = name;
        d.questions.push_back(q);
    }
    return d;
}

}  // namespace cqatest
