// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqa/errors.hpp"

namespace cqa {

using json = nlohmann::json;

/// Calls fn(record, line_number) for every non-blank line. Line numbers are
/// 1-based. Malformed JSON raises ParseError with the offending line.
inline void for_each_jsonl(const std::string& path,
                           const std::function<void(const json&, int)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded()) throw ParseError(path, line_no, "malformed JSON record");
        fn(record, line_no);
    }
}

inline std::vector<json> read_jsonl(const std::string& path) {
    std::vector<json> records;
    for_each_jsonl(path, [&](const json& record, int) { records.push_back(record); });
    return records;
}

/// One compact record per line; parent directories are created as needed.
inline void write_jsonl(const std::string& path, const std::vector<json>& records) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& record : records) out << record.dump() << '\n';
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace cqa
