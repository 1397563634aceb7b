// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: a small TOML-style reader (sections, dotted keys,
// arrays-of-tables, scalars, arrays, comments) feeding a typed RunConfig.
// The reader covers the subset this tool documents, nothing more; values
// land in a JSON tree so the manifest can snapshot the config verbatim.

#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "cqa/client.hpp"
#include "cqa/compound.hpp"
#include "cqa/dialogue.hpp"
#include "cqa/errors.hpp"
#include "cqa/jsonl.hpp"

namespace cqa {

inline constexpr std::uint64_t kDefaultSeed = 1729;

namespace toml {

namespace detail {

class Cursor {
public:
    Cursor(const std::string& text, std::string path) : text_(text), path_(std::move(path)) {}

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char take() {
        char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }
    int line() const { return line_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(path_, line_, msg); }

    void skip_inline_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
    }

    /// Whitespace, newlines and # comments.
    void skip_ws_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') take();
            } else {
                break;
            }
        }
    }

    /// Requires nothing but whitespace/comment up to end of line.
    void expect_line_end() {
        skip_inline_ws();
        if (eof()) return;
        if (peek() == '#') {
            while (!eof() && peek() != '\n') take();
        }
        if (eof()) return;
        if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "' before end of line");
        take();
    }

private:
    const std::string& text_;
    std::string path_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

inline bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

inline std::string parse_bare_key(Cursor& cur) {
    std::string key;
    while (!cur.eof() && bare_key_char(cur.peek())) key += cur.take();
    if (key.empty()) cur.fail("expected a key");
    return key;
}

inline std::vector<std::string> parse_dotted_key(Cursor& cur) {
    std::vector<std::string> keys{parse_bare_key(cur)};
    while (!cur.eof() && cur.peek() == '.') {
        cur.take();
        keys.push_back(parse_bare_key(cur));
    }
    return keys;
}

inline std::string parse_basic_string(Cursor& cur) {
    cur.take();  // opening quote
    std::string out;
    while (true) {
        if (cur.eof()) cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"') return out;
        if (c == '\n') cur.fail("newline in string");
        if (c != '\\') {
            out += c;
            continue;
        }
        if (cur.eof()) cur.fail("dangling escape");
        char esc = cur.take();
        switch (esc) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            default: cur.fail(std::string("unsupported escape \\") + esc);
        }
    }
}

inline json parse_value(Cursor& cur);

inline json parse_array(Cursor& cur) {
    cur.take();  // '['
    json arr = json::array();
    while (true) {
        cur.skip_ws_and_comments();
        if (cur.eof()) cur.fail("unterminated array");
        if (cur.peek() == ']') {
            cur.take();
            return arr;
        }
        arr.push_back(parse_value(cur));
        cur.skip_ws_and_comments();
        if (cur.eof()) cur.fail("unterminated array");
        if (cur.peek() == ',') {
            cur.take();
        } else if (cur.peek() != ']') {
            cur.fail("expected ',' or ']' in array");
        }
    }
}

inline json parse_scalar(Cursor& cur) {
    std::string token;
    while (!cur.eof()) {
        char c = cur.peek();
        if (c == '\n' || c == ',' || c == ']' || c == '#' || c == ' ' || c == '\t' || c == '\r') break;
        token += cur.take();
    }
    if (token.empty()) cur.fail("expected a value");
    if (token == "true") return true;
    if (token == "false") return false;
    // integer, then float; anything else is a syntax error (strings need quotes)
    try {
        std::size_t used = 0;
        long long i = std::stoll(token, &used);
        if (used == token.size()) return i;
    } catch (...) {
    }
    try {
        std::size_t used = 0;
        double d = std::stod(token, &used);
        if (used == token.size()) return d;
    } catch (...) {
    }
    cur.fail("cannot parse value '" + token + "' (strings must be double-quoted)");
}

inline json parse_value(Cursor& cur) {
    cur.skip_inline_ws();
    if (cur.eof()) cur.fail("expected a value");
    char c = cur.peek();
    if (c == '"') return parse_basic_string(cur);
    if (c == '[') return parse_array(cur);
    return parse_scalar(cur);
}

/// Walks `keys` from the root, descending into the last element whenever an
/// array-of-tables is met, creating objects as needed.
inline json* resolve(json& root, const std::vector<std::string>& keys, Cursor& cur) {
    json* node = &root;
    for (const auto& key : keys) {
        if (node->is_array()) {
            if (node->empty()) cur.fail("internal: empty table array for key '" + key + "'");
            node = &node->back();
        }
        if (!node->is_object()) cur.fail("key '" + key + "' addresses a non-table value");
        json& child = (*node)[key];
        if (child.is_null()) child = json::object();
        node = &child;
    }
    if (node->is_array()) node = &node->back();
    return node;
}

}  // namespace detail

/// Parses TOML-style text into a JSON tree. Supported: [table], deeply dotted
/// [a.b.c], [[array.of.tables]], key = value with dotted keys, double-quoted
/// strings, integers, floats, booleans, (nested, multi-line) arrays, and #
/// comments. Duplicate scalar assignment is an error.
inline json parse(const std::string& text, const std::string& path_for_errors = "<config>") {
    detail::Cursor cur(text, path_for_errors);
    json root = json::object();
    std::vector<std::string> current;  // header path; empty = root table

    while (true) {
        cur.skip_ws_and_comments();
        if (cur.eof()) break;
        if (cur.peek() == '[') {
            cur.take();
            bool array_of_tables = !cur.eof() && cur.peek() == '[';
            if (array_of_tables) cur.take();
            cur.skip_inline_ws();
            std::vector<std::string> keys = detail::parse_dotted_key(cur);
            cur.skip_inline_ws();
            if (cur.eof() || cur.take() != ']') cur.fail("expected ']' after table name");
            if (array_of_tables && (cur.eof() || cur.take() != ']')) {
                cur.fail("expected ']]' after table-array name");
            }
            // resolve before consuming the newline so errors carry this line
            if (array_of_tables) {
                std::vector<std::string> parent(keys.begin(), keys.end() - 1);
                json* node = detail::resolve(root, parent, cur);
                json& arr = (*node)[keys.back()];
                if (arr.is_null()) arr = json::array();
                if (!arr.is_array()) cur.fail("'" + keys.back() + "' is not a table array");
                arr.push_back(json::object());
            } else {
                json* node = detail::resolve(root, keys, cur);
                if (!node->is_object()) cur.fail("table name collides with a value");
            }
            cur.expect_line_end();
            current = keys;
            continue;
        }
        std::vector<std::string> keys = detail::parse_dotted_key(cur);
        cur.skip_inline_ws();
        if (cur.eof() || cur.take() != '=') cur.fail("expected '=' after key");
        json value = detail::parse_value(cur);

        json* table = detail::resolve(root, current, cur);
        std::vector<std::string> parents(keys.begin(), keys.end() - 1);
        for (const auto& key : parents) {
            json& child = (*table)[key];
            if (child.is_null()) child = json::object();
            if (!child.is_object()) cur.fail("key '" + key + "' addresses a non-table value");
            table = &child;
        }
        json& slot = (*table)[keys.back()];
        if (!slot.is_null()) cur.fail("duplicate key '" + keys.back() + "'");
        slot = std::move(value);
        cur.expect_line_end();
    }
    return root;
}

inline json parse_file(const std::string& path) { return parse(read_text_file(path), path); }

}  // namespace toml

// --- typed run configuration -----------------------------------------------------

struct SuiteConfig {
    std::vector<int> ks = default_ks();
    int replicates = kDefaultReplicates;
    std::uint64_t seed = kDefaultSeed;
};

struct RunConfig {
    std::string dataset_path;
    std::string dataset_name;  // empty = derive from file stem
    SuiteConfig suite;
    ModelEndpoint endpoint;
    SamplingParams sampling;
    DialogueConfig dialogue = default_config();
    bool has_dialogue_section = false;
    json raw = json::object();  // full parsed tree, snapshotted into the manifest
};

inline ValidationReport validate_run_config(const RunConfig& cfg) {
    ValidationReport report;
    if (cfg.suite.ks.empty()) report.push_back({"NoKs", "suite", "ks must be non-empty"});
    for (int k : cfg.suite.ks) {
        if (k < 1) report.push_back({"BadK", std::to_string(k), "every k must be >= 1"});
    }
    if (cfg.suite.replicates < 1) {
        report.push_back({"BadReplicates", std::to_string(cfg.suite.replicates),
                          "replicates must be >= 1"});
    }
    if (cfg.sampling.temperature < 0) {
        report.push_back({"BadTemperature", "sampling", "temperature must be >= 0"});
    }
    if (cfg.sampling.top_p <= 0 || cfg.sampling.top_p > 1) {
        report.push_back({"BadTopP", "sampling", "top_p must be in (0, 1]"});
    }
    if (cfg.sampling.max_tokens < 1) {
        report.push_back({"BadMaxTokens", "sampling", "max_tokens must be >= 1"});
    }
    for (const auto& v : validate_endpoint(cfg.endpoint)) report.push_back(v);
    if (cfg.has_dialogue_section) {
        for (const auto& v : validate_config(cfg.dialogue)) report.push_back(v);
    }
    return report;
}

/// Builds a RunConfig from a parsed tree. Unknown sections and keys are left
/// in `raw` untouched; missing values keep their documented defaults.
inline RunConfig run_config_from_json(const json& tree) {
    RunConfig cfg;
    cfg.raw = tree;
    if (tree.contains("dataset")) {
        const json& d = tree["dataset"];
        cfg.dataset_path = d.value("path", "");
        cfg.dataset_name = d.value("name", "");
    }
    if (tree.contains("suite")) {
        const json& s = tree["suite"];
        if (s.contains("ks")) cfg.suite.ks = s["ks"].get<std::vector<int>>();
        cfg.suite.replicates = s.value("replicates", cfg.suite.replicates);
        if (s.contains("seed")) cfg.suite.seed = s["seed"].get<std::uint64_t>();
    }
    if (tree.contains("endpoint")) {
        const json& e = tree["endpoint"];
        cfg.endpoint.base_url = e.value("base_url", cfg.endpoint.base_url);
        cfg.endpoint.model_name = e.value("model_name", cfg.endpoint.model_name);
        cfg.endpoint.auth_token_env = e.value("auth_token_env", cfg.endpoint.auth_token_env);
        cfg.endpoint.request_timeout_s = e.value("request_timeout", cfg.endpoint.request_timeout_s);
        if (e.contains("context_budget_tokens")) {
            cfg.endpoint.context_budget_tokens = e["context_budget_tokens"].get<long long>();
        }
    }
    if (tree.contains("sampling")) {
        const json& s = tree["sampling"];
        cfg.sampling.temperature = s.value("temperature", cfg.sampling.temperature);
        cfg.sampling.top_p = s.value("top_p", cfg.sampling.top_p);
        cfg.sampling.max_tokens = s.value("max_tokens", cfg.sampling.max_tokens);
    }
    if (tree.contains("dialogue")) {
        cfg.dialogue = dialogue_config_from_json(tree["dialogue"]);
        cfg.has_dialogue_section = true;
    }
    return cfg;
}

/// Loads and validates a config file; invalid values raise ConfigInvalid.
inline RunConfig load_run_config(const std::string& path) {
    RunConfig cfg = run_config_from_json(toml::parse_file(path));
    ValidationReport report = validate_run_config(cfg);
    if (!report.empty()) throw ConfigInvalid(report);
    return cfg;
}

}  // namespace cqa
