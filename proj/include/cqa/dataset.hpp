// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Single-answer QA dataset loading and validation. Datasets are JSONL: one
// record per line with fields {id, text, gold_answer, answer_kind, choices?,
// subject?}. Question order is preserved from the file; all grouping
// randomness lives in the compound builder.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "cqa/jsonl.hpp"

namespace cqa {

enum class AnswerKind { FREEFORM_MATH, MULTIPLE_CHOICE };

inline std::string to_string(AnswerKind kind) {
    return kind == AnswerKind::FREEFORM_MATH ? "freeform_math" : "multiple_choice";
}

inline std::optional<AnswerKind> answer_kind_from_string(const std::string& s) {
    if (s == "freeform_math") return AnswerKind::FREEFORM_MATH;
    if (s == "multiple_choice") return AnswerKind::MULTIPLE_CHOICE;
    return std::nullopt;
}

struct Choice {
    std::string label;
    std::string text;

    bool operator==(const Choice&) const = default;
};

/// One independently solvable problem with a unique gold answer.
struct Question {
    std::string id;
    std::string text;
    std::string gold_answer;
    AnswerKind answer_kind = AnswerKind::FREEFORM_MATH;
    std::vector<Choice> choices;  // MULTIPLE_CHOICE only
    std::string source_dataset;
    std::string subject;

    bool operator==(const Question&) const = default;
};

struct Dataset {
    std::string name;
    std::vector<Question> questions;

    std::size_t size() const { return questions.size(); }

    bool operator==(const Dataset&) const = default;
};

/// Empty report iff all Question and Dataset invariants hold. Deterministic:
/// violations are emitted in question order, and per question in a fixed rule
/// order.
inline ValidationReport validate_dataset(const Dataset& d) {
    ValidationReport report;
    if (d.questions.empty()) {
        report.push_back({"EmptyDataset", d.name, "dataset has no questions"});
    }
    std::unordered_set<std::string> seen;
    for (const auto& q : d.questions) {
        if (!seen.insert(q.id).second) {
            report.push_back({"DuplicateId", q.id, "id appears more than once"});
        }
        if (q.id.empty()) report.push_back({"EmptyId", q.id, "question id is empty"});
        if (q.text.empty()) report.push_back({"EmptyText", q.id, "question text is empty"});
        if (q.gold_answer.empty()) report.push_back({"EmptyGold", q.id, "gold answer is empty"});
        if (q.source_dataset != d.name) {
            report.push_back({"DatasetNameMismatch", q.id,
                              "source_dataset \"" + q.source_dataset + "\" != \"" + d.name + "\""});
        }
        if (q.answer_kind == AnswerKind::MULTIPLE_CHOICE) {
            if (q.choices.empty()) {
                report.push_back({"NoChoices", q.id, "multiple-choice question has no choices"});
            } else {
                bool found = false;
                std::set<std::string> labels;
                for (const auto& c : q.choices) {
                    if (!labels.insert(c.label).second) {
                        report.push_back({"DuplicateChoiceLabel", q.id, "label \"" + c.label + "\""});
                    }
                    if (c.label == q.gold_answer) found = true;
                }
                if (!found && !q.gold_answer.empty()) {
                    report.push_back({"GoldNotInChoices", q.id,
                                      "gold \"" + q.gold_answer + "\" is not a choice label"});
                }
            }
        }
    }
    return report;
}

namespace detail {

inline Question question_from_json(const json& record, const std::string& path, int line) {
    auto require_string = [&](const char* field) -> std::string {
        if (!record.contains(field) || !record[field].is_string()) {
            throw ParseError(path, line, std::string("missing or non-string field \"") + field + "\"");
        }
        return record[field].get<std::string>();
    };
    Question q;
    q.id = require_string("id");
    q.text = require_string("text");
    q.gold_answer = require_string("gold_answer");
    auto kind = answer_kind_from_string(require_string("answer_kind"));
    if (!kind) {
        throw ParseError(path, line, "answer_kind must be \"freeform_math\" or \"multiple_choice\"");
    }
    q.answer_kind = *kind;
    if (record.contains("choices")) {
        if (!record["choices"].is_array()) throw ParseError(path, line, "choices must be an array");
        for (const auto& c : record["choices"]) {
            if (!c.is_object() || !c.contains("label") || !c.contains("text")) {
                throw ParseError(path, line, "each choice needs {label, text}");
            }
            q.choices.push_back({c["label"].get<std::string>(), c["text"].get<std::string>()});
        }
    }
    if (record.contains("subject") && record["subject"].is_string()) {
        q.subject = record["subject"].get<std::string>();
    }
    return q;
}

}  // namespace detail

/// Loads a JSONL dataset. The dataset name defaults to the file stem and can
/// be overridden by a "name_hint". Throws on IO failure, malformed records
/// (with line number), duplicate ids, or an empty file.
inline Dataset load_dataset(const std::string& path, const std::string& name_hint = "") {
    Dataset d;
    d.name = name_hint.empty() ? std::filesystem::path(path).stem().string() : name_hint;
    std::unordered_set<std::string> seen;
    for_each_jsonl(path, [&](const json& record, int line) {
        Question q = detail::question_from_json(record, path, line);
        if (!seen.insert(q.id).second) throw DuplicateId(q.id, line);
        if (q.source_dataset.empty()) q.source_dataset = d.name;
        d.questions.push_back(std::move(q));
    });
    if (d.questions.empty()) throw ParseError(path, 0, "dataset file has no records");
    return d;
}

inline json question_to_json(const Question& q) {
    json record{{"id", q.id},
                {"text", q.text},
                {"gold_answer", q.gold_answer},
                {"answer_kind", to_string(q.answer_kind)}};
    if (!q.choices.empty()) {
        json choices = json::array();
        for (const auto& c : q.choices) choices.push_back({{"label", c.label}, {"text", c.text}});
        record["choices"] = choices;
    }
    if (!q.subject.empty()) record["subject"] = q.subject;
    return record;
}

/// Inverse of load_dataset (round-trips every Dataset value).
inline void write_dataset(const Dataset& d, const std::string& path) {
    std::vector<json> records;
    records.reserve(d.questions.size());
    for (const auto& q : d.questions) records.push_back(question_to_json(q));
    write_jsonl(path, records);
}

}  // namespace cqa
