// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Compound question construction: pick k distinct questions and concatenate
// them into a single prompt. Groups are consecutive windows of a seeded
// permutation so that every question is evaluated at every k; the final
// window wraps around to the permutation's start when k does not divide N.

#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cqa/dataset.hpp"
#include "cqa/digest.hpp"

namespace cqa {

/// Deterministic grouping of question indices for one (dataset, k, replicate).
struct GroupingPlan {
    std::string dataset_name;
    int k = 1;
    int replicate = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> groups;  // ordered index tuples

    bool operator==(const GroupingPlan&) const = default;
};

struct CompoundQuestion {
    std::string compound_id;  // stable hash of (dataset, k, replicate, member ids)
    std::vector<std::string> member_ids;
    int k = 1;
    std::string prompt_text;
    std::string answer_directive;

    bool operator==(const CompoundQuestion&) const = default;
};

struct PromptTemplate {
    // "{k}" is substituted with the member count.
    std::string header =
        "You will be given {k} independent problems. Solve every problem completely; "
        "they are unrelated to each other.\n\n";
    std::string directive_intro =
        "When you are finished, state your final answers, one per line, in exactly this format:\n";
    std::string directive_outro =
        "Output nothing after the final answer line.\n";
};

/// Groups are consecutive windows of a seeded permutation of [0, N). There are
/// ceil(N/k) groups; if k does not divide N the last group is completed with
/// indices from the permutation's start, so those questions appear twice in
/// the plan. The permutation seed is derived as seed XOR
/// stable_hash(dataset_name, k, replicate), giving each replicate fresh
/// companions.
inline GroupingPlan plan_groups(const Dataset& d, int k, int replicate, std::uint64_t seed) {
    const std::size_t n = d.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw InvalidK(k, n);

    GroupingPlan plan;
    plan.dataset_name = d.name;
    plan.k = k;
    plan.replicate = replicate;
    plan.seed = seed;

    std::uint64_t sub_seed =
        seed ^ stable_hash(d.name, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(replicate));
    std::vector<std::size_t> perm = seeded_permutation(n, sub_seed);

    const std::size_t n_groups = (n + k - 1) / k;
    plan.groups.reserve(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
        std::vector<std::size_t> group;
        group.reserve(k);
        for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
            group.push_back(perm[(g * k + j) % n]);
        }
        plan.groups.push_back(std::move(group));
    }
    return plan;
}

inline std::string compound_id_for(const std::string& dataset, int k, int replicate,
                                   const std::vector<std::string>& member_ids) {
    Sha256 h;
    h.update(dataset);
    h.update("\x1f");
    h.update(std::to_string(k));
    h.update("\x1f");
    h.update(std::to_string(replicate));
    for (const auto& id : member_ids) {
        h.update("\x1f");
        h.update(id);
    }
    auto digest = h.finish();
    return to_hex(digest.data(), digest.size()).substr(0, 16);
}

namespace detail {

inline std::string substitute_k(std::string text, std::size_t k) {
    const std::string placeholder = "{k}";
    std::size_t pos;
    while ((pos = text.find(placeholder)) != std::string::npos) {
        text.replace(pos, placeholder.size(), std::to_string(k));
    }
    return text;
}

inline std::string directive_line(std::size_t slot, AnswerKind kind) {
    std::string line = "Answer " + std::to_string(slot) + ": ";
    if (kind == AnswerKind::FREEFORM_MATH) {
        line += "\\boxed{<final answer to question " + std::to_string(slot) + ">}";
    } else {
        line += "<letter of the correct choice for question " + std::to_string(slot) + ">";
    }
    return line + "\n";
}

inline std::string render_question_body(const Question& q, std::size_t slot) {
    std::string body = "Question " + std::to_string(slot) + ":\n" + q.text;
    if (q.answer_kind == AnswerKind::MULTIPLE_CHOICE) {
        for (const auto& c : q.choices) body += "\n(" + c.label + ") " + c.text;
    }
    return body + "\n\n";
}

}  // namespace detail

/// Renders members into one prompt: header, then each question under its
/// "Question j:" slot header, then the answer directive. Both render and the
/// dataset/replicate metadata around it are pure, so identical inputs give
/// byte-identical prompts.
inline CompoundQuestion render_compound(const std::vector<Question>& members,
                                        const PromptTemplate& tmpl = {},
                                        const std::string& dataset = "",
                                        int replicate = 0) {
    if (members.empty()) throw NoData("render_compound needs at least one member");
    std::set<std::string> ids;
    for (const auto& q : members) {
        if (!ids.insert(q.id).second) throw DuplicateMember(q.id);
    }

    CompoundQuestion cq;
    cq.k = static_cast<int>(members.size());
    for (const auto& q : members) cq.member_ids.push_back(q.id);

    std::string directive = tmpl.directive_intro;
    for (std::size_t j = 0; j < members.size(); ++j) {
        directive += detail::directive_line(j + 1, members[j].answer_kind);
    }
    directive += tmpl.directive_outro;
    cq.answer_directive = directive;

    std::string prompt = detail::substitute_k(tmpl.header, members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
        prompt += detail::render_question_body(members[j], j + 1);
    }
    prompt += directive;
    cq.prompt_text = prompt;

    std::string ds = dataset.empty() ? (members[0].source_dataset) : dataset;
    cq.compound_id = compound_id_for(ds, cq.k, replicate, cq.member_ids);
    return cq;
}

/// One suite row: a rendered compound plus the plan coordinates and member
/// data a scorer needs (gold answers and kinds travel with the suite so
/// scoring does not require the dataset file again).
struct SuiteEntry {
    std::string dataset;
    int k = 1;
    int replicate = 0;
    int group_index = 0;
    std::vector<Question> members;
    CompoundQuestion compound;

    bool operator==(const SuiteEntry&) const = default;
};

/// Emits rendered compounds for every (k, replicate) pair in canonical order:
/// k ascending, replicate ascending, group index ascending. ks are
/// deduplicated and sorted; an empty ks list yields an empty suite.
inline std::vector<SuiteEntry> build_suite(const Dataset& d, std::vector<int> ks, int replicates,
                                           std::uint64_t seed, const PromptTemplate& tmpl = {}) {
    if (replicates < 1) throw NoData("build_suite needs replicates >= 1");
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    std::vector<SuiteEntry> suite;
    for (int k : ks) {
        for (int rep = 0; rep < replicates; ++rep) {
            GroupingPlan plan = plan_groups(d, k, rep, seed);
            for (std::size_t g = 0; g < plan.groups.size(); ++g) {
                SuiteEntry entry;
                entry.dataset = d.name;
                entry.k = k;
                entry.replicate = rep;
                entry.group_index = static_cast<int>(g);
                for (std::size_t idx : plan.groups[g]) entry.members.push_back(d.questions[idx]);
                entry.compound = render_compound(entry.members, tmpl, d.name, rep);
                suite.push_back(std::move(entry));
            }
        }
    }
    return suite;
}

inline std::vector<int> default_ks() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }
constexpr int kDefaultReplicates = 16;

// --- suite (de)serialization ------------------------------------------------

inline json suite_entry_to_json(const SuiteEntry& e) {
    json members = json::array();
    for (const auto& q : e.members) members.push_back(question_to_json(q));
    return json{{"compound_id", e.compound.compound_id},
                {"dataset", e.dataset},
                {"k", e.k},
                {"replicate", e.replicate},
                {"group_index", e.group_index},
                {"member_ids", e.compound.member_ids},
                {"members", members},
                {"prompt_text", e.compound.prompt_text},
                {"answer_directive", e.compound.answer_directive}};
}

inline SuiteEntry suite_entry_from_json(const json& j, const std::string& path, int line) {
    SuiteEntry e;
    try {
        e.dataset = j.at("dataset").get<std::string>();
        e.k = j.at("k").get<int>();
        e.replicate = j.at("replicate").get<int>();
        e.group_index = j.value("group_index", 0);
        for (const auto& m : j.at("members")) {
            Question q = detail::question_from_json(m, path, line);
            if (q.source_dataset.empty()) q.source_dataset = e.dataset;
            e.members.push_back(std::move(q));
        }
        e.compound.compound_id = j.at("compound_id").get<std::string>();
        e.compound.member_ids = j.at("member_ids").get<std::vector<std::string>>();
        e.compound.k = e.k;
        e.compound.prompt_text = j.at("prompt_text").get<std::string>();
        e.compound.answer_directive = j.value("answer_directive", "");
    } catch (const json::exception& ex) {
        throw ParseError(path, line, std::string("bad suite record: ") + ex.what());
    }
    return e;
}

inline void write_suite(const std::vector<SuiteEntry>& suite, const std::string& path) {
    std::vector<json> records;
    records.reserve(suite.size());
    for (const auto& e : suite) records.push_back(suite_entry_to_json(e));
    write_jsonl(path, records);
}

inline std::vector<SuiteEntry> read_suite(const std::string& path) {
    std::vector<SuiteEntry> suite;
    for_each_jsonl(path, [&](const json& record, int line) {
        suite.push_back(suite_entry_from_json(record, path, line));
    });
    return suite;
}

}  // namespace cqa
