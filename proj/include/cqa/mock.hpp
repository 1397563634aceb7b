// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Scripted mock endpoint: canned completions keyed by the prompt digest so
// the full pipeline (run, score, report, analyze) works offline. The
// transport is instrumented (call count, peak concurrency, failure
// injection) because the client's retry and concurrency contracts are
// acceptance-tested against it.

#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "cqa/client.hpp"
#include "cqa/compound.hpp"
#include "cqa/digest.hpp"
#include "cqa/verifier.hpp"

namespace cqa {

struct MockScript {
    // prompt digest -> canned completion text
    std::map<std::string, std::string> by_prompt_sha;
    // parallel record keyed by compound id, for inspection and the serve log
    std::map<std::string, std::string> by_compound_id;
    std::string default_text;  // served on unknown prompts; empty = HTTP 404
};

enum class ScriptMode { ALWAYS_CORRECT, FIRST_SLOT_ONLY, HIGH_SWITCH_WRONG };

inline std::string to_string(ScriptMode m) {
    switch (m) {
        case ScriptMode::ALWAYS_CORRECT: return "always_correct";
        case ScriptMode::FIRST_SLOT_ONLY: return "first_slot_only";
        case ScriptMode::HIGH_SWITCH_WRONG: return "high_switch_wrong";
    }
    return "always_correct";
}

inline ScriptMode script_mode_from_string(const std::string& s) {
    if (s == "always_correct") return ScriptMode::ALWAYS_CORRECT;
    if (s == "first_slot_only") return ScriptMode::FIRST_SLOT_ONLY;
    if (s == "high_switch_wrong") return ScriptMode::HIGH_SWITCH_WRONG;
    throw ParseError("", 0, "unknown script mode: " + s);
}

namespace detail {

inline std::string answer_line(int slot, const Question& q, const std::string& payload) {
    if (q.answer_kind == AnswerKind::MULTIPLE_CHOICE) {
        return "Answer " + std::to_string(slot) + ": " + payload + "\n";
    }
    return "Answer " + std::to_string(slot) + ": \\boxed{" + payload + "}\n";
}

/// A payload guaranteed not to match the gold answer under normalization.
inline std::string wrong_payload(const Question& q) {
    for (const char* candidate : {"17", "23", "41"}) {
        if (!is_match(normalize_answer(candidate, q.answer_kind),
                      normalize_answer(q.gold_answer, q.answer_kind), q.answer_kind)) {
            return candidate;
        }
    }
    return "never";
}

}  // namespace detail

/// Canned completion text for one compound under a behavior mode.
inline std::string scripted_completion(const SuiteEntry& entry, ScriptMode mode) {
    const auto& members = entry.members;
    std::string text;
    switch (mode) {
        case ScriptMode::ALWAYS_CORRECT: {
            text += "I will work through each problem in order.\n";
            for (std::size_t j = 0; j < members.size(); ++j) {
                text += "Question " + std::to_string(j + 1) +
                        ": solved directly, the result checks out.\n";
            }
            text += "\n";
            for (std::size_t j = 0; j < members.size(); ++j) {
                text += detail::answer_line(static_cast<int>(j + 1), members[j],
                                            members[j].gold_answer);
            }
            break;
        }
        case ScriptMode::FIRST_SLOT_ONLY: {
            text += "Question 1 is the one to solve here.\n";
            text += "Working it out carefully gives the result below.\n\n";
            text += detail::answer_line(1, members[0], members[0].gold_answer);
            break;
        }
        case ScriptMode::HIGH_SWITCH_WRONG: {
            // Round-robin slot mentions with no content tokens, so every
            // adjacent mention pair is a switch; all answers are wrong.
            for (int round = 0; round < 3; ++round) {
                for (std::size_t j = 0; j < members.size(); ++j) {
                    text += "Question " + std::to_string(j + 1) + " now. Hmm. Wait.\n";
                }
            }
            text += "\n";
            for (std::size_t j = 0; j < members.size(); ++j) {
                text += detail::answer_line(static_cast<int>(j + 1), members[j],
                                            detail::wrong_payload(members[j]));
            }
            break;
        }
    }
    return text;
}

inline MockScript build_script(const std::vector<SuiteEntry>& suite, ScriptMode mode) {
    MockScript script;
    for (const auto& e : suite) {
        std::string text = scripted_completion(e, mode);
        script.by_prompt_sha[sha256_hex(e.compound.prompt_text)] = text;
        script.by_compound_id[e.compound.compound_id] = text;
    }
    return script;
}

inline json script_to_json(const MockScript& script) {
    json completions = json::array();
    // invert the id map so each record can carry its compound id
    std::map<std::string, std::string> id_by_text;
    for (const auto& [id, text] : script.by_compound_id) id_by_text[text] = id;
    for (const auto& [sha, text] : script.by_prompt_sha) {
        json rec{{"prompt_sha256", sha}, {"text", text}};
        if (auto it = id_by_text.find(text); it != id_by_text.end()) rec["compound_id"] = it->second;
        completions.push_back(std::move(rec));
    }
    json j{{"completions", completions}};
    if (!script.default_text.empty()) j["default_text"] = script.default_text;
    return j;
}

inline MockScript script_from_json(const json& j) {
    MockScript script;
    for (const auto& rec : j.at("completions")) {
        std::string text = rec.at("text").get<std::string>();
        script.by_prompt_sha[rec.at("prompt_sha256").get<std::string>()] = text;
        if (rec.contains("compound_id")) {
            script.by_compound_id[rec["compound_id"].get<std::string>()] = text;
        }
    }
    script.default_text = j.value("default_text", "");
    return script;
}

inline void write_script(const MockScript& script, const std::string& path) {
    write_text_file(path, script_to_json(script).dump(2) + "\n");
}

inline MockScript read_script(const std::string& path) {
    return script_from_json(json::parse(read_text_file(path)));
}

// --- scripted reply ---------------------------------------------------------------

/// Chat-completions reply for one scripted prompt, shared by the in-process
/// transport and the mock HTTP server. Respects max_tokens by truncating at
/// the character-equivalent budget with finish_reason "length".
inline TransportReply scripted_reply(const MockScript& script, const std::string& system_prompt,
                                     const std::string& user_prompt, int max_tokens,
                                     bool report_usage = true) {
    std::string text;
    auto it = script.by_prompt_sha.find(sha256_hex(user_prompt));
    if (it != script.by_prompt_sha.end()) {
        text = it->second;
    } else if (!script.default_text.empty()) {
        text = script.default_text;
    } else {
        TransportReply r;
        r.status = 404;
        r.body = "no scripted completion for this prompt";
        return r;
    }

    std::string finish = "stop";
    long long budget_chars =
        static_cast<long long>(static_cast<double>(max_tokens) * kCharsPerToken);
    if (static_cast<long long>(text.size()) > budget_chars) {
        text = text.substr(0, static_cast<std::size_t>(budget_chars));
        finish = "length";
    }

    json body{{"choices",
               {{{"message", {{"role", "assistant"}, {"content", text}}},
                 {"finish_reason", finish}}}}};
    if (report_usage) {
        body["usage"] = {{"completion_tokens", estimate_tokens(text.size())},
                         {"prompt_tokens",
                          estimate_tokens(system_prompt.size() + user_prompt.size())}};
    }
    TransportReply r;
    r.status = 200;
    r.body = body.dump();
    return r;
}

// --- instrumented transport -----------------------------------------------------

/// Failure injection: the first `fail_first` calls return `status` (0 means a
/// transport-level error) with the given headers.
struct FailurePlan {
    int fail_first = 0;
    int status = 500;
    std::map<std::string, std::string> headers;
    std::string body = "injected failure";
};

class ScriptedTransport : public ChatTransport {
public:
    explicit ScriptedTransport(MockScript script) : script_(std::move(script)) {}

    void set_failure_plan(const FailurePlan& plan) { plan_ = plan; }
    void set_delay(std::function<void()> delay) { delay_ = std::move(delay); }
    void set_report_usage(bool report) { report_usage_ = report; }

    long long calls() const { return calls_.load(); }
    int peak_in_flight() const { return peak_.load(); }
    void reset_counters() {
        calls_ = 0;
        peak_ = 0;
    }

    TransportReply send(const ChatRequest& req) override {
        calls_.fetch_add(1);
        int now = in_flight_.fetch_add(1) + 1;
        int prev = peak_.load();
        while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
        }
        if (delay_) delay_();

        TransportReply reply = respond(req);
        in_flight_.fetch_sub(1);
        return reply;
    }

private:
    TransportReply respond(const ChatRequest& req) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (plan_.fail_first > 0) {
                --plan_.fail_first;
                TransportReply r;
                r.status = plan_.status;
                r.headers = plan_.headers;
                if (plan_.status == 0) {
                    r.error = plan_.body;
                } else {
                    r.body = plan_.body;
                }
                return r;
            }
        }
        return scripted_reply(script_, req.system_prompt, req.user_prompt, req.params.max_tokens,
                              report_usage_);
    }

    MockScript script_;
    FailurePlan plan_;
    std::function<void()> delay_;
    bool report_usage_ = true;
    std::mutex mu_;
    std::atomic<long long> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_{0};
};

}  // namespace cqa
