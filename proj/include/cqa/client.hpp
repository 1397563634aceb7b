// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Chat-completions client core: request/response types, the retry loop, and
// the content-addressed response cache. The wire transport is an injected
// interface so the whole pipeline runs against scripted mocks in tests; the
// real HTTP transport lives in http_transport.hpp.

#pragma once

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include "cqa/digest.hpp"
#include "cqa/errors.hpp"
#include "cqa/jsonl.hpp"

namespace cqa {

/// Default context budget: 131,072 tokens, approximately 500,000
/// characters; the 3.8 chars/token ratio ties the two together.
inline constexpr long long kContextBudgetTokens = 131072;
inline constexpr double kCharsPerToken = 3.8;

inline long long estimate_tokens(std::size_t chars) {
    return static_cast<long long>(
        std::ceil(static_cast<double>(chars) / kCharsPerToken));
}

struct ModelEndpoint {
    // Defaults point at a local server so offline/mock subcommands need no
    // [endpoint] section; live runs override both fields.
    std::string base_url = "http://127.0.0.1:8080";
    std::string model_name = "local-model";
    std::string auth_token_env = "CQA_API_TOKEN";  // env var holding the bearer token
    int request_timeout_s = 300;
    long long context_budget_tokens = kContextBudgetTokens;
};

inline ValidationReport validate_endpoint(const ModelEndpoint& e) {
    ValidationReport report;
    if (e.base_url.rfind("http://", 0) != 0 && e.base_url.rfind("https://", 0) != 0) {
        report.push_back({"RelativeUrl", e.base_url, "base_url must be an absolute http(s) URL"});
    }
    if (e.model_name.empty()) {
        report.push_back({"EmptyModelName", "endpoint", "model_name must be non-empty"});
    }
    if (e.request_timeout_s <= 0) {
        report.push_back({"BadTimeout", "endpoint", "request_timeout must be positive"});
    }
    return report;
}

struct SamplingParams {
    double temperature = 0.6;
    double top_p = 0.95;
    int max_tokens = 32768;
    int sample_index = 0;  // replicate tag, 0-based; part of the cache key
};

enum class FinishReason { STOP, LENGTH, ERROR };

inline std::string to_string(FinishReason r) {
    switch (r) {
        case FinishReason::STOP: return "stop";
        case FinishReason::LENGTH: return "length";
        case FinishReason::ERROR: return "error";
    }
    return "error";
}

inline FinishReason finish_reason_from_string(const std::string& s) {
    if (s == "stop") return FinishReason::STOP;
    if (s == "length") return FinishReason::LENGTH;
    return FinishReason::ERROR;
}

struct Completion {
    std::string text;
    std::optional<long long> completion_tokens;  // endpoint usage accounting, when reported
    long long char_length = 0;                   // always text.size()
    long long latency_ms = 0;
    FinishReason finish_reason = FinishReason::STOP;
};

inline json completion_to_json(const Completion& c) {
    json j{{"text", c.text},
           {"char_length", c.char_length},
           {"latency_ms", c.latency_ms},
           {"finish_reason", to_string(c.finish_reason)}};
    if (c.completion_tokens) j["completion_tokens"] = *c.completion_tokens;
    return j;
}

inline Completion completion_from_json(const json& j) {
    Completion c;
    c.text = j.at("text").get<std::string>();
    c.char_length = j.at("char_length").get<long long>();
    c.latency_ms = j.at("latency_ms").get<long long>();
    c.finish_reason = finish_reason_from_string(j.at("finish_reason").get<std::string>());
    if (j.contains("completion_tokens")) c.completion_tokens = j["completion_tokens"].get<long long>();
    return c;
}

// --- transport interface -------------------------------------------------------

struct ChatRequest {
    std::string base_url;
    std::string model;
    std::string system_prompt;
    std::string user_prompt;
    SamplingParams params;
    std::string auth_token;  // empty = unauthenticated
    int timeout_s = 300;
};

/// Wire body per the chat-completions contract.
inline json chat_request_body(const ChatRequest& req) {
    return json{{"model", req.model},
                {"messages",
                 {{{"role", "system"}, {"content", req.system_prompt}},
                  {{"role", "user"}, {"content", req.user_prompt}}}},
                {"temperature", req.params.temperature},
                {"top_p", req.params.top_p},
                {"max_tokens", req.params.max_tokens}};
}

/// One HTTP exchange. status 0 with non-empty `error` marks a transport-level
/// failure (connect refused, timeout) as opposed to an HTTP error status.
struct TransportReply {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;
    std::string error;
};

class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual TransportReply send(const ChatRequest& req) = 0;
};

// --- retry policy ---------------------------------------------------------------

struct RetryPolicy {
    int max_attempts = 5;
    long long base_delay_ms = 500;
    long long max_delay_ms = 8000;
    // Injectable so tests run without wall-clock sleeps.
    std::function<void(long long)> sleep = [](long long ms) {
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    };

    long long delay_for_attempt(int attempt) const {  // attempt is 1-based
        long long delay = base_delay_ms;
        for (int i = 1; i < attempt && delay < max_delay_ms; ++i) delay *= 2;
        return std::min(delay, max_delay_ms);
    }
};

/// Fast policy for tests and mock runs: same attempt structure, no sleeping.
inline RetryPolicy no_sleep_policy(int max_attempts = 5) {
    RetryPolicy p;
    p.max_attempts = max_attempts;
    p.sleep = [](long long) {};
    return p;
}

namespace detail {

inline std::optional<long long> parse_retry_after(const std::map<std::string, std::string>& headers) {
    for (const auto& [key, value] : headers) {
        std::string lower = key;
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lower != "retry-after") continue;
        try {
            return static_cast<long long>(std::stoll(value)) * 1000;
        } catch (...) {
            return std::nullopt;  // HTTP-date form, fall back to backoff
        }
    }
    return std::nullopt;
}

inline bool mentions_context_overflow(const std::string& body) {
    std::string lower = body;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lower.find("context") != std::string::npos &&
           (lower.find("length") != std::string::npos || lower.find("window") != std::string::npos ||
            lower.find("overflow") != std::string::npos || lower.find("token") != std::string::npos);
}

}  // namespace detail

inline std::string resolve_auth_token(const ModelEndpoint& endpoint) {
    if (endpoint.auth_token_env.empty()) return "";
    const char* tok = std::getenv(endpoint.auth_token_env.c_str());
    return tok ? tok : "";
}

/// One completion with retries. Transport failures, 5xx, 408 and 429 retry
/// with exponential backoff (429 honors Retry-After); context overflow is
/// detected before any network traffic and never retried; other 4xx fail
/// immediately. Exhausted retries raise Unavailable.
inline Completion complete(ChatTransport& transport, const ModelEndpoint& endpoint,
                           const std::string& system_prompt, const std::string& user_prompt,
                           const SamplingParams& params, const RetryPolicy& policy = {}) {
    ValidationReport report = validate_endpoint(endpoint);
    if (!report.empty()) throw ConfigInvalid(report);

    long long est = estimate_tokens(system_prompt.size() + user_prompt.size());
    if (est + params.max_tokens > endpoint.context_budget_tokens) {
        throw ContextOverflow("estimated " + std::to_string(est) + " prompt tokens + " +
                              std::to_string(params.max_tokens) + " max_tokens exceeds budget " +
                              std::to_string(endpoint.context_budget_tokens));
    }

    ChatRequest req{endpoint.base_url, endpoint.model_name, system_prompt,
                    user_prompt,       params,              resolve_auth_token(endpoint),
                    endpoint.request_timeout_s};

    std::string last_error;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        auto t0 = std::chrono::steady_clock::now();
        TransportReply reply = transport.send(req);
        auto elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();

        if (reply.status == 200) {
            try {
                json body = json::parse(reply.body);
                const json& choice = body.at("choices").at(0);
                Completion c;
                c.text = choice.at("message").at("content").get<std::string>();
                c.char_length = static_cast<long long>(c.text.size());
                c.latency_ms = elapsed_ms;
                std::string fr = choice.value("finish_reason", "stop");
                c.finish_reason = fr == "length" ? FinishReason::LENGTH : FinishReason::STOP;
                if (body.contains("usage") && body["usage"].contains("completion_tokens")) {
                    c.completion_tokens = body["usage"]["completion_tokens"].get<long long>();
                }
                return c;
            } catch (const json::exception& ex) {
                last_error = std::string("malformed 200 response: ") + ex.what();
            }
        } else if (reply.status == 0) {
            last_error = "transport: " + (reply.error.empty() ? "unknown failure" : reply.error);
        } else if (reply.status == 429 || reply.status == 408 || reply.status >= 500) {
            last_error = "HTTP " + std::to_string(reply.status);
        } else if (reply.status == 400 && detail::mentions_context_overflow(reply.body)) {
            throw ContextOverflow("endpoint rejected request: " + reply.body);
        } else {
            throw Unavailable("HTTP " + std::to_string(reply.status) + " (not retryable): " +
                              reply.body);
        }

        if (attempt == policy.max_attempts) break;
        long long delay = policy.delay_for_attempt(attempt);
        if (reply.status == 429) {
            if (auto after = detail::parse_retry_after(reply.headers)) delay = *after;
        }
        policy.sleep(delay);
    }
    throw Unavailable("all " + std::to_string(policy.max_attempts) + " attempts failed; last: " +
                      last_error);
}

// --- content-addressed response cache -------------------------------------------

namespace detail {

inline std::string canonical_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Collision-resistant digest over everything that shapes a completion,
/// including sample_index so independent replicates of one prompt stay
/// distinct cache entries.
inline std::string cache_key(const ModelEndpoint& endpoint, const std::string& system_prompt,
                             const std::string& user_prompt, const SamplingParams& params) {
    Sha256 h;
    auto feed = [&h](const std::string& s) {
        h.update(s.data(), s.size());
        const char sep = '\x1f';
        h.update(&sep, 1);
    };
    feed(endpoint.base_url);
    feed(endpoint.model_name);
    feed(system_prompt);
    feed(user_prompt);
    feed(detail::canonical_double(params.temperature));
    feed(detail::canonical_double(params.top_p));
    feed(std::to_string(params.max_tokens));
    feed(std::to_string(params.sample_index));
    return to_hex(h.finish());
}

/// Disk cache mapping cache_key -> Completion JSON, sharded by the first two
/// hex chars. Writes go through a temp file + rename so concurrent writers of
/// the same key (which write identical bytes by construction) stay safe.
class DiskCache {
public:
    explicit DiskCache(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path path_for(const std::string& key) const {
        return root_ / key.substr(0, 2) / (key + ".json");
    }

    std::optional<Completion> get(const std::string& key) const {
        std::filesystem::path p = path_for(key);
        std::error_code ec;
        if (!std::filesystem::exists(p, ec)) return std::nullopt;
        try {
            return completion_from_json(json::parse(read_text_file(p.string())));
        } catch (...) {
            return std::nullopt;  // unreadable entry = miss; it will be rewritten
        }
    }

    void put(const std::string& key, const Completion& completion) const {
        std::filesystem::path p = path_for(key);
        std::filesystem::create_directories(p.parent_path());
        std::filesystem::path tmp = p;
        tmp += ".tmp." + std::to_string(
                             std::hash<std::thread::id>{}(std::this_thread::get_id()) & 0xffff);
        write_text_file(tmp.string(), completion_to_json(completion).dump(2) + "\n");
        std::error_code ec;
        std::filesystem::rename(tmp, p, ec);
        if (ec) {
            std::filesystem::remove(tmp, ec);  // lost the race; identical bytes already landed
        }
    }

private:
    std::filesystem::path root_;
};

}  // namespace cqa
