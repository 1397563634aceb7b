// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Suite execution: drives every suite entry through the client with a
// bounded worker pool, persists raw completions and the run manifest, and
// turns completions into verdict rows and sample records for aggregation.
//
// Results are ordered by suite position regardless of completion arrival, so
// downstream files are deterministic for a given suite and cache state.

#pragma once

#include <atomic>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cqa/client.hpp"
#include "cqa/compound.hpp"
#include "cqa/metrics.hpp"
#include "cqa/report.hpp"
#include "cqa/verifier.hpp"
#include "cqa/version.hpp"

namespace cqa {

/// Default monologue system prompt; dialogue runs use render_system_prompt.
inline std::string monologue_system_prompt() {
    return "You are a careful problem solver. Work through the given problems step by step, "
           "then report the final answers exactly in the requested format.";
}

struct SuiteItemResult {
    std::size_t entry_index = 0;
    std::string compound_id;
    int sample_index = 0;  // equals the suite entry's replicate
    Completion completion;
    bool from_cache = false;
};

/// Runs every suite entry once (its replicate index is the sample tag) with
/// at most `parallelism` requests in flight. Cached completions are returned
/// without touching the transport. Per-item failures become ERROR
/// completions; the suite always completes.
inline std::vector<SuiteItemResult> complete_suite(ChatTransport& transport,
                                                   const ModelEndpoint& endpoint,
                                                   const std::vector<SuiteEntry>& suite,
                                                   const std::string& system_prompt,
                                                   const SamplingParams& params_base,
                                                   int parallelism = 4,
                                                   const DiskCache* cache = nullptr,
                                                   const RetryPolicy& policy = {}) {
    if (parallelism < 1) throw NoData("parallelism must be >= 1");
    std::vector<SuiteItemResult> results(suite.size());
    std::atomic<std::size_t> next{0};
    std::mutex cache_mu;

    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= suite.size()) return;
            const SuiteEntry& entry = suite[i];
            SamplingParams params = params_base;
            params.sample_index = entry.replicate;
            const std::string& prompt = entry.compound.prompt_text;

            SuiteItemResult& slot = results[i];
            slot.entry_index = i;
            slot.compound_id = entry.compound.compound_id;
            slot.sample_index = params.sample_index;

            std::string key;
            if (cache) {
                key = cache_key(endpoint, system_prompt, prompt, params);
                std::lock_guard<std::mutex> lock(cache_mu);
                if (auto hit = cache->get(key)) {
                    slot.completion = *hit;
                    slot.from_cache = true;
                    continue;
                }
            }
            try {
                slot.completion = complete(transport, endpoint, system_prompt, prompt, params, policy);
                if (cache) {
                    std::lock_guard<std::mutex> lock(cache_mu);
                    cache->put(key, slot.completion);
                }
            } catch (const Error&) {
                slot.completion = Completion{};
                slot.completion.finish_reason = FinishReason::ERROR;
            }
        }
    };

    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(parallelism), suite.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return results;
}

// --- completion persistence -------------------------------------------------------

struct StoredCompletion {
    std::string compound_id;
    int sample_index = 0;
    Completion completion;
};

namespace detail {

inline std::string completion_file_name(const std::string& compound_id, int sample_index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_s%03d.txt", sample_index);
    return compound_id + buf;
}

}  // namespace detail

/// Lays out a completions directory: one text file per (compound, sample)
/// plus a meta.jsonl index in suite order.
inline void write_completions(const std::string& dir, const std::vector<SuiteItemResult>& items) {
    std::filesystem::create_directories(dir);
    std::vector<json> meta;
    meta.reserve(items.size());
    for (const auto& item : items) {
        std::string file = detail::completion_file_name(item.compound_id, item.sample_index);
        write_text_file((std::filesystem::path(dir) / file).string(), item.completion.text);
        json m = completion_to_json(item.completion);
        m.erase("text");
        m["compound_id"] = item.compound_id;
        m["sample_index"] = item.sample_index;
        m["file"] = file;
        meta.push_back(std::move(m));
    }
    write_jsonl((std::filesystem::path(dir) / "meta.jsonl").string(), meta);
}

inline std::vector<StoredCompletion> read_completions(const std::string& dir) {
    std::vector<StoredCompletion> out;
    std::string meta_path = (std::filesystem::path(dir) / "meta.jsonl").string();
    for_each_jsonl(meta_path, [&](const json& m, int line) {
        StoredCompletion sc;
        try {
            sc.compound_id = m.at("compound_id").get<std::string>();
            sc.sample_index = m.at("sample_index").get<int>();
            json cj = m;
            cj["text"] = "";
            sc.completion = completion_from_json(cj);
            sc.completion.text =
                read_text_file((std::filesystem::path(dir) / m.at("file").get<std::string>()).string());
        } catch (const json::exception& ex) {
            throw ParseError(meta_path, line, std::string("bad completion meta: ") + ex.what());
        }
        out.push_back(std::move(sc));
    });
    return out;
}

// --- run manifest -------------------------------------------------------------------

/// Digest over the ordered compound ids: pins the exact suite content the
/// manifest describes.
inline std::string suite_digest(const std::vector<SuiteEntry>& suite) {
    Sha256 h;
    for (const auto& e : suite) {
        h.update(e.compound.compound_id.data(), e.compound.compound_id.size());
        const char sep = '\n';
        h.update(&sep, 1);
    }
    return to_hex(h.finish());
}

inline std::string utc_now_iso8601() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

struct RunManifest {
    std::string version = kVersion;
    std::string created_utc;
    std::string pattern = "monologue";  // or "dialogue"
    std::uint64_t seed = 0;
    std::string suite_digest;
    std::size_t suite_entries = 0;
    int parallelism = 1;
    std::string cache_dir;
    std::string length_unit = "auto";  // tokens when the endpoint reports them, else chars
    json endpoint = json::object();    // identity only, never the token value
    json sampling = json::object();
    json config = json::object();      // full config snapshot
};

inline json manifest_to_json(const RunManifest& m) {
    return json{{"version", m.version},
                {"created_utc", m.created_utc},
                {"pattern", m.pattern},
                {"seed", m.seed},
                {"suite_digest", m.suite_digest},
                {"suite_entries", m.suite_entries},
                {"parallelism", m.parallelism},
                {"cache_dir", m.cache_dir},
                {"length_unit", m.length_unit},
                {"endpoint", m.endpoint},
                {"sampling", m.sampling},
                {"config", m.config}};
}

inline RunManifest make_manifest(const ModelEndpoint& endpoint, const SamplingParams& sampling,
                                 const std::vector<SuiteEntry>& suite, std::uint64_t seed,
                                 const std::string& pattern, int parallelism,
                                 const std::string& cache_dir, const json& config_snapshot) {
    RunManifest m;
    m.created_utc = utc_now_iso8601();
    m.pattern = pattern;
    m.seed = seed;
    m.suite_digest = suite_digest(suite);
    m.suite_entries = suite.size();
    m.parallelism = parallelism;
    m.cache_dir = cache_dir;
    m.endpoint = json{{"base_url", endpoint.base_url},
                      {"model_name", endpoint.model_name},
                      {"auth_token_env", endpoint.auth_token_env},
                      {"request_timeout", endpoint.request_timeout_s},
                      {"context_budget_tokens", endpoint.context_budget_tokens}};
    m.sampling = json{{"temperature", sampling.temperature},
                      {"top_p", sampling.top_p},
                      {"max_tokens", sampling.max_tokens}};
    m.config = config_snapshot;
    return m;
}

inline void write_manifest(const std::string& dir, const RunManifest& m) {
    std::filesystem::create_directories(dir);
    write_text_file((std::filesystem::path(dir) / "manifest.json").string(),
                    manifest_to_json(m).dump(2) + "\n");
}

// --- scoring glue -------------------------------------------------------------------

struct ScoredRun {
    std::vector<VerdictRow> verdicts;       // one row per (sample, slot), suite order
    std::vector<SampleRecord> records;      // one per sample, suite order
    std::map<std::string, long long> weights;  // dataset -> distinct question count
    std::string length_unit = "chars";
    bool mixed_length_fallback = false;
};

/// Distinct question count per dataset, read off the suite itself.
inline std::map<std::string, long long> dataset_weights(const std::vector<SuiteEntry>& suite) {
    std::map<std::string, std::set<std::string>> ids;
    for (const auto& e : suite) {
        for (const auto& q : e.members) ids[e.dataset].insert(q.id);
    }
    std::map<std::string, long long> weights;
    for (const auto& [name, set] : ids) weights[name] = static_cast<long long>(set.size());
    return weights;
}

/// Extracts and scores one completion against a suite entry.
inline std::vector<MatchVerdict> score_entry(const SuiteEntry& entry, const std::string& text,
                                             std::vector<ExtractedAnswer>* extracted_out = nullptr) {
    std::vector<AnswerKind> kinds;
    std::vector<GoldAnswer> golds;
    for (const auto& q : entry.members) {
        kinds.push_back(q.answer_kind);
        golds.push_back({q.gold_answer, q.answer_kind});
    }
    std::vector<ExtractedAnswer> extracted = extract_answers(text, entry.k, kinds);
    if (extracted_out) *extracted_out = extracted;
    return score_compound(extracted, golds);
}

/// Turns completions into verdict rows and sample records. `items` may come
/// straight from complete_suite or from a reloaded completions directory;
/// they are matched to entries by (compound_id, sample_index).
inline ScoredRun score_run(const std::vector<SuiteEntry>& suite,
                           const std::vector<StoredCompletion>& items) {
    std::map<std::pair<std::string, int>, const SuiteEntry*> by_key;
    std::map<std::string, const SuiteEntry*> by_id;
    for (const auto& e : suite) {
        by_key[{e.compound.compound_id, e.replicate}] = &e;
        by_id[e.compound.compound_id] = &e;
    }

    ScoredRun out;
    out.weights = dataset_weights(suite);
    bool any_tokens = false, all_tokens = true;
    for (const auto& item : items) {
        const SuiteEntry* entry = nullptr;
        if (auto it = by_key.find({item.compound_id, item.sample_index}); it != by_key.end()) {
            entry = it->second;
        } else if (auto it2 = by_id.find(item.compound_id); it2 != by_id.end()) {
            entry = it2->second;  // sample_index differs from replicate: tolerated
        } else {
            throw NoData("completion for unknown compound_id " + item.compound_id);
        }

        std::vector<ExtractedAnswer> extracted;
        std::vector<MatchVerdict> verdicts = score_entry(*entry, item.completion.text, &extracted);

        SampleRecord rec;
        rec.dataset = entry->dataset;
        rec.k = entry->k;
        rec.replicate = entry->replicate;
        rec.compound_id = item.compound_id;
        rec.length_tokens = item.completion.completion_tokens;
        rec.length_chars = item.completion.char_length;
        for (std::size_t j = 0; j < verdicts.size(); ++j) {
            const Question& q = entry->members[j];
            VerdictRow row;
            row.compound_id = item.compound_id;
            row.sample_index = item.sample_index;
            row.slot = verdicts[j].slot_index;
            row.indicator = verdicts[j].indicator;
            row.reason = to_string(verdicts[j].reason);
            row.raw = extracted[j].raw;
            row.normalized = extracted[j].status == ExtractionStatus::FOUND
                                 ? normalize_answer(extracted[j].raw, q.answer_kind)
                                 : "";
            out.verdicts.push_back(std::move(row));
            rec.indicators.push_back(verdicts[j].indicator);
        }
        any_tokens = any_tokens || rec.length_tokens.has_value();
        all_tokens = all_tokens && rec.length_tokens.has_value();
        out.records.push_back(std::move(rec));
    }
    out.length_unit = (!items.empty() && all_tokens) ? "tokens" : "chars";
    out.mixed_length_fallback = any_tokens && !all_tokens;
    return out;
}

inline std::vector<StoredCompletion> as_stored(const std::vector<SuiteItemResult>& items) {
    std::vector<StoredCompletion> out;
    out.reserve(items.size());
    for (const auto& i : items) out.push_back({i.compound_id, i.sample_index, i.completion});
    return out;
}

// --- score-side metadata (consumed by report) ---------------------------------------

inline void write_run_meta(const std::string& path, const ScoredRun& scored) {
    json weights = json::object();
    for (const auto& [name, w] : scored.weights) weights[name] = w;
    write_text_file(path, json{{"weights", weights},
                               {"length_unit", scored.length_unit},
                               {"mixed_length_fallback", scored.mixed_length_fallback}}
                              .dump(2) +
                              "\n");
}

struct RunMeta {
    std::map<std::string, long long> weights;
    std::string length_unit = "chars";
    bool mixed_length_fallback = false;
};

inline RunMeta read_run_meta(const std::string& path) {
    json j = json::parse(read_text_file(path));
    RunMeta meta;
    for (const auto& [name, w] : j.at("weights").items()) {
        meta.weights[name] = w.get<long long>();
    }
    meta.length_unit = j.value("length_unit", "chars");
    meta.mixed_length_fallback = j.value("mixed_length_fallback", false);
    return meta;
}

}  // namespace cqa
