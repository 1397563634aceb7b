// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Reasoning-trace analysis: count attention-shift markers, track which
// question slot the trace is talking about, and classify the three monologue
// failure modes (attention deficit, first-only, strategy lock) from those
// statistics plus the per-slot verdicts. Also parses dialogue-pattern traces
// into scenes and speaker turns.
//
// The classifier is rule-based and auditable: every label is a pure function
// of the annotation and the verdicts, and the cue sets that produced the slot
// mentions can be emitted alongside the labels.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/dataset.hpp"
#include "cqa/verifier.hpp"

namespace cqa {

inline constexpr double kDefaultThetaSwitch = 0.5;

/// Default attention-shift marker lexicon. Matching is case-sensitive and
/// token-exact ("Waiting" does not count).
inline std::vector<std::string> default_marker_lexicon() {
    return {"Wait", "Alternatively", "Hmm", "Let me reconsider"};
}

struct MarkerHit {
    std::string marker;
    std::size_t char_offset = 0;
};

struct SlotMention {
    int slot_index = 1;  // 1-based
    std::size_t char_offset = 0;
};

struct TraceAnnotation {
    std::vector<MarkerHit> marker_positions;
    std::vector<SlotMention> slot_mentions;  // ordered by char_offset
    std::set<int> answered_slots;            // 1-based, slots with extractable answers
    int switch_count = 0;                    // adjacent slot mentions with differing slot
};

enum class FailureMode { ATTENTION_DEFICIT, FIRST_ONLY, STRATEGY_LOCK, NONE };

inline std::string to_string(FailureMode m) {
    switch (m) {
        case FailureMode::ATTENTION_DEFICIT: return "attention_deficit";
        case FailureMode::FIRST_ONLY: return "first_only";
        case FailureMode::STRATEGY_LOCK: return "strategy_lock";
        case FailureMode::NONE: return "none";
    }
    return "none";
}

inline FailureMode failure_mode_from_string(const std::string& s) {
    if (s == "attention_deficit") return FailureMode::ATTENTION_DEFICIT;
    if (s == "first_only") return FailureMode::FIRST_ONLY;
    if (s == "strategy_lock") return FailureMode::STRATEGY_LOCK;
    if (s == "none") return FailureMode::NONE;
    throw ParseError("", 0, "unknown failure mode: " + s);
}

struct FailureLabel {
    FailureMode label = FailureMode::NONE;
    std::string evidence;
};

namespace detail {

inline bool token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

/// All occurrences of `needle` in `hay` whose ends fall on token boundaries.
inline std::vector<std::size_t> token_occurrences(const std::string& hay, const std::string& needle) {
    std::vector<std::size_t> hits;
    if (needle.empty()) return hits;
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !token_char(hay[pos - 1]);
        std::size_t end = pos + needle.size();
        bool right_ok = end >= hay.size() || !token_char(hay[end]);
        if (left_ok && right_ok) hits.push_back(pos);
        ++pos;
    }
    return hits;
}

inline const std::set<std::string>& cue_stopwords() {
    static const std::set<std::string> words{
        "about",   "above",  "after",    "again",    "answer",    "because", "before",
        "being",   "below",  "between",  "calculate", "compute",  "could",   "determine",
        "every",   "express", "find",    "first",    "following", "given",   "least",
        "letter",  "many",   "number",   "numbers",  "other",     "points",  "problem",
        "prove",   "question", "questions", "second", "should",   "simplify", "smallest",
        "solve",   "suppose", "their",   "there",    "these",     "third",   "those",
        "three",   "total",  "value",    "values",   "where",     "which",   "while",
        "whose",   "would",  "write"};
    return words;
}

inline std::vector<std::string> content_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!token_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && token_char(text[i])) ++i;
        tokens.push_back(text.substr(begin, i - begin));
    }
    return tokens;
}

inline bool numeric_token(const std::string& t) {
    return std::all_of(t.begin(), t.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

inline std::string lower_copy(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

inline constexpr std::size_t kMaxContentCues = 8;

/// Per-slot cue sets: the explicit "Question j" reference (both cases) plus up
/// to kMaxContentCues distinctive content tokens, i.e. numbers of 2+ digits or
/// words of 5+ letters appearing in exactly one member question. Order within
/// a slot follows first occurrence in the question text.
inline std::vector<std::vector<std::string>> derive_slot_cues(const std::vector<std::string>& member_texts) {
    std::size_t k = member_texts.size();
    std::vector<std::vector<std::string>> candidates(k);
    std::map<std::string, std::set<std::size_t>> owner;
    for (std::size_t j = 0; j < k; ++j) {
        std::set<std::string> seen;
        for (const auto& tok : detail::content_tokens(member_texts[j])) {
            bool numeric = detail::numeric_token(tok);
            if (numeric && tok.size() < 2) continue;
            if (!numeric && tok.size() < 5) continue;
            if (!numeric && detail::cue_stopwords().count(detail::lower_copy(tok))) continue;
            if (!seen.insert(tok).second) continue;
            candidates[j].push_back(tok);
            owner[tok].insert(j);
        }
    }
    std::vector<std::vector<std::string>> cues(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::string slot_tag = "Question " + std::to_string(j + 1);
        cues[j].push_back(slot_tag);
        cues[j].push_back("question " + std::to_string(j + 1));
        std::size_t kept = 0;
        for (const auto& tok : candidates[j]) {
            if (owner[tok].size() != 1) continue;  // shared across members, not distinctive
            cues[j].push_back(tok);
            if (++kept >= kMaxContentCues) break;
        }
    }
    return cues;
}

inline std::vector<std::vector<std::string>> derive_slot_cues(const std::vector<Question>& members) {
    std::vector<std::string> texts;
    texts.reserve(members.size());
    for (const auto& q : members) texts.push_back(q.text);
    return derive_slot_cues(texts);
}

/// Scans a trace for shift markers and slot mentions, and extracts which
/// slots carry an answer. Pure; an empty trace yields an empty annotation.
inline TraceAnnotation annotate_trace(const std::string& trace, int k,
                                      const std::vector<std::vector<std::string>>& slot_cues,
                                      const std::vector<std::string>& lexicon = default_marker_lexicon()) {
    TraceAnnotation ann;
    for (const auto& marker : lexicon) {
        for (std::size_t off : detail::token_occurrences(trace, marker)) {
            ann.marker_positions.push_back({marker, off});
        }
    }
    std::sort(ann.marker_positions.begin(), ann.marker_positions.end(),
              [](const MarkerHit& a, const MarkerHit& b) { return a.char_offset < b.char_offset; });

    for (std::size_t j = 0; j < slot_cues.size() && j < static_cast<std::size_t>(k); ++j) {
        for (const auto& cue : slot_cues[j]) {
            for (std::size_t off : detail::token_occurrences(trace, cue)) {
                ann.slot_mentions.push_back({static_cast<int>(j + 1), off});
            }
        }
    }
    std::sort(ann.slot_mentions.begin(), ann.slot_mentions.end(),
              [](const SlotMention& a, const SlotMention& b) {
                  return std::tie(a.char_offset, a.slot_index) < std::tie(b.char_offset, b.slot_index);
              });
    for (std::size_t i = 1; i < ann.slot_mentions.size(); ++i) {
        if (ann.slot_mentions[i].slot_index != ann.slot_mentions[i - 1].slot_index) ++ann.switch_count;
    }

    for (const auto& ex : extract_answers(trace, k)) {
        if (ex.status == ExtractionStatus::FOUND) ann.answered_slots.insert(ex.slot_index);
    }
    return ann;
}

namespace detail {

inline std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

/// Labels one trace. Deterministic; k is taken from the verdict count, and
/// k=1 traces are never multi-slot failures. Precedence when evidence
/// overlaps: FIRST_ONLY > ATTENTION_DEFICIT > STRATEGY_LOCK > NONE.
inline FailureLabel classify_failure(const TraceAnnotation& ann,
                                     const std::vector<MatchVerdict>& verdicts,
                                     double theta_switch = kDefaultThetaSwitch) {
    int k = static_cast<int>(verdicts.size());
    if (k <= 1) return {FailureMode::NONE, "k=1"};

    double mean_ind = 0.0;
    for (const auto& v : verdicts) mean_ind += v.indicator;
    mean_ind /= static_cast<double>(k);

    if (ann.answered_slots == std::set<int>{1}) {
        return {FailureMode::FIRST_ONLY,
                "answered_slots={1}, k=" + std::to_string(k)};
    }

    double switch_ratio = static_cast<double>(ann.switch_count) /
                          static_cast<double>(std::max<std::size_t>(1, ann.slot_mentions.size()));
    if (switch_ratio >= theta_switch && mean_ind <= 0.5) {
        return {FailureMode::ATTENTION_DEFICIT,
                "switch_ratio=" + detail::format_ratio(switch_ratio) +
                    " >= " + detail::format_ratio(theta_switch) +
                    ", mean_indicator=" + detail::format_ratio(mean_ind)};
    }

    bool first_correct = !verdicts.empty() && verdicts.front().indicator == 1;
    bool later_mentioned = std::any_of(ann.slot_mentions.begin(), ann.slot_mentions.end(),
                                       [](const SlotMention& m) { return m.slot_index > 1; });
    if (first_correct && later_mentioned) {
        int later_zero = 0;
        for (int j = 1; j < k; ++j) later_zero += verdicts[static_cast<std::size_t>(j)].indicator == 0;
        if (2 * later_zero >= k - 1) {
            return {FailureMode::STRATEGY_LOCK,
                    "slot 1 correct, " + std::to_string(later_zero) + "/" + std::to_string(k - 1) +
                        " later slots wrong"};
        }
    }
    return {FailureMode::NONE,
            "switch_ratio=" + detail::format_ratio(switch_ratio) +
                ", mean_indicator=" + detail::format_ratio(mean_ind)};
}

/// CSV-facing label row for one (compound, sample).
struct LabelRecord {
    std::string compound_id;
    int sample_index = 0;
    FailureMode label = FailureMode::NONE;
    int switch_count = 0;
    int marker_count = 0;
    std::set<int> answered_slots;
};

inline std::string answered_slots_field(const std::set<int>& slots) {
    std::string out;
    for (int s : slots) {
        if (!out.empty()) out += ';';
        out += std::to_string(s);
    }
    return out;
}

// --- dialogue-trace parsing ----------------------------------------------------

struct DialogueTurn {
    std::string scene;  // empty until a scene header is seen
    std::string speaker;
    std::string text;
    int order = 0;
};

inline const std::string kNarrationSpeaker = "narration";

namespace detail {

/// Scene headers are whole lines of the form "[ ... ]" or "** ... **"; a
/// leading "Scene:" inside the delimiters is stripped from the label.
inline bool scene_header(std::string_view line, std::string& label_out) {
    std::string_view t = trim_view(line);
    std::string_view inner;
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']') {
        inner = t.substr(1, t.size() - 2);
    } else if (t.size() >= 4 && t.substr(0, 2) == "**" && t.substr(t.size() - 2) == "**") {
        inner = t.substr(2, t.size() - 4);
    } else {
        return false;
    }
    inner = trim_view(inner);
    if (inner.empty()) return false;
    for (std::string_view prefix : {std::string_view("Scene:"), std::string_view("scene:"),
                                    std::string_view("SCENE:")}) {
        if (inner.size() > prefix.size() && inner.substr(0, prefix.size()) == prefix) {
            inner = trim_view(inner.substr(prefix.size()));
            break;
        }
    }
    label_out = std::string(inner);
    return !label_out.empty();
}

/// Words that open ordinary prose or proof lines, not speaker names.
inline const std::set<std::string>& non_speaker_words() {
    static const std::set<std::string> words{
        "alternatively", "also",     "answer",  "case",    "conclusion", "example", "finally",
        "first",         "given",    "hence",   "hint",    "hmm",        "however", "http",
        "https",         "next",     "note",    "now",     "observe",    "proof",   "question",
        "recall",        "remark",   "result",  "second",  "so",         "solution", "step",
        "then",          "therefore", "third",  "thus",    "wait"};
    return words;
}

/// Speaker-attribution lines: "Name: rest" at line start, where Name is short,
/// starts with a letter, is not an answer directive ("Answer 3: ..."), and
/// does not open with a prose connective ("Therefore:", "Step 2:").
inline bool attribution_line(std::string_view line, std::string& speaker_out, std::string& rest_out) {
    std::string_view t = trim_view(line);
    std::size_t colon = t.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon > 40) return false;
    std::string_view name = trim_view(t.substr(0, colon));
    if (name.empty() || std::isalpha(static_cast<unsigned char>(name.front())) == 0) return false;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != ' ' && c != '_' && c != '-' &&
            c != '.' && c != '\'') {
            return false;
        }
    }
    std::string first_word = lower_copy(std::string(name.substr(0, name.find(' '))));
    if (non_speaker_words().count(first_word)) return false;
    int slot;
    std::string payload;
    if (is_answer_line(t, slot, payload)) return false;
    speaker_out = std::string(name);
    rest_out = std::string(trim_view(t.substr(colon + 1)));
    return true;
}

}  // namespace detail

/// Splits a trace into ordered turns. Text before any attribution line is
/// attached to a synthetic narration speaker; a pure monologue trace yields a
/// single narration turn. Scene headers set the scene for subsequent turns.
inline std::vector<DialogueTurn> parse_dialogue_turns(const std::string& trace) {
    std::vector<DialogueTurn> turns;
    std::string scene;
    DialogueTurn current;
    bool open = false;

    auto flush = [&]() {
        if (!open) return;
        while (!current.text.empty() && current.text.back() == '\n') current.text.pop_back();
        if (!current.text.empty() || current.speaker != kNarrationSpeaker) {
            current.order = static_cast<int>(turns.size());
            turns.push_back(current);
        }
        current = DialogueTurn{};
        open = false;
    };

    std::size_t pos = 0;
    while (pos <= trace.size()) {
        std::size_t eol = trace.find('\n', pos);
        std::string_view line(trace.data() + pos,
                              (eol == std::string::npos ? trace.size() : eol) - pos);
        std::string label, speaker, rest;
        if (detail::scene_header(line, label)) {
            flush();
            scene = label;
        } else if (detail::attribution_line(line, speaker, rest)) {
            flush();
            current.scene = scene;
            current.speaker = speaker;
            current.text = rest;
            open = true;
        } else {
            if (!open) {
                current.scene = scene;
                current.speaker = kNarrationSpeaker;
                open = true;
            } else if (!current.text.empty()) {
                current.text += '\n';
            }
            current.text += std::string(line);
        }
        if (eol == std::string::npos) break;
        pos = eol + 1;
    }
    flush();
    return turns;
}

struct DialogueStats {
    int n_scenes = 0;
    int n_speakers = 0;
    std::vector<int> turns_per_scene;  // scene first-appearance order
    double mean_turn_len = 0.0;        // characters
};

inline DialogueStats dialogue_stats(const std::vector<DialogueTurn>& turns) {
    DialogueStats stats;
    if (turns.empty()) return stats;
    std::vector<std::string> scene_order;
    std::map<std::string, int> scene_counts;
    std::set<std::string> speakers;
    double len_sum = 0.0;
    for (const auto& t : turns) {
        if (!scene_counts.count(t.scene)) scene_order.push_back(t.scene);
        ++scene_counts[t.scene];
        speakers.insert(t.speaker);
        len_sum += static_cast<double>(t.text.size());
    }
    stats.n_scenes = static_cast<int>(scene_order.size());
    stats.n_speakers = static_cast<int>(speakers.size());
    for (const auto& s : scene_order) stats.turns_per_scene.push_back(scene_counts[s]);
    stats.mean_turn_len = len_sum / static_cast<double>(turns.size());
    return stats;
}

}  // namespace cqa
