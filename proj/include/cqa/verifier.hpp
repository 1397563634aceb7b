// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Rule-based answer extraction and matching. One answer is extracted per
// slot, normalized, and compared against the gold answer by exact string or
// numeric equivalence. Extraction rules:
//
//   * For slot j the LAST occurrence of the marker "Answer j:" wins; traces
//     often restate tentative answers mid-thought and the final statement is
//     the commitment.
//   * If the trailing block of answer lines states two different payloads for
//     the same slot, the slot is AMBIGUOUS and scores 0.
//   * A slot with no marker falls back to positional capture among the
//     trailing \boxed{...} expressions (those not already claimed by a
//     marker), assigned to unmarked slots in order. Still absent -> MISSING.
//
// Normalization handles boxed/dollar wrappers, \frac / \over rewriting,
// fraction reduction, sign canonicalization, and trailing unit words. It does
// not attempt symbolic algebra: e.g. "2\sqrt{3}" vs "\sqrt{12}" stay unequal
// unless they normalize to identical text.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/dataset.hpp"
#include "cqa/errors.hpp"

namespace cqa {

enum class ExtractionStatus { FOUND, MISSING, AMBIGUOUS };

struct ExtractedAnswer {
    int slot_index = 1;  // 1-based
    std::string raw;
    std::string normalized;  // empty iff status != FOUND
    ExtractionStatus status = ExtractionStatus::MISSING;
};

enum class MatchReason { EXACT, NUMERIC_EQUIV, CHOICE_EQUIV, NO_ANSWER, MISMATCH };

inline std::string to_string(MatchReason r) {
    switch (r) {
        case MatchReason::EXACT: return "exact";
        case MatchReason::NUMERIC_EQUIV: return "numeric_equiv";
        case MatchReason::CHOICE_EQUIV: return "choice_equiv";
        case MatchReason::NO_ANSWER: return "no_answer";
        case MatchReason::MISMATCH: return "mismatch";
    }
    return "mismatch";
}

struct MatchVerdict {
    int slot_index = 1;
    int indicator = 0;  // 1 only for EXACT / NUMERIC_EQUIV / CHOICE_EQUIV
    MatchReason reason = MatchReason::MISMATCH;
};

// --- numeric parsing ---------------------------------------------------------

struct Rational {
    long long num = 0;
    long long den = 1;
};

namespace detail {

inline std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

inline std::optional<long long> parse_int(std::string_view s) {
    s = trim_view(s);
    bool neg = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s) || s.size() > 18) return std::nullopt;  // 18 digits always fit
    long long v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return neg ? -v : v;
}

/// Integers and integer fractions ("a", "a/b"). Returns nullopt for anything
/// else, including b = 0.
inline std::optional<Rational> parse_rational(std::string_view s) {
    s = trim_view(s);
    std::size_t slash = s.find('/');
    if (slash == std::string_view::npos) {
        auto v = parse_int(s);
        if (!v) return std::nullopt;
        return Rational{*v, 1};
    }
    auto num = parse_int(s.substr(0, slash));
    auto den = parse_int(s.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    if (s.find('/', slash + 1) != std::string_view::npos) return std::nullopt;
    return Rational{*num, *den};
}

inline std::optional<long double> parse_decimal(std::string_view s) {
    s = trim_view(s);
    if (s.empty()) return std::nullopt;
    std::string buf(s);
    const char* begin = buf.c_str();
    char* end = nullptr;
    errno = 0;
    long double v = std::strtold(begin, &end);
    if (end != begin + buf.size() || errno == ERANGE) return std::nullopt;
    // reject strtold extras like "inf", "nan", "0x1p3"
    for (char c : buf) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' ||
              c == 'e' || c == 'E')) {
            return std::nullopt;
        }
    }
    return v;
}

inline bool is_numeric_token(std::string_view s) {
    return parse_rational(s).has_value() || parse_decimal(s).has_value();
}

inline Rational reduce(Rational r) {
    if (r.den < 0) {
        r.num = -r.num;
        r.den = -r.den;
    }
    long long g = std::gcd(r.num < 0 ? -r.num : r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    if (r.num == 0) r.den = 1;
    return r;
}

// --- string rewriting for FREEFORM_MATH --------------------------------------

/// Captures the content of a balanced {...} starting at `open` (the '{'),
/// possibly spanning newlines. Returns the content and the index just past the
/// closing brace, or nullopt if unbalanced.
inline std::optional<std::pair<std::string, std::size_t>> capture_braced(std::string_view s,
                                                                         std::size_t open) {
    if (open >= s.size() || s[open] != '{') return std::nullopt;
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == '{') ++depth;
        else if (s[i] == '}') {
            --depth;
            if (depth == 0) return std::pair{std::string(s.substr(open + 1, i - open - 1)), i + 1};
        }
    }
    return std::nullopt;
}

inline std::string rewrite_fracs(const std::string& s) {
    static const std::string_view frac_cmds[] = {"\\dfrac", "\\tfrac", "\\frac"};
    for (std::string_view cmd : frac_cmds) {
        std::size_t pos = s.find(cmd);
        if (pos == std::string::npos) continue;
        std::size_t after = pos + cmd.size();
        auto a = capture_braced(s, after);
        if (!a) continue;
        auto b = capture_braced(s, a->second);
        if (!b) continue;
        std::string out = s.substr(0, pos) + rewrite_fracs(a->first) + "/" + rewrite_fracs(b->first) +
                          s.substr(b->second);
        return rewrite_fracs(out);
    }
    std::size_t over = s.find("\\over");
    if (over != std::string::npos) {
        std::string lhs(trim_view(std::string_view(s).substr(0, over)));
        std::string rhs(trim_view(std::string_view(s).substr(over + 5)));
        if (!lhs.empty() && !rhs.empty()) return rewrite_fracs(lhs) + "/" + rewrite_fracs(rhs);
    }
    return s;
}

inline std::string strip_wrappers(std::string s) {
    std::string_view v = trim_view(s);
    // $...$ wrappers
    if (v.size() >= 2 && v.front() == '$' && v.back() == '$') {
        return std::string(v.substr(1, v.size() - 2));
    }
    // trailing periods
    if (!v.empty() && v.back() == '.') {
        // keep decimal points: only strip when the period is string-final punctuation
        return std::string(v.substr(0, v.size() - 1));
    }
    // whole-string \boxed{...}
    if (v.substr(0, 7) == "\\boxed{") {
        auto inner = capture_braced(v, 6);
        if (inner && inner->second == v.size()) return inner->first;
    }
    // whole-string braces
    if (!v.empty() && v.front() == '{') {
        auto inner = capture_braced(v, 0);
        if (inner && inner->second == v.size()) return inner->first;
    }
    return std::string(v);
}

inline const std::vector<std::string>& unit_lexicon() {
    static const std::vector<std::string> units = {
        "degrees", "degree", "radians", "radian", "percent",
        "meters", "meter", "metres", "metre", "cm", "mm", "km", "m",
        "feet", "foot", "ft", "inches", "inch", "yards", "yard",
        "seconds", "second", "sec", "minutes", "minute", "min",
        "hours", "hour", "hr", "days", "mph", "km/h", "m/s",
        "dollars", "cents", "square units", "cubic units", "units", "unit"};
    return units;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Drops a trailing unit from a numeric answer: "12 cm" -> "12", "45°" -> "45",
/// "50%" -> "50". Units are matched case-insensitively; the remainder must
/// still be numeric, so "a.m." and friends are untouched.
inline std::string strip_trailing_unit(const std::string& s) {
    std::string_view v = trim_view(s);
    static const std::string_view symbol_suffixes[] = {"^{\\circ}", "^\\circ", "\xc2\xb0", "%",
                                                       "\\%"};
    for (std::string_view suffix : symbol_suffixes) {
        if (v.size() > suffix.size() && v.substr(v.size() - suffix.size()) == suffix) {
            std::string_view head = trim_view(v.substr(0, v.size() - suffix.size()));
            if (is_numeric_token(head)) return std::string(head);
        }
    }
    std::string lower = ascii_lower(v);
    for (const auto& unit : unit_lexicon()) {
        if (lower.size() <= unit.size() + 1) continue;
        if (lower.compare(lower.size() - unit.size(), unit.size(), unit) != 0) continue;
        std::size_t cut = lower.size() - unit.size();
        if (!std::isspace(static_cast<unsigned char>(lower[cut - 1]))) continue;
        std::string_view head = trim_view(v.substr(0, cut));
        if (is_numeric_token(head)) return std::string(head);
    }
    return std::string(v);
}

inline std::string canonicalize_number(const std::string& s) {
    std::string_view v = trim_view(s);
    if (auto r = parse_rational(v)) {
        Rational red = reduce(*r);
        if (red.den == 1) return std::to_string(red.num);
        return std::to_string(red.num) + "/" + std::to_string(red.den);
    }
    if (auto d = parse_decimal(v)) {
        if (*d == 0.0L) return "0";                       // "-0" and "-0.0" collapse to "0"
        if (!v.empty() && v.front() == '+') v.remove_prefix(1);  // "+3.5" -> "3.5"
        return std::string(v);
    }
    return std::string(v);
}

/// Canonical spacing for fraction-shaped strings: "192 / 5" -> "192/5".
inline std::string tighten_fraction(const std::string& s) {
    std::size_t slash = s.find('/');
    if (slash == std::string::npos) return s;
    std::string_view lhs = trim_view(std::string_view(s).substr(0, slash));
    std::string_view rhs = trim_view(std::string_view(s).substr(slash + 1));
    if (parse_int(lhs) && parse_int(rhs)) return std::string(lhs) + "/" + std::string(rhs);
    return s;
}

inline std::string normalize_math_once(const std::string& s) {
    std::string out = strip_wrappers(s);
    out = rewrite_fracs(out);
    out = tighten_fraction(out);
    out = strip_trailing_unit(out);
    out = canonicalize_number(out);
    return out;
}

inline std::string normalize_choice_once(const std::string& s) {
    std::string stripped = strip_wrappers(s);
    std::string out;
    for (char c : stripped) {
        if (c == '(' || c == ')' || c == '.' || c == ',' || c == ':' || c == '*' ||
            std::isspace(static_cast<unsigned char>(c))) {
            continue;
        }
        out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace detail

/// Normalizes a raw answer for matching. Idempotent: the rewrite pipeline runs
/// to a fixpoint. Stripping a wrapper or a punctuation layer can expose the
/// next one ("({8, })" -> "{8}" -> "8"), so both pipelines iterate; every
/// productive pass shortens the string, which bounds the loop.
inline std::string normalize_answer(const std::string& raw, AnswerKind kind) {
    std::string cur = raw;
    for (std::size_t i = 0; i <= raw.size() + 1; ++i) {
        std::string next = kind == AnswerKind::MULTIPLE_CHOICE
                               ? detail::normalize_choice_once(cur)
                               : detail::normalize_math_once(cur);
        if (next == cur) break;
        cur = std::move(next);
    }
    return cur;
}

namespace detail {

enum class MatchRoute { NONE, STRING, NUMERIC };

inline MatchRoute match_route(const std::string& pred, const std::string& gold, AnswerKind kind) {
    if (pred.empty() || gold.empty()) return MatchRoute::NONE;
    if (pred == gold) return MatchRoute::STRING;
    if (kind == AnswerKind::MULTIPLE_CHOICE) return MatchRoute::NONE;

    auto pr = parse_rational(pred);
    auto gr = parse_rational(gold);
    if (pr && gr) {
        // exact cross-multiplication; rationals never fall back to tolerance
        __int128 lhs = static_cast<__int128>(pr->num) * gr->den;
        __int128 rhs = static_cast<__int128>(gr->num) * pr->den;
        return lhs == rhs ? MatchRoute::NUMERIC : MatchRoute::NONE;
    }
    auto as_decimal = [](const std::optional<Rational>& r,
                         std::string_view s) -> std::optional<long double> {
        if (r) return static_cast<long double>(r->num) / static_cast<long double>(r->den);
        return parse_decimal(s);
    };
    auto pd = as_decimal(pr, pred);
    auto gd = as_decimal(gr, gold);
    if (pd && gd) {
        constexpr long double kDecimalTolerance = 1e-6L;
        long double diff = *pd - *gd;
        if (diff < 0) diff = -diff;
        return diff <= kDecimalTolerance ? MatchRoute::NUMERIC : MatchRoute::NONE;
    }
    return MatchRoute::NONE;
}

}  // namespace detail

/// True when the normalized strings are equal or (FREEFORM_MATH only) both
/// parse numerically and agree: exactly for rational pairs, within absolute
/// tolerance 1e-6 when a decimal is involved. Symmetric by construction.
inline bool is_match(const std::string& pred_normalized, const std::string& gold_normalized,
                     AnswerKind kind) {
    return detail::match_route(pred_normalized, gold_normalized, kind) != detail::MatchRoute::NONE;
}

// --- extraction ---------------------------------------------------------------

namespace detail {

struct MarkerHit {
    std::size_t pos;      // offset of the 'A' in "Answer j:"
    std::string payload;  // trimmed text captured for the slot
};

inline std::string trim_payload(std::string_view payload) {
    payload = trim_view(payload);
    while (!payload.empty() && (payload.back() == '*' || payload.back() == '_')) {
        payload.remove_suffix(1);
        payload = trim_view(payload);
    }
    while (!payload.empty() && (payload.front() == '*' || payload.front() == '_')) {
        payload.remove_prefix(1);
        payload = trim_view(payload);
    }
    return std::string(payload);
}

/// Payload of one marker line: the first \boxed{...} after the marker (which
/// may span lines) or the remainder of the line.
inline std::string capture_payload(std::string_view text, std::size_t after_colon) {
    std::size_t eol = text.find('\n', after_colon);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(after_colon, eol - after_colon);
    std::size_t boxed = line.find("\\boxed{");
    if (boxed != std::string_view::npos) {
        auto inner = capture_braced(text, after_colon + boxed + 6);
        if (inner) {
            return trim_payload(text.substr(after_colon + boxed,
                                            inner->second - (after_colon + boxed)));
        }
    }
    return trim_payload(line);
}

inline std::vector<MarkerHit> find_marker_hits(std::string_view text, int slot) {
    std::string marker = "Answer " + std::to_string(slot) + ":";
    std::vector<MarkerHit> hits;
    std::size_t pos = 0;
    while ((pos = text.find(marker, pos)) != std::string_view::npos) {
        bool boundary_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
        if (boundary_ok) {
            std::string payload = capture_payload(text, pos + marker.size());
            if (!payload.empty()) hits.push_back({pos, std::move(payload)});
        }
        pos += marker.size();
    }
    return hits;
}

struct BoxedHit {
    std::size_t pos;
    std::string raw;  // the full "\boxed{...}" expression
};

inline std::vector<BoxedHit> find_boxed(std::string_view text) {
    std::vector<BoxedHit> hits;
    std::size_t pos = 0;
    while ((pos = text.find("\\boxed{", pos)) != std::string_view::npos) {
        auto inner = capture_braced(text, pos + 6);
        if (inner) {
            hits.push_back({pos, std::string(text.substr(pos, inner->second - pos))});
            pos = inner->second;
        } else {
            pos += 7;
        }
    }
    return hits;
}

inline bool is_answer_line(std::string_view line, int& slot_out, std::string& payload_out) {
    line = trim_view(line);
    while (!line.empty() && (line.front() == '*' || line.front() == '_' || line.front() == '#')) {
        line.remove_prefix(1);
        line = trim_view(line);
    }
    if (line.substr(0, 7) != "Answer ") return false;
    std::size_t i = 7;
    std::size_t digits_begin = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == digits_begin || i - digits_begin > 5 || i >= line.size() || line[i] != ':') return false;
    slot_out = std::stoi(std::string(line.substr(digits_begin, i - digits_begin)));
    payload_out = trim_payload(line.substr(i + 1));
    return true;
}

}  // namespace detail

/// Extracts exactly k per-slot answers, kind-aware. Statuses degrade (MISSING,
/// AMBIGUOUS) instead of throwing.
inline std::vector<ExtractedAnswer> extract_answers(const std::string& completion_text, int k,
                                                    const std::vector<AnswerKind>& kinds) {
    std::vector<ExtractedAnswer> out(static_cast<std::size_t>(std::max(k, 0)));
    if (k < 1) return out;

    // conflicting payloads inside the trailing answer block -> AMBIGUOUS
    std::vector<std::pair<int, std::string>> final_block;
    {
        std::vector<std::string_view> lines;
        std::string_view text = completion_text;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t eol = text.find('\n', start);
            if (eol == std::string_view::npos) {
                lines.push_back(text.substr(start));
                break;
            }
            lines.push_back(text.substr(start, eol - start));
            start = eol + 1;
        }
        std::size_t i = lines.size();
        while (i > 0 && detail::trim_view(lines[i - 1]).empty()) --i;
        while (i > 0) {
            int slot = 0;
            std::string payload;
            if (!detail::is_answer_line(lines[i - 1], slot, payload)) break;
            final_block.emplace_back(slot, std::move(payload));
            --i;
        }
    }

    std::vector<bool> marker_found(static_cast<std::size_t>(k), false);
    for (int j = 1; j <= k; ++j) {
        auto& slot = out[static_cast<std::size_t>(j - 1)];
        slot.slot_index = j;
        AnswerKind kind = static_cast<std::size_t>(j - 1) < kinds.size()
                              ? kinds[static_cast<std::size_t>(j - 1)]
                              : AnswerKind::FREEFORM_MATH;

        bool ambiguous = false;
        std::string first_payload;
        for (const auto& [s, payload] : final_block) {
            if (s != j || payload.empty()) continue;
            std::string norm = normalize_answer(payload, kind);
            if (first_payload.empty()) {
                first_payload = norm;
            } else if (norm != first_payload) {
                ambiguous = true;
            }
        }
        if (ambiguous) {
            slot.status = ExtractionStatus::AMBIGUOUS;
            continue;
        }

        auto hits = detail::find_marker_hits(completion_text, j);
        if (!hits.empty()) {
            slot.raw = hits.back().payload;
            slot.normalized = normalize_answer(slot.raw, kind);
            slot.status = ExtractionStatus::FOUND;
            marker_found[static_cast<std::size_t>(j - 1)] = true;
        }
    }

    // positional fallback: trailing unclaimed boxed expressions, in order,
    // assigned to the unmarked slots in order
    std::vector<int> unmarked;
    for (int j = 1; j <= k; ++j) {
        if (out[static_cast<std::size_t>(j - 1)].status == ExtractionStatus::MISSING) {
            unmarked.push_back(j);
        }
    }
    if (!unmarked.empty()) {
        auto boxed = detail::find_boxed(completion_text);
        std::vector<std::string> claimed;
        for (int j = 1; j <= k; ++j) {
            if (marker_found[static_cast<std::size_t>(j - 1)]) {
                claimed.push_back(out[static_cast<std::size_t>(j - 1)].raw);
            }
        }
        std::vector<detail::BoxedHit> unclaimed;
        for (auto& hit : boxed) {
            auto it = std::find(claimed.begin(), claimed.end(), hit.raw);
            if (it != claimed.end()) {
                claimed.erase(it);  // each marker claims one boxed occurrence
            } else {
                unclaimed.push_back(std::move(hit));
            }
        }
        std::size_t window = std::min(unclaimed.size(), static_cast<std::size_t>(k));
        std::size_t base = unclaimed.size() - window;
        for (std::size_t i = 0; i < unmarked.size() && i < window; ++i) {
            auto& slot = out[static_cast<std::size_t>(unmarked[i] - 1)];
            AnswerKind kind = static_cast<std::size_t>(unmarked[i] - 1) < kinds.size()
                                  ? kinds[static_cast<std::size_t>(unmarked[i] - 1)]
                                  : AnswerKind::FREEFORM_MATH;
            slot.raw = unclaimed[base + i].raw;
            slot.normalized = normalize_answer(slot.raw, kind);
            slot.status = ExtractionStatus::FOUND;
        }
    }
    return out;
}

inline std::vector<ExtractedAnswer> extract_answers(const std::string& completion_text, int k) {
    return extract_answers(completion_text, k,
                           std::vector<AnswerKind>(static_cast<std::size_t>(std::max(k, 0)),
                                                   AnswerKind::FREEFORM_MATH));
}

struct GoldAnswer {
    std::string gold;
    AnswerKind kind = AnswerKind::FREEFORM_MATH;
};

/// Scores extracted answers against golds. MISSING and AMBIGUOUS slots get
/// indicator 0 with NO_ANSWER; unanswered slots count against accuracy because
/// the task accuracy divides by k unconditionally.
inline std::vector<MatchVerdict> score_compound(const std::vector<ExtractedAnswer>& extracted,
                                                const std::vector<GoldAnswer>& golds) {
    if (extracted.size() != golds.size()) throw SlotCountMismatch(extracted.size(), golds.size());
    std::vector<MatchVerdict> verdicts(extracted.size());
    for (std::size_t i = 0; i < extracted.size(); ++i) {
        auto& v = verdicts[i];
        v.slot_index = static_cast<int>(i + 1);
        if (extracted[i].status != ExtractionStatus::FOUND) {
            v.indicator = 0;
            v.reason = MatchReason::NO_ANSWER;
            continue;
        }
        const AnswerKind kind = golds[i].kind;
        std::string pred = normalize_answer(extracted[i].raw, kind);
        std::string gold = normalize_answer(golds[i].gold, kind);
        auto route = detail::match_route(pred, gold, kind);
        if (route == detail::MatchRoute::NONE) {
            v.indicator = 0;
            v.reason = MatchReason::MISMATCH;
        } else {
            v.indicator = 1;
            if (route == detail::MatchRoute::NUMERIC) {
                v.reason = MatchReason::NUMERIC_EQUIV;
            } else if (kind == AnswerKind::MULTIPLE_CHOICE && extracted[i].raw != golds[i].gold) {
                v.reason = MatchReason::CHOICE_EQUIV;
            } else {
                v.reason = MatchReason::EXACT;
            }
        }
    }
    return verdicts;
}

}  // namespace cqa
