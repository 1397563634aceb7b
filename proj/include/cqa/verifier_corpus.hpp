// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Curated equivalence corpus: raw answer pairs with the expected match
// outcome. Covers boxed/unboxed wrappers, fraction/decimal equivalence,
// unreduced fractions, sign and unit handling, and choice-label formats.
// Exercised by `selftest` and the acceptance suite, which also replays the
// corpus against an independent big-rational oracle.

#pragma once

#include <vector>

#include "cqa/verifier.hpp"

namespace cqa {

struct CorpusCase {
    const char* pred;
    const char* gold;
    AnswerKind kind;
    bool expect_match;
};

inline const std::vector<CorpusCase>& verifier_corpus() {
    constexpr AnswerKind MATH = AnswerKind::FREEFORM_MATH;
    constexpr AnswerKind CHOICE = AnswerKind::MULTIPLE_CHOICE;
    static const std::vector<CorpusCase> cases = {
        // wrappers
        {"\\boxed{42}", "42", MATH, true},
        {"$42$", "42", MATH, true},
        {"42.", "42", MATH, true},
        {"  7  ", "7", MATH, true},
        {"$\\boxed{-0.0}$", "0", MATH, true},
        // fraction / decimal equivalence
        {"\\boxed{\\frac{192}{5}}", "192/5", MATH, true},
        {"38.4", "192/5", MATH, true},
        {"192/5", "38.4", MATH, true},
        {"0.5", "1/2", MATH, true},
        {"\\frac{7}{2}", "3.5", MATH, true},
        {"{192 \\over 5}", "192/5", MATH, true},
        {"\\dfrac{3}{4}", "0.75", MATH, true},
        {"2.50", "5/2", MATH, true},
        {"1e3", "1000", MATH, true},
        {"\\boxed{ 3/6 }", "0.5", MATH, true},
        // fraction reduction
        {"2/4", "1/2", MATH, true},
        {"6/8", "3/4", MATH, true},
        {"10/5", "2", MATH, true},
        {"-4/8", "-1/2", MATH, true},
        {"4/-8", "-1/2", MATH, true},
        {"\\frac{-3}{6}", "-1/2", MATH, true},
        {"0/7", "0", MATH, true},
        {"1000000/2", "500000", MATH, true},
        // signs
        {"+3", "3", MATH, true},
        {"-0", "0", MATH, true},
        // units
        {"45\xc2\xb0", "45", MATH, true},
        {"45^\\circ", "45", MATH, true},
        {"12 cm", "12", MATH, true},
        {"50%", "50", MATH, true},
        // decimal tolerance boundary (1e-7 inside, 3.3e-5 outside)
        {"0.3333333", "0.3333334", MATH, true},
        {"0.3333", "1/3", MATH, false},
        // mismatches
        {"1/3", "2/3", MATH, false},
        {"42", "43", MATH, false},
        {"sqrt(2)", "1.414", MATH, false},
        {"2\\sqrt{3}", "\\sqrt{12}", MATH, false},  // no symbolic algebra
        {"192/5", "192/7", MATH, false},
        {"abc", "abd", MATH, false},
        {"0.51", "0.5", MATH, false},
        {"-1/2", "1/2", MATH, false},
        {"3.1415926", "22/7", MATH, false},
        // choice labels
        {"(b).", "B", CHOICE, true},
        {"B", "B", CHOICE, true},
        {"b", "B", CHOICE, true},
        {"(A)", "A", CHOICE, true},
        {"\\boxed{C}", "C", CHOICE, true},
        {"d.", "D", CHOICE, true},
        {" C ", "C", CHOICE, true},
        {"B", "C", CHOICE, false},
        {"AB", "A", CHOICE, false},
        {"(a)", "D", CHOICE, false},
    };
    return cases;
}

}  // namespace cqa
