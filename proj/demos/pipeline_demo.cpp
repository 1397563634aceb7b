// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end in-process walkthrough: synthesize a dataset, compound it,
// answer it with the scripted mock, score, and print the metrics table.
// No network, no files.

#include <iostream>
#include <string>
#include <vector>

#include "cqa/compound.hpp"
#include "cqa/metrics.hpp"
#include "cqa/mock.hpp"
#include "cqa/report.hpp"
#include "cqa/runner.hpp"

int main() {
    cqa::Dataset d;
    d.name = "demo";
    for (int i = 0; i < 20; ++i) {
        cqa::Question q;
        q.id = "demo-" + std::to_string(i);
        q.text = "Compute " + std::to_string(3 + i) + " + " + std::to_string(11 + 2 * i) + ".";
        q.gold_answer = std::to_string(14 + 3 * i);
        q.answer_kind = cqa::AnswerKind::FREEFORM_MATH;
        q.source_dataset = d.name;
        d.questions.push_back(q);
    }

    std::vector<cqa::SuiteEntry> suite = cqa::build_suite(d, {1, 2, 5}, 4, 1729);
    std::cout << "suite: " << suite.size() << " compounds (digest "
              << cqa::suite_digest(suite).substr(0, 12) << ")\n\n";

    // The scripted endpoint answers only the first question of each compound.
    cqa::ScriptedTransport transport(
        cqa::build_script(suite, cqa::ScriptMode::FIRST_SLOT_ONLY));
    cqa::ModelEndpoint endpoint;
    cqa::SamplingParams sampling;

    std::vector<cqa::SuiteItemResult> results =
        cqa::complete_suite(transport, endpoint, suite, cqa::monologue_system_prompt(), sampling,
                            /*parallelism=*/4, /*cache=*/nullptr, cqa::no_sleep_policy());

    cqa::ScoredRun scored = cqa::score_run(suite, cqa::as_stored(results));

    cqa::MetricsTable table = cqa::build_table(scored.records, scored.weights);
    std::cout << cqa::render_table_md(table) << "\n";
    std::cout << "accuracy halves at k=2 and lands at 1/5 at k=5: only slot 1 is answered.\n";
    return 0;
}
