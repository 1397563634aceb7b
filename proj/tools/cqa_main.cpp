// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// cqa: compound-question benchmark driver. Subcommands cover the pipeline in
// order: dataset validate, compound build, run, score, report table, report
// remain-rate, analyze traces, plus selftest and the scripted mock endpoint.
//
// Exit codes: 0 success, 1 module error (diagnostic on stderr), 2 usage.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cqa/cqa.hpp"

namespace fs = std::filesystem;

namespace {

// "1,2,5..8" -> {1,2,5,6,7,8}; build_suite dedupes and sorts later.
std::vector<int> parse_ks(const std::string& text) {
    std::vector<int> ks;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
        std::size_t dots = part.find("..");
        if (dots != std::string::npos) {
            int lo = std::stoi(part.substr(0, dots));
            int hi = std::stoi(part.substr(dots + 2));
            for (int k = lo; k <= hi; ++k) ks.push_back(k);
        } else if (!part.empty()) {
            ks.push_back(std::stoi(part));
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return ks;
}

std::string suite_file_of(const std::string& suite_arg) {
    fs::path p(suite_arg);
    if (fs::is_directory(p)) return (p / "suite.jsonl").string();
    return suite_arg;
}

void print_report(const cqa::ValidationReport& report) {
    for (const auto& v : report) {
        std::cerr << "  " << v.code << " " << v.subject
                  << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
    }
}

int cmd_dataset_validate(const std::string& path, const std::string& name) {
    cqa::Dataset d = cqa::load_dataset(path, name);
    cqa::ValidationReport report = cqa::validate_dataset(d);
    if (!report.empty()) {
        std::cerr << "dataset " << d.name << ": " << report.size() << " violation(s)\n";
        print_report(report);
        return 1;
    }
    std::cout << "dataset " << d.name << ": OK, " << d.size() << " questions\n";
    return 0;
}

int cmd_compound_build(const std::string& dataset_path, const std::string& name,
                       const std::string& ks_text, int replicates, std::uint64_t seed,
                       const std::string& out_dir) {
    cqa::Dataset d = cqa::load_dataset(dataset_path, name);
    std::vector<int> ks = parse_ks(ks_text);
    if (ks.empty()) throw cqa::NoData("no k values given");
    std::vector<cqa::SuiteEntry> suite = cqa::build_suite(d, ks, replicates, seed);
    fs::create_directories(out_dir);
    std::string out_path = (fs::path(out_dir) / "suite.jsonl").string();
    cqa::write_suite(suite, out_path);
    std::cout << "wrote " << suite.size() << " compounds to " << out_path << " (digest "
              << cqa::suite_digest(suite).substr(0, 12) << ")\n";
    return 0;
}

struct RunArgs {
    std::string config_path;
    std::string endpoint_path;
    std::string suite_arg;
    std::string pattern = "monologue";
    std::string dialogue_config_path;
    std::string mock_script_path;
    std::string cache_dir;
    std::string out_dir = "out";
    int parallelism = 4;
};

int cmd_run(const RunArgs& args) {
    cqa::RunConfig cfg;
    if (!args.config_path.empty()) cfg = cqa::load_run_config(args.config_path);

    if (!args.endpoint_path.empty()) {
        cqa::json tree = cqa::toml::parse_file(args.endpoint_path);
        cqa::RunConfig endpoint_cfg = cqa::run_config_from_json(tree);
        cfg.endpoint = endpoint_cfg.endpoint;
        if (tree.contains("sampling")) cfg.sampling = endpoint_cfg.sampling;
    }

    std::vector<cqa::SuiteEntry> suite;
    fs::create_directories(args.out_dir);
    if (!args.suite_arg.empty()) {
        suite = cqa::read_suite(suite_file_of(args.suite_arg));
    } else {
        if (cfg.dataset_path.empty()) {
            throw cqa::NoData("no --suite given and the config names no dataset path");
        }
        cqa::Dataset d = cqa::load_dataset(cfg.dataset_path, cfg.dataset_name);
        suite = cqa::build_suite(d, cfg.suite.ks, cfg.suite.replicates, cfg.suite.seed);
        cqa::write_suite(suite, (fs::path(args.out_dir) / "suite.jsonl").string());
    }
    if (suite.empty()) throw cqa::NoData("suite is empty");

    std::string system_prompt;
    if (args.pattern == "dialogue") {
        cqa::DialogueConfig dialogue = cfg.dialogue;
        if (!args.dialogue_config_path.empty()) {
            cqa::json tree = cqa::toml::parse_file(args.dialogue_config_path);
            dialogue = cqa::dialogue_config_from_json(
                tree.contains("dialogue") ? tree["dialogue"] : tree);
        }
        system_prompt = cqa::render_system_prompt(dialogue);
    } else if (args.pattern == "monologue") {
        system_prompt = cqa::monologue_system_prompt();
    } else {
        throw cqa::NoData("unknown --pattern \"" + args.pattern + "\" (monologue|dialogue)");
    }

    std::string cache_dir =
        args.cache_dir.empty() ? (fs::path(args.out_dir) / "cache").string() : args.cache_dir;
    cqa::DiskCache cache{cache_dir};

    cqa::RunManifest manifest =
        cqa::make_manifest(cfg.endpoint, cfg.sampling, suite, cfg.suite.seed, args.pattern,
                           args.parallelism, cache_dir, cfg.raw);
    cqa::write_manifest(args.out_dir, manifest);  // before the first request

    std::unique_ptr<cqa::ChatTransport> transport;
    cqa::RetryPolicy policy;
    if (!args.mock_script_path.empty()) {
        transport = std::make_unique<cqa::ScriptedTransport>(
            cqa::read_script(args.mock_script_path));
        policy = cqa::no_sleep_policy();
    } else {
        transport = std::make_unique<cqa::HttpTransport>();
    }

    std::vector<cqa::SuiteItemResult> results =
        cqa::complete_suite(*transport, cfg.endpoint, suite, system_prompt, cfg.sampling,
                            args.parallelism, &cache, policy);
    std::string completions_dir = (fs::path(args.out_dir) / "completions").string();
    cqa::write_completions(completions_dir, results);

    std::size_t cached = 0, errors = 0;
    for (const auto& r : results) {
        cached += r.from_cache;
        errors += r.completion.finish_reason == cqa::FinishReason::ERROR;
    }
    std::cout << "completed " << results.size() << " samples (" << cached << " from cache, "
              << errors << " errors) -> " << completions_dir << "\n";
    return errors == results.size() && !results.empty() ? 1 : 0;
}

int cmd_score(const std::string& suite_arg, const std::string& completions_dir,
              const std::string& out_path) {
    std::vector<cqa::SuiteEntry> suite = cqa::read_suite(suite_file_of(suite_arg));
    std::vector<cqa::StoredCompletion> items = cqa::read_completions(completions_dir);
    cqa::ScoredRun scored = cqa::score_run(suite, items);

    fs::path out(out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    cqa::write_verdicts_csv(out_path, scored.verdicts);
    fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
    cqa::write_records(scored.records, (dir / "records.jsonl").string());
    cqa::write_run_meta((dir / "run_meta.json").string(), scored);

    long long hits = 0, slots = 0;
    for (const auto& r : scored.verdicts) {
        hits += r.indicator;
        ++slots;
    }
    std::cout << "scored " << scored.records.size() << " samples, " << slots << " slots, "
              << hits << " correct -> " << out_path << "\n";
    std::cout << "wrote " << (dir / "records.jsonl").string() << " and "
              << (dir / "run_meta.json").string() << "\n";
    return 0;
}

cqa::MetricsTable table_for_report(const std::string& verdicts_path,
                                   const std::string& records_path,
                                   const std::string& meta_path) {
    fs::path dir = fs::path(verdicts_path).has_parent_path()
                       ? fs::path(verdicts_path).parent_path()
                       : fs::path(".");
    std::string records = records_path.empty() ? (dir / "records.jsonl").string() : records_path;
    std::string meta_file = meta_path.empty() ? (dir / "run_meta.json").string() : meta_path;

    std::vector<cqa::SampleRecord> sample_records = cqa::read_records(records);
    std::map<std::string, long long> weights;
    if (fs::exists(meta_file)) weights = cqa::read_run_meta(meta_file).weights;
    return cqa::build_table(sample_records, weights);
}

int cmd_report_table(const std::string& verdicts_path, const std::string& records_path,
                     const std::string& meta_path, const std::string& out_path) {
    cqa::MetricsTable table = table_for_report(verdicts_path, records_path, meta_path);
    fs::path out(out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    std::string rendered =
        out.extension() == ".md" ? cqa::render_table_md(table) : cqa::render_table_csv(table);
    cqa::write_text_file(out_path, rendered);
    std::cout << "wrote " << out_path << " (" << table.cells.size() << " cells";
    if (!table.overall_cells.empty()) std::cout << " + " << table.overall_cells.size() << " overall";
    std::cout << ")\n";
    return 0;
}

int cmd_report_remain_rate(const std::string& verdicts_path, const std::string& records_path,
                           const std::string& meta_path, const std::string& out_path,
                           const std::string& svg_path) {
    cqa::MetricsTable table = table_for_report(verdicts_path, records_path, meta_path);
    fs::path out(out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    cqa::write_text_file(out_path, cqa::render_remain_rate_csv(table));
    std::cout << "wrote " << out_path << " (" << table.remain_rates.size() << " points)\n";
    if (!svg_path.empty()) {
        cqa::write_text_file(svg_path, cqa::render_remain_rate_svg(table));
        std::cout << "wrote " << svg_path << "\n";
    }
    return 0;
}

int cmd_analyze_traces(const std::string& completions_dir, const std::string& verdicts_path,
                       const std::string& suite_arg, const std::string& out_path,
                       double theta_switch) {
    std::vector<cqa::StoredCompletion> items = cqa::read_completions(completions_dir);
    std::vector<cqa::VerdictRow> rows = cqa::read_verdicts_csv(verdicts_path);

    std::map<std::pair<std::string, int>, std::vector<cqa::MatchVerdict>> verdicts;
    for (const auto& r : rows) {
        auto& list = verdicts[{r.compound_id, r.sample_index}];
        cqa::MatchVerdict v;
        v.slot_index = r.slot;
        v.indicator = r.indicator;
        list.push_back(v);
    }

    std::map<std::string, const cqa::SuiteEntry*> entries;
    std::vector<cqa::SuiteEntry> suite;
    if (!suite_arg.empty()) {
        suite = cqa::read_suite(suite_file_of(suite_arg));
        for (const auto& e : suite) entries[e.compound.compound_id] = &e;
    }

    std::vector<cqa::LabelRecord> labels;
    for (const auto& item : items) {
        auto it = verdicts.find({item.compound_id, item.sample_index});
        if (it == verdicts.end()) continue;  // unscored sample, nothing to label
        int k = static_cast<int>(it->second.size());

        std::vector<std::vector<std::string>> cues;
        if (auto entry = entries.find(item.compound_id); entry != entries.end()) {
            cues = cqa::derive_slot_cues(entry->second->members);
        } else {
            // without the suite only the explicit "Question j" references cue slots
            cues = cqa::derive_slot_cues(std::vector<std::string>(static_cast<std::size_t>(k), ""));
        }

        cqa::TraceAnnotation ann = cqa::annotate_trace(item.completion.text, k, cues);
        cqa::FailureLabel label = cqa::classify_failure(ann, it->second, theta_switch);
        labels.push_back({item.compound_id, item.sample_index, label.label, ann.switch_count,
                          static_cast<int>(ann.marker_positions.size()), ann.answered_slots});
    }

    fs::path out(out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    cqa::write_labels_csv(out_path, labels);

    std::map<std::string, int> counts;
    for (const auto& l : labels) ++counts[cqa::to_string(l.label)];
    std::cout << "labeled " << labels.size() << " traces -> " << out_path << " (";
    bool first = true;
    for (const auto& [name, n] : counts) {
        if (!first) std::cout << ", ";
        std::cout << name << "=" << n;
        first = false;
    }
    std::cout << ")\n";
    return 0;
}

int cmd_mock_script(const std::string& suite_arg, const std::string& mode_text,
                    const std::string& out_path) {
    std::vector<cqa::SuiteEntry> suite = cqa::read_suite(suite_file_of(suite_arg));
    cqa::MockScript script = cqa::build_script(suite, cqa::script_mode_from_string(mode_text));
    fs::path out(out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    cqa::write_script(script, out_path);
    std::cout << "wrote " << script.by_prompt_sha.size() << " scripted completions to " << out_path
              << "\n";
    return 0;
}

int cmd_mock_serve(const std::string& script_path, const std::string& host, int port) {
    cqa::MockServer server(cqa::read_script(script_path));
    std::cout << "serving scripted completions on http://" << host << ":" << port
              << " (ctrl-c to stop)\n";
    if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}

int selftest_check(bool ok, const char* what, int& failures) {
    std::cout << (ok ? "  ok: " : "  FAIL: ") << what << "\n";
    failures += ok ? 0 : 1;
    return failures;
}

int cmd_selftest() {
    int failures = 0;
    auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };

    selftest_check(cqa::sha256_hex("abc") ==
                       "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
                   "sha256 FIPS vector", failures);

    bool corpus_ok = true;
    for (const auto& c : cqa::verifier_corpus()) {
        bool got = cqa::is_match(cqa::normalize_answer(c.pred, c.kind),
                                 cqa::normalize_answer(c.gold, c.kind), c.kind);
        if (got != c.expect_match) {
            corpus_ok = false;
            std::cerr << "    corpus mismatch: \"" << c.pred << "\" vs \"" << c.gold << "\"\n";
        }
    }
    selftest_check(corpus_ok, "verifier corpus (50 cases)", failures);

    selftest_check(near(cqa::ppo_clipped_term(2.0, 1.0, 0.2), 1.2, 0.0), "ppo clip high",
                   failures);
    selftest_check(near(cqa::ppo_clipped_term(0.5, -1.0, 0.2), -0.8, 0.0), "ppo clip low",
                   failures);
    {
        std::vector<cqa::TrajectoryStep> traj{{0.0, 0.2, 0.4}, {1.0, 0.4, 0.0}};
        std::vector<double> adv = cqa::gae_advantages(traj, {0.5, 1.0, 0});
        selftest_check(near(adv[0], 0.5, 1e-12) && near(adv[1], 0.6, 1e-12), "gae two-step case",
                       failures);
    }
    selftest_check(near(cqa::value_td_loss(0.0, 1.0, 1.0, 0.0), 0.5, 0.0), "value TD squared",
                   failures);
    selftest_check(near(cqa::remain_rate(0.8963, 0.9762), 0.91818, 1e-4), "remain rate case",
                   failures);
    selftest_check(near(cqa::overall({{0.9762, 500}, {0.7438, 30}, {0.6594, 198}}), 0.8805, 1e-3),
                   "overall weighted mean", failures);

    if (failures == 0) {
        std::cout << "selftest: PASS\n";
        return 0;
    }
    std::cout << "selftest: " << failures << " failure(s)\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compound-question benchmark driver"};
    app.set_version_flag("--version", cqa::kVersion);
    app.require_subcommand(1);

    // dataset validate <path>
    auto* dataset = app.add_subcommand("dataset", "dataset utilities")->require_subcommand(1);
    auto* validate = dataset->add_subcommand("validate", "check a dataset file");
    std::string ds_path, ds_name;
    validate->add_option("path", ds_path, "dataset JSONL file")->required();
    validate->add_option("--name", ds_name, "dataset name (default: file stem)");

    // compound build
    auto* compound = app.add_subcommand("compound", "compound construction")->require_subcommand(1);
    auto* build = compound->add_subcommand("build", "build a compound suite");
    std::string cb_dataset, cb_name, cb_ks = "1..10", cb_out = "out";
    int cb_replicates = cqa::kDefaultReplicates;
    std::uint64_t cb_seed = cqa::kDefaultSeed;
    build->add_option("--dataset", cb_dataset, "dataset JSONL file")->required();
    build->add_option("--name", cb_name, "dataset name (default: file stem)");
    build->add_option("--k", cb_ks, "k values, e.g. \"1..10\" or \"1,2,4\"");
    build->add_option("--replicates", cb_replicates, "independent groupings per k");
    build->add_option("--seed", cb_seed, "master seed");
    build->add_option("--out", cb_out, "output directory for suite.jsonl");

    // run
    auto* run = app.add_subcommand("run", "run a suite against an endpoint");
    RunArgs run_args;
    run->add_option("--config", run_args.config_path, "run config file");
    run->add_option("--endpoint", run_args.endpoint_path, "endpoint config file (overrides --config)");
    run->add_option("--suite", run_args.suite_arg, "suite.jsonl or directory containing it");
    run->add_option("--pattern", run_args.pattern, "monologue|dialogue");
    run->add_option("--dialogue-config", run_args.dialogue_config_path, "dialogue config file");
    run->add_option("--mock", run_args.mock_script_path, "mock script; no network traffic");
    run->add_option("--parallelism", run_args.parallelism, "max in-flight requests");
    run->add_option("--cache", run_args.cache_dir, "response cache directory");
    run->add_option("--out", run_args.out_dir, "output directory");

    // score
    auto* score = app.add_subcommand("score", "score completions against a suite");
    std::string sc_suite, sc_completions, sc_out = "out/verdicts.csv";
    score->add_option("--suite", sc_suite, "suite.jsonl or directory")->required();
    score->add_option("--completions", sc_completions, "completions directory")->required();
    score->add_option("--out", sc_out, "verdicts CSV path");

    // report table | remain-rate
    auto* report = app.add_subcommand("report", "render metric reports")->require_subcommand(1);
    auto* table_cmd = report->add_subcommand("table", "accuracy/length table");
    std::string rt_verdicts, rt_records, rt_meta, rt_out = "out/table.csv";
    table_cmd->add_option("--verdicts", rt_verdicts, "verdicts CSV from score")->required();
    table_cmd->add_option("--records", rt_records, "records.jsonl (default: next to verdicts)");
    table_cmd->add_option("--meta", rt_meta, "run_meta.json (default: next to verdicts)");
    table_cmd->add_option("--out", rt_out, "output file; .md renders Markdown, else CSV");

    auto* remain = report->add_subcommand("remain-rate", "remain-rate curve");
    std::string rr_verdicts, rr_records, rr_meta, rr_out = "out/curve.csv", rr_svg;
    remain->add_option("--verdicts", rr_verdicts, "verdicts CSV from score")->required();
    remain->add_option("--records", rr_records, "records.jsonl (default: next to verdicts)");
    remain->add_option("--meta", rr_meta, "run_meta.json (default: next to verdicts)");
    remain->add_option("--out", rr_out, "curve CSV path");
    remain->add_option("--svg", rr_svg, "also render an SVG line chart here");

    // analyze traces
    auto* analyze = app.add_subcommand("analyze", "trace analysis")->require_subcommand(1);
    auto* traces = analyze->add_subcommand("traces", "classify failure modes per trace");
    std::string an_completions, an_verdicts, an_suite, an_out = "out/labels.csv";
    double an_theta = cqa::kDefaultThetaSwitch;
    traces->add_option("--completions", an_completions, "completions directory")->required();
    traces->add_option("--verdicts", an_verdicts, "verdicts CSV from score")->required();
    traces->add_option("--suite", an_suite, "suite.jsonl for slot cue derivation (recommended)");
    traces->add_option("--out", an_out, "labels CSV path");
    traces->add_option("--theta-switch", an_theta, "attention-deficit switch-ratio threshold");

    // mock script | serve
    auto* mock = app.add_subcommand("mock", "scripted mock endpoint")->require_subcommand(1);
    auto* mk_script = mock->add_subcommand("script", "generate a script for a suite");
    std::string ms_suite, ms_mode = "always_correct", ms_out = "out/script.json";
    mk_script->add_option("--suite", ms_suite, "suite.jsonl or directory")->required();
    mk_script->add_option("--mode", ms_mode, "always_correct|first_slot_only|high_switch_wrong");
    mk_script->add_option("--out", ms_out, "script JSON path");
    auto* mk_serve = mock->add_subcommand("serve", "serve a script over HTTP");
    std::string sv_script, sv_host = "127.0.0.1";
    int sv_port = 8080;
    mk_serve->add_option("--script", sv_script, "script JSON path")->required();
    mk_serve->add_option("--host", sv_host, "bind address");
    mk_serve->add_option("--port", sv_port, "bind port");

    auto* selftest = app.add_subcommand("selftest", "built-in formula and verifier checks");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion") {
            return code;
        }
        return 2;
    }

    try {
        if (validate->parsed()) return cmd_dataset_validate(ds_path, ds_name);
        if (build->parsed()) {
            return cmd_compound_build(cb_dataset, cb_name, cb_ks, cb_replicates, cb_seed, cb_out);
        }
        if (run->parsed()) return cmd_run(run_args);
        if (score->parsed()) return cmd_score(sc_suite, sc_completions, sc_out);
        if (table_cmd->parsed()) return cmd_report_table(rt_verdicts, rt_records, rt_meta, rt_out);
        if (remain->parsed()) {
            return cmd_report_remain_rate(rr_verdicts, rr_records, rr_meta, rr_out, rr_svg);
        }
        if (traces->parsed()) {
            return cmd_analyze_traces(an_completions, an_verdicts, an_suite, an_out, an_theta);
        }
        if (mk_script->parsed()) return cmd_mock_script(ms_suite, ms_mode, ms_out);
        if (mk_serve->parsed()) return cmd_mock_serve(sv_script, sv_host, sv_port);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const cqa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << app.help();
    return 2;
}
