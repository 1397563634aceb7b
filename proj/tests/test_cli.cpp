// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the installed binary: every subcommand is exercised
// through a real shell invocation, exit codes included.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "cqa/dataset.hpp"
#include "cqa/jsonl.hpp"
#include "test_util.hpp"

#ifndef CQA_BIN_PATH
#error "CQA_BIN_PATH must point at the cli binary"
#endif

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const cqatest::TempDir& tmp, const std::string& args) {
    std::string out_path = tmp.file("cli_stdout.txt");
    std::string err_path = tmp.file("cli_stderr.txt");
    std::string cmd = std::string(CQA_BIN_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = cqa::read_text_file(out_path);
    r.err = cqa::read_text_file(err_path);
    return r;
}

std::string q(const std::string& path) { return "\"" + path + "\""; }

}  // namespace

TEST_CASE("cli reports usage and versions of failure", "[cli]") {
    cqatest::TempDir tmp;

    SECTION("no arguments prints help and exits 2") {
        CliResult r = run_cli(tmp, "");
        CHECK(r.code == 2);
    }
    SECTION("--help exits 0") {
        CliResult r = run_cli(tmp, "--help");
        CHECK(r.code == 0);
        CHECK(r.out.find("dataset") != std::string::npos);
    }
    SECTION("domain errors exit 1 with a message on stderr") {
        CliResult r = run_cli(tmp, "dataset validate " + q(tmp.file("absent.jsonl")));
        CHECK(r.code == 1);
        CHECK(r.err.find("error:") != std::string::npos);
    }
    SECTION("unknown flags exit 2") {
        CliResult r = run_cli(tmp, "dataset validate --no-such-flag");
        CHECK(r.code == 2);
    }
}

TEST_CASE("cli selftest passes", "[cli]") {
    cqatest::TempDir tmp;
    CliResult r = run_cli(tmp, "selftest");
    INFO(r.out << r.err);
    CHECK(r.code == 0);
    CHECK(r.out.find("fail") == std::string::npos);
}

TEST_CASE("cli dataset validate accepts good data and rejects bad", "[cli]") {
    cqatest::TempDir tmp;
    cqa::write_dataset(cqatest::make_math_dataset("unit", 4), tmp.file("good.jsonl"));
    CHECK(run_cli(tmp, "dataset validate " + q(tmp.file("good.jsonl"))).code == 0);

    // A multiple-choice record whose gold label is not among the choices.
    cqatest::write_file(tmp.file("bad.jsonl"),
                        "{\"id\":\"x\",\"text\":\"Pick.\",\"gold_answer\":\"E\","
                        "\"answer_kind\":\"multiple_choice\",\"choices\":["
                        "{\"label\":\"A\",\"text\":\"a\"},{\"label\":\"B\",\"text\":\"b\"}]}\n");
    CliResult r = run_cli(tmp, "dataset validate " + q(tmp.file("bad.jsonl")));
    CHECK(r.code == 1);
    CHECK(r.err.find("GoldNotInChoices") != std::string::npos);
}

TEST_CASE("cli pipeline runs offline end to end", "[cli]") {
    cqatest::TempDir tmp;
    std::string dataset_path = tmp.file("unit.jsonl");
    cqa::write_dataset(cqatest::make_math_dataset("unit", 6), dataset_path);
    std::string suite_dir = tmp.file("suite");
    std::string out_dir = tmp.file("out");

    CliResult r = run_cli(tmp, "compound build --dataset " + q(dataset_path) +
                                   " --name unit --k 1,2 --replicates 2 --seed 7 --out " +
                                   q(suite_dir));
    INFO(r.out << r.err);
    REQUIRE(r.code == 0);
    REQUIRE(std::filesystem::exists(std::filesystem::path(suite_dir) / "suite.jsonl"));

    r = run_cli(tmp, "mock script --suite " + q(suite_dir) + " --mode always_correct --out " +
                         q(tmp.file("script.json")));
    INFO(r.out << r.err);
    REQUIRE(r.code == 0);

    r = run_cli(tmp, "run --suite " + q(suite_dir) + " --mock " + q(tmp.file("script.json")) +
                         " --parallelism 2 --out " + q(out_dir));
    INFO(r.out << r.err);
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(out_dir) / "manifest.json"));
    REQUIRE(std::filesystem::exists(std::filesystem::path(out_dir) / "completions" / "meta.jsonl"));

    std::string verdicts = (std::filesystem::path(out_dir) / "verdicts.csv").string();
    r = run_cli(tmp, "score --suite " + q(suite_dir) + " --completions " +
                         q((std::filesystem::path(out_dir) / "completions").string()) + " --out " +
                         q(verdicts));
    INFO(r.out << r.err);
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(out_dir) / "records.jsonl"));
    CHECK(std::filesystem::exists(std::filesystem::path(out_dir) / "run_meta.json"));

    SECTION("report table emits perfect accuracy rows") {
        std::string table = (std::filesystem::path(out_dir) / "table.csv").string();
        r = run_cli(tmp, "report table --verdicts " + q(verdicts) + " --out " + q(table));
        INFO(r.out << r.err);
        REQUIRE(r.code == 0);
        std::string csv = cqa::read_text_file(table);
        CHECK(csv.find("unit,1,1.0000") != std::string::npos);
        CHECK(csv.find("unit,2,1.0000") != std::string::npos);
        CHECK(csv.find("overall,1,1.0000") != std::string::npos);
    }
    SECTION("report table renders markdown for .md outputs") {
        std::string table = (std::filesystem::path(out_dir) / "table.md").string();
        r = run_cli(tmp, "report table --verdicts " + q(verdicts) + " --out " + q(table));
        REQUIRE(r.code == 0);
        CHECK(cqa::read_text_file(table).rfind("| dataset |", 0) == 0);
    }
    SECTION("report remain-rate writes the curve and the chart") {
        std::string curve = (std::filesystem::path(out_dir) / "curve.csv").string();
        std::string svg = (std::filesystem::path(out_dir) / "curve.svg").string();
        r = run_cli(tmp, "report remain-rate --verdicts " + q(verdicts) + " --out " + q(curve) +
                             " --svg " + q(svg));
        INFO(r.out << r.err);
        REQUIRE(r.code == 0);
        std::string csv = cqa::read_text_file(curve);
        CHECK(csv.rfind("dataset,k,remain_rate", 0) == 0);
        CHECK(csv.find("unit,2,1.0000") != std::string::npos);
        CHECK(cqa::read_text_file(svg).rfind("<svg", 0) == 0);
    }
    SECTION("analyze traces labels an always-correct run none") {
        std::string labels = (std::filesystem::path(out_dir) / "labels.csv").string();
        r = run_cli(tmp, "analyze traces --completions " +
                             q((std::filesystem::path(out_dir) / "completions").string()) +
                             " --verdicts " + q(verdicts) + " --suite " + q(suite_dir) +
                             " --out " + q(labels));
        INFO(r.out << r.err);
        REQUIRE(r.code == 0);
        std::string csv = cqa::read_text_file(labels);
        CHECK(csv.find("first_only") == std::string::npos);
        CHECK(csv.find("attention_deficit") == std::string::npos);
        CHECK(csv.find("strategy_lock") == std::string::npos);
    }
    SECTION("a second run is served from the cache") {
        CliResult r2 = run_cli(tmp, "run --suite " + q(suite_dir) + " --mock " +
                                        q(tmp.file("script.json")) + " --parallelism 2 --out " +
                                        q(out_dir));
        REQUIRE(r2.code == 0);
        CHECK(r2.out.find("from cache") != std::string::npos);
    }
    SECTION("rescoring is byte-identical") {
        std::string verdicts2 = (std::filesystem::path(out_dir) / "verdicts2.csv").string();
        r = run_cli(tmp, "score --suite " + q(suite_dir) + " --completions " +
                             q((std::filesystem::path(out_dir) / "completions").string()) +
                             " --out " + q(verdicts2));
        REQUIRE(r.code == 0);
        CHECK(cqa::read_text_file(verdicts2) == cqa::read_text_file(verdicts));
    }
}

TEST_CASE("cli run exits 1 when every request fails", "[cli]") {
    cqatest::TempDir tmp;
    std::string dataset_path = tmp.file("unit.jsonl");
    cqa::write_dataset(cqatest::make_math_dataset("unit", 3), dataset_path);
    std::string suite_dir = tmp.file("suite");
    REQUIRE(run_cli(tmp, "compound build --dataset " + q(dataset_path) +
                             " --name unit --k 1 --replicates 1 --seed 7 --out " + q(suite_dir))
                .code == 0);

    // An empty script with no default answers nothing: every item errors.
    cqatest::write_file(tmp.file("empty.json"), "{\"completions\": []}\n");
    CliResult r = run_cli(tmp, "run --suite " + q(suite_dir) + " --mock " +
                                   q(tmp.file("empty.json")) + " --out " + q(tmp.file("out")));
    CHECK(r.code == 1);
}
