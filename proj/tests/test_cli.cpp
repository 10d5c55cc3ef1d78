#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <regex>

#include "debunk/jsonl.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write(const fs::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

std::size_t count_lines(const fs::path& p) {
    const auto s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

const std::regex kErrorLine(R"(debunk: error\[(usage|input|missing|malformed|backend|io|internal)\]: [^\n]+\n)");

void expect_error(const CliResult& r, int code, const std::string& cls) {
    EXPECT_EQ(r.code, code) << r.err;
    EXPECT_NE(r.err.find("debunk: error[" + cls + "]: "), std::string::npos) << r.err;
    std::smatch m;
    const auto last = r.err.substr(r.err.rfind("debunk: error["));
    EXPECT_TRUE(std::regex_match(last, m, kErrorLine)) << last;
}

std::vector<std::string> mock(const std::string& cmd, const fs::path& dir, std::vector<std::string> extra = {}) {
    std::vector<std::string> a{cmd, "--run-dir", dir.string(), "--backend", "mock", "--seed", "7"};
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
}

void pipeline(const fs::path& dir, const std::string& jitter) {
    const auto corpus = fixture("sample_corpus.jsonl").string();
    ASSERT_EQ(cli(mock("generate", dir, {"--corpus", corpus, "--mock-jitter", jitter})).code, 0);
    const auto e = cli(mock("evaluate", dir, {"--corpus", corpus, "--mock-jitter", jitter}));
    ASSERT_EQ(e.code, 0) << e.err;
    const auto a = cli(mock("analyze", dir));
    ASSERT_EQ(a.code, 0) << a.err;
}

}  // namespace

TEST(Cli, UsageErrors) {
    expect_error(cli({}), 2, "usage");
    expect_error(cli({"frobnicate"}), 2, "usage");
    expect_error(cli({"generate"}), 2, "usage");
    expect_error(cli({"generate", "--run-dir", "x", "--backend", "smoke"}), 2, "usage");
    EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, IngestFiltersAndReports) {
    TempDir dir;
    const auto r = cli(mock("ingest", dir.path(), {"--input", fixture("ingest_sample.jsonl").string()}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_lines(dir / "corpus.jsonl"), 6u);
    const auto report = debunk::Json::parse(slurp(dir / "filter_report.json"));
    EXPECT_TRUE(report.contains("keyword_hits"));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, IngestKeywordsFileDigestIsRecorded) {
    TempDir dir;
    write(dir / "kw.txt", "# custom\naccurate\n");
    const auto r = cli(mock("ingest", dir.path() / "run",
                            {"--input", fixture("ingest_sample.jsonl").string(), "--keywords-file",
                             (dir / "kw.txt").string()}));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = debunk::Json::parse(slurp(dir.path() / "run" / "filter_report.json"));
    EXPECT_EQ(report["keywords_source"], "file");
    EXPECT_TRUE(std::regex_match(report["keywords_digest"].get<std::string>(), std::regex("[0-9a-f]{64}")));
    EXPECT_EQ(report["keyword_hits"]["accurate"], 1);
    EXPECT_GT(count_lines(dir.path() / "run" / "corpus.jsonl"), 6u);
}

TEST(Cli, IngestMissingInputNamesPath) {
    TempDir dir;
    const auto missing = (dir / "nope.jsonl").string();
    const auto r = cli(mock("ingest", dir.path(), {"--input", missing}));
    expect_error(r, 2, "input");
    EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST(Cli, MissingPrerequisites) {
    TempDir dir;
    expect_error(cli(mock("generate", dir.path())), 3, "missing");
    expect_error(cli(mock("evaluate", dir.path(), {"--corpus", fixture("sample_corpus.jsonl").string()})), 3,
                 "missing");
    expect_error(cli(mock("analyze", dir.path())), 3, "missing");
    expect_error(cli(mock("report", dir.path())), 3, "missing");
}

TEST(Cli, MalformedAnalysisExits4) {
    TempDir dir;
    write(dir / "analysis.x.json", "{\"judge_model_id\": 3");
    expect_error(cli(mock("report", dir.path())), 4, "malformed");
    write(dir / "analysis.x.json", "{\"judge_model_id\": \"x\"}");
    expect_error(cli(mock("report", dir.path())), 4, "malformed");
}

TEST(Cli, MalformedStoreExits4) {
    TempDir dir;
    write(dir / "verdicts.jsonl", "{\"claim_id\": 1}\n");
    expect_error(cli(mock("evaluate", dir.path(), {"--corpus", fixture("sample_corpus.jsonl").string()})), 4,
                 "malformed");
}

TEST(Cli, EndToEndMockWithoutJitter) {
    TempDir dir;
    pipeline(dir.path(), "off");
    EXPECT_EQ(count_lines(dir / "verdicts.jsonl"), 160u);
    EXPECT_EQ(count_lines(dir / "judgments.mock-judge.jsonl"), 640u);
    const auto a = debunk::Json::parse(slurp(dir / "analysis.mock-judge.json"));
    EXPECT_EQ(a["accuracy"]["accuracy_p"], 1.0);
    EXPECT_EQ(a["accuracy"]["accuracy_cn"], 1.0);
    EXPECT_TRUE(fs::exists(dir / "report" / "tables.md"));
    EXPECT_TRUE(fs::exists(dir / "report" / "fig2.mock-judge.csv"));
    EXPECT_FALSE(fs::exists(dir / "failures.generate.json"));

    const auto rep = cli(mock("report", dir.path(), {"--html"}));
    ASSERT_EQ(rep.code, 0) << rep.err;
    EXPECT_TRUE(fs::exists(dir / "report" / "report.html"));
    const auto manifest = debunk::Json::parse(slurp(dir / "manifest.json"));
    for (const char* phase : {"generate", "evaluate", "analyze", "report"}) {
        EXPECT_TRUE(manifest["phases"].contains(phase)) << phase;
    }
    EXPECT_EQ(manifest["seed"], 7);
}

TEST(Cli, AnalyzeIsByteStable) {
    TempDir a, b;
    for (const auto* d : {&a, &b}) {
        const auto r = cli({"analyze", "--run-dir", d->path().string(), "--judgments",
                            fixture("recorded_judgments.jsonl").string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(slurp(a / "analysis.recorded-judge.json"), slurp(b / "analysis.recorded-judge.json"));
    EXPECT_EQ(slurp(a / "report/tables.md"), slurp(b / "report/tables.md"));
    EXPECT_EQ(slurp(a / "report/fig3.recorded-judge.csv"), slurp(b / "report/fig3.recorded-judge.csv"));
}

TEST(Cli, ResumeRequiredForNonEmptyStore) {
    TempDir dir;
    const auto corpus = fixture("sample_corpus.jsonl").string();
    ASSERT_EQ(cli(mock("generate", dir.path(), {"--corpus", corpus, "--limit", "10"})).code, 0);
    expect_error(cli(mock("generate", dir.path(), {"--corpus", corpus})), 2, "input");
    const auto r = cli(mock("generate", dir.path(), {"--corpus", corpus, "--resume"}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("150 generated, 10 skipped"), std::string::npos) << r.out;
}

TEST(Cli, LockedRunDirIsRefused) {
    TempDir dir;
    write(dir / ".lock", std::to_string(::getpid()) + "\n");
    const auto r = cli(mock("generate", dir.path(), {"--corpus", fixture("sample_corpus.jsonl").string()}));
    expect_error(r, 2, "input");
    fs::remove(dir / ".lock");
    write(dir / ".lock", "999999999\n");
    EXPECT_EQ(cli(mock("generate", dir.path(), {"--corpus", fixture("sample_corpus.jsonl").string(), "--profiles",
                                                "00000"}))
                  .code,
              0);
    EXPECT_FALSE(fs::exists(dir / ".lock"));
}

TEST(Cli, UnreachableBackendExits5) {
    TempDir dir;
    write(dir / "config.json", R"({"backend": {"kind": "http", "url": "http://127.0.0.1:9/v1", "model": "m",
        "timeout_s": 2}, "retry": {"max_attempts": 1, "base_delay_ms": 1, "max_delay_ms": 1}})");
    const auto r = cli({"generate", "--run-dir", (dir / "run").string(), "--config", (dir / "config.json").string(),
                        "--corpus", fixture("sample_corpus.jsonl").string(), "--profiles", "00000,11111"});
    expect_error(r, 5, "backend");
    EXPECT_TRUE(fs::exists(dir.path() / "run" / "failures.generate.json"));
}

TEST(Cli, BadConfigIsInputError) {
    TempDir dir;
    write(dir / "config.json", R"({"retry": {"max_attempts": "three"}})");
    expect_error(cli(mock("generate", dir.path(), {"--config", (dir / "config.json").string()})), 2, "input");
    expect_error(cli(mock("generate", dir.path(), {"--config", (dir / "missing.json").string()})), 2, "input");
}
