#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "debunk/report.hpp"
#include "test_util.hpp"

using namespace debunk;

namespace {

const AnalysisReport& recorded() {
    static const AnalysisReport r = analyze(load_judgments(fixture("recorded_judgments.jsonl")), "recorded-judge");
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> cells(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

TEST(Report, FileSafe) {
    EXPECT_EQ(file_safe("Qwen/Qwen3-32B"), "Qwen_Qwen3-32B");
    EXPECT_EQ(file_safe("gpt-4o-mini"), "gpt-4o-mini");
    EXPECT_EQ(file_safe("a b:c"), "a_b_c");
    EXPECT_EQ(file_safe(""), "_");
}

TEST(Report, Table2HasEightRowsAndModelColumns) {
    auto other = recorded();
    other.judge_model_id = "second";
    const auto md = table2_markdown({recorded(), other});
    const auto l = lines(md);
    ASSERT_EQ(l.size(), 10u);
    EXPECT_EQ(l[0], "| A | B | recorded-judge t-statistic | recorded-judge P-value | second t-statistic | second P-value |");
    EXPECT_EQ(l[2].rfind("| Matched | Mismatched |", 0), 0u);
    EXPECT_EQ(l[8].rfind("| Mismatched (close) | Generic | n/a | n/a |", 0), 0u);
    const std::regex p(R"(\d\.\d\de[-+]\d{2,3}|0\.0|n/a)");
    for (std::size_t i = 2; i < l.size(); ++i) {
        const auto c = cells(l[i], '|');
        ASSERT_EQ(c.size(), 8u) << l[i];
        EXPECT_TRUE(std::regex_match(std::string(c[4].substr(1, c[4].size() - 2)), p)) << c[4];
    }
}

TEST(Report, Table3TwoDecimals) {
    auto r = recorded();
    r.accuracy.accuracy_p = 0.123456;
    r.accuracy.accuracy_cn = 1.0;
    const auto l = lines(table3_markdown({r}));
    ASSERT_EQ(l.size(), 3u);
    EXPECT_EQ(l[0], "| Model | Accuracy_p | Accuracy_cn |");
    EXPECT_EQ(l[2], "| recorded-judge | 12.35 | 100.00 |");
}

TEST(Report, Fig2Shape) {
    const auto l = lines(fig2_csv(recorded()));
    ASSERT_EQ(l.size(), 33u);
    EXPECT_EQ(l[0], "profile,matched,mismatched_close,mismatched_distant,generic");
    for (std::size_t i = 1; i < l.size(); ++i) {
        const auto c = cells(l[i], ',');
        ASSERT_EQ(c.size(), 5u);
        EXPECT_EQ(c[0], TraitProfile::from_index(static_cast<unsigned>(i - 1)).code());
        for (std::size_t k = 1; k < 5; ++k) EXPECT_TRUE(std::regex_match(c[k], std::regex(R"(\d\.\d{4})"))) << c[k];
    }
}

TEST(Report, Fig2MissingProfileLeavesEmptyCells) {
    auto r = recorded();
    r.by_profile.rows.erase(r.by_profile.rows.begin());
    const auto l = lines(fig2_csv(r));
    ASSERT_EQ(l.size(), 33u);
    EXPECT_EQ(l[1], "00000,,,,");
}

TEST(Report, Fig3Shape) {
    const auto l = lines(fig3_csv(recorded()));
    ASSERT_EQ(l.size(), 7u);
    EXPECT_EQ(l[0], "positive_count,n,matched,mismatched_close,mismatched_distant,generic,mismatched");
    EXPECT_EQ(cells(l[1], ',')[1], "5");
    EXPECT_EQ(cells(l[3], ',')[1], "50");
    for (std::size_t i = 1; i < l.size(); ++i) EXPECT_EQ(cells(l[i], ',').size(), 7u);
}

TEST(Report, WriteReportFiles) {
    TempDir dir;
    const auto files = write_report(dir.path() / "report", {recorded()}, true);
    ASSERT_EQ(files.size(), 4u);
    for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f)) << f;
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "report" / "fig2.recorded-judge.csv"));
    std::ifstream in(dir.path() / "report" / "report.html");
    const std::string html((std::istreambuf_iterator<char>(in)), {});
    EXPECT_NE(html.find("<svg"), std::string::npos);
    EXPECT_NE(html.find("recorded-judge"), std::string::npos);
    EXPECT_EQ(write_report(dir.path() / "r2", {recorded()}, false).size(), 3u);
}
