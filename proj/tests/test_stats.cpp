#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "debunk/analysis.hpp"
#include "debunk/errors.hpp"
#include "debunk/stats.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace debunk;

namespace {

Observation obs(std::array<int, 4> s, std::string claim = "c", unsigned judge = 0) {
    return {std::move(claim), TraitProfile::from_index(judge), s};
}

std::vector<Observation> random_observations(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> score(1, 7);
    std::uniform_int_distribution<unsigned> judge(0, 31);
    std::vector<Observation> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(obs({score(rng), score(rng), score(rng), score(rng)}, "c" + std::to_string(i), judge(rng)));
    }
    return out;
}

}  // namespace

TEST(DenseRank, Examples) {
    EXPECT_EQ(dense_rank(std::vector<int>{7, 6, 5, 2}), (std::vector<int>{1, 2, 3, 4}));
    EXPECT_EQ(dense_rank(std::vector<int>{6, 6, 5, 2}), (std::vector<int>{1, 1, 2, 3}));
    EXPECT_EQ(dense_rank(std::vector<int>{4, 4, 4, 4}), (std::vector<int>{1, 1, 1, 1}));
    EXPECT_EQ(dense_rank(std::vector<int>{2, 9, 2, 5}), (std::vector<int>{3, 1, 3, 2}));
}

TEST(DenseRank, MatchesOracleAndIsShiftInvariant) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> v(-3, 9), len(1, 8);
    for (int k = 0; k < 2000; ++k) {
        std::vector<int> s(len(rng));
        for (auto& x : s) x = v(rng);
        const auto r = dense_rank(s);
        EXPECT_EQ(r, oracle::dense_rank(s));
        auto shifted = s;
        for (auto& x : shifted) x += 11;
        EXPECT_EQ(dense_rank(shifted), r);
    }
}

TEST(Accuracy, Examples) {
    const std::vector<Observation> a{obs({7, 6, 5, 2})};
    EXPECT_EQ(accuracy_p(a), 1.0);
    EXPECT_EQ(accuracy_p(std::vector{obs({6, 7, 5, 2})}), 0.0);
    EXPECT_EQ(accuracy_p(std::vector{obs({6, 6, 5, 2})}), 1.0);
    EXPECT_EQ(accuracy_cn(std::vector{obs({5, 7, 6, 2})}), 1.0);
    EXPECT_EQ(accuracy_cn(std::vector{obs({5, 6, 7, 2})}), 0.0);
    EXPECT_THROW(accuracy(std::vector<Observation>{}), InputError);
}

TEST(Accuracy, MatchesOracleOnRandomSets) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> size(1, 300);
    for (int k = 0; k < 300; ++k) {
        const auto o = random_observations(rng, size(rng));
        std::vector<std::array<int, 4>> raw;
        for (const auto& x : o) raw.push_back(x.scores);
        const auto want = oracle::accuracy_counts(raw);
        const auto got = accuracy(o);
        EXPECT_EQ(got.matched_top, want.matched_top);
        EXPECT_EQ(got.matched_or_close_top, want.matched_or_close_top);
        EXPECT_EQ(got.accuracy_p, static_cast<double>(want.matched_top) / static_cast<double>(o.size()));
        EXPECT_GE(got.accuracy_cn, got.accuracy_p);
    }
}

TEST(ConditionMeans, Examples) {
    auto t = condition_means(std::vector{obs({7, 6, 5, 2})}, GroupBy::Overall);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].means, (std::array<double, 4>{7, 6, 5, 2}));
    EXPECT_EQ(t.rows[0].mismatched, 5.5);
    t = condition_means(std::vector{obs({7, 1, 1, 1}), obs({5, 1, 1, 1}, "d")}, GroupBy::Overall);
    EXPECT_EQ(t.rows[0].mean(Condition::Matched), 6.0);
    EXPECT_THROW(condition_means(std::vector<Observation>{}, GroupBy::Overall), InputError);
}

TEST(ConditionMeans, EmptyGroupsAreOmittedWithNote) {
    const auto t = condition_means(std::vector{obs({7, 6, 5, 2}, "c", 3)}, GroupBy::JudgeProfile);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].group, "00011");
    EXPECT_EQ(t.notes.size(), 31u);
}

TEST(ConditionMeans, MatchesOracleOnRandomSets) {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> size(1, 400);
    for (int k = 0; k < 200; ++k) {
        const auto o = random_observations(rng, size(rng));
        std::vector<std::array<int, 4>> raw;
        for (const auto& x : o) raw.push_back(x.scores);
        for (auto g : {GroupBy::JudgeProfile, GroupBy::PositiveCount, GroupBy::Overall}) {
            const auto want = oracle::group_totals(raw, [&](std::size_t i) -> std::string {
                if (g == GroupBy::JudgeProfile) return o[i].judge_profile.code();
                if (g == GroupBy::PositiveCount) return std::to_string(positive_count(o[i].judge_profile));
                return "all";
            });
            const auto got = condition_means(o, g);
            ASSERT_EQ(got.rows.size(), want.size());
            for (const auto& row : got.rows) {
                const auto& w = want.at(row.group);
                EXPECT_EQ(static_cast<long long>(row.n), w.n);
                for (int c = 0; c < 4; ++c) {
                    EXPECT_EQ(row.means[c], static_cast<double>(w.sum[c]) / static_cast<double>(w.n));
                }
            }
        }
    }
}

TEST(BuildObservations, GroupsAndDropsIncomplete) {
    auto js = load_judgments(fixture("recorded_judgments.jsonl"));
    auto set = build_observations(js);
    EXPECT_EQ(set.observations.size(), 160u);
    EXPECT_EQ(set.dropped_groups, 0u);
    js.erase(std::remove_if(js.begin(), js.end(),
                            [](const Judgment& j) {
                                return j.claim_id == "bourla-vaccine" && j.judge_profile.code() == "00100" &&
                                       j.condition == Condition::Generic;
                            }),
             js.end());
    set = build_observations(js);
    EXPECT_EQ(set.observations.size(), 159u);
    EXPECT_EQ(set.dropped_groups, 1u);
    auto dup = js;
    dup.push_back(js.front());
    EXPECT_THROW(build_observations(dup), InputError);
    auto mixed = js;
    mixed.back().judge_model_id = "other";
    EXPECT_THROW(build_observations(mixed), InputError);
}

TEST(TDistribution, ClosedForms) {
    for (int i = -500; i <= 500; ++i) {
        const double t = i / 10.0;
        EXPECT_NEAR(t_cdf(t, 1), oracle::t_cdf_df1(t), 1e-10) << t;
        EXPECT_NEAR(t_cdf(t, 2), oracle::t_cdf_df2(t), 1e-10) << t;
    }
    EXPECT_EQ(t_cdf(0, 7), 0.5);
    EXPECT_DOUBLE_EQ(t_cdf(1, 1), 0.75);
    EXPECT_NEAR(t_cdf(std::sqrt(3.0), 2), 0.8872983346, 1e-9);
}

TEST(TDistribution, SymmetryAndMonotoneTails) {
    for (double df : {1.0, 2.0, 5.0, 30.0, 1000.0}) {
        double prev = 1.0;
        for (int i = 0; i <= 200; ++i) {
            const double t = i / 4.0;
            EXPECT_NEAR(t_cdf(-t, df), 1.0 - t_cdf(t, df), 1e-12);
            const double p = p_two_tailed(t, df);
            if (i > 0) EXPECT_LT(p, prev) << df << " " << t;
            prev = p;
        }
    }
    EXPECT_EQ(p_two_tailed(0, 4), 1.0);
    EXPECT_NEAR(p_two_tailed(2.0, 10), 0.073388034770740, 1e-12);
    EXPECT_EQ(p_two_tailed(500, 5000), 0.0);
    EXPECT_GT(p_two_tailed(30, 300), 0.0);
}

TEST(TDistribution, IncompleteBeta) {
    EXPECT_NEAR(incomplete_beta(1, 1, 0.3), 0.3, 1e-14);
    EXPECT_NEAR(incomplete_beta(2, 3, 0.4), 0.5248, 1e-12);
    EXPECT_NEAR(incomplete_beta(0.5, 0.5, 0.5), 0.5, 1e-12);
    EXPECT_THROW(incomplete_beta(0, 1, 0.5), std::invalid_argument);
    EXPECT_THROW(incomplete_beta(1, 1, 1.5), std::invalid_argument);
}

TEST(PairedTTest, ClosedFormExample) {
    const std::vector<double> x{5, 4, 6}, y{3, 4, 2};
    const auto r = paired_t_test(x, y);
    EXPECT_NEAR(r.t_statistic, std::sqrt(3.0), 1e-12);
    EXPECT_EQ(r.degrees_of_freedom, 2u);
    EXPECT_NEAR(r.p_value, 2 * (1 - oracle::t_cdf_df2(std::sqrt(3.0))), 1e-12);
    EXPECT_NEAR(r.p_value, 0.2254033, 1e-6);
    EXPECT_EQ(r.n, 3u);
    EXPECT_DOUBLE_EQ(r.mean_diff, 2.0);
}

TEST(PairedTTest, AntisymmetryAndErrors) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d(0, 1);
    std::vector<double> x(50), y(50);
    for (int i = 0; i < 50; ++i) {
        x[i] = d(rng) + 0.3;
        y[i] = d(rng);
    }
    const auto a = paired_t_test(x, y), b = paired_t_test(y, x);
    EXPECT_DOUBLE_EQ(a.t_statistic, -b.t_statistic);
    EXPECT_DOUBLE_EQ(a.p_value, b.p_value);
    EXPECT_THROW(paired_t_test(x, x), ZeroVariance);
    EXPECT_THROW(paired_t_test(std::vector<double>{3, 4, 7}, std::vector<double>{1, 2, 5}), ZeroVariance);
    EXPECT_THROW(paired_t_test(std::vector<double>{1, 2}, std::vector<double>{1}), LengthMismatch);
    EXPECT_THROW(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), InputError);
}

TEST(Analysis, RecordedFixture) {
    const auto r = analyze(load_judgments(fixture("recorded_judgments.jsonl")), "recorded-judge");
    EXPECT_EQ(r.observations, 160u);
    ASSERT_EQ(r.comparisons.size(), 8u);
    EXPECT_EQ(r.by_profile.rows.size(), 32u);
    ASSERT_EQ(r.by_positive_count.rows.size(), 6u);
    for (std::size_t k = 0; k < 6; ++k) {
        static constexpr int kBinom[] = {1, 5, 10, 10, 5, 1};
        EXPECT_EQ(r.by_positive_count.rows[k].n, static_cast<std::size_t>(kBinom[k] * 5));
    }
    EXPECT_GE(r.accuracy.accuracy_cn, r.accuracy.accuracy_p);
    EXPECT_GT(r.overall.rows[0].mean(Condition::Matched), r.overall.rows[0].mean(Condition::Generic));
    // close minus generic is constant under the mock, so that test is undefined
    const auto& cg = r.comparisons[6];
    EXPECT_EQ(cg.a, Series::Close);
    EXPECT_EQ(cg.b, Series::Generic);
    EXPECT_FALSE(cg.test.has_value());
    EXPECT_FALSE(cg.note.empty());
    EXPECT_DOUBLE_EQ(cg.mean_diff, 4.0);

    const auto back = analysis_from_json(Json::parse(to_json(r).dump()));
    EXPECT_EQ(to_json(back).dump(), to_json(r).dump());
}

TEST(Analysis, RejectsMalformedJson) {
    auto j = Json::parse(to_json(analyze(load_judgments(fixture("recorded_judgments.jsonl")), "x")).dump());
    j["comparisons"].erase(0);
    EXPECT_THROW(analysis_from_json(j), MalformedArtifact);
    EXPECT_THROW(analysis_from_json(Json::object()), MalformedArtifact);
}
