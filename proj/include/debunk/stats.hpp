#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "debunk/evaluation.hpp"
#include "debunk/persona.hpp"

namespace debunk {

/// One (claim, judge) unit with a score for each of the four conditions.
struct Observation {
    std::string claim_id;
    TraitProfile judge_profile;
    std::array<int, 4> scores{};  // indexed by Condition

    int score(Condition c) const noexcept { return scores[static_cast<std::size_t>(c)]; }
    friend bool operator==(const Observation&, const Observation&) = default;
};

struct ObservationSet {
    std::vector<Observation> observations;  // sorted by (claim_id, judge code)
    std::size_t dropped_groups = 0;         // groups missing at least one condition
};

/// Groups judgments by (claim, judge) and keeps complete four-condition
/// groups. Throws InputError for judgments from more than one judge model or
/// a duplicated (claim, judge, condition).
ObservationSet build_observations(const std::vector<Judgment>& judgments);

enum class GroupBy { JudgeProfile, PositiveCount, Overall };

std::string_view to_string(GroupBy g) noexcept;

struct ConditionMeans {
    std::string group;
    std::size_t n = 0;
    std::array<double, 4> means{};  // indexed by Condition
    double mismatched = 0.0;        // average of the close and distant means

    double mean(Condition c) const noexcept { return means[static_cast<std::size_t>(c)]; }
};

struct MeansTable {
    GroupBy group_by = GroupBy::Overall;
    std::vector<ConditionMeans> rows;
    std::vector<std::string> notes;  // groups omitted for lack of observations
};

/// Throws InputError when `obs` is empty.
MeansTable condition_means(std::span<const Observation> obs, GroupBy group_by);

struct TTestResult {
    std::size_t n = 0;
    double mean_diff = 0.0;
    double t_statistic = 0.0;
    double p_value = 1.0;  // two-tailed
    std::size_t degrees_of_freedom = 0;
};

/// Paired-sample t-test on d_i = x_i - y_i with the (n-1) sample standard
/// deviation. Throws LengthMismatch, InputError (n < 2) or ZeroVariance.
TTestResult paired_t_test(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

/// Student t CDF with `df` degrees of freedom (df >= 1).
double t_cdf(double t, double df);

/// Two-tailed tail mass 2 * (1 - t_cdf(|t|, df)), computed directly from the
/// tail so small values keep full relative precision. Values below 1e-300
/// are returned as 0.
double p_two_tailed(double t, double df);

/// Rank 1 for the largest value, ties share a rank, no gaps.
std::vector<int> dense_rank(std::span<const int> scores);

struct AccuracyReport {
    double accuracy_p = 0.0;
    double accuracy_cn = 0.0;
    std::size_t n = 0;
    std::size_t matched_top = 0;
    std::size_t matched_or_close_top = 0;
};

double accuracy_p(std::span<const Observation> obs);
double accuracy_cn(std::span<const Observation> obs);
AccuracyReport accuracy(std::span<const Observation> obs);

/// Per-observation series for one condition, or the mean of close and
/// distant when `condition` is empty (the pooled "mismatched" series).
std::vector<double> condition_series(std::span<const Observation> obs, std::optional<Condition> condition);

}  // namespace debunk
