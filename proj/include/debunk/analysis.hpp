#pragma once

#include <optional>
#include <string>
#include <vector>

#include "debunk/evaluation.hpp"
#include "debunk/jsonl.hpp"
#include "debunk/stats.hpp"

namespace debunk {

/// Series compared by the paired t-tests. Mismatched is the per-observation
/// mean of the close and distant scores.
enum class Series { Matched, Mismatched, Generic, Close, Distant };

std::string_view to_string(Series s) noexcept;
std::string_view display_name(Series s) noexcept;

struct ComparisonSpec {
    Series a;
    Series b;
};

/// The eight comparisons reported per judge model, in table order.
const std::vector<ComparisonSpec>& comparison_specs();

struct Comparison {
    Series a;
    Series b;
    std::size_t n = 0;
    double mean_diff = 0.0;
    std::optional<TTestResult> test;  // absent when the test is undefined
    std::string note;                  // why the test is absent
};

struct AnalysisReport {
    std::string judge_model_id;
    std::size_t judgments = 0;
    std::size_t observations = 0;
    std::size_t dropped_groups = 0;
    AccuracyReport accuracy;
    MeansTable overall;
    MeansTable by_profile;
    MeansTable by_positive_count;
    std::vector<Comparison> comparisons;
};

/// Runs every analysis over one judge model's judgments. Throws InputError
/// when no complete observation remains.
AnalysisReport analyze(const std::vector<Judgment>& judgments, const std::string& judge_model_id);

OrderedJson to_json(const AnalysisReport& r);
/// Throws MalformedArtifact on any missing or mistyped field.
AnalysisReport analysis_from_json(const Json& j);

}  // namespace debunk
