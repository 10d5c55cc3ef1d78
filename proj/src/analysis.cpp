#include "debunk/analysis.hpp"

#include "debunk/errors.hpp"

namespace debunk {

namespace {

constexpr Series kSeries[] = {Series::Matched, Series::Mismatched, Series::Generic, Series::Close, Series::Distant};

std::optional<Series> parse_series(std::string_view s) {
    for (auto v : kSeries) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

std::vector<double> series_values(std::span<const Observation> obs, Series s) {
    switch (s) {
        case Series::Matched: return condition_series(obs, Condition::Matched);
        case Series::Mismatched: return condition_series(obs, std::nullopt);
        case Series::Generic: return condition_series(obs, Condition::Generic);
        case Series::Close: return condition_series(obs, Condition::MismatchedClose);
        case Series::Distant: return condition_series(obs, Condition::MismatchedDistant);
    }
    return {};
}

OrderedJson means_to_json(const MeansTable& t) {
    OrderedJson j;
    j["group_by"] = std::string(to_string(t.group_by));
    auto& rows = j["rows"] = OrderedJson::array();
    for (const auto& r : t.rows) {
        OrderedJson row;
        row["group"] = r.group;
        row["n"] = r.n;
        for (auto c : kConditions) row[std::string(to_string(c))] = r.mean(c);
        row["mismatched"] = r.mismatched;
        rows.push_back(std::move(row));
    }
    j["notes"] = t.notes;
    return j;
}

MeansTable means_from_json(const Json& j) {
    MeansTable t;
    const auto g = j.at("group_by").get<std::string>();
    if (g == "judge_profile") t.group_by = GroupBy::JudgeProfile;
    else if (g == "positive_count") t.group_by = GroupBy::PositiveCount;
    else if (g == "overall") t.group_by = GroupBy::Overall;
    else throw MalformedArtifact("analysis: unknown group_by \"" + g + "\"");
    for (const auto& row : j.at("rows")) {
        ConditionMeans r;
        r.group = row.at("group").get<std::string>();
        r.n = row.at("n").get<std::size_t>();
        for (auto c : kConditions) r.means[static_cast<std::size_t>(c)] = row.at(std::string(to_string(c))).get<double>();
        r.mismatched = row.at("mismatched").get<double>();
        t.rows.push_back(std::move(r));
    }
    t.notes = j.at("notes").get<std::vector<std::string>>();
    return t;
}

}  // namespace

std::string_view to_string(Series s) noexcept {
    switch (s) {
        case Series::Matched: return "matched";
        case Series::Mismatched: return "mismatched";
        case Series::Generic: return "generic";
        case Series::Close: return "mismatched_close";
        case Series::Distant: return "mismatched_distant";
    }
    return "?";
}

std::string_view display_name(Series s) noexcept {
    switch (s) {
        case Series::Matched: return "Matched";
        case Series::Mismatched: return "Mismatched";
        case Series::Generic: return "Generic";
        case Series::Close: return "Mismatched (close)";
        case Series::Distant: return "Mismatched (distant)";
    }
    return "?";
}

const std::vector<ComparisonSpec>& comparison_specs() {
    static const std::vector<ComparisonSpec> specs{
        {Series::Matched, Series::Mismatched}, {Series::Matched, Series::Generic},
        {Series::Mismatched, Series::Generic}, {Series::Matched, Series::Close},
        {Series::Matched, Series::Distant},    {Series::Close, Series::Distant},
        {Series::Close, Series::Generic},      {Series::Distant, Series::Generic},
    };
    return specs;
}

AnalysisReport analyze(const std::vector<Judgment>& judgments, const std::string& judge_model_id) {
    const auto set = build_observations(judgments);
    if (set.observations.empty()) {
        throw InputError("no complete observations for judge model " + judge_model_id + " (" +
                         std::to_string(set.dropped_groups) + " incomplete groups)");
    }
    const std::span<const Observation> obs(set.observations);

    AnalysisReport r;
    r.judge_model_id = judge_model_id;
    r.judgments = judgments.size();
    r.observations = obs.size();
    r.dropped_groups = set.dropped_groups;
    r.accuracy = accuracy(obs);
    r.overall = condition_means(obs, GroupBy::Overall);
    r.by_profile = condition_means(obs, GroupBy::JudgeProfile);
    r.by_positive_count = condition_means(obs, GroupBy::PositiveCount);

    for (const auto& spec : comparison_specs()) {
        Comparison c;
        c.a = spec.a;
        c.b = spec.b;
        const auto x = series_values(obs, spec.a);
        const auto y = series_values(obs, spec.b);
        c.n = x.size();
        double diff = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) diff += x[i] - y[i];
        c.mean_diff = diff / static_cast<double>(x.size());
        try {
            c.test = paired_t_test(x, y);
            c.mean_diff = c.test->mean_diff;
        } catch (const ZeroVariance&) {
            c.note = "zero variance of paired differences; t undefined";
        } catch (const InputError& e) {
            c.note = e.what();
        }
        r.comparisons.push_back(std::move(c));
    }
    return r;
}

OrderedJson to_json(const AnalysisReport& r) {
    OrderedJson j;
    j["judge_model_id"] = r.judge_model_id;
    j["method"] = {
        {"pairing_unit", "one paired sample per (claim, judge) observation, pooled across judges"},
        {"mismatched_series", "per-observation mean of close and distant scores"},
        {"missing_data", "listwise deletion of incomplete (claim, judge) groups"},
        {"p_value", "two-tailed, Student t via regularized incomplete beta; below 1e-300 reported as 0"},
        {"ranking", "dense ranking over the four condition scores of an observation"},
    };
    j["judgments"] = r.judgments;
    j["observations"] = r.observations;
    j["dropped_groups"] = r.dropped_groups;
    j["accuracy"] = {{"accuracy_p", r.accuracy.accuracy_p},
                     {"accuracy_cn", r.accuracy.accuracy_cn},
                     {"n", r.accuracy.n},
                     {"matched_top", r.accuracy.matched_top},
                     {"matched_or_close_top", r.accuracy.matched_or_close_top}};
    j["means"] = {{"overall", means_to_json(r.overall)},
                  {"by_profile", means_to_json(r.by_profile)},
                  {"by_positive_count", means_to_json(r.by_positive_count)}};
    auto& comps = j["comparisons"] = OrderedJson::array();
    for (const auto& c : r.comparisons) {
        OrderedJson o;
        o["a"] = std::string(to_string(c.a));
        o["b"] = std::string(to_string(c.b));
        o["n"] = c.n;
        o["mean_diff"] = c.mean_diff;
        if (c.test) {
            o["t_statistic"] = c.test->t_statistic;
            o["p_value"] = c.test->p_value;
            o["df"] = c.test->degrees_of_freedom;
        } else {
            o["t_statistic"] = nullptr;
            o["p_value"] = nullptr;
            o["df"] = nullptr;
        }
        o["note"] = c.note;
        comps.push_back(std::move(o));
    }
    return j;
}

AnalysisReport analysis_from_json(const Json& j) {
    try {
        AnalysisReport r;
        r.judge_model_id = j.at("judge_model_id").get<std::string>();
        r.judgments = j.at("judgments").get<std::size_t>();
        r.observations = j.at("observations").get<std::size_t>();
        r.dropped_groups = j.at("dropped_groups").get<std::size_t>();
        const auto& a = j.at("accuracy");
        r.accuracy.accuracy_p = a.at("accuracy_p").get<double>();
        r.accuracy.accuracy_cn = a.at("accuracy_cn").get<double>();
        r.accuracy.n = a.at("n").get<std::size_t>();
        r.accuracy.matched_top = a.at("matched_top").get<std::size_t>();
        r.accuracy.matched_or_close_top = a.at("matched_or_close_top").get<std::size_t>();
        const auto& m = j.at("means");
        r.overall = means_from_json(m.at("overall"));
        r.by_profile = means_from_json(m.at("by_profile"));
        r.by_positive_count = means_from_json(m.at("by_positive_count"));
        for (const auto& o : j.at("comparisons")) {
            Comparison c;
            auto a_s = parse_series(o.at("a").get<std::string>());
            auto b_s = parse_series(o.at("b").get<std::string>());
            if (!a_s || !b_s) throw MalformedArtifact("analysis: unknown comparison series");
            c.a = *a_s;
            c.b = *b_s;
            c.n = o.at("n").get<std::size_t>();
            c.mean_diff = o.at("mean_diff").get<double>();
            if (!o.at("t_statistic").is_null()) {
                TTestResult t;
                t.n = c.n;
                t.mean_diff = c.mean_diff;
                t.t_statistic = o.at("t_statistic").get<double>();
                t.p_value = o.at("p_value").get<double>();
                t.degrees_of_freedom = o.at("df").get<std::size_t>();
                c.test = t;
            }
            c.note = o.at("note").get<std::string>();
            r.comparisons.push_back(std::move(c));
        }
        if (r.comparisons.size() != comparison_specs().size()) {
            throw MalformedArtifact("analysis: expected " + std::to_string(comparison_specs().size()) + " comparisons");
        }
        return r;
    } catch (const Json::exception& e) {
        throw MalformedArtifact(std::string("analysis: ") + e.what());
    }
}

}  // namespace debunk
