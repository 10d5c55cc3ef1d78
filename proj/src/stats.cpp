#include "debunk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "debunk/errors.hpp"
#include "debunk/stats_kernels.hpp"

namespace debunk {

namespace {

std::vector<kernels::ScoreRow> score_rows(std::span<const Observation> obs) {
    std::vector<kernels::ScoreRow> rows;
    rows.reserve(obs.size());
    for (const auto& o : obs) rows.push_back({o.scores[0], o.scores[1], o.scores[2], o.scores[3]});
    return rows;
}

// Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 100000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) return h;
    }
    throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

// log of x^a (1-x)^b / B(a, b)
double log_beta_prefactor(double a, double b, double x) {
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
}

// I_x(a, b), taking whichever branch keeps the continued fraction convergent.
double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_beta_prefactor(a, b, x)) * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_beta_prefactor(b, a, 1.0 - x)) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

}  // namespace

ObservationSet build_observations(const std::vector<Judgment>& judgments) {
    std::set<std::string> models;
    using GroupKey = std::pair<std::string, unsigned>;
    std::map<GroupKey, std::array<std::optional<int>, 4>> groups;
    for (const auto& j : judgments) {
        models.insert(j.judge_model_id);
        auto& slot = groups[{j.claim_id, j.judge_profile.index()}][static_cast<std::size_t>(j.condition)];
        if (slot) {
            throw InputError("duplicate judgment for (" + j.claim_id + ", " + j.judge_profile.code() + ", " +
                             std::string(to_string(j.condition)) + ")");
        }
        slot = j.score;
    }
    if (models.size() > 1) throw InputError("build_observations: judgments come from more than one judge model");

    ObservationSet set;
    for (const auto& [key, scores] : groups) {
        if (!std::all_of(scores.begin(), scores.end(), [](const auto& s) { return s.has_value(); })) {
            ++set.dropped_groups;
            continue;
        }
        Observation o;
        o.claim_id = key.first;
        o.judge_profile = TraitProfile::from_index(key.second);
        for (std::size_t c = 0; c < 4; ++c) o.scores[c] = *scores[c];
        set.observations.push_back(std::move(o));
    }
    return set;
}

std::string_view to_string(GroupBy g) noexcept {
    switch (g) {
        case GroupBy::JudgeProfile: return "judge_profile";
        case GroupBy::PositiveCount: return "positive_count";
        case GroupBy::Overall: return "overall";
    }
    return "?";
}

MeansTable condition_means(std::span<const Observation> obs, GroupBy group_by) {
    if (obs.empty()) throw InputError("condition_means: no observations");
    std::size_t n_groups = 1;
    std::vector<std::uint32_t> group(obs.size(), 0);
    if (group_by == GroupBy::JudgeProfile) {
        n_groups = kProfileCount;
        for (std::size_t i = 0; i < obs.size(); ++i) group[i] = obs[i].judge_profile.index();
    } else if (group_by == GroupBy::PositiveCount) {
        n_groups = kTraitCount + 1;
        for (std::size_t i = 0; i < obs.size(); ++i) group[i] = static_cast<std::uint32_t>(positive_count(obs[i].judge_profile));
    }
    const auto rows = score_rows(obs);
    const auto sums = kernels::omp::group_sums(rows, group, n_groups);

    auto label = [&](std::size_t k) -> std::string {
        switch (group_by) {
            case GroupBy::JudgeProfile: return TraitProfile::from_index(static_cast<unsigned>(k)).code();
            case GroupBy::PositiveCount: return std::to_string(k);
            case GroupBy::Overall: return "all";
        }
        return {};
    };

    MeansTable table;
    table.group_by = group_by;
    for (std::size_t k = 0; k < n_groups; ++k) {
        if (sums.counts[k] == 0) {
            table.notes.push_back("group " + label(k) + " omitted: no observations");
            continue;
        }
        ConditionMeans row;
        row.group = label(k);
        row.n = sums.counts[k];
        for (std::size_t c = 0; c < 4; ++c) {
            row.means[c] = static_cast<double>(sums.sums[k][c]) / static_cast<double>(row.n);
        }
        row.mismatched = (row.mean(Condition::MismatchedClose) + row.mean(Condition::MismatchedDistant)) / 2.0;
        table.rows.push_back(std::move(row));
    }
    return table;
}

TTestResult paired_t_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw LengthMismatch("paired_t_test: samples have " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()) + " values");
    }
    const auto n = x.size();
    if (n < 2) throw InputError("paired_t_test: need at least two pairs");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - y[i];
    if (std::all_of(d.begin(), d.end(), [&](double v) { return v == d[0]; })) {
        throw ZeroVariance("paired_t_test: all paired differences are equal");
    }
    const double mean = kernels::omp::block_sum(d) / static_cast<double>(n);
    const double ss = kernels::omp::sum_squared_deviation(d, mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    TTestResult r;
    r.n = n;
    r.mean_diff = mean;
    r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.degrees_of_freedom = n - 1;
    r.p_value = p_two_tailed(r.t_statistic, static_cast<double>(r.degrees_of_freedom));
    return r;
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x must lie in [0, 1]");
    return ibeta(a, b, x);
}

double p_two_tailed(double t, double df) {
    if (!(df >= 1.0)) throw std::invalid_argument("p_two_tailed: df must be >= 1");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const double t2 = t * t;
    const double x = df / (df + t2);
    double p = ibeta(df / 2.0, 0.5, x);
    p = std::clamp(p, 0.0, 1.0);
    return p < 1e-300 ? 0.0 : p;
}

double t_cdf(double t, double df) {
    if (!(df >= 1.0)) throw std::invalid_argument("t_cdf: df must be >= 1");
    if (t == 0.0) return 0.5;
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * ibeta(df / 2.0, 0.5, x);
    return t > 0 ? 1.0 - tail : tail;
}

std::vector<int> dense_rank(std::span<const int> scores) {
    std::vector<int> distinct(scores.begin(), scores.end());
    std::sort(distinct.begin(), distinct.end(), std::greater<>());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> ranks;
    ranks.reserve(scores.size());
    for (int s : scores) {
        const auto pos = std::lower_bound(distinct.begin(), distinct.end(), s, std::greater<>()) - distinct.begin();
        ranks.push_back(static_cast<int>(pos) + 1);
    }
    return ranks;
}

AccuracyReport accuracy(std::span<const Observation> obs) {
    if (obs.empty()) throw InputError("accuracy: no observations");
    const auto rows = score_rows(obs);
    const auto c = kernels::omp::accuracy_counts(rows);
    AccuracyReport r;
    r.n = c.n;
    r.matched_top = c.matched_top;
    r.matched_or_close_top = c.matched_or_close_top;
    r.accuracy_p = static_cast<double>(c.matched_top) / static_cast<double>(c.n);
    r.accuracy_cn = static_cast<double>(c.matched_or_close_top) / static_cast<double>(c.n);
    return r;
}

double accuracy_p(std::span<const Observation> obs) {
    return accuracy(obs).accuracy_p;
}

double accuracy_cn(std::span<const Observation> obs) {
    return accuracy(obs).accuracy_cn;
}

std::vector<double> condition_series(std::span<const Observation> obs, std::optional<Condition> condition) {
    std::vector<double> out;
    out.reserve(obs.size());
    for (const auto& o : obs) {
        if (condition) {
            out.push_back(o.score(*condition));
        } else {
            out.push_back((o.score(Condition::MismatchedClose) + o.score(Condition::MismatchedDistant)) / 2.0);
        }
    }
    return out;
}

}  // namespace debunk
