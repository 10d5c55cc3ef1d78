#include <algorithm>
#include <stdexcept>

#include "debunk/stats_kernels.hpp"

namespace debunk::kernels {

double combine_partials(std::span<const double> partials) {
    if (partials.empty()) return 0.0;
    if (partials.size() == 1) return partials[0];
    const auto half = partials.size() / 2;
    return combine_partials(partials.first(half)) + combine_partials(partials.subspan(half));
}

namespace serial {

AccuracyCounts accuracy_counts(std::span<const ScoreRow> rows) {
    AccuracyCounts c;
    c.n = rows.size();
    for (const auto& r : rows) {
        const auto top = std::max({r[0], r[1], r[2], r[3]});
        if (r[0] == top) ++c.matched_top;
        if (r[0] == top || r[1] == top) ++c.matched_or_close_top;
    }
    return c;
}

GroupSums group_sums(std::span<const ScoreRow> rows, std::span<const std::uint32_t> group, std::size_t n_groups) {
    if (rows.size() != group.size()) throw std::invalid_argument("group_sums: rows and group sizes differ");
    GroupSums g;
    g.sums.assign(n_groups, {0, 0, 0, 0});
    g.counts.assign(n_groups, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto k = group[i];
        if (k >= n_groups) throw std::out_of_range("group_sums: group index out of range");
        for (std::size_t c = 0; c < 4; ++c) g.sums[k][c] += rows[i][c];
        ++g.counts[k];
    }
    return g;
}

double block_sum(std::span<const double> v) {
    std::vector<double> partials;
    for (std::size_t start = 0; start < v.size(); start += kBlock) {
        const auto len = std::min(kBlock, v.size() - start);
        double s = 0.0;
        for (std::size_t i = start; i < start + len; ++i) s += v[i];
        partials.push_back(s);
    }
    return combine_partials(partials);
}

double sum_squared_deviation(std::span<const double> v, double center) {
    std::vector<double> partials;
    for (std::size_t start = 0; start < v.size(); start += kBlock) {
        const auto len = std::min(kBlock, v.size() - start);
        double s = 0.0;
        for (std::size_t i = start; i < start + len; ++i) {
            const double d = v[i] - center;
            s += d * d;
        }
        partials.push_back(s);
    }
    return combine_partials(partials);
}

}  // namespace serial
}  // namespace debunk::kernels
