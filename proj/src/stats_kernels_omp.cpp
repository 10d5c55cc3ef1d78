#include <omp.h>

#include <algorithm>
#include <stdexcept>

#include "debunk/stats_kernels.hpp"

namespace debunk::kernels::omp {

AccuracyCounts accuracy_counts(std::span<const ScoreRow> rows) {
    const auto n = static_cast<std::ptrdiff_t>(rows.size());
    std::size_t exact = 0;
    std::size_t close = 0;
#pragma omp parallel for reduction(+ : exact, close) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        const auto top = std::max({r[0], r[1], r[2], r[3]});
        exact += r[0] == top;
        close += (r[0] == top || r[1] == top);
    }
    return {rows.size(), exact, close};
}

GroupSums group_sums(std::span<const ScoreRow> rows, std::span<const std::uint32_t> group, std::size_t n_groups) {
    if (rows.size() != group.size()) throw std::invalid_argument("group_sums: rows and group sizes differ");
    for (auto k : group) {
        if (k >= n_groups) throw std::out_of_range("group_sums: group index out of range");
    }
    GroupSums g;
    g.sums.assign(n_groups, {0, 0, 0, 0});
    g.counts.assign(n_groups, 0);
    const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel
    {
        std::vector<std::array<std::int64_t, 4>> local(n_groups, {0, 0, 0, 0});
        std::vector<std::size_t> local_counts(n_groups, 0);
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto k = group[static_cast<std::size_t>(i)];
            const auto& r = rows[static_cast<std::size_t>(i)];
            for (std::size_t c = 0; c < 4; ++c) local[k][c] += r[c];
            ++local_counts[k];
        }
#pragma omp critical
        {
            for (std::size_t k = 0; k < n_groups; ++k) {
                for (std::size_t c = 0; c < 4; ++c) g.sums[k][c] += local[k][c];
                g.counts[k] += local_counts[k];
            }
        }
    }
    return g;
}

namespace {

template <typename Term>
double blocked(std::span<const double> v, Term term) {
    const std::size_t blocks = (v.size() + kBlock - 1) / kBlock;
    std::vector<double> partials(blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        const auto start = static_cast<std::size_t>(b) * kBlock;
        const auto end = std::min(v.size(), start + kBlock);
        double s = 0.0;
        for (std::size_t i = start; i < end; ++i) s += term(v[i]);
        partials[static_cast<std::size_t>(b)] = s;
    }
    return combine_partials(partials);
}

}  // namespace

double block_sum(std::span<const double> v) {
    return blocked(v, [](double x) { return x; });
}

double sum_squared_deviation(std::span<const double> v, double center) {
    return blocked(v, [center](double x) {
        const double d = x - center;
        return d * d;
    });
}

}  // namespace debunk::kernels::omp
