#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Data-parallel inner loops of the analysis. Each kernel exists twice: a
// serial reference and an OpenMP version. Both produce bit-identical results
// for any thread count: integer reductions are exact, and floating sums use
// the same fixed block decomposition (kBlock elements summed left to right,
// block partials combined by an in-order pairwise tree).
namespace debunk::kernels {

/// Scores of one observation in condition order: matched, close, distant, generic.
using ScoreRow = std::array<std::int32_t, 4>;

inline constexpr std::size_t kBlock = 1024;

struct AccuracyCounts {
    std::size_t n = 0;
    std::size_t matched_top = 0;           // matched verdict has dense rank 1
    std::size_t matched_or_close_top = 0;  // matched or close-neighbour verdict has dense rank 1

    friend bool operator==(const AccuracyCounts&, const AccuracyCounts&) = default;
};

struct GroupSums {
    std::vector<std::array<std::int64_t, 4>> sums;
    std::vector<std::size_t> counts;

    friend bool operator==(const GroupSums&, const GroupSums&) = default;
};

namespace serial {
AccuracyCounts accuracy_counts(std::span<const ScoreRow> rows);
/// `group[i]` in [0, n_groups) assigns row i to a group.
GroupSums group_sums(std::span<const ScoreRow> rows, std::span<const std::uint32_t> group, std::size_t n_groups);
double block_sum(std::span<const double> v);
double sum_squared_deviation(std::span<const double> v, double center);
}  // namespace serial

namespace omp {
AccuracyCounts accuracy_counts(std::span<const ScoreRow> rows);
GroupSums group_sums(std::span<const ScoreRow> rows, std::span<const std::uint32_t> group, std::size_t n_groups);
double block_sum(std::span<const double> v);
double sum_squared_deviation(std::span<const double> v, double center);
}  // namespace omp

/// In-order pairwise combination of block partial sums.
double combine_partials(std::span<const double> partials);

}  // namespace debunk::kernels
