#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "debunk/analysis.hpp"

namespace debunk {

/// Model ids as they appear in run-directory file names ("/" and other
/// unsafe characters become "_").
std::string file_safe(std::string_view model_id);

/// Eight comparison rows; per model a t-statistic and a P-value column.
std::string table2_markdown(const std::vector<AnalysisReport>& reports);

/// One row per model; accuracies as percentages with two decimals.
std::string table3_markdown(const std::vector<AnalysisReport>& reports);

/// Condition means per judge profile: 32 rows plus a header.
std::string fig2_csv(const AnalysisReport& r);

/// Condition means per count of positive descriptors: 6 rows plus a header.
std::string fig3_csv(const AnalysisReport& r);

/// Self-contained static page with the tables and SVG bar charts.
std::string report_html(const std::vector<AnalysisReport>& reports);

/// Writes tables.md and per-model fig2/fig3 CSVs (plus report.html when
/// `html` is set) into `dir`. Returns the written paths.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir,
                                                const std::vector<AnalysisReport>& reports, bool html);

}  // namespace debunk
