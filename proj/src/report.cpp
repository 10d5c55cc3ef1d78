#include "debunk/report.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>

#include "debunk/jsonl.hpp"

namespace debunk {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string p_value_text(double p) {
    return p == 0.0 ? "0.0" : fmt("%.2e", p);
}

std::string html_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const ConditionMeans* find_row(const MeansTable& t, const std::string& group) {
    for (const auto& r : t.rows) {
        if (r.group == group) return &r;
    }
    return nullptr;
}

// Grouped bar chart: one cluster per group, one bar per condition, scale 0..7.
std::string svg_chart(const MeansTable& t, const std::vector<std::string>& groups, const std::string& title) {
    static constexpr const char* kColors[] = {"#2b6cb0", "#68a0d8", "#a7c7e7", "#b0b0b0"};
    const int bar = 6;
    const int gap = 8;
    const int cluster = 4 * bar + gap;
    const int height = 220;
    const int top = 30;
    const int left = 30;
    const int plot_h = height - top - 40;
    const int width = left + static_cast<int>(groups.size()) * cluster + 20;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<text x=\"" << left << "\" y=\"16\" font-size=\"12\">" << html_escape(title) << "</text>\n";
    for (int s = 1; s <= 7; ++s) {
        const int y = top + plot_h - plot_h * s / 7;
        svg << "<line x1=\"" << left << "\" x2=\"" << width - 10 << "\" y1=\"" << y << "\" y2=\"" << y
            << "\" stroke=\"#eee\"/><text x=\"4\" y=\"" << y + 4 << "\" font-size=\"9\">" << s << "</text>\n";
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const int x0 = left + static_cast<int>(g) * cluster;
        if (const auto* row = find_row(t, groups[g])) {
            for (std::size_t c = 0; c < 4; ++c) {
                const int h = static_cast<int>(plot_h * row->means[c] / 7.0 + 0.5);
                svg << "<rect x=\"" << x0 + static_cast<int>(c) * bar << "\" y=\"" << top + plot_h - h << "\" width=\""
                    << bar - 1 << "\" height=\"" << h << "\" fill=\"" << kColors[c] << "\"/>\n";
            }
        }
        svg << "<text x=\"" << x0 << "\" y=\"" << top + plot_h + 12 << "\" font-size=\"8\" transform=\"rotate(60 " << x0
            << ' ' << top + plot_h + 12 << ")\">" << html_escape(groups[g]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string means_csv(const MeansTable& t, const std::vector<std::string>& groups, const char* key_column,
                      bool with_n) {
    std::ostringstream out;
    out << key_column;
    if (with_n) out << ",n";
    out << ",matched,mismatched_close,mismatched_distant,generic";
    if (with_n) out << ",mismatched";
    out << '\n';
    for (const auto& g : groups) {
        out << g;
        const auto* row = find_row(t, g);
        if (with_n) out << ',' << (row ? row->n : 0);
        for (auto c : kConditions) out << ',' << (row ? fmt("%.4f", row->mean(c)) : "");
        if (with_n) out << ',' << (row ? fmt("%.4f", row->mismatched) : "");
        out << '\n';
    }
    return out.str();
}

std::vector<std::string> profile_groups() {
    std::vector<std::string> g;
    for (auto p : all_profiles()) g.push_back(p.code());
    return g;
}

std::vector<std::string> count_groups() {
    std::vector<std::string> g;
    for (std::size_t k = 0; k <= kTraitCount; ++k) g.push_back(std::to_string(k));
    return g;
}

}  // namespace

std::string file_safe(std::string_view model_id) {
    std::string out;
    for (char c : model_id) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    return out.empty() ? "_" : out;
}

std::string table2_markdown(const std::vector<AnalysisReport>& reports) {
    std::ostringstream out;
    out << "| A | B |";
    for (const auto& r : reports) out << ' ' << r.judge_model_id << " t-statistic | " << r.judge_model_id << " P-value |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < reports.size(); ++i) out << "---:|---:|";
    out << '\n';
    for (std::size_t row = 0; row < comparison_specs().size(); ++row) {
        const auto& spec = comparison_specs()[row];
        out << "| " << display_name(spec.a) << " | " << display_name(spec.b) << " |";
        for (const auto& r : reports) {
            const auto& c = r.comparisons.at(row);
            if (c.test) {
                out << ' ' << fmt("%.2f", c.test->t_statistic) << " | " << p_value_text(c.test->p_value) << " |";
            } else {
                out << " n/a | n/a |";
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string table3_markdown(const std::vector<AnalysisReport>& reports) {
    std::ostringstream out;
    out << "| Model | Accuracy_p | Accuracy_cn |\n|---|---:|---:|\n";
    for (const auto& r : reports) {
        out << "| " << r.judge_model_id << " | " << fmt("%.2f", 100.0 * r.accuracy.accuracy_p) << " | "
            << fmt("%.2f", 100.0 * r.accuracy.accuracy_cn) << " |\n";
    }
    return out.str();
}

std::string fig2_csv(const AnalysisReport& r) {
    return means_csv(r.by_profile, profile_groups(), "profile", false);
}

std::string fig3_csv(const AnalysisReport& r) {
    return means_csv(r.by_positive_count, count_groups(), "positive_count", true);
}

std::string report_html(const std::vector<AnalysisReport>& reports) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Persona debunking report</title>\n"
        << "<style>body{font-family:sans-serif;margin:2em}pre{background:#f6f6f6;padding:1em}</style></head><body>\n"
        << "<h1>Persona debunking report</h1>\n"
        << "<p>Bars per group: matched, mismatched (close), mismatched (distant), generic.</p>\n"
        << "<h2>Paired t-tests</h2>\n<pre>" << html_escape(table2_markdown(reports)) << "</pre>\n"
        << "<h2>Accuracy</h2>\n<pre>" << html_escape(table3_markdown(reports)) << "</pre>\n";
    for (const auto& r : reports) {
        out << "<h2>" << html_escape(r.judge_model_id) << "</h2>\n"
            << svg_chart(r.by_profile, profile_groups(), "Mean score per judge profile")
            << svg_chart(r.by_positive_count, count_groups(), "Mean score by number of positive descriptors");
    }
    out << "</body></html>\n";
    return out.str();
}

std::vector<fs::path> write_report(const fs::path& dir, const std::vector<AnalysisReport>& reports, bool html) {
    fs::create_directories(dir);
    std::vector<fs::path> written;
    auto emit = [&](const fs::path& p, const std::string& content) {
        write_file_atomic(p, content);
        written.push_back(p);
    };
    emit(dir / "tables.md", "## Paired t-tests\n\n" + table2_markdown(reports) + "\n## Accuracy (%)\n\n" +
                                table3_markdown(reports));
    for (const auto& r : reports) {
        const auto safe = file_safe(r.judge_model_id);
        emit(dir / ("fig2." + safe + ".csv"), fig2_csv(r));
        emit(dir / ("fig3." + safe + ".csv"), fig3_csv(r));
    }
    if (html) emit(dir / "report.html", report_html(reports));
    return written;
}

}  // namespace debunk
