#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeprov/errors.hpp"
#include "codeprov/io.hpp"
#include "codeprov/metrics.hpp"

namespace codeprov::report {

enum class Format { csv, md, json };

inline Format format_from_string(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "md") return Format::md;
    if (s == "json") return Format::json;
    throw Error("unknown report format: " + s + " (expected csv, md, or json)");
}

// Orders C2 before C10: shorter config names first, then lexicographic.
inline bool config_less(const metrics::EvalReport& a, const metrics::EvalReport& b) {
    if (a.config.size() != b.config.size()) return a.config.size() < b.config.size();
    return a.config < b.config;
}

namespace detail {

inline std::string cell(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", metrics::round2(value));
    return buf;
}

// Per-metric row values across the result set; failed cells render as "-".
struct Row {
    std::string label;
    std::vector<std::string> cells;
    std::string support;
};

template <typename Pick>
Row make_row(const std::vector<metrics::EvalReport>& reports, std::string label, Pick pick,
             std::string support) {
    Row row{std::move(label), {}, std::move(support)};
    for (const auto& r : reports)
        row.cells.push_back(r.error ? "-" : cell(pick(r)));
    return row;
}

inline std::vector<std::vector<Row>> build_tables(const std::vector<metrics::EvalReport>& rs) {
    // Supports come from the first healthy cell; every cell of one grid run
    // scores the same test set.
    std::string chatgpt_support = "-", human_support = "-", total_support = "-";
    for (const auto& r : rs) {
        if (r.error) continue;
        chatgpt_support = std::to_string(r.chatgpt.support);
        human_support = std::to_string(r.human.support);
        total_support = std::to_string(r.total_support);
        break;
    }
    using ER = metrics::EvalReport;
    std::vector<std::vector<Row>> tables;
    auto add = [&](auto cls, auto avg) {
        tables.push_back({
            make_row(rs, "ChatGPT", [=](const ER& r) { return cls(r.chatgpt); }, chatgpt_support),
            make_row(rs, "Humans", [=](const ER& r) { return cls(r.human); }, human_support),
            make_row(rs, "accuracy", [](const ER& r) { return r.accuracy; }, total_support),
            make_row(rs, "macro avg", [=](const ER& r) { return avg(r.macro_avg); }, total_support),
            make_row(rs, "weighted avg", [=](const ER& r) { return avg(r.weighted_avg); },
                     total_support),
        });
    };
    add([](const metrics::ClassMetrics& m) { return m.precision; },
        [](const metrics::Averages& a) { return a.precision; });
    add([](const metrics::ClassMetrics& m) { return m.recall; },
        [](const metrics::Averages& a) { return a.recall; });
    add([](const metrics::ClassMetrics& m) { return m.f1; },
        [](const metrics::Averages& a) { return a.f1; });
    return tables;
}

inline const char* table_names[] = {"Precision", "Recall", "F1-score"};

}  // namespace detail

inline std::string render_markdown(const std::vector<metrics::EvalReport>& reports) {
    auto tables = detail::build_tables(reports);
    std::string out;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        out += std::string("## ") + detail::table_names[t] + "\n\n";
        out += "| |";
        for (const auto& r : reports) out += " " + r.config + " |";
        out += " support |\n";
        out += "|---|";
        for (std::size_t i = 0; i < reports.size(); ++i) out += "---|";
        out += "---|\n";
        for (const auto& row : tables[t]) {
            out += "| " + row.label + " |";
            for (const auto& c : row.cells) out += " " + c + " |";
            out += " " + row.support + " |\n";
        }
        out += "\n";
    }
    return out;
}

inline std::string render_csv(const std::vector<metrics::EvalReport>& reports) {
    auto tables = detail::build_tables(reports);
    std::string out = "metric,row";
    for (const auto& r : reports) out += "," + r.config;
    out += ",support\n";
    const char* metric_keys[] = {"precision", "recall", "f1"};
    for (std::size_t t = 0; t < tables.size(); ++t)
        for (const auto& row : tables[t]) {
            out += std::string(metric_keys[t]) + "," + row.label;
            for (const auto& c : row.cells) out += "," + c;
            out += "," + row.support + "\n";
        }
    return out;
}

inline std::string render_json(const std::vector<metrics::EvalReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    return arr.dump(2) + "\n";
}

inline std::string render(const std::vector<metrics::EvalReport>& reports, Format format) {
    switch (format) {
        case Format::csv: return render_csv(reports);
        case Format::md: return render_markdown(reports);
        case Format::json: return render_json(reports);
    }
    throw Error("unknown report format");
}

inline metrics::EvalReport load_report_file(const std::filesystem::path& path) {
    try {
        return metrics::EvalReport::from_json(nlohmann::json::parse(io::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": not a result file: " + e.what());
    }
}

// Collects every .json result in a directory, in config order.
inline std::vector<metrics::EvalReport> load_report_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw Error("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<metrics::EvalReport> reports;
    for (const auto& f : files) reports.push_back(load_report_file(f));
    std::sort(reports.begin(), reports.end(), config_less);
    return reports;
}

}  // namespace codeprov::report
