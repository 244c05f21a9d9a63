#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeprov/errors.hpp"
#include "codeprov/io.hpp"
#include "codeprov/snippet.hpp"

namespace codeprov::stats {

// Cross-tabulation of two classifiers' correctness over the same items.
struct PairedOutcome {
    std::string label;  // e.g. "encoder-vs-baseline"
    std::uint64_t both_correct = 0;
    std::uint64_t a_only_correct = 0;  // discordant cell b
    std::uint64_t b_only_correct = 0;  // discordant cell c
    std::uint64_t both_wrong = 0;
    std::uint64_t total() const {
        return both_correct + a_only_correct + b_only_correct + both_wrong;
    }
};

// Two-sided exact binomial McNemar: p = min(1, 2 * P(X <= min(b,c))) with
// X ~ Binomial(b+c, 1/2). Concordant pairs never enter. Up to n = 62 the
// binomial tail is summed in exact integer arithmetic; beyond that, in
// log space.
inline double mcnemar_exact(std::uint64_t b, std::uint64_t c) {
    const std::uint64_t n = b + c;
    if (n == 0) return 1.0;
    const std::uint64_t k = std::min(b, c);
    double tail;
    if (n <= 62) {
        std::uint64_t sum = 0;
        unsigned __int128 coeff = 1;  // C(n, 0); the middle coefficient of
                                      // C(62, .) still fits, intermediates may not
        for (std::uint64_t i = 0; i <= k; ++i) {
            sum += static_cast<std::uint64_t>(coeff);
            coeff = coeff * (n - i) / (i + 1);
        }
        tail = std::ldexp(static_cast<double>(sum), -static_cast<int>(n));
    } else {
        long double acc = 0.0L;
        const long double log2 = std::log(2.0L);
        for (std::uint64_t i = 0; i <= k; ++i)
            acc += std::exp(std::lgamma(static_cast<long double>(n) + 1) -
                            std::lgamma(static_cast<long double>(i) + 1) -
                            std::lgamma(static_cast<long double>(n - i) + 1) -
                            static_cast<long double>(n) * log2);
        tail = static_cast<double>(acc);
    }
    return std::min(1.0, 2.0 * tail);
}

// Holm's step-down correction: ascending p(i) scaled by (m - i + 1) under a
// running maximum, clamped to 1, returned in the input order.
inline std::vector<double> holm_adjust(const std::vector<double>& p_values) {
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw StatError("p-value outside [0,1]: " + std::to_string(p));
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> out(m);
    double running = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        double adjusted = p_values[order[rank]] * static_cast<double>(m - rank);
        running = std::max(running, adjusted);
        out[order[rank]] = std::min(1.0, running);
    }
    return out;
}

// Discordant-cell odds ratio b/c with the Haldane-Anscombe +0.5 correction
// when either cell is empty. Both cells empty leaves the effect undefined.
inline double odds_ratio(std::uint64_t b, std::uint64_t c) {
    if (b == 0 && c == 0)
        throw StatError("odds ratio undefined: no discordant pairs");
    if (b == 0 || c == 0)
        return (static_cast<double>(b) + 0.5) / (static_cast<double>(c) + 0.5);
    return static_cast<double>(b) / static_cast<double>(c);
}

struct StatResult {
    std::string label;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    std::optional<double> odds_ratio;  // empty when undefined
    std::string method = "mcnemar-exact+holm";
    std::optional<std::string> note;

    nlohmann::json to_json() const {
        nlohmann::json j = {{"label", label},
                            {"p_raw", p_raw},
                            {"p_adjusted", p_adjusted},
                            {"method", method}};
        j["odds_ratio"] = odds_ratio ? nlohmann::json(*odds_ratio) : nlohmann::json(nullptr);
        if (note) j["note"] = *note;
        return j;
    }
};

// Per-comparison exact p and odds ratio, Holm-adjusted across the batch. An
// undefined odds ratio is reported in the result rather than thrown, so one
// degenerate table cannot sink the batch.
inline std::vector<StatResult> compare_classifiers(const std::vector<PairedOutcome>& outcomes) {
    if (outcomes.empty()) throw StatError("no paired outcomes to compare");
    std::vector<double> raw;
    raw.reserve(outcomes.size());
    for (const auto& o : outcomes)
        raw.push_back(mcnemar_exact(o.a_only_correct, o.b_only_correct));
    auto adjusted = holm_adjust(raw);

    std::vector<StatResult> out;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        StatResult r;
        r.label = outcomes[i].label;
        r.p_raw = raw[i];
        r.p_adjusted = adjusted[i];
        try {
            r.odds_ratio = odds_ratio(outcomes[i].a_only_correct, outcomes[i].b_only_correct);
        } catch (const StatError& e) {
            r.note = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

// Rows of a two-classifier comparison over a common test set.
struct ComparisonTable {
    std::vector<std::string> ids;
    std::vector<Origin> truth;
    std::vector<Origin> pred_a;
    std::vector<Origin> pred_b;
};

inline PairedOutcome tally(const ComparisonTable& table, std::string label = "") {
    if (table.truth.size() != table.pred_a.size() ||
        table.truth.size() != table.pred_b.size())
        throw StatError("comparison table columns differ in length");
    PairedOutcome o;
    o.label = std::move(label);
    for (std::size_t i = 0; i < table.truth.size(); ++i) {
        const bool a = table.pred_a[i] == table.truth[i];
        const bool b = table.pred_b[i] == table.truth[i];
        if (a && b) ++o.both_correct;
        else if (a) ++o.a_only_correct;
        else if (b) ++o.b_only_correct;
        else ++o.both_wrong;
    }
    return o;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        // surrounding whitespace is meaningless in this format
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
}

}  // namespace detail

// CSV columns: snippet_id, truth, pred_a, pred_b. A header row is recognized
// by its first cell and skipped.
inline ComparisonTable load_comparison_csv(const std::filesystem::path& path) {
    ComparisonTable table;
    std::istringstream in(io::read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = detail::split_csv_line(line);
        if (lineno == 1 && !cells.empty() && cells[0] == "snippet_id") continue;
        if (cells.size() != 4)
            throw StatError(path.string() + ":" + std::to_string(lineno) +
                            ": expected snippet_id, truth, pred_a, pred_b");
        try {
            table.ids.push_back(cells[0]);
            table.truth.push_back(origin_from_string(cells[1]));
            table.pred_a.push_back(origin_from_string(cells[2]));
            table.pred_b.push_back(origin_from_string(cells[3]));
        } catch (const Error& e) {
            throw StatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return table;
}

inline void save_comparison_csv(const ComparisonTable& table,
                                const std::filesystem::path& path) {
    std::string out = "snippet_id,truth,pred_a,pred_b\n";
    for (std::size_t i = 0; i < table.ids.size(); ++i)
        out += table.ids[i] + "," + to_string(table.truth[i]) + "," +
               to_string(table.pred_a[i]) + "," + to_string(table.pred_b[i]) + "\n";
    io::atomic_write_file(path, out);
}

}  // namespace codeprov::stats
