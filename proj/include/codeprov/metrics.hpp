#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeprov/classifier.hpp"
#include "codeprov/corpus.hpp"
#include "codeprov/errors.hpp"
#include "codeprov/extractor.hpp"
#include "codeprov/snippet.hpp"

namespace codeprov::metrics {

// Two-decimal rounding for rendered tables, half-to-even like the default
// FP environment; raw values stay at full precision everywhere else.
inline double round2(double v) {
    return std::nearbyint(v * 100.0) / 100.0;
}

struct ConfusionCounts {
    Origin positive_class = Origin::chatgpt;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
};

inline ConfusionCounts confusion(const std::vector<Origin>& truth,
                                 const std::vector<Origin>& predicted,
                                 Origin positive_class) {
    if (truth.size() != predicted.size())
        throw Error("confusion: truth and prediction lengths differ");
    if (truth.empty()) throw Error("confusion: no items to evaluate");
    ConfusionCounts c;
    c.positive_class = positive_class;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual = truth[i] == positive_class;
        const bool guessed = predicted[i] == positive_class;
        if (actual && guessed) ++c.tp;
        else if (!actual && guessed) ++c.fp;
        else if (actual && !guessed) ++c.fn;
        else ++c.tn;
    }
    return c;
}

struct ClassMetrics {
    double precision = 0, recall = 0, f1 = 0;
    std::size_t support = 0;
};

// Zero denominators yield 0 so reports stay total.
inline ClassMetrics per_class_metrics(const ConfusionCounts& c) {
    ClassMetrics m;
    m.support = c.tp + c.fn;
    if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / (c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / (c.tp + c.fn);
    if (m.precision + m.recall > 0)
        m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

struct Averages {
    double precision = 0, recall = 0, f1 = 0;
};

struct EvalReport {
    std::string dataset;
    std::string config;
    ClassMetrics chatgpt;  // positive class of the study
    ClassMetrics human;
    double accuracy = 0;
    Averages macro_avg;
    Averages weighted_avg;
    std::size_t total_support = 0;
    std::uint64_t seed = 0;
    std::optional<std::string> error;  // set when this grid cell failed

    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
};

// Support-weighted recall is algebraically (tp_chatgpt + tp_human) / N, which
// is also the accuracy; when the exact correct count is known the shared
// value is computed once from integers so the two agree bit-for-bit.
inline void aggregate(EvalReport& r, std::optional<std::size_t> correct_count = std::nullopt) {
    r.total_support = r.chatgpt.support + r.human.support;
    const double n = static_cast<double>(r.total_support);
    r.macro_avg.precision = (r.chatgpt.precision + r.human.precision) / 2;
    r.macro_avg.recall = (r.chatgpt.recall + r.human.recall) / 2;
    r.macro_avg.f1 = (r.chatgpt.f1 + r.human.f1) / 2;
    if (r.total_support == 0) return;
    r.weighted_avg.precision =
        (r.chatgpt.precision * r.chatgpt.support + r.human.precision * r.human.support) / n;
    r.weighted_avg.f1 = (r.chatgpt.f1 * r.chatgpt.support + r.human.f1 * r.human.support) / n;
    r.weighted_avg.recall =
        correct_count
            ? static_cast<double>(*correct_count) / n
            : (r.chatgpt.recall * r.chatgpt.support + r.human.recall * r.human.support) / n;
    r.accuracy = r.weighted_avg.recall;
}

inline EvalReport evaluate(const std::vector<Origin>& truth,
                           const std::vector<Origin>& predicted,
                           std::string dataset = "", std::string config = "") {
    EvalReport r;
    r.dataset = std::move(dataset);
    r.config = std::move(config);
    auto chatgpt_counts = confusion(truth, predicted, Origin::chatgpt);
    r.chatgpt = per_class_metrics(chatgpt_counts);
    r.human = per_class_metrics(confusion(truth, predicted, Origin::human));
    aggregate(r, chatgpt_counts.tp + chatgpt_counts.tn);
    return r;
}

inline nlohmann::json EvalReport::to_json() const {
    nlohmann::json j = {
        {"dataset", dataset},
        {"config", config},
        {"per_class",
         {{"chatgpt",
           {{"precision", chatgpt.precision},
            {"recall", chatgpt.recall},
            {"f1", chatgpt.f1},
            {"support", chatgpt.support}}},
          {"human",
           {{"precision", human.precision},
            {"recall", human.recall},
            {"f1", human.f1},
            {"support", human.support}}}}},
        {"accuracy", accuracy},
        {"macro_avg",
         {{"precision", macro_avg.precision}, {"recall", macro_avg.recall}, {"f1", macro_avg.f1}}},
        {"weighted_avg",
         {{"precision", weighted_avg.precision},
          {"recall", weighted_avg.recall},
          {"f1", weighted_avg.f1}}},
        {"total_support", total_support},
        {"seed", seed}};
    if (error) j["error"] = *error;
    return j;
}

inline EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport r;
    r.dataset = j.value("dataset", "");
    r.config = j.value("config", "");
    auto load_class = [&](const char* name, ClassMetrics& m) {
        const auto& c = j.at("per_class").at(name);
        m.precision = c.at("precision").get<double>();
        m.recall = c.at("recall").get<double>();
        m.f1 = c.at("f1").get<double>();
        m.support = c.at("support").get<std::size_t>();
    };
    load_class("chatgpt", r.chatgpt);
    load_class("human", r.human);
    r.accuracy = j.value("accuracy", 0.0);
    r.macro_avg = {j.at("macro_avg").at("precision").get<double>(),
                   j.at("macro_avg").at("recall").get<double>(),
                   j.at("macro_avg").at("f1").get<double>()};
    r.weighted_avg = {j.at("weighted_avg").at("precision").get<double>(),
                      j.at("weighted_avg").at("recall").get<double>(),
                      j.at("weighted_avg").at("f1").get<double>()};
    r.total_support = j.value("total_support", std::size_t{0});
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    return r;
}

// C5-style rename source: each pairing key maps to the primary class name of
// its generated counterpart (first by id when a task has several).
inline extractor::RenameMap counterpart_rename_map(const corpus::Corpus& corpus) {
    extractor::RenameMap map;
    map.provenance = extractor::RenameMap::Provenance::counterpart;
    std::map<std::string, std::string> first_generated;
    std::vector<const Snippet*> generated;
    for (const auto& s : corpus.snippets)
        if (s.origin == Origin::chatgpt && s.pairing_key) generated.push_back(&s);
    std::sort(generated.begin(), generated.end(),
              [](const Snippet* a, const Snippet* b) { return a->id < b->id; });
    for (const Snippet* s : generated) {
        if (first_generated.contains(*s->pairing_key)) continue;
        auto name = extractor::primary_class_name(s->text);
        if (name && extractor::is_valid_identifier(*name)) {
            first_generated[*s->pairing_key] = *name;
            map.entries[*s->pairing_key] = *name;
        }
    }
    return map;
}

struct GridCorpus {
    std::string name;
    std::function<corpus::Corpus()> load;  // deferred so one bad corpus cannot
                                           // take the whole grid down
};

struct GridOptions {
    std::array<int, 3> ratios{80, 10, 10};
    std::uint64_t seed = 42;
    bool stratified = true;
    bool pair_aware = true;
    const extractor::RenameMap* human_names = nullptr;  // required by C6/C7/C8
    int jobs = 1;
};

namespace detail {

inline EvalReport run_cell(const corpus::Corpus& corpus, const corpus::DatasetSplit& split,
                           const std::string& dataset_name, const std::string& config_name,
                           classifier::Backend backend, const classifier::Hyperparams& hp,
                           const extractor::RenameMap* counterpart_names,
                           const GridOptions& opts) {
    EvalReport report;
    report.dataset = dataset_name;
    report.config = config_name;
    report.seed = hp.seed;
    try {
        auto config = extractor::preset(config_name);
        const extractor::RenameMap* names = nullptr;
        if (config.class_rename == extractor::ClassRename::counterpart_name)
            names = counterpart_names;
        else if (config.class_rename == extractor::ClassRename::human_chosen_name) {
            if (!opts.human_names)
                throw RenameError("config " + config_name +
                                  " needs a human-chosen rename map");
            names = opts.human_names;
        }
        auto model = classifier::train(backend, split, corpus, config, hp, names);
        std::vector<Snippet> test;
        std::vector<Origin> truth;
        for (const auto& id : split.test) {
            const Snippet* s = corpus.find(id);
            if (!s) throw ModelError("split references unknown snippet id \"" + id + "\"");
            test.push_back(*s);
            truth.push_back(s->origin);
        }
        if (test.empty()) throw ModelError("test part is empty");
        std::vector<Origin> predicted;
        for (const auto& p : classifier::predict_many(model, test, config, names))
            predicted.push_back(p.label);
        auto scored = evaluate(truth, predicted, dataset_name, config_name);
        scored.seed = hp.seed;
        return scored;
    } catch (const std::exception& e) {
        report.error = e.what();
        return report;
    }
}

}  // namespace detail

// One report per (corpus, config) cell, emitted in declaration order. A
// failing cell carries its error message; the rest of the grid is unaffected.
inline std::vector<EvalReport> run_experiment_grid(
    const std::vector<GridCorpus>& corpora, const std::vector<std::string>& configs,
    classifier::Backend backend, const classifier::Hyperparams& hp,
    const GridOptions& opts = {}) {
    std::vector<EvalReport> reports(corpora.size() * configs.size());

    for (std::size_t ci = 0; ci < corpora.size(); ++ci) {
        corpus::Corpus corpus;
        corpus::DatasetSplit split;
        extractor::RenameMap counterpart;
        std::optional<std::string> corpus_error;
        try {
            corpus = corpora[ci].load();
            split = corpus::split(corpus, opts.ratios, opts.seed, opts.stratified,
                                  opts.pair_aware);
            counterpart = counterpart_rename_map(corpus);
        } catch (const std::exception& e) {
            corpus_error = e.what();
        }

        auto cell = [&](std::size_t gi) {
            EvalReport r;
            if (corpus_error) {
                r.dataset = corpora[ci].name;
                r.config = configs[gi];
                r.seed = hp.seed;
                r.error = *corpus_error;
                return r;
            }
            return detail::run_cell(corpus, split, corpora[ci].name, configs[gi], backend,
                                    hp, &counterpart, opts);
        };

        if (opts.jobs > 1) {
            std::vector<std::future<EvalReport>> futures;
            for (std::size_t gi = 0; gi < configs.size(); ++gi)
                futures.push_back(std::async(std::launch::async, cell, gi));
            for (std::size_t gi = 0; gi < configs.size(); ++gi)
                reports[ci * configs.size() + gi] = futures[gi].get();
        } else {
            for (std::size_t gi = 0; gi < configs.size(); ++gi)
                reports[ci * configs.size() + gi] = cell(gi);
        }
    }
    return reports;
}

}  // namespace codeprov::metrics
