#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "codeprov/baselines.hpp"
#include "codeprov/classifier.hpp"
#include "codeprov/corpus.hpp"
#include "codeprov/errors.hpp"
#include "codeprov/extractor.hpp"
#include "codeprov/io.hpp"
#include "codeprov/metrics.hpp"
#include "codeprov/report.hpp"
#include "codeprov/stats.hpp"

namespace codeprov::cli {

// Everything a grid run needs; other subcommands use subsets.
struct RunConfig {
    std::filesystem::path manifest;
    std::filesystem::path root = ".";
    std::vector<std::string> configs;
    std::filesystem::path rename_map;  // empty = none
    std::array<int, 3> ratios{80, 10, 10};
    std::uint64_t seed = 42;
    classifier::Backend backend = classifier::Backend::linear;
    classifier::Hyperparams hyperparams;
    std::filesystem::path out_dir;
};

namespace detail {

inline std::array<int, 3> parse_ratios(const std::string& text) {
    std::array<int, 3> out{};
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%d:%d:%d%n", &out[0], &out[1], &out[2], &consumed) != 3 ||
        consumed != static_cast<int>(text.size()))
        throw CliError("ratios must look like 80:10:10, got \"" + text + "\"");
    return out;
}

inline corpus::Corpus load_corpus(const std::filesystem::path& manifest,
                                  const std::filesystem::path& root,
                                  const std::string& provenance) {
    return corpus::ingest_corpus(root, manifest, corpus::provenance_from_string(provenance));
}

inline std::optional<extractor::RenameMap> maybe_rename_map(const std::filesystem::path& p) {
    if (p.empty()) return std::nullopt;
    // Counterpart names are derived from the corpus itself; a map given on
    // the command line always carries human-chosen names.
    return extractor::load_rename_map(p, extractor::RenameMap::Provenance::human);
}

inline classifier::Hyperparams load_hyperparams(const std::filesystem::path& path) {
    try {
        return classifier::Hyperparams::from_json(nlohmann::json::parse(io::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw CliError(path.string() + ": not a hyperparameter file: " + e.what());
    }
}

inline nlohmann::json prediction_json(const classifier::Prediction& p) {
    return {{"snippet_id", p.snippet_id},
            {"label", codeprov::to_string(p.label)},
            {"score", p.score}};
}

// Either writes atomically or prints to standard output.
inline void emit(const std::string& text, const std::filesystem::path& out) {
    if (out.empty())
        std::cout << text;
    else
        io::atomic_write_file(out, text);
}

inline std::vector<Snippet> gather_part(const corpus::Corpus& c,
                                        const std::vector<std::string>& ids) {
    std::vector<Snippet> out;
    for (const auto& id : ids) {
        const Snippet* s = c.find(id);
        if (!s) throw CliError("split names snippet \"" + id + "\" missing from the corpus");
        out.push_back(*s);
    }
    return out;
}

// Shared flags: --manifest/--root/--provenance appear on every corpus-reading
// subcommand with identical semantics.
struct CorpusArgs {
    std::filesystem::path manifest;
    std::filesystem::path root = ".";
    std::string provenance = "custom";

    void attach(CLI::App* sub) {
        sub->add_option("--manifest", manifest, "corpus manifest (JSONL)")->required();
        sub->add_option("--root", root, "directory snippet paths are relative to");
        sub->add_option("--provenance", provenance,
                        "unpaired_U, paired_P, mixed_Dalpha, paired_Dbeta, or custom");
    }

    corpus::Corpus load() const { return load_corpus(manifest, root, provenance); }
};

}  // namespace detail

// Argument vector excludes the program name. Returns the process exit code:
// 0 success, 1 rejected input or usage, 2 unexpected runtime failure. The
// whole project error hierarchy counts as rejected input - every such throw
// is a named contract violation, not a crash.
inline int dispatch(std::vector<std::string> args) {
    CLI::App app{"code provenance pipeline: preprocess, train, evaluate, compare"};
    app.require_subcommand(1);

    // --- ingest ---------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "load and validate a corpus manifest");
    detail::CorpusArgs ingest_corpus_args;
    ingest_corpus_args.attach(ingest);
    std::filesystem::path ingest_out;
    long expect_human = -1, expect_chatgpt = -1;
    ingest->add_option("--out", ingest_out, "write a normalized manifest here");
    ingest->add_option("--expect-human", expect_human, "fail unless this many human snippets");
    ingest->add_option("--expect-chatgpt", expect_chatgpt,
                       "fail unless this many generated snippets");
    ingest->callback([&] {
        auto records = corpus::load_manifest(ingest_corpus_args.manifest);
        auto c = corpus::ingest_corpus(ingest_corpus_args.root, records,
                                       corpus::provenance_from_string(
                                           ingest_corpus_args.provenance));
        if (expect_human >= 0 || expect_chatgpt >= 0) {
            auto actual = c.counts();
            corpus::Counts expected;
            expected.human = expect_human >= 0 ? expect_human : actual.human;
            expected.chatgpt = expect_chatgpt >= 0 ? expect_chatgpt : actual.chatgpt;
            auto report = corpus::validate_counts(c, expected);
            if (!report.ok) throw CliError("count validation failed:\n" + report.to_text());
        }
        if (!ingest_out.empty()) corpus::save_manifest(records, ingest_out);
        auto counts = c.counts();
        nlohmann::json j = {{"snippets", counts.total()},
                            {"human", counts.human},
                            {"chatgpt", counts.chatgpt},
                            {"provenance", corpus::to_string(c.provenance)},
                            {"paired", c.is_paired()}};
        std::cout << j.dump(2) << "\n";
    });

    // --- preprocess -----------------------------------------------------
    auto* preprocess = app.add_subcommand("preprocess", "apply one configuration to one file");
    std::string pp_config = "C1", pp_origin = "human", pp_id, pp_key;
    std::filesystem::path pp_in, pp_out, pp_rename;
    preprocess->add_option("--config", pp_config, "C1 through C8")->required();
    preprocess->add_option("--in", pp_in, "Java source file")->required();
    preprocess->add_option("--out", pp_out, "output file (default: standard output)");
    preprocess->add_option("--origin", pp_origin, "human or chatgpt; renames touch human only");
    preprocess->add_option("--id", pp_id, "snippet id used in error messages");
    preprocess->add_option("--pairing-key", pp_key, "rename map lookup key");
    preprocess->add_option("--rename-map", pp_rename, "TSV rename map for C5-C8");
    preprocess->callback([&] {
        auto config = extractor::preset(pp_config);
        auto map = detail::maybe_rename_map(pp_rename);
        auto snippet = make_snippet(pp_id.empty() ? pp_in.stem().string() : pp_id,
                                    origin_from_string(pp_origin), io::read_file(pp_in),
                                    pp_key.empty() ? std::nullopt
                                                   : std::optional<std::string>(pp_key));
        auto result = extractor::apply_config(snippet, config, map ? &*map : nullptr);
        detail::emit(result.text, pp_out);
    });

    // --- split ----------------------------------------------------------
    auto* split_cmd = app.add_subcommand("split", "deterministic train/validation/test split");
    detail::CorpusArgs split_corpus_args;
    split_corpus_args.attach(split_cmd);
    std::string split_ratios = "80:10:10";
    std::uint64_t split_seed = 42;
    bool no_stratify = false, pair_aware = false;
    std::filesystem::path split_out;
    split_cmd->add_option("--ratios", split_ratios, "train:validation:test, sums to 100");
    split_cmd->add_option("--seed", split_seed, "shuffle seed");
    split_cmd->add_flag("--no-stratify", no_stratify, "drop per-class balancing");
    split_cmd->add_flag("--pair-aware", pair_aware, "keep pairing keys within one part");
    split_cmd->add_option("--out", split_out, "split file")->required();
    split_cmd->callback([&] {
        auto c = split_corpus_args.load();
        auto s = corpus::split(c, detail::parse_ratios(split_ratios), split_seed, !no_stratify,
                               pair_aware);
        corpus::save_split(s, split_out);
        std::cout << "train " << s.train.size() << ", validation " << s.validation.size()
                  << ", test " << s.test.size() << "\n";
    });

    // --- train ----------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "fit a classifier and persist the artifact");
    detail::CorpusArgs train_corpus_args;
    train_corpus_args.attach(train_cmd);
    std::filesystem::path train_split, train_out, train_rename, train_hp_file;
    std::string train_config = "C1", train_backend = "linear";
    std::optional<int> train_epochs, train_batch, train_max_len;
    std::optional<double> train_lr;
    std::optional<std::uint64_t> train_seed;
    train_cmd->add_option("--split", train_split, "split file from `split`")->required();
    train_cmd->add_option("--config", train_config, "preprocessing configuration");
    train_cmd->add_option("--backend", train_backend, "linear or encoder");
    train_cmd->add_option("--rename-map", train_rename, "TSV rename map for C5-C8");
    train_cmd->add_option("--hyperparams", train_hp_file, "JSON hyperparameter file");
    train_cmd->add_option("--epochs", train_epochs, "override: training epochs");
    train_cmd->add_option("--batch-size", train_batch, "override: batch size");
    train_cmd->add_option("--learning-rate", train_lr, "override: learning rate");
    train_cmd->add_option("--max-len", train_max_len, "override: token budget per snippet");
    train_cmd->add_option("--seed", train_seed, "override: training seed");
    train_cmd->add_option("--out", train_out, "model artifact directory")->required();
    train_cmd->callback([&] {
        auto c = train_corpus_args.load();
        auto s = corpus::load_split(train_split);
        auto hp = train_hp_file.empty() ? classifier::Hyperparams{}
                                        : detail::load_hyperparams(train_hp_file);
        if (train_epochs) hp.epochs = *train_epochs;
        if (train_batch) hp.batch_size = *train_batch;
        if (train_lr) hp.learning_rate = *train_lr;
        if (train_max_len) hp.max_len = *train_max_len;
        if (train_seed) hp.seed = *train_seed;
        auto map = detail::maybe_rename_map(train_rename);
        auto model = classifier::train(classifier::backend_from_string(train_backend), s, c,
                                       extractor::preset(train_config), hp,
                                       map ? &*map : nullptr);
        classifier::persist(model, train_out);
        std::cout << "model written to " << train_out.string() << "\n";
    });

    // --- predict --------------------------------------------------------
    auto* predict_cmd = app.add_subcommand("predict", "classify one snippet");
    std::filesystem::path predict_model, predict_input;
    std::string predict_id;
    predict_cmd->add_option("--model", predict_model, "model artifact directory")->required();
    predict_cmd->add_option("--input", predict_input, "Java source file")->required();
    predict_cmd->add_option("--id", predict_id, "snippet id (default: file stem)");
    predict_cmd->callback([&] {
        auto model = classifier::restore(predict_model);
        // Origin is unknown at prediction time. Generated-origin snippets are
        // exempt from renaming, so the rename-bearing configs degrade to
        // their comment/import rules here instead of demanding a pairing key.
        auto snippet = make_snippet(
            predict_id.empty() ? predict_input.stem().string() : predict_id, Origin::chatgpt,
            io::read_file(predict_input));
        auto p = classifier::predict(model, snippet,
                                     extractor::preset(model.preprocess_config));
        std::cout << detail::prediction_json(p).dump(2) << "\n";
    });

    // --- eval -----------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "score a model on one split part");
    detail::CorpusArgs eval_corpus_args;
    eval_corpus_args.attach(eval_cmd);
    std::filesystem::path eval_model, eval_split, eval_rename, eval_out;
    std::string eval_part = "test", eval_dataset;
    eval_cmd->add_option("--model", eval_model, "model artifact directory")->required();
    eval_cmd->add_option("--split", eval_split, "split file")->required();
    eval_cmd->add_option("--part", eval_part, "train, validation, or test");
    eval_cmd->add_option("--rename-map", eval_rename, "TSV rename map for C5-C8");
    eval_cmd->add_option("--dataset", eval_dataset, "dataset name in the report");
    eval_cmd->add_option("--out", eval_out, "report file (default: standard output)");
    eval_cmd->callback([&] {
        auto c = eval_corpus_args.load();
        auto s = corpus::load_split(eval_split);
        const std::vector<std::string>* ids = nullptr;
        if (eval_part == "train") ids = &s.train;
        else if (eval_part == "validation") ids = &s.validation;
        else if (eval_part == "test") ids = &s.test;
        else throw CliError("unknown split part \"" + eval_part + "\"");
        auto model = classifier::restore(eval_model);
        auto snippets = detail::gather_part(c, *ids);
        auto map = detail::maybe_rename_map(eval_rename);
        auto predictions =
            classifier::predict_many(model, snippets, extractor::preset(model.preprocess_config),
                                     map ? &*map : nullptr);
        std::vector<Origin> truth, predicted;
        for (const auto& sn : snippets) truth.push_back(sn.origin);
        for (const auto& p : predictions) predicted.push_back(p.label);
        auto report = metrics::evaluate(
            truth, predicted,
            eval_dataset.empty() ? eval_corpus_args.manifest.stem().string() : eval_dataset,
            model.preprocess_config);
        report.seed = model.hyperparams.seed;
        detail::emit(report.to_json().dump(2) + "\n", eval_out);
    });

    // --- grid -----------------------------------------------------------
    auto* grid_cmd = app.add_subcommand("grid", "train and score every listed configuration");
    RunConfig grid;
    std::string grid_backend = "linear", grid_ratios = "80:10:10", grid_provenance = "custom";
    std::string grid_dataset;
    std::filesystem::path grid_hp_file;
    bool grid_no_stratify = false, grid_no_pair_aware = false;
    int grid_jobs = 1;
    grid_cmd->add_option("--corpus", grid.manifest, "corpus manifest (JSONL)")->required();
    grid_cmd->add_option("--root", grid.root, "directory snippet paths are relative to");
    grid_cmd->add_option("--configs", grid.configs, "comma-separated, e.g. C1,C2,C4")
        ->required()
        ->delimiter(',');
    grid_cmd->add_option("--backend", grid_backend, "linear or encoder");
    grid_cmd->add_option("--out", grid.out_dir, "directory for per-config reports")->required();
    grid_cmd->add_option("--jobs", grid_jobs, "parallel cells");
    grid_cmd->add_option("--seed", grid.seed, "split and training seed");
    grid_cmd->add_option("--ratios", grid_ratios, "train:validation:test");
    grid_cmd->add_option("--rename-map", grid.rename_map, "human-chosen names for C6-C8");
    grid_cmd->add_option("--provenance", grid_provenance, "corpus provenance tag");
    grid_cmd->add_option("--hyperparams", grid_hp_file, "JSON hyperparameter file");
    grid_cmd->add_option("--dataset", grid_dataset, "dataset name in reports");
    grid_cmd->add_flag("--no-stratify", grid_no_stratify, "drop per-class balancing");
    grid_cmd->add_flag("--no-pair-aware", grid_no_pair_aware, "let pairs straddle parts");
    grid_cmd->callback([&] {
        grid.ratios = detail::parse_ratios(grid_ratios);
        grid.backend = classifier::backend_from_string(grid_backend);
        if (!grid_hp_file.empty()) grid.hyperparams = detail::load_hyperparams(grid_hp_file);
        grid.hyperparams.seed = grid.seed;
        auto map = detail::maybe_rename_map(grid.rename_map);

        metrics::GridOptions opts;
        opts.ratios = grid.ratios;
        opts.seed = grid.seed;
        opts.stratified = !grid_no_stratify;
        opts.pair_aware = !grid_no_pair_aware;
        opts.human_names = map ? &*map : nullptr;
        opts.jobs = grid_jobs;

        metrics::GridCorpus gc;
        gc.name = grid_dataset.empty() ? grid.manifest.stem().string() : grid_dataset;
        gc.load = [&] {
            return detail::load_corpus(grid.manifest, grid.root, grid_provenance);
        };
        auto reports = metrics::run_experiment_grid({gc}, grid.configs, grid.backend,
                                                    grid.hyperparams, opts);
        for (const auto& r : reports)
            io::atomic_write_file(grid.out_dir / (r.config + ".json"),
                                  r.to_json().dump(2) + "\n");
        std::cout << reports.size() << " reports written to " << grid.out_dir.string() << "\n";
    });

    // --- compare --------------------------------------------------------
    auto* compare_cmd = app.add_subcommand("compare", "paired significance tests");
    std::vector<std::filesystem::path> compare_csvs;
    std::vector<std::string> compare_labels;
    std::filesystem::path compare_out;
    compare_cmd->add_option("--csv", compare_csvs, "comparison table (repeatable)")
        ->required();
    compare_cmd->add_option("--label", compare_labels, "label per table (default: file stem)");
    compare_cmd->add_option("--out", compare_out, "result file (default: standard output)");
    compare_cmd->callback([&] {
        if (!compare_labels.empty() && compare_labels.size() != compare_csvs.size())
            throw CliError("need as many --label values as --csv values");
        std::vector<stats::PairedOutcome> outcomes;
        for (std::size_t i = 0; i < compare_csvs.size(); ++i) {
            auto table = stats::load_comparison_csv(compare_csvs[i]);
            outcomes.push_back(stats::tally(table, compare_labels.empty()
                                                       ? compare_csvs[i].stem().string()
                                                       : compare_labels[i]));
        }
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : stats::compare_classifiers(outcomes)) arr.push_back(r.to_json());
        detail::emit(arr.dump(2) + "\n", compare_out);
    });

    // --- report ---------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "render grid results as a table");
    std::filesystem::path report_in, report_out;
    std::string report_format = "md";
    report_cmd->add_option("--in", report_in, "directory of per-config report JSON files")
        ->required();
    report_cmd->add_option("--format", report_format, "csv, md, or json");
    report_cmd->add_option("--out", report_out, "output file (default: standard output)");
    report_cmd->callback([&] {
        auto reports = report::load_report_dir(report_in);
        detail::emit(report::render(reports, report::format_from_string(report_format)),
                     report_out);
    });

    // --- baseline -------------------------------------------------------
    auto* baseline_cmd = app.add_subcommand("baseline", "score an external detector");
    detail::CorpusArgs baseline_corpus_args;
    baseline_corpus_args.attach(baseline_cmd);
    std::string baseline_id = "gptzero";
    std::filesystem::path baseline_fixture, baseline_out, baseline_predictions;
    std::size_t baseline_min_chars = 0, baseline_per_class = 50;
    std::optional<std::size_t> baseline_max_chars;
    std::uint32_t baseline_seed = 42;
    bool baseline_live = false;
    baselines::LiveConfig live_config;
    baseline_cmd->add_option("--id", baseline_id, "gptzero or openai_classifier");
    baseline_cmd->add_option("--fixture", baseline_fixture, "recorded session CSV")->required();
    baseline_cmd->add_option("--min-chars", baseline_min_chars, "admit only longer snippets");
    baseline_cmd->add_option("--max-chars", baseline_max_chars, "admit only shorter snippets");
    baseline_cmd->add_option("--per-class", baseline_per_class, "snippets per class");
    baseline_cmd->add_option("--seed", baseline_seed, "selection seed");
    baseline_cmd->add_flag("--live", baseline_live, "query the real endpoint and record");
    baseline_cmd->add_option("--endpoint", live_config.endpoint_url, "live endpoint URL");
    baseline_cmd->add_option("--token-env", live_config.auth_token_env,
                             "environment variable holding the bearer token");
    baseline_cmd->add_option("--interval-ms", live_config.min_interval_ms,
                             "minimum milliseconds between live requests");
    baseline_cmd->add_option("--out", baseline_out, "score file (default: standard output)");
    baseline_cmd->add_option("--predictions-out", baseline_predictions,
                             "per-snippet CSV: snippet_id,truth,predicted");
    baseline_cmd->callback([&] {
        auto id = baselines::baseline_id_from_string(baseline_id);
        auto c = baseline_corpus_args.load();
        baselines::LengthConstraint gate{baseline_min_chars, baseline_max_chars};
        auto selected =
            baselines::select_comparison_set(c, gate, baseline_per_class, baseline_seed);
        auto client = baseline_live
                          ? baselines::BaselineClient::live(id, live_config, baseline_fixture)
                          : baselines::BaselineClient::replay(id, baseline_fixture);
        auto score =
            baselines::score_baseline(client, baselines::default_mapping(id), selected);
        if (!baseline_predictions.empty()) {
            std::string csv = "snippet_id,truth,predicted\n";
            for (std::size_t i = 0; i < selected.size(); ++i)
                csv += selected[i].id + "," + codeprov::to_string(selected[i].origin) + "," +
                       codeprov::to_string(score.predictions[i]) + "\n";
            io::atomic_write_file(baseline_predictions, csv);
        }
        nlohmann::json j = {{"baseline", baseline_id},
                            {"correct", score.correct},
                            {"total", score.total},
                            {"accuracy", score.accuracy()}};
        detail::emit(j.dump(2) + "\n", baseline_out);
    });

    try {
        std::reverse(args.begin(), args.end());  // CLI11's vector parse wants it backwards
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace codeprov::cli
