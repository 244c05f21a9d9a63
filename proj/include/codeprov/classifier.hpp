#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "codeprov/corpus.hpp"
#include "codeprov/errors.hpp"
#include "codeprov/extractor.hpp"
#include "codeprov/io.hpp"
#include "codeprov/rng.hpp"
#include "codeprov/snippet.hpp"
#include "codeprov/tokenizer.hpp"

namespace codeprov::classifier {

enum class Backend { linear, encoder };

inline std::string to_string(Backend b) {
    return b == Backend::linear ? "linear" : "encoder";
}

inline Backend backend_from_string(std::string_view s) {
    if (s == "linear") return Backend::linear;
    if (s == "encoder") return Backend::encoder;
    throw ModelError("unknown backend \"" + std::string(s) + "\"");
}

struct Hyperparams {
    int epochs = 5;
    int batch_size = 8;
    double learning_rate = 2e-5;
    double warmup_fraction = 0.1;
    double weight_decay = 0.01;
    int max_len = 512;
    std::uint64_t seed = 42;

    void validate() const {
        if (epochs < 1) throw ModelError("epochs must be at least 1");
        if (batch_size < 1) throw ModelError("batch_size must be at least 1");
        if (!(learning_rate > 0)) throw ModelError("learning_rate must be positive");
        if (warmup_fraction < 0 || warmup_fraction > 1)
            throw ModelError("warmup_fraction must lie in [0,1]");
        if (weight_decay < 0) throw ModelError("weight_decay must be nonnegative");
        if (max_len < 2) throw ModelError("max_len must be at least 2");
    }

    nlohmann::json to_json() const {
        return {{"epochs", epochs},
                {"batch_size", batch_size},
                {"learning_rate", learning_rate},
                {"warmup_fraction", warmup_fraction},
                {"weight_decay", weight_decay},
                {"max_len", max_len},
                {"seed", seed}};
    }
    static Hyperparams from_json(const nlohmann::json& j) {
        Hyperparams h;
        h.epochs = j.value("epochs", h.epochs);
        h.batch_size = j.value("batch_size", h.batch_size);
        h.learning_rate = j.value("learning_rate", h.learning_rate);
        h.warmup_fraction = j.value("warmup_fraction", h.warmup_fraction);
        h.weight_decay = j.value("weight_decay", h.weight_decay);
        h.max_len = j.value("max_len", h.max_len);
        h.seed = j.value("seed", h.seed);
        h.validate();
        return h;
    }
};

struct Prediction {
    std::string snippet_id;
    Origin label = Origin::human;
    double score = 0.5;  // probability of the predicted label, so always >= 0.5
};

constexpr int kArtifactVersion = 1;

// A trained model. The linear backend keeps its state inline; the encoder
// backend owns a checkpoint directory driven through the Python helper.
struct ModelHandle {
    Backend backend = Backend::linear;
    std::filesystem::path artifact_path;  // encoder checkpoint home, or last persist target
    Hyperparams hyperparams;
    std::string preprocess_config = "C1";
    std::array<std::string, 2> class_order{"human", "chatgpt"};

    tokenizer::Vocabulary vocab;   // linear only
    std::vector<double> weights;   // linear only, one per vocabulary id
    double bias = 0.0;             // linear only
};

namespace detail {

inline double sigmoid(double z) {
    return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Token-count features over the bounded sequence; sentinels carry no signal
// and are skipped, the UNK id is counted like any other token.
inline std::vector<std::pair<int, int>> count_features(const std::string& text,
                                                       const tokenizer::Vocabulary& vocab,
                                                       int max_len) {
    auto seq = tokenizer::tokenize(text, vocab, static_cast<std::size_t>(max_len));
    std::map<int, int> counts;
    for (int id : seq.ids)
        if (id != tokenizer::Vocabulary::bos_id && id != tokenizer::Vocabulary::eos_id)
            counts[id] += 1;
    return {counts.begin(), counts.end()};
}

inline double raw_score(const ModelHandle& model,
                        const std::vector<std::pair<int, int>>& features) {
    double z = model.bias;
    for (auto [id, count] : features)
        z += model.weights[static_cast<std::size_t>(id)] * count;
    return z;
}

struct PreparedExample {
    std::string id;
    double label = 0.0;  // 1.0 = chatgpt
    std::vector<std::pair<int, int>> features;
};

inline std::vector<Snippet> gather_part(const corpus::Corpus& corpus,
                                        const std::vector<std::string>& ids) {
    std::vector<Snippet> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const Snippet* s = corpus.find(id);
        if (!s) throw ModelError("split references unknown snippet id \"" + id + "\"");
        out.push_back(*s);
    }
    return out;
}

}  // namespace detail

// Probability that the snippet is generated, given already-preprocessed text.
inline double probability_chatgpt(const ModelHandle& model, const std::string& text) {
    if (model.backend != Backend::linear)
        throw ModelError("probability_chatgpt is a linear-backend operation");
    return detail::sigmoid(
        detail::raw_score(model, detail::count_features(text, model.vocab,
                                                        model.hyperparams.max_len)));
}

namespace detail {

inline Prediction predict_text(const ModelHandle& model, const std::string& id,
                               const std::string& text) {
    double p = probability_chatgpt(model, text);
    Prediction out;
    out.snippet_id = id;
    out.label = p >= 0.5 ? Origin::chatgpt : Origin::human;
    out.score = std::max(p, 1.0 - p);
    return out;
}

inline double accuracy_on(const ModelHandle& model,
                          const std::vector<PreparedExample>& examples) {
    if (examples.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& ex : examples) {
        double p = sigmoid(raw_score(model, ex.features));
        double predicted = p >= 0.5 ? 1.0 : 0.0;
        correct += predicted == ex.label;
    }
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

inline ModelHandle train_linear(const corpus::DatasetSplit& split,
                                const corpus::Corpus& corpus,
                                const extractor::PreprocessConfig& config,
                                const Hyperparams& hp,
                                const extractor::RenameMap* rename_map) {
    auto train_snippets = gather_part(corpus, split.train);
    if (train_snippets.empty()) throw ModelError("training set is empty");

    // Canonical order by id: the split's file order must not matter.
    std::sort(train_snippets.begin(), train_snippets.end(),
              [](const Snippet& a, const Snippet& b) { return a.id < b.id; });

    std::vector<std::string> texts;
    bool saw_human = false, saw_chatgpt = false;
    for (auto& s : train_snippets) {
        s = extractor::apply_config(s, config, rename_map);
        texts.push_back(s.text);
        (s.origin == Origin::human ? saw_human : saw_chatgpt) = true;
    }
    if (!saw_human || !saw_chatgpt)
        throw ModelError("training set contains a single class");

    ModelHandle model;
    model.backend = Backend::linear;
    model.hyperparams = hp;
    model.preprocess_config = config.name;
    model.vocab = tokenizer::build_reference_vocab(texts);
    model.weights.assign(model.vocab.size(), 0.0);
    model.bias = 0.0;

    std::vector<PreparedExample> train;
    for (std::size_t i = 0; i < train_snippets.size(); ++i)
        train.push_back({train_snippets[i].id,
                         train_snippets[i].origin == Origin::chatgpt ? 1.0 : 0.0,
                         count_features(texts[i], model.vocab, hp.max_len)});

    std::vector<PreparedExample> validation;
    for (auto& s : gather_part(corpus, split.validation)) {
        auto pre = extractor::apply_config(s, config, rename_map);
        validation.push_back({pre.id, pre.origin == Origin::chatgpt ? 1.0 : 0.0,
                              count_features(pre.text, model.vocab, hp.max_len)});
    }

    const std::size_t n = train.size();
    const std::size_t batches = (n + hp.batch_size - 1) / hp.batch_size;
    const std::size_t total_steps = batches * static_cast<std::size_t>(hp.epochs);
    const std::size_t warmup_steps =
        static_cast<std::size_t>(std::llround(hp.warmup_fraction * total_steps));

    std::mt19937_64 engine(hp.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    double best_accuracy = -1.0;
    std::vector<double> best_weights;
    double best_bias = 0.0;

    std::size_t step = 0;
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        rng::shuffle(order, engine);
        for (std::size_t b = 0; b < batches; ++b) {
            ++step;
            double lr = hp.learning_rate;
            if (warmup_steps > 0 && step <= warmup_steps)
                lr = hp.learning_rate * static_cast<double>(step) /
                     static_cast<double>(warmup_steps);

            const std::size_t lo = b * hp.batch_size;
            const std::size_t hi = std::min(n, lo + hp.batch_size);
            const double inv = 1.0 / static_cast<double>(hi - lo);

            if (hp.weight_decay > 0) {
                const double keep = 1.0 - lr * hp.weight_decay;
                for (auto& w : model.weights) w *= keep;
            }
            double bias_grad = 0.0;
            std::map<int, double> grad;
            for (std::size_t i = lo; i < hi; ++i) {
                const auto& ex = train[order[i]];
                double err = sigmoid(raw_score(model, ex.features)) - ex.label;
                bias_grad += err * inv;
                for (auto [id, count] : ex.features) grad[id] += err * count * inv;
            }
            model.bias -= lr * bias_grad;
            for (auto [id, g] : grad) model.weights[static_cast<std::size_t>(id)] -= lr * g;
        }
        if (!validation.empty()) {
            double acc = accuracy_on(model, validation);
            // Ties keep the later epoch: validation accuracy is coarse on
            // small parts, and when it cannot distinguish epochs the more
            // trained weights are the better bet.
            if (acc >= best_accuracy) {
                best_accuracy = acc;
                best_weights = model.weights;
                best_bias = model.bias;
            }
        }
    }
    if (!validation.empty()) {
        model.weights = std::move(best_weights);
        model.bias = best_bias;
    }
    return model;
}

// --- Encoder backend: a subprocess adapter around the Python helper. ---

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s)
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    return out + "'";
}

inline std::filesystem::path encoder_helper_path() {
    if (const char* env = std::getenv("CODEPROV_ENCODER_HELPER")) return env;
    std::error_code ec;
    auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        auto beside = exe.parent_path() / "encoder_backend.py";
        if (std::filesystem::exists(beside)) return beside;
    }
    return "encoder_backend.py";
}

inline int run_captured(const std::string& command, std::string& output) {
    output.clear();
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (!pipe) return -1;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
    return ::pclose(pipe);
}

inline void run_helper(const std::vector<std::string>& args) {
    auto helper = encoder_helper_path();
    if (!std::filesystem::exists(helper))
        throw ModelError("encoder backend unavailable: helper not found at " +
                         helper.string() +
                         " (set CODEPROV_ENCODER_HELPER to the helper script)");
    std::string command = "python3 " + shell_quote(helper.string());
    for (const auto& a : args) command += " " + shell_quote(a);
    std::string output;
    int rc = run_captured(command, output);
    if (rc != 0) {
        if (output.size() > 2000) output = "..." + output.substr(output.size() - 2000);
        throw ModelError("encoder helper failed (exit " + std::to_string(rc) +
                         "): " + output);
    }
}

inline std::filesystem::path fresh_work_dir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path() / ("codeprov-" + tag);
    std::filesystem::create_directories(base);
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto dir = base / std::to_string(rd());
        std::error_code ec;
        if (std::filesystem::create_directory(dir, ec)) return dir;
    }
    throw Error("cannot create a work directory under " + base.string());
}

inline void write_examples_jsonl(const std::filesystem::path& path,
                                 const std::vector<Snippet>& snippets) {
    std::string out;
    for (const auto& s : snippets) {
        nlohmann::json j = {{"id", s.id},
                            {"label", codeprov::to_string(s.origin)},
                            {"text", s.text}};
        out += j.dump() + "\n";
    }
    io::atomic_write_file(path, out);
}

inline ModelHandle train_encoder(const corpus::DatasetSplit& split,
                                 const corpus::Corpus& corpus,
                                 const extractor::PreprocessConfig& config,
                                 const Hyperparams& hp,
                                 const extractor::RenameMap* rename_map) {
    auto prepare = [&](const std::vector<std::string>& ids) {
        auto snippets = gather_part(corpus, ids);
        std::sort(snippets.begin(), snippets.end(),
                  [](const Snippet& a, const Snippet& b) { return a.id < b.id; });
        for (auto& s : snippets) s = extractor::apply_config(s, config, rename_map);
        return snippets;
    };
    auto train_snippets = prepare(split.train);
    if (train_snippets.empty()) throw ModelError("training set is empty");
    bool saw_human = false, saw_chatgpt = false;
    for (const auto& s : train_snippets)
        (s.origin == Origin::human ? saw_human : saw_chatgpt) = true;
    if (!saw_human || !saw_chatgpt)
        throw ModelError("training set contains a single class");

    auto data = fresh_work_dir("encoder-data");
    auto checkpoint = fresh_work_dir("encoder-model");
    write_examples_jsonl(data / "train.jsonl", train_snippets);
    write_examples_jsonl(data / "validation.jsonl", prepare(split.validation));
    io::atomic_write_file(data / "hyperparams.json", hp.to_json().dump(2) + "\n");

    run_helper({"train", "--data", data.string(), "--out", checkpoint.string()});

    ModelHandle model;
    model.backend = Backend::encoder;
    model.artifact_path = checkpoint;
    model.hyperparams = hp;
    model.preprocess_config = config.name;
    return model;
}

inline std::vector<Prediction> predict_encoder(const ModelHandle& model,
                                               const std::vector<Snippet>& preprocessed) {
    auto work = fresh_work_dir("encoder-predict");
    write_examples_jsonl(work / "inputs.jsonl", preprocessed);
    run_helper({"predict", "--model", (model.artifact_path / "checkpoint").string(),
                "--input", (work / "inputs.jsonl").string(), "--output",
                (work / "predictions.jsonl").string()});
    std::map<std::string, Prediction> by_id;
    std::istringstream in(io::read_file(work / "predictions.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        Prediction p;
        p.snippet_id = j.at("id").get<std::string>();
        p.label = origin_from_string(j.at("label").get<std::string>());
        p.score = j.at("score").get<double>();
        by_id[p.snippet_id] = p;
    }
    std::vector<Prediction> out;
    for (const auto& s : preprocessed) {
        auto it = by_id.find(s.id);
        if (it == by_id.end())
            throw ModelError("encoder helper returned no prediction for \"" + s.id + "\"");
        out.push_back(it->second);
    }
    std::error_code ec;
    std::filesystem::remove_all(work, ec);
    return out;
}

}  // namespace detail

// Trains on the split's train part, preprocessing every snippet under
// `config` first. With a nonempty validation part the returned model is the
// epoch snapshot with the best validation accuracy (ties keep the earliest);
// otherwise it is the final epoch. Linear training is bit-deterministic for a
// fixed seed.
inline ModelHandle train(Backend backend, const corpus::DatasetSplit& split,
                         const corpus::Corpus& corpus,
                         const extractor::PreprocessConfig& config, const Hyperparams& hp,
                         const extractor::RenameMap* rename_map = nullptr) {
    hp.validate();
    return backend == Backend::linear
               ? detail::train_linear(split, corpus, config, hp, rename_map)
               : detail::train_encoder(split, corpus, config, hp, rename_map);
}

inline std::vector<Prediction> predict_many(const ModelHandle& model,
                                            const std::vector<Snippet>& snippets,
                                            const extractor::PreprocessConfig& config,
                                            const extractor::RenameMap* rename_map = nullptr) {
    std::vector<Snippet> preprocessed;
    preprocessed.reserve(snippets.size());
    for (const auto& s : snippets)
        preprocessed.push_back(extractor::apply_config(s, config, rename_map));
    if (model.backend == Backend::encoder) return detail::predict_encoder(model, preprocessed);
    std::vector<Prediction> out;
    out.reserve(preprocessed.size());
    for (const auto& s : preprocessed)
        out.push_back(detail::predict_text(model, s.id, s.text));
    return out;
}

inline Prediction predict(const ModelHandle& model, const Snippet& snippet,
                          const extractor::PreprocessConfig& config,
                          const extractor::RenameMap* rename_map = nullptr) {
    return predict_many(model, {snippet}, config, rename_map).front();
}

// Artifact directory layout: meta.json + backend state (vocab.txt and
// weights.json for linear, checkpoint/ for encoder).
inline void persist(const ModelHandle& model, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json meta = {{"format", "codeprov-model"},
                           {"version", kArtifactVersion},
                           {"backend", to_string(model.backend)},
                           {"class_order", model.class_order},
                           {"hyperparams", model.hyperparams.to_json()},
                           {"preprocess_config", model.preprocess_config},
                           {"tokenizer", model.backend == Backend::linear
                                             ? "reference-v1"
                                             : "encoder-native"}};
    io::atomic_write_file(dir / "meta.json", meta.dump(2) + "\n");
    if (model.backend == Backend::linear) {
        for (double w : model.weights)
            if (!std::isfinite(w)) throw ModelError("refusing to persist non-finite weights");
        tokenizer::save_vocab(model.vocab, dir / "vocab.txt");
        nlohmann::json weights = {{"bias", model.bias}, {"weights", model.weights}};
        io::atomic_write_file(dir / "weights.json", weights.dump() + "\n");
    } else {
        auto target = dir / "checkpoint";
        auto source = model.artifact_path / "checkpoint";
        if (!fs::exists(source)) source = model.artifact_path;
        if (fs::exists(target)) fs::remove_all(target);
        fs::copy(source, target, fs::copy_options::recursive);
    }
}

inline ModelHandle restore(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir / "meta.json"))
        throw ModelError("no model artifact at " + dir.string());
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(io::read_file(dir / "meta.json"));
    } catch (const nlohmann::json::exception& e) {
        throw ModelError("corrupt model meta.json: " + std::string(e.what()));
    }
    if (meta.value("format", "") != "codeprov-model")
        throw ModelError("not a model artifact: " + dir.string());
    if (meta.value("version", -1) != kArtifactVersion)
        throw ModelError("model artifact version mismatch: found " +
                         meta["version"].dump() + ", expected " +
                         std::to_string(kArtifactVersion));

    ModelHandle model;
    model.backend = backend_from_string(meta.at("backend").get<std::string>());
    model.artifact_path = dir;
    model.hyperparams = Hyperparams::from_json(meta.at("hyperparams"));
    model.preprocess_config = meta.value("preprocess_config", "C1");
    if (model.backend == Backend::linear) {
        model.vocab = tokenizer::load_vocab(dir / "vocab.txt");
        auto weights = nlohmann::json::parse(io::read_file(dir / "weights.json"));
        model.bias = weights.at("bias").get<double>();
        model.weights = weights.at("weights").get<std::vector<double>>();
        if (model.weights.size() != model.vocab.size())
            throw ModelError("weight vector does not match vocabulary size");
    }
    return model;
}

}  // namespace codeprov::classifier
