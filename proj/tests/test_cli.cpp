#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "codeprov/cli.hpp"

using namespace codeprov;
namespace fs = std::filesystem;

namespace {

// dispatch prints to std::cout; tests read it from here instead.
struct CoutCapture {
    std::ostringstream captured;
    std::streambuf* saved;
    CoutCapture() : saved(std::cout.rdbuf(captured.rdbuf())) {}
    ~CoutCapture() { std::cout.rdbuf(saved); }
    std::string text() const { return captured.str(); }
};

int run(std::vector<std::string> args, std::string* out = nullptr) {
    CoutCapture capture;
    int code = cli::dispatch(std::move(args));
    if (out) *out = capture.text();
    return code;
}

fs::path scratch_dir(const char* tag) {
    auto dir = fs::temp_directory_path() / (std::string("codeprov-cli-") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Paired corpus whose generated half carries a marker comment, so a linear
// model separates it perfectly under C1 and the file plumbing stays tiny.
struct DiskCorpus {
    fs::path root;
    fs::path manifest;
};

DiskCorpus write_marker_corpus(const fs::path& dir, int pairs) {
    DiskCorpus d{dir / "snippets", dir / "corpus.jsonl"};
    fs::create_directories(d.root);
    std::vector<corpus::ManifestRecord> records;
    char buf[64];
    for (int i = 0; i < pairs; ++i) {
        std::string body = "public class Task" + std::to_string(i) + " {\n    int run() {\n" +
                           "        return " + std::to_string(i) + ";\n    }\n}\n";
        std::snprintf(buf, sizeof buf, "t%03d", i);
        std::string key = buf;

        corpus::ManifestRecord h;
        h.id = "h-" + key;
        h.origin = Origin::human;
        h.pairing_key = key;
        h.path = h.id + ".java";
        io::atomic_write_file(d.root / h.path,
                              "package course;\n// Exercise " + std::to_string(i) +
                                  " solution\n" + body);
        records.push_back(h);

        corpus::ManifestRecord g;
        g.id = "g-" + key;
        g.origin = Origin::chatgpt;
        g.pairing_key = key;
        g.path = g.id + ".java";
        io::atomic_write_file(d.root / g.path,
                              "// Solution generated by an AI assistant\n" + body);
        records.push_back(g);
    }
    corpus::save_manifest(records, d.manifest);
    return d;
}

std::vector<std::string> corpus_flags(const DiskCorpus& d) {
    return {"--manifest", d.manifest.string(), "--root", d.root.string(), "--provenance",
            "paired_Dbeta"};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("unknown subcommands and bad flags exit 1 with usage text", "[cli]") {
    CHECK(run({}) == 1);
    CHECK(run({"frobnicate"}) == 1);
    CHECK(run({"split"}) == 1);                       // missing required flags
    CHECK(run({"predict", "--model"}) == 1);          // flag without value
    CHECK(run({"--help"}) == 0);
    std::string out;
    CHECK(run({"ingest", "--help"}, &out) == 0);
    CHECK(out.find("--manifest") != std::string::npos);
}

TEST_CASE("ingest reports counts and enforces expectations", "[cli]") {
    auto dir = scratch_dir("ingest");
    auto d = write_marker_corpus(dir, 5);

    std::string out;
    CHECK(run(cat({"ingest"}, corpus_flags(d)), &out) == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["snippets"] == 10);
    CHECK(j["human"] == 5);
    CHECK(j["chatgpt"] == 5);
    CHECK(j["provenance"] == "paired_Dbeta");
    CHECK(j["paired"] == true);

    CHECK(run(cat({"ingest", "--expect-human", "5", "--expect-chatgpt", "5"},
                  corpus_flags(d))) == 0);
    CHECK(run(cat({"ingest", "--expect-human", "6"}, corpus_flags(d))) == 1);

    // Normalized manifest round-trips through ingest again.
    auto norm = dir / "normalized.jsonl";
    CHECK(run(cat({"ingest", "--out", norm.string()}, corpus_flags(d))) == 0);
    CHECK(run({"ingest", "--manifest", norm.string(), "--root", d.root.string()}) == 0);

    // A manifest pointing at missing files is a validation error, not a crash.
    fs::remove(d.root / "h-t000.java");
    CHECK(run(cat({"ingest"}, corpus_flags(d))) == 1);
    fs::remove_all(dir);
}

TEST_CASE("preprocess applies a configuration to one file", "[cli]") {
    auto dir = scratch_dir("preprocess");
    auto in = dir / "Sample.java";
    io::atomic_write_file(in, "package p;\n// note\nclass Sample { }\n");

    std::string out;
    CHECK(run({"preprocess", "--config", "C4", "--in", in.string()}, &out) == 0);
    CHECK(out == "class Sample { }\n");

    // C1 is identity, --out writes the file instead of stdout.
    auto copied = dir / "copy.java";
    CHECK(run({"preprocess", "--config", "C1", "--in", in.string(), "--out", copied.string()},
              &out) == 0);
    CHECK(io::read_file(copied) == io::read_file(in));

    // Rename config with a map and key rewrites the class for human snippets.
    auto map = dir / "names.tsv";
    io::atomic_write_file(map, "k1\tRenamed\n");
    CHECK(run({"preprocess", "--config", "C6", "--in", in.string(), "--origin", "human",
               "--pairing-key", "k1", "--rename-map", map.string()},
              &out) == 0);
    CHECK(out.find("class Renamed") != std::string::npos);

    // Missing key under a rename config is a validation failure.
    CHECK(run({"preprocess", "--config", "C6", "--in", in.string(), "--origin", "human",
               "--rename-map", map.string()}) == 1);
    CHECK(run({"preprocess", "--config", "C9", "--in", in.string()}) == 1);
    fs::remove_all(dir);
}

TEST_CASE("split writes deterministic, reproducible files", "[cli]") {
    auto dir = scratch_dir("split");
    auto d = write_marker_corpus(dir, 40);
    auto out1 = dir / "split1.json", out2 = dir / "split2.json";

    auto args = cat({"split", "--ratios", "80:10:10", "--seed", "42", "--pair-aware"},
                    corpus_flags(d));
    std::string text;
    CHECK(run(cat(args, {"--out", out1.string()}), &text) == 0);
    CHECK(text == "train 64, validation 8, test 8\n");
    CHECK(run(cat(args, {"--out", out2.string()})) == 0);
    CHECK(io::read_file(out1) == io::read_file(out2));  // byte-identical reruns

    auto s = corpus::load_split(out1);
    CHECK(s.train.size() == 64);
    CHECK(s.pair_aware);
    CHECK(s.seed == 42);

    // A different seed moves ids around.
    CHECK(run(cat(cat({"split", "--seed", "7", "--pair-aware"}, corpus_flags(d)),
                  {"--out", out2.string()})) == 0);
    CHECK(io::read_file(out1) != io::read_file(out2));

    // Ratios that do not sum to 100 are rejected.
    CHECK(run(cat(cat({"split", "--ratios", "70:20:20"}, corpus_flags(d)),
                  {"--out", out2.string()})) == 1);
    CHECK(run(cat(cat({"split", "--ratios", "eighty:10:10"}, corpus_flags(d)),
                  {"--out", out2.string()})) == 1);
    fs::remove_all(dir);
}

TEST_CASE("train, predict, and eval round-trip through artifacts", "[cli]") {
    auto dir = scratch_dir("pipeline");
    auto d = write_marker_corpus(dir, 40);
    auto split_file = dir / "split.json";
    auto model_dir = dir / "model";

    REQUIRE(run(cat(cat({"split", "--pair-aware"}, corpus_flags(d)),
                    {"--out", split_file.string()})) == 0);
    REQUIRE(run(cat(cat({"train", "--split", split_file.string(), "--config", "C1",
                         "--backend", "linear", "--epochs", "20", "--learning-rate", "0.5"},
                        corpus_flags(d)),
                    {"--out", model_dir.string()})) == 0);
    CHECK(fs::exists(model_dir / "meta.json"));

    // Single-snippet prediction goes to stdout as one JSON object.
    std::string out;
    CHECK(run({"predict", "--model", model_dir.string(), "--input",
               (d.root / "g-t000.java").string()},
              &out) == 0);
    auto p = nlohmann::json::parse(out);
    CHECK(p["snippet_id"] == "g-t000");
    CHECK(p["label"] == "chatgpt");
    CHECK(p["score"].get<double>() >= 0.5);
    CHECK(run({"predict", "--model", model_dir.string(), "--input",
               (d.root / "h-t000.java").string(), "--id", "renamed"},
              &out) == 0);
    CHECK(nlohmann::json::parse(out)["snippet_id"] == "renamed");

    // Evaluation of the held-out part: the marker makes C1 perfect.
    auto report_file = dir / "eval.json";
    CHECK(run(cat(cat({"eval", "--model", model_dir.string(), "--split", split_file.string(),
                       "--part", "test"},
                      corpus_flags(d)),
                  {"--out", report_file.string()})) == 0);
    auto report = metrics::EvalReport::from_json(
        nlohmann::json::parse(io::read_file(report_file)));
    CHECK(report.accuracy == 1.0);
    CHECK(report.total_support == 8);
    CHECK(report.config == "C1");

    // Unknown split part and missing model directory are validation errors.
    CHECK(run(cat(cat({"eval", "--model", model_dir.string(), "--split", split_file.string(),
                       "--part", "holdout"},
                      corpus_flags(d)),
                  {"--out", report_file.string()})) == 1);
    CHECK(run({"predict", "--model", (dir / "nope").string(), "--input",
               (d.root / "g-t000.java").string()}) == 1);
    fs::remove_all(dir);
}

TEST_CASE("grid writes one report per configuration", "[cli]") {
    auto dir = scratch_dir("grid");
    auto d = write_marker_corpus(dir, 40);
    auto results = dir / "results";
    auto hp = dir / "hp.json";
    io::atomic_write_file(hp, "{\"epochs\": 20, \"learning_rate\": 0.5}\n");

    std::string out;
    REQUIRE(run({"grid", "--corpus", d.manifest.string(), "--root", d.root.string(),
                 "--configs", "C1,C2,C4", "--backend", "linear", "--hyperparams", hp.string(),
                 "--dataset", "markers", "--out", results.string()},
                &out) == 0);
    CHECK(out == "3 reports written to " + results.string() + "\n");
    CHECK(fs::exists(results / "C1.json"));
    CHECK(fs::exists(results / "C2.json"));
    CHECK(fs::exists(results / "C4.json"));

    auto c1 = metrics::EvalReport::from_json(
        nlohmann::json::parse(io::read_file(results / "C1.json")));
    CHECK(c1.dataset == "markers");
    CHECK(c1.accuracy >= 0.95);
    auto c4 = metrics::EvalReport::from_json(
        nlohmann::json::parse(io::read_file(results / "C4.json")));
    // Comment stripping destroys the marker; pairs collapse to coin flips.
    CHECK(c4.accuracy == 0.5);

    SECTION("report renders the result set in every format") {
        std::string md;
        CHECK(run({"report", "--in", results.string(), "--format", "md"}, &md) == 0);
        CHECK(md.find("## Precision") != std::string::npos);
        CHECK(md.find("| C1 | C2 | C4 | support |") != std::string::npos);
        CHECK(md.find("| accuracy |") != std::string::npos);

        std::string csv;
        CHECK(run({"report", "--in", results.string(), "--format", "csv"}, &csv) == 0);
        CHECK(csv.rfind("metric,row,C1,C2,C4,support\n", 0) == 0);
        CHECK(csv.find("precision,ChatGPT,") != std::string::npos);

        // JSON output re-parses to the same values that were on disk.
        auto json_file = dir / "combined.json";
        CHECK(run({"report", "--in", results.string(), "--format", "json", "--out",
                   json_file.string()}) == 0);
        auto arr = nlohmann::json::parse(io::read_file(json_file));
        REQUIRE(arr.size() == 3);
        CHECK(metrics::EvalReport::from_json(arr[0]).accuracy == c1.accuracy);
        CHECK(arr[0]["config"] == "C1");
        CHECK(arr[2]["config"] == "C4");

        CHECK(run({"report", "--in", results.string(), "--format", "pdf"}) == 1);
        CHECK(run({"report", "--in", (dir / "missing").string(), "--format", "md"}) == 1);
    }
    fs::remove_all(dir);
}

TEST_CASE("compare runs paired tests over comparison tables", "[cli]") {
    auto dir = scratch_dir("compare");
    // 5-vs-1 discordance: p = 0.21875 raw; Holm doubles it across two tables.
    std::string five_one = "snippet_id,truth,pred_a,pred_b\n";
    for (int i = 0; i < 5; ++i)
        five_one += "a" + std::to_string(i) + ",human,human,chatgpt\n";
    five_one += "b0,human,chatgpt,human\n";
    for (int i = 0; i < 4; ++i)
        five_one += "c" + std::to_string(i) + ",human,human,human\n";
    auto csv1 = dir / "one.csv";
    io::atomic_write_file(csv1, five_one);
    auto csv2 = dir / "two.csv";
    io::atomic_write_file(csv2, "snippet_id,truth,pred_a,pred_b\nz,human,human,human\n");

    std::string out;
    CHECK(run({"compare", "--csv", csv1.string(), "--csv", csv2.string(), "--label", "lopsided",
               "--label", "concordant"},
              &out) == 0);
    auto arr = nlohmann::json::parse(out);
    REQUIRE(arr.size() == 2);
    CHECK(arr[0]["label"] == "lopsided");
    CHECK(arr[0]["p_raw"].get<double>() == 0.21875);
    CHECK(arr[0]["p_adjusted"].get<double>() == 0.4375);
    CHECK(arr[0]["odds_ratio"].get<double>() == 5.0);
    CHECK(arr[1]["p_raw"].get<double>() == 1.0);
    CHECK(arr[1]["odds_ratio"].is_null());

    // Labels default to file stems; mismatched label counts are rejected.
    CHECK(run({"compare", "--csv", csv1.string()}, &out) == 0);
    CHECK(nlohmann::json::parse(out)[0]["label"] == "one");
    CHECK(run({"compare", "--csv", csv1.string(), "--label", "a", "--label", "b"}) == 1);
    CHECK(run({"compare", "--csv", (dir / "ghost.csv").string()}) == 1);
    fs::remove_all(dir);
}

TEST_CASE("baseline scores a replayed detector session", "[cli]") {
    auto dir = scratch_dir("baseline");
    auto d = write_marker_corpus(dir, 6);

    // Record an answer for every snippet: humans right, generated wrong.
    baselines::ReplayFixture fixture;
    for (int i = 0; i < 6; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "t%03d", i);
        fixture.add("h-" + std::string(buf),
                    "Your text is likely to be written entirely by a human");
        fixture.add("g-" + std::string(buf),
                    "Your text is most likely human written but there are some sentences "
                    "with low perplexities");
    }
    auto fixture_file = dir / "session.csv";
    baselines::save_fixture(fixture, fixture_file);

    std::string out;
    auto preds = dir / "preds.csv";
    CHECK(run(cat(cat({"baseline", "--id", "gptzero", "--fixture", fixture_file.string(),
                       "--per-class", "6", "--min-chars", "10"},
                      corpus_flags(d)),
                  {"--predictions-out", preds.string()}),
              &out) == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["baseline"] == "gptzero");
    CHECK(j["total"] == 12);
    CHECK(j["correct"] == 6);
    CHECK(j["accuracy"].get<double>() == 0.5);

    auto csv = io::read_file(preds);
    CHECK(csv.rfind("snippet_id,truth,predicted\n", 0) == 0);
    CHECK(csv.find("h-t000,human,human") != std::string::npos);
    CHECK(csv.find("g-t000,chatgpt,human") != std::string::npos);

    // Replay misses and over-demanding selection are validation errors.
    CHECK(run(cat({"baseline", "--id", "gptzero", "--fixture", fixture_file.string(),
                   "--per-class", "7"},
                  corpus_flags(d))) == 1);
    CHECK(run(cat({"baseline", "--id", "webdetector", "--fixture", fixture_file.string()},
                  corpus_flags(d))) == 1);
    fs::remove_all(dir);
}
