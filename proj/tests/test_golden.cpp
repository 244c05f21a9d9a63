#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "codeprov/corpus.hpp"
#include "codeprov/extractor.hpp"
#include "codeprov/io.hpp"
#include "codeprov/snippet.hpp"

namespace {

namespace fs = std::filesystem;
using namespace codeprov;

fs::path data_dir() { return fs::path(CODEPROV_TEST_DATA_DIR); }

struct GoldenWorld {
    corpus::Corpus fixtures;
    extractor::RenameMap counterpart;
    extractor::RenameMap human;
    fs::path golden;
};

// Loads the fixture corpus and both rename maps the same way the
// regeneration tool does, so the test exercises the frozen files rather
// than a private re-derivation.
GoldenWorld load_world() {
    fs::path fixtures = data_dir() / "fixtures";
    GoldenWorld w;
    w.fixtures = corpus::ingest_corpus(fixtures, fixtures / "fixtures.jsonl");
    w.counterpart = extractor::load_rename_map(
        fixtures / "counterpart.tsv", extractor::RenameMap::Provenance::counterpart);
    w.human = extractor::load_rename_map(fixtures / "human.tsv",
                                         extractor::RenameMap::Provenance::human);
    w.golden = data_dir() / "golden";
    return w;
}

const extractor::RenameMap* map_for(const GoldenWorld& w,
                                    const extractor::PreprocessConfig& config) {
    if (config.class_rename == extractor::ClassRename::counterpart_name)
        return &w.counterpart;
    if (config.class_rename == extractor::ClassRename::human_chosen_name)
        return &w.human;
    return nullptr;
}

}  // namespace

TEST_CASE("golden corpus covers every fixture and config", "[golden]") {
    auto w = load_world();
    REQUIRE(w.fixtures.snippets.size() == 12);
    for (const auto& snippet : w.fixtures.snippets)
        for (const auto& name : extractor::preset_names()) {
            INFO(snippet.id << " / " << name);
            CHECK(fs::exists(w.golden / snippet.id / (name + ".txt")));
        }
}

TEST_CASE("every config output matches its golden file byte for byte", "[golden]") {
    auto w = load_world();
    for (const auto& snippet : w.fixtures.snippets)
        for (const auto& name : extractor::preset_names()) {
            auto config = extractor::preset(name);
            auto result = extractor::apply_config(snippet, config, map_for(w, config));
            auto frozen = io::read_file(w.golden / snippet.id / (name + ".txt"));
            INFO(snippet.id << " / " << name);
            REQUIRE(result.text == frozen);
        }
}

TEST_CASE("identity config reproduces the source bytes exactly", "[golden]") {
    auto w = load_world();
    auto records =
        corpus::load_manifest(data_dir() / "fixtures" / "fixtures.jsonl");
    REQUIRE(records.size() == w.fixtures.snippets.size());
    for (const auto& record : records) {
        auto raw = io::read_file(data_dir() / "fixtures" / record.path);
        const auto* snippet = w.fixtures.find(record.id);
        REQUIRE(snippet != nullptr);
        // Ingestion must not normalise anything, and C1 must pass the text
        // through untouched - the golden file pins both at once.
        CHECK(snippet->text == raw);
        auto frozen = io::read_file(w.golden / record.id / "C1.txt");
        CHECK(frozen == raw);
    }
}

TEST_CASE("preprocessing is idempotent for every config", "[golden]") {
    auto w = load_world();
    for (const auto& snippet : w.fixtures.snippets)
        for (const auto& name : extractor::preset_names()) {
            auto config = extractor::preset(name);
            const auto* map = map_for(w, config);
            auto once = extractor::apply_config(snippet, config, map);
            auto twice = extractor::apply_config(once, config, map);
            INFO(snippet.id << " / " << name);
            CHECK(twice.text == once.text);
        }
}

TEST_CASE("character count never grows along the cumulative chains", "[golden]") {
    auto w = load_world();
    // C5 and C6 rename the primary class, which may lengthen the text, so
    // monotonicity is claimed only along chains that differ by stripping.
    const std::vector<std::vector<std::string>> chains = {
        {"C1", "C2", "C3", "C4"}, {"C6", "C7", "C8"}};
    for (const auto& snippet : w.fixtures.snippets)
        for (const auto& chain : chains) {
            std::size_t previous = 0;
            bool first = true;
            for (const auto& name : chain) {
                auto config = extractor::preset(name);
                auto result =
                    extractor::apply_config(snippet, config, map_for(w, config));
                INFO(snippet.id << " / " << name);
                if (!first) CHECK(result.char_count <= previous);
                previous = result.char_count;
                first = false;
            }
        }
}
