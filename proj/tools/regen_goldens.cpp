// Regenerates the preprocessing golden files from the fixture corpus. Run
// after an intentional extractor change, then review the diff before
// committing - the goldens are the frozen contract, not a mirror of the code.
//
// Usage: regen_goldens <fixtures-dir> <golden-dir>

#include <filesystem>
#include <iostream>

#include "codeprov/corpus.hpp"
#include "codeprov/extractor.hpp"
#include "codeprov/io.hpp"

int main(int argc, char** argv) {
    using namespace codeprov;
    if (argc != 3) {
        std::cerr << "usage: regen_goldens <fixtures-dir> <golden-dir>\n";
        return 1;
    }
    std::filesystem::path fixtures = argv[1], golden = argv[2];
    try {
        auto c = corpus::ingest_corpus(fixtures, fixtures / "fixtures.jsonl");
        auto counterpart = extractor::load_rename_map(
            fixtures / "counterpart.tsv", extractor::RenameMap::Provenance::counterpart);
        auto human = extractor::load_rename_map(fixtures / "human.tsv",
                                                extractor::RenameMap::Provenance::human);
        int written = 0;
        for (const auto& snippet : c.snippets) {
            for (const auto& name : extractor::preset_names()) {
                auto config = extractor::preset(name);
                const extractor::RenameMap* map = nullptr;
                if (config.class_rename == extractor::ClassRename::counterpart_name)
                    map = &counterpart;
                else if (config.class_rename == extractor::ClassRename::human_chosen_name)
                    map = &human;
                auto result = extractor::apply_config(snippet, config, map);
                io::atomic_write_file(golden / snippet.id / (name + ".txt"), result.text);
                ++written;
            }
        }
        std::cout << written << " golden files written to " << golden.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
