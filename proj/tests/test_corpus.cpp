#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "codeprov/corpus.hpp"

using namespace codeprov;
namespace co = codeprov::corpus;
namespace fs = std::filesystem;

namespace {

// In-memory corpus shaped like the paired book dataset: 601 human snippets,
// 609 generated ones, where eight tasks have two generated counterparts.
co::Corpus book_shaped_corpus() {
    co::Corpus c;
    c.provenance = co::Provenance::paired_Dbeta;
    for (int i = 0; i < 601; ++i) {
        char key[16], id[16];
        std::snprintf(key, sizeof key, "k%04d", i);
        std::snprintf(id, sizeof id, "h%04d", i);
        c.snippets.push_back(make_snippet(id, Origin::human, "class A {}", key));
    }
    int next = 0;
    for (int i = 0; i < 601; ++i) {
        char key[16], id[16];
        std::snprintf(key, sizeof key, "k%04d", i);
        std::snprintf(id, sizeof id, "g%04d", next++);
        c.snippets.push_back(make_snippet(id, Origin::chatgpt, "class B {}", key));
    }
    for (int i = 0; i < 8; ++i) {  // split answers: extra generated members
        char key[16], id[16];
        std::snprintf(key, sizeof key, "k%04d", i);
        std::snprintf(id, sizeof id, "g%04d", next++);
        c.snippets.push_back(make_snippet(id, Origin::chatgpt, "class B2 {}", key));
    }
    return c;
}

std::set<std::string> as_set(const std::vector<std::string>& v) {
    return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("manifest round trip", "[corpus]") {
    auto dir = fs::temp_directory_path() / "codeprov-test-manifest";
    fs::create_directories(dir);
    auto path = dir / "manifest.jsonl";

    std::vector<co::ManifestRecord> records = {
        {"h-1", Origin::human, "ex1", "human/ex1.java", "book"},
        {"g-1", Origin::chatgpt, "ex1", "generated/ex1.java", "chat-transcript"},
        {"u-1", Origin::human, std::nullopt, "gists/u1.java", "gist"},
    };
    co::save_manifest(records, path);
    auto loaded = co::load_manifest(path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].id == "h-1");
    CHECK(loaded[0].origin == Origin::human);
    CHECK(loaded[1].origin == Origin::chatgpt);
    CHECK(loaded[1].pairing_key == "ex1");
    CHECK(!loaded[2].pairing_key.has_value());
    CHECK(loaded[2].source == "gist");

    SECTION("unknown label is rejected") {
        io::atomic_write_file(path, R"({"id":"x","label":"robot","path":"x.java"})" "\n");
        CHECK_THROWS_AS(co::load_manifest(path), CorpusError);
    }
    SECTION("broken JSON is reported with its line number") {
        io::atomic_write_file(path, "{\"id\":\"ok\",\"label\":\"human\",\"path\":\"a\"}\n{oops\n");
        try {
            co::load_manifest(path);
            FAIL("expected CorpusError");
        } catch (const CorpusError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("ingestion reads files and computes counts", "[corpus]") {
    auto dir = fs::temp_directory_path() / "codeprov-test-ingest";
    fs::create_directories(dir / "human");
    fs::create_directories(dir / "gen");
    io::atomic_write_file(dir / "human/a.java", "class A {}\n");
    io::atomic_write_file(dir / "gen/b.java", "class B { int x; }\n");

    std::vector<co::ManifestRecord> manifest = {
        {"h-1", Origin::human, "t1", "human/a.java", "book"},
        {"g-1", Origin::chatgpt, "t1", "gen/b.java", "chat"},
    };
    auto corpus = co::ingest_corpus(dir, manifest, co::Provenance::paired_Dbeta);
    CHECK(corpus.size() == 2);
    CHECK(corpus.counts() == co::Counts{1, 1});
    REQUIRE(corpus.find("h-1") != nullptr);
    CHECK(corpus.find("h-1")->text == "class A {}\n");
    CHECK(corpus.find("h-1")->loc == 2);  // trailing newline opens a second line
    CHECK(corpus.find("nope") == nullptr);

    SECTION("duplicate ids are rejected by name") {
        manifest.push_back({"h-1", Origin::human, "t2", "human/a.java", "book"});
        try {
            co::ingest_corpus(dir, manifest);
            FAIL("expected CorpusError");
        } catch (const CorpusError& e) {
            CHECK(std::string(e.what()).find("h-1") != std::string::npos);
        }
    }
    SECTION("missing file is attributed to its snippet") {
        manifest.push_back({"h-2", Origin::human, "t2", "human/absent.java", "book"});
        try {
            co::ingest_corpus(dir, manifest);
            FAIL("expected CorpusError");
        } catch (const CorpusError& e) {
            CHECK(std::string(e.what()).find("h-2") != std::string::npos);
        }
    }
    SECTION("paired corpora require pairing keys") {
        manifest.push_back({"h-2", Origin::human, std::nullopt, "human/a.java", "book"});
        CHECK_THROWS_AS(co::ingest_corpus(dir, manifest, co::Provenance::paired_P),
                        CorpusError);
    }
    SECTION("empty manifest gives an empty corpus") {
        auto empty = co::ingest_corpus(dir, std::vector<co::ManifestRecord>{});
        CHECK(empty.size() == 0);
        CHECK(empty.counts() == co::Counts{0, 0});
    }
    fs::remove_all(dir);
}

TEST_CASE("pair grouping", "[corpus]") {
    co::Corpus c;
    c.provenance = co::Provenance::paired_Dbeta;
    c.snippets.push_back(make_snippet("h-1", Origin::human, "a", "ex17_06"));
    c.snippets.push_back(make_snippet("g-1", Origin::chatgpt, "b", "ex17_06"));
    c.snippets.push_back(make_snippet("g-2", Origin::chatgpt, "c", "ex17_06"));

    SECTION("one human and n generated members share a group") {
        auto groups = co::pair_snippets(c);
        REQUIRE(groups.size() == 1);
        CHECK(groups[0].pairing_key == "ex17_06");
        CHECK(groups[0].human_ids == std::vector<std::string>{"h-1"});
        CHECK(as_set(groups[0].chatgpt_ids) == std::set<std::string>{"g-1", "g-2"});
    }
    SECTION("a key on only one side is an error naming the key") {
        c.snippets.push_back(make_snippet("g-3", Origin::chatgpt, "d", "orphan"));
        try {
            co::pair_snippets(c);
            FAIL("expected CorpusError");
        } catch (const CorpusError& e) {
            CHECK(std::string(e.what()).find("orphan") != std::string::npos);
        }
    }
    SECTION("drop_unmatched skips one-sided keys") {
        c.snippets.push_back(make_snippet("g-3", Origin::chatgpt, "d", "orphan"));
        auto groups = co::pair_snippets(c, /*drop_unmatched=*/true);
        CHECK(groups.size() == 1);
    }
    SECTION("book-shaped corpus groups to 601 with 609 generated members") {
        auto book = book_shaped_corpus();
        auto groups = co::pair_snippets(book);
        CHECK(groups.size() == 601);
        std::size_t generated = 0;
        for (const auto& g : groups) generated += g.chatgpt_ids.size();
        CHECK(generated == 609);
    }
}

TEST_CASE("mixing two corpora", "[corpus]") {
    co::Corpus u, p;
    u.provenance = co::Provenance::unpaired_U;
    p.provenance = co::Provenance::paired_P;
    for (int i = 0; i < 10; ++i) {
        u.snippets.push_back(make_snippet("u" + std::to_string(i),
                                          i % 2 ? Origin::human : Origin::chatgpt, "x"));
        p.snippets.push_back(make_snippet("p" + std::to_string(i),
                                          i % 2 ? Origin::human : Origin::chatgpt, "y",
                                          "k" + std::to_string(i)));
    }

    auto mixed = co::mix_datasets(u, p, 42);
    CHECK(mixed.provenance == co::Provenance::mixed_Dalpha);
    CHECK(mixed.size() == 20);

    SECTION("same seed, same order; id multiset preserved") {
        auto again = co::mix_datasets(u, p, 42);
        REQUIRE(again.size() == mixed.size());
        for (std::size_t i = 0; i < mixed.size(); ++i)
            CHECK(again.snippets[i].id == mixed.snippets[i].id);
        std::set<std::string> ids;
        for (const auto& s : mixed.snippets) ids.insert(s.id);
        CHECK(ids.size() == 20);
    }
    SECTION("different seed reorders") {
        auto other = co::mix_datasets(u, p, 43);
        bool same = true;
        for (std::size_t i = 0; i < mixed.size(); ++i)
            same = same && other.snippets[i].id == mixed.snippets[i].id;
        CHECK(!same);
    }
    SECTION("empty first corpus still shuffles the second") {
        co::Corpus empty;
        auto only_p = co::mix_datasets(empty, p, 7);
        CHECK(only_p.size() == 10);
    }
    SECTION("id collision is an error") {
        p.snippets.push_back(make_snippet("u3", Origin::human, "z"));
        CHECK_THROWS_AS(co::mix_datasets(u, p, 42), CorpusError);
    }
}

TEST_CASE("deterministic stratified split", "[corpus]") {
    auto book = book_shaped_corpus();

    SECTION("80:10:10 on 1,210 snippets lands at 968/121/121") {
        auto s = co::split(book, {80, 10, 10}, 42, /*stratified=*/true);
        CHECK(s.train.size() == 968);
        CHECK(s.validation.size() == 121);
        CHECK(s.test.size() == 121);
    }
    SECTION("per-class allocation follows largest remainders") {
        auto s = co::split(book, {80, 10, 10}, 42, true);
        auto count = [&](const std::vector<std::string>& part, char prefix) {
            std::size_t n = 0;
            for (const auto& id : part) n += id[0] == prefix;
            return n;
        };
        CHECK(count(s.train, 'h') == 481);
        CHECK(count(s.validation, 'h') == 60);
        CHECK(count(s.test, 'h') == 60);
        CHECK(count(s.train, 'g') == 487);
        CHECK(count(s.validation, 'g') == 61);
        CHECK(count(s.test, 'g') == 61);
    }
    SECTION("parts are disjoint and exhaustive") {
        auto s = co::split(book, {80, 10, 10}, 42, true);
        auto train = as_set(s.train), val = as_set(s.validation), test = as_set(s.test);
        CHECK(train.size() + val.size() + test.size() == book.size());
        std::set<std::string> all = train;
        all.insert(val.begin(), val.end());
        all.insert(test.begin(), test.end());
        CHECK(all.size() == book.size());
    }
    SECTION("same seed reproduces the identical assignment") {
        auto a = co::split(book, {80, 10, 10}, 42, true);
        auto b = co::split(book, {80, 10, 10}, 42, true);
        CHECK(a.train == b.train);
        CHECK(a.validation == b.validation);
        CHECK(a.test == b.test);
        auto c = co::split(book, {80, 10, 10}, 7, true);
        CHECK(a.train != c.train);
    }
    SECTION("bad ratios are rejected") {
        CHECK_THROWS_AS(co::split(book, {70, 20, 20}, 42, true), CorpusError);
        CHECK_THROWS_AS(co::split(book, {100, 0, 0}, 42, true), CorpusError);
    }
}

TEST_CASE("pair-aware split keeps groups together", "[corpus]") {
    auto book = book_shaped_corpus();
    auto s = co::split(book, {80, 10, 10}, 42, true, /*pair_aware=*/true);

    SECTION("part sizes still match the 968/121/121 allocation") {
        CHECK(s.train.size() == 968);
        CHECK(s.validation.size() == 121);
        CHECK(s.test.size() == 121);
    }
    SECTION("no pairing key straddles two parts") {
        std::map<std::string, std::set<int>> parts_of_key;
        for (int p = 0; p < 3; ++p)
            for (const auto& id : s.part(p)) {
                const auto* sn = book.find(id);
                REQUIRE(sn != nullptr);
                parts_of_key[*sn->pairing_key].insert(p);
            }
        for (const auto& [key, parts] : parts_of_key) {
            INFO("key " << key);
            CHECK(parts.size() == 1);
        }
    }
    SECTION("class balance stays within one snippet of the target") {
        auto count = [&](const std::vector<std::string>& part, char prefix) {
            std::size_t n = 0;
            for (const auto& id : part) n += id[0] == prefix;
            return n;
        };
        CHECK(count(s.train, 'h') == 481);
        CHECK(count(s.train, 'g') == 487);
        CHECK(count(s.validation, 'g') == 61);
        CHECK(count(s.test, 'g') == 61);
    }
    SECTION("two-member pairs split exactly when counts divide evenly") {
        co::Corpus pairs;
        pairs.provenance = co::Provenance::paired_Dbeta;
        for (int i = 0; i < 200; ++i) {
            std::string key = "t" + std::to_string(i);
            pairs.snippets.push_back(
                make_snippet("h" + std::to_string(i), Origin::human, "a", key));
            pairs.snippets.push_back(
                make_snippet("g" + std::to_string(i), Origin::chatgpt, "b", key));
        }
        auto ps = co::split(pairs, {80, 10, 10}, 9, true, true);
        CHECK(ps.train.size() == 320);
        CHECK(ps.validation.size() == 40);
        CHECK(ps.test.size() == 40);
    }
}

TEST_CASE("count validation report", "[corpus]") {
    auto book = book_shaped_corpus();

    SECTION("matching expectation passes") {
        auto report = co::validate_counts(book, co::Counts{601, 609});
        CHECK(report.ok);
        CHECK(report.to_text().find("counts match") != std::string::npos);
    }
    SECTION("mismatch reports the delta") {
        auto report = co::validate_counts(book, co::Counts{600, 609});
        CHECK(!report.ok);
        bool found = false;
        for (const auto& l : report.lines)
            if (l.label == "human" && l.delta() == 1) found = true;
        CHECK(found);
    }
    SECTION("empty corpus against zero expectation passes") {
        co::Corpus empty;
        CHECK(co::validate_counts(empty, co::Counts{0, 0}).ok);
    }
}
