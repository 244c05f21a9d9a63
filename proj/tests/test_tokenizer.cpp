#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "codeprov/tokenizer.hpp"

using namespace codeprov;
namespace tok = codeprov::tokenizer;
namespace fs = std::filesystem;

TEST_CASE("surface sequence of the worked example", "[tokenizer]") {
    const std::string example = R"java(public class Example {
    public static void main(String[] args) {
        int x = 5;
        int y = 7;
        int z = x + y;
        System.out.println(z);
    }
})java";
    auto vocab = tok::build_reference_vocab(std::vector<std::string>{example});
    auto seq = tok::tokenize(example, vocab);

    const std::vector<std::string> want = {
        "BOS", "public", "class",  "Example", "{",    "public", "static", "void",
        "main", "(",      "String", "[",       "]",    "args",   ")",      "{",
        "int",  "x",      "=",      "5",       ";",    "int",    "y",      "=",
        "7",    ";",      "int",    "z",       "=",    "x",      "+",      "y",
        ";",    "System", ".",      "out",     ".",    "println", "(",     "z",
        ")",    ";",      "}",      "}",       "EOS"};
    CHECK(seq.surface == want);
    REQUIRE(seq.ids.size() == want.size());
    CHECK(seq.ids.front() == tok::Vocabulary::bos_id);
    CHECK(seq.ids.back() == tok::Vocabulary::eos_id);
    for (std::size_t i = 1; i + 1 < seq.ids.size(); ++i)
        CHECK(seq.ids[i] >= tok::Vocabulary::reserved);  // all tokens known here
}

TEST_CASE("reference vocabulary enumerates sorted unique tokens", "[tokenizer]") {
    auto vocab = tok::build_reference_vocab({"int x;", "int y;"});
    CHECK(vocab.tokens == std::vector<std::string>{";", "int", "x", "y"});
    CHECK(vocab.size() == 7);  // four tokens plus BOS/EOS/UNK
    CHECK(vocab.id_of(";") == 3);
    CHECK(vocab.id_of("int") == 4);
    CHECK(vocab.id_of("x") == 5);
    CHECK(vocab.id_of("y") == 6);

    SECTION("unseen tokens map to UNK") {
        CHECK(vocab.id_of("z") == tok::Vocabulary::unk_id);
        auto seq = tok::tokenize("int z;", vocab);
        CHECK(seq.ids == std::vector<int>{0, 4, 2, 3, 1});
    }
    SECTION("empty corpus is rejected") {
        CHECK_THROWS_AS(tok::build_reference_vocab(std::vector<std::string>{}), Error);
    }
}

TEST_CASE("bounded sequences", "[tokenizer]") {
    auto vocab = tok::build_reference_vocab({"w"});

    SECTION("oversized input is head-truncated, sentinels intact") {
        std::string big;
        for (int i = 0; i < 10000; ++i) big += "w ";
        auto seq = tok::tokenize(big, vocab, 512);
        CHECK(seq.ids.size() == 512);
        CHECK(seq.ids.front() == tok::Vocabulary::bos_id);
        CHECK(seq.ids.back() == tok::Vocabulary::eos_id);
        CHECK(seq.surface[1] == "w");
    }
    SECTION("empty text still carries both sentinels") {
        auto seq = tok::tokenize("", vocab);
        CHECK(seq.ids == std::vector<int>{0, 1});
        CHECK(seq.surface == std::vector<std::string>{"BOS", "EOS"});
    }
    SECTION("max_len below 2 is rejected") {
        CHECK_THROWS_AS(tok::tokenize("x", vocab, 1), Error);
    }
    SECTION("max_len of exactly 2 keeps nothing but sentinels") {
        auto seq = tok::tokenize("int x;", vocab, 2);
        CHECK(seq.ids == std::vector<int>{0, 1});
    }
}

TEST_CASE("identical inputs give identical id sequences", "[tokenizer]") {
    auto vocab = tok::build_reference_vocab({"class A { int f() { return 42; } }"});
    auto a = tok::tokenize("class A { int f() { return 42; } }", vocab);
    auto b = tok::tokenize("class A { int f() { return 42; } }", vocab);
    CHECK(a.ids == b.ids);
}

TEST_CASE("detokenize then retokenize is a fixed point", "[tokenizer]") {
    const std::string samples[] = {
        "public class Example { int x = 5; }",
        "// a comment\nSystem.out.println(\"hi\");",
        "int[] a = {1, 2, 3};",
        "stra\xc3\x9f" "e += 1;",
    };
    for (const auto& s : samples) {
        auto once = tok::surface_tokens(s);
        auto again = tok::surface_tokens(tok::detokenize(once));
        INFO("input: " << s);
        CHECK(again == once);
    }
}

TEST_CASE("vocabulary file round trip", "[tokenizer]") {
    auto dir = fs::temp_directory_path() / "codeprov-test-vocab";
    fs::create_directories(dir);
    auto path = dir / "vocab.txt";

    auto vocab = tok::build_reference_vocab({"int x = 5; // five", "class A {}"});
    tok::save_vocab(vocab, path);
    auto loaded = tok::load_vocab(path);
    CHECK(loaded.tokens == vocab.tokens);
    for (const auto& t : vocab.tokens) CHECK(loaded.id_of(t) == vocab.id_of(t));
    CHECK(loaded.id_of("unseen-token") == tok::Vocabulary::unk_id);
    fs::remove_all(dir);
}
