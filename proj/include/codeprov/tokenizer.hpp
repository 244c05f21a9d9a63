#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codeprov/corpus.hpp"
#include "codeprov/errors.hpp"
#include "codeprov/io.hpp"

namespace codeprov::tokenizer {

// Word-or-symbol surface split: maximal runs of identifier-ish characters
// (letters, digits, _, $, multi-byte sequences) are one token, whitespace
// separates, every other character stands alone. Comments fall apart into
// their words, which is exactly what a style-sensitive classifier wants.
inline std::vector<std::string> surface_tokens(std::string_view text) {
    std::vector<std::string> out;
    auto is_word = [](unsigned char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '$' || c >= 0x80;
    };
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (is_word(c)) {
            while (i < text.size() && is_word(static_cast<unsigned char>(text[i]))) ++i;
        } else {
            ++i;
        }
        out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

// Id space: 0 = BOS, 1 = EOS, 2 = UNK, then vocabulary entries in sorted
// order starting at 3.
struct Vocabulary {
    static constexpr int bos_id = 0;
    static constexpr int eos_id = 1;
    static constexpr int unk_id = 2;
    static constexpr int reserved = 3;

    std::vector<std::string> tokens;  // id = index + reserved
    std::unordered_map<std::string, int> index;

    std::size_t size() const { return tokens.size() + reserved; }

    int id_of(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? unk_id : it->second;
    }
};

inline Vocabulary make_vocabulary(std::vector<std::string> sorted_tokens) {
    Vocabulary v;
    v.tokens = std::move(sorted_tokens);
    for (std::size_t i = 0; i < v.tokens.size(); ++i)
        v.index[v.tokens[i]] = static_cast<int>(i) + Vocabulary::reserved;
    return v;
}

inline Vocabulary build_reference_vocab(const std::vector<std::string>& texts) {
    if (texts.empty()) throw Error("cannot build a vocabulary from an empty corpus");
    std::set<std::string> seen;
    for (const auto& text : texts)
        for (auto& t : surface_tokens(text)) seen.insert(std::move(t));
    return make_vocabulary({seen.begin(), seen.end()});
}

inline Vocabulary build_reference_vocab(const corpus::Corpus& corpus) {
    std::vector<std::string> texts;
    texts.reserve(corpus.snippets.size());
    for (const auto& s : corpus.snippets) texts.push_back(s.text);
    return build_reference_vocab(texts);
}

// One token per line; line number equals id minus the reserved offset.
inline void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
    std::string out;
    for (const auto& t : vocab.tokens) out += t + "\n";
    io::atomic_write_file(path, out);
}

inline Vocabulary load_vocab(const std::filesystem::path& path) {
    std::vector<std::string> tokens;
    std::istringstream in(io::read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) tokens.push_back(line);
    }
    return make_vocabulary(std::move(tokens));
}

struct TokenSequence {
    std::vector<int> ids;
    std::vector<std::string> surface;  // parallel to ids; sentinels spelled out
    std::size_t max_len = 512;
    int bos_id = Vocabulary::bos_id;
    int eos_id = Vocabulary::eos_id;
};

// Sentinel-delimited, bounded encoding. A body longer than max_len - 2 keeps
// its head: authorship signals (package, imports, class name) sit at the top
// of a Java file, so the tail is the cheaper part to lose.
inline TokenSequence tokenize(std::string_view text, const Vocabulary& vocab,
                              std::size_t max_len = 512) {
    if (max_len < 2) throw Error("max_len must leave room for BOS and EOS");
    TokenSequence seq;
    seq.max_len = max_len;
    auto words = surface_tokens(text);
    if (words.size() > max_len - 2) words.resize(max_len - 2);
    seq.ids.reserve(words.size() + 2);
    seq.surface.reserve(words.size() + 2);
    seq.ids.push_back(Vocabulary::bos_id);
    seq.surface.emplace_back("BOS");
    for (auto& w : words) {
        seq.ids.push_back(vocab.id_of(w));
        seq.surface.push_back(std::move(w));
    }
    seq.ids.push_back(Vocabulary::eos_id);
    seq.surface.emplace_back("EOS");
    return seq;
}

// Joins surface tokens with single spaces. Re-tokenizing the result gives the
// same surface sequence back (fixed point), which the tests rely on.
inline std::string detokenize(const std::vector<std::string>& surface) {
    std::string out;
    for (const auto& t : surface) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace codeprov::tokenizer
