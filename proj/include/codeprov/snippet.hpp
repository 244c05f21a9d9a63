#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "codeprov/errors.hpp"

namespace codeprov {

enum class Origin { human, chatgpt };

inline std::string to_string(Origin o) {
    return o == Origin::human ? "human" : "chatgpt";
}

inline Origin origin_from_string(std::string_view s) {
    if (s == "human") return Origin::human;
    if (s == "chatgpt") return Origin::chatgpt;
    throw CorpusError("unknown label \"" + std::string(s) + "\" (expected human|chatgpt)");
}

// Number of Unicode code points, counting bytes that start a UTF-8 sequence.
inline std::size_t count_chars(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

// 1 + number of newlines for nonempty text, 0 for empty.
inline std::size_t count_loc(std::string_view text) {
    if (text.empty()) return 0;
    std::size_t n = 1;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

// One labeled code sample. char_count and loc are derived from text; use
// make_snippet / with_text so they never drift.
struct Snippet {
    std::string id;
    Origin origin = Origin::human;
    std::optional<std::string> pairing_key;
    std::string text;
    std::string language = "java";
    std::size_t char_count = 0;
    std::size_t loc = 0;
};

inline Snippet make_snippet(std::string id, Origin origin, std::string text,
                            std::optional<std::string> pairing_key = std::nullopt) {
    Snippet s;
    s.id = std::move(id);
    s.origin = origin;
    s.pairing_key = std::move(pairing_key);
    s.text = std::move(text);
    s.char_count = count_chars(s.text);
    s.loc = count_loc(s.text);
    return s;
}

// Same identity, new text, recomputed size statistics.
inline Snippet with_text(const Snippet& base, std::string text) {
    Snippet s = base;
    s.text = std::move(text);
    s.char_count = count_chars(s.text);
    s.loc = count_loc(s.text);
    return s;
}

}  // namespace codeprov
