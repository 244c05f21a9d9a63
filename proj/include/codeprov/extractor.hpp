#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "codeprov/errors.hpp"
#include "codeprov/io.hpp"
#include "codeprov/lexer.hpp"
#include "codeprov/snippet.hpp"

namespace codeprov::extractor {

using lexer::CodeToken;
using lexer::TokenKind;

enum class ClassRename { keep, counterpart_name, human_chosen_name };

// A named combination of rewriting rules. The eight built-in presets C1..C8
// are cumulative; see preset().
struct PreprocessConfig {
    std::string name = "custom";
    bool strip_package_decl = false;
    bool strip_self_imports = false;
    bool strip_comments = false;
    bool strip_all_imports = false;
    bool strip_formatting = false;
    ClassRename class_rename = ClassRename::keep;
    // Package roots that mark an import as self-made, in addition to the
    // snippet's own declared package root.
    std::vector<std::string> project_prefixes;

    bool is_identity() const {
        return !strip_package_decl && !strip_self_imports && !strip_comments &&
               !strip_all_imports && !strip_formatting && class_rename == ClassRename::keep;
    }
};

inline bool is_valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    unsigned char c0 = static_cast<unsigned char>(s[0]);
    if (!((c0 >= 'a' && c0 <= 'z') || (c0 >= 'A' && c0 <= 'Z') || c0 == '_' || c0 == '$'))
        return false;
    for (unsigned char c : s.substr(1))
        if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '$'))
            return false;
    return !lexer::java_keywords().contains(s);
}

// pairing_key -> replacement class name, applied to human-written snippets.
struct RenameMap {
    enum class Provenance { counterpart, human };
    Provenance provenance = Provenance::human;
    std::map<std::string, std::string> entries;

    void add(std::string pairing_key, std::string class_name) {
        if (!is_valid_identifier(class_name))
            throw RenameError("invalid replacement class name \"" + class_name + "\"");
        entries[std::move(pairing_key)] = std::move(class_name);
    }
};

// One record per line: pairing_key<TAB>new_class_name.
inline RenameMap load_rename_map(const std::filesystem::path& path,
                                 RenameMap::Provenance provenance) {
    RenameMap map;
    map.provenance = provenance;
    std::istringstream in(io::read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw RenameError(path.string() + ":" + std::to_string(lineno) +
                              ": expected pairing_key<TAB>class_name");
        try {
            map.add(line.substr(0, tab), line.substr(tab + 1));
        } catch (const RenameError& e) {
            throw RenameError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return map;
}

inline void save_rename_map(const RenameMap& map, const std::filesystem::path& path) {
    std::string out;
    for (const auto& [key, name] : map.entries) out += key + "\t" + name + "\n";
    io::atomic_write_file(path, out);
}

namespace detail {

// Deletes the given byte spans from text. A line that held a deleted span and
// is left with only whitespace disappears entirely, including its newline.
// A deleted span whose tail reached the end of its line also takes the
// horizontal whitespace directly before it, so no invisible cruft is left.
inline std::string remove_spans(std::string_view text,
                                std::vector<std::pair<std::size_t, std::size_t>> spans) {
    std::vector<char> dead(text.size(), 0);
    for (auto [s, e] : spans)
        for (std::size_t i = s; i < e && i < text.size(); ++i) dead[i] = 1;

    // Trim horizontal whitespace before spans that run to end of line.
    for (auto [s, e] : spans) {
        std::size_t j = e;
        while (j < text.size() && text[j] != '\n' &&
               (dead[j] || lexer::is_horizontal_ws(text[j])))
            ++j;
        if (j >= text.size() || text[j] == '\n') {
            std::size_t k = s;
            while (k > 0 && lexer::is_horizontal_ws(text[k - 1])) {
                --k;
                dead[k] = 1;
            }
        }
    }

    // Line cleanup.
    std::size_t line_start = 0;
    while (line_start < text.size()) {
        std::size_t line_end = text.find('\n', line_start);  // index of '\n' or npos
        std::size_t content_end = (line_end == std::string_view::npos) ? text.size() : line_end;
        bool touched = false, survives = false;
        for (std::size_t i = line_start; i < content_end; ++i) {
            if (dead[i])
                touched = true;
            else if (!lexer::is_horizontal_ws(text[i]))
                survives = true;
        }
        if (touched && !survives) {
            for (std::size_t i = line_start; i < content_end; ++i) dead[i] = 1;
            if (line_end != std::string_view::npos) dead[line_end] = 1;
        }
        if (line_end == std::string_view::npos) break;
        line_start = line_end + 1;
    }

    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i)
        if (!dead[i]) out += text[i];
    return out;
}

inline bool is_significant(const CodeToken& t) {
    return t.kind != TokenKind::whitespace && t.kind != TokenKind::comment_line &&
           t.kind != TokenKind::comment_block;
}

// Statement starting at a top-level `package` or `import` keyword.
struct Statement {
    std::size_t begin = 0;       // byte offset of the keyword
    std::size_t end = 0;         // byte offset just past the ';'
    std::string first_segment;   // first identifier of the qualified name
    bool is_static = false;      // `import static ...`
};

inline std::vector<Statement> find_statements(const std::vector<CodeToken>& tokens,
                                              std::string_view keyword) {
    std::vector<Statement> out;
    int depth = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind == TokenKind::punctuation) {
            if (t.lexeme == "{") ++depth;
            else if (t.lexeme == "}") --depth;
            continue;
        }
        if (depth != 0 || t.kind != TokenKind::keyword || t.lexeme != keyword) continue;

        Statement st;
        st.begin = t.offset;
        std::size_t j = i + 1;
        for (; j < tokens.size(); ++j) {
            const auto& u = tokens[j];
            if (!is_significant(u)) continue;
            if (u.kind == TokenKind::punctuation && u.lexeme == ";") {
                st.end = u.offset + 1;
                break;
            }
            if (u.kind == TokenKind::keyword && u.lexeme == "static") {
                st.is_static = true;
                continue;
            }
            if (st.first_segment.empty() && u.kind == TokenKind::identifier)
                st.first_segment = u.lexeme;
        }
        if (st.end > st.begin) {
            out.push_back(std::move(st));
            i = j;
        }
    }
    return out;
}

}  // namespace detail

// Root segment of the snippet's own `package a.b.c;` declaration, if any.
inline std::optional<std::string> declared_package_root(std::string_view text) {
    auto tokens = lexer::lex_java(text);
    auto stmts = detail::find_statements(tokens, "package");
    if (stmts.empty() || stmts.front().first_segment.empty()) return std::nullopt;
    return stmts.front().first_segment;
}

inline bool has_package_declaration(std::string_view text) {
    auto tokens = lexer::lex_java(text);
    return !detail::find_statements(tokens, "package").empty();
}

// Removes any top-level `package ...;` statement together with its line.
inline std::string strip_package_declaration(std::string_view text) {
    auto tokens = lexer::lex_java(text);
    auto stmts = detail::find_statements(tokens, "package");
    if (stmts.empty()) return std::string(text);
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& st : stmts) spans.emplace_back(st.begin, st.end);
    return detail::remove_spans(text, spans);
}

namespace detail {

inline std::string strip_imports_impl(std::string_view text, bool all,
                                      const std::vector<std::string>& prefixes,
                                      const std::optional<std::string>& own_root) {
    auto tokens = lexer::lex_java(text);
    auto stmts = find_statements(tokens, "import");
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& st : stmts) {
        bool matches = all;
        if (!matches) {
            matches = (own_root && st.first_segment == *own_root) ||
                      std::find(prefixes.begin(), prefixes.end(), st.first_segment) !=
                          prefixes.end();
        }
        if (matches) spans.emplace_back(st.begin, st.end);
    }
    if (spans.empty()) return std::string(text);
    return remove_spans(text, spans);
}

}  // namespace detail

// Removes import statements whose first package segment matches a project
// prefix or the snippet's own declared package root. Other imports stay.
inline std::string strip_self_imports(std::string_view text,
                                      const std::vector<std::string>& project_prefixes) {
    return detail::strip_imports_impl(text, false, project_prefixes,
                                      declared_package_root(text));
}

// Removes every import statement, static imports included.
inline std::string strip_all_imports(std::string_view text) {
    return detail::strip_imports_impl(text, true, {}, std::nullopt);
}

// Removes all comments. Literals containing // or /* are untouched because
// the removal works on lexer tokens, not on raw text.
inline std::string strip_comments(std::string_view text) {
    auto tokens = lexer::lex_java(text);
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& t : tokens)
        if (t.kind == TokenKind::comment_line || t.kind == TokenKind::comment_block)
            spans.emplace_back(t.offset, t.offset + t.lexeme.size());
    if (spans.empty()) return std::string(text);
    return detail::remove_spans(text, spans);
}

// Name of the first type declared at brace depth zero.
inline std::optional<std::string> primary_class_name(std::string_view text) {
    auto tokens = lexer::lex_java(text);
    int depth = 0;
    std::string prev_significant;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind == TokenKind::punctuation) {
            if (t.lexeme == "{") ++depth;
            else if (t.lexeme == "}") --depth;
        }
        if (!detail::is_significant(t)) continue;
        if (depth == 0 && t.kind == TokenKind::keyword && prev_significant != "." &&
            (t.lexeme == "class" || t.lexeme == "interface" || t.lexeme == "enum")) {
            for (std::size_t j = i + 1; j < tokens.size(); ++j) {
                if (!detail::is_significant(tokens[j])) continue;
                if (tokens[j].kind == TokenKind::identifier) return tokens[j].lexeme;
                break;
            }
        }
        prev_significant = t.lexeme;
    }
    return std::nullopt;
}

// Replaces the first top-level type name and every identifier token exactly
// equal to it. Substrings of longer identifiers and string literals stay.
inline std::string rename_primary_class(std::string_view text, std::string_view new_name) {
    if (!is_valid_identifier(new_name))
        throw RenameError("replacement name \"" + std::string(new_name) +
                          "\" is not a valid identifier");
    auto old_name = primary_class_name(text);
    if (!old_name) throw RenameError("no top-level type declaration found");
    if (*old_name == new_name) return std::string(text);

    auto tokens = lexer::lex_java(text);
    for (const auto& t : tokens)
        if (t.kind == TokenKind::identifier && t.lexeme == new_name)
            throw NameCollisionError("replacement name \"" + std::string(new_name) +
                                     "\" collides with an existing identifier");

    std::string out;
    out.reserve(text.size());
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::identifier && t.lexeme == *old_name)
            out += new_name;
        else
            out += t.lexeme;
    }
    return out;
}

// Replaces every maximal run of \t, \n, \r outside string and character
// literals with a single space. Escape sequences inside literals survive.
inline std::string strip_formatting(std::string_view text) {
    auto tokens = lexer::lex_java(text);
    std::string out;
    out.reserve(text.size());
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::literal_string || t.kind == TokenKind::literal_char) {
            out += t.lexeme;
            continue;
        }
        for (std::size_t i = 0; i < t.lexeme.size();) {
            char c = t.lexeme[i];
            if (c == '\t' || c == '\n' || c == '\r') {
                out += ' ';
                while (i < t.lexeme.size() &&
                       (t.lexeme[i] == '\t' || t.lexeme[i] == '\n' || t.lexeme[i] == '\r'))
                    ++i;
            } else {
                out += c;
                ++i;
            }
        }
    }
    return out;
}

inline PreprocessConfig preset(std::string_view name) {
    PreprocessConfig c;
    c.name = std::string(name);
    if (name == "C1") return c;
    c.strip_package_decl = true;
    if (name == "C2") return c;
    c.strip_self_imports = true;
    if (name == "C3") return c;
    c.strip_comments = true;
    if (name == "C4") return c;
    if (name == "C5") {
        c.class_rename = ClassRename::counterpart_name;
        return c;
    }
    c.class_rename = ClassRename::human_chosen_name;
    if (name == "C6") return c;
    c.strip_all_imports = true;
    if (name == "C7") return c;
    c.strip_formatting = true;
    if (name == "C8") return c;
    throw Error("unknown preprocessing configuration \"" + std::string(name) + "\"");
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"C1", "C2", "C3", "C4",
                                                   "C5", "C6", "C7", "C8"};
    return names;
}

// Applies the configured rules in fixed order: package declaration, imports
// (all or self-made), comments, class rename, formatting. Class renaming
// targets human-written snippets; generated snippets carry no self-made name
// to replace, so the rename stage skips them.
inline Snippet apply_config(const Snippet& snippet, const PreprocessConfig& config,
                            const RenameMap* rename_map = nullptr) {
    if (config.is_identity()) return with_text(snippet, snippet.text);
    try {
        std::string text = snippet.text;
        auto own_root = declared_package_root(text);  // before the decl is stripped
        if (config.strip_package_decl) text = strip_package_declaration(text);
        if (config.strip_all_imports)
            text = strip_all_imports(text);
        else if (config.strip_self_imports)
            text = detail::strip_imports_impl(text, false, config.project_prefixes, own_root);
        if (config.strip_comments) text = strip_comments(text);
        if (config.class_rename != ClassRename::keep && snippet.origin == Origin::human) {
            if (!rename_map)
                throw RenameError("config " + config.name + " needs a rename map");
            if (!snippet.pairing_key)
                throw RenameError("snippet has no pairing key for class rename");
            auto it = rename_map->entries.find(*snippet.pairing_key);
            if (it == rename_map->entries.end())
                throw RenameError("rename map has no entry for pairing key \"" +
                                  *snippet.pairing_key + "\"");
            text = rename_primary_class(text, it->second);
        }
        if (config.strip_formatting) text = strip_formatting(text);
        return with_text(snippet, std::move(text));
    } catch (const LexError& e) {
        throw LexError(e.offset, "snippet " + snippet.id + ": " + e.what());
    } catch (const NameCollisionError& e) {
        throw NameCollisionError("snippet " + snippet.id + ": " + e.what());
    } catch (const RenameError& e) {
        throw RenameError("snippet " + snippet.id + ": " + e.what());
    }
}

}  // namespace codeprov::extractor
