#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "codeprov/errors.hpp"
#include "codeprov/io.hpp"
#include "codeprov/rng.hpp"
#include "codeprov/snippet.hpp"

namespace codeprov::corpus {

enum class Provenance { unpaired_U, paired_P, mixed_Dalpha, paired_Dbeta, custom };

inline std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::unpaired_U: return "unpaired_U";
        case Provenance::paired_P: return "paired_P";
        case Provenance::mixed_Dalpha: return "mixed_Dalpha";
        case Provenance::paired_Dbeta: return "paired_Dbeta";
        case Provenance::custom: return "custom";
    }
    return "custom";
}

inline Provenance provenance_from_string(std::string_view s) {
    if (s == "unpaired_U") return Provenance::unpaired_U;
    if (s == "paired_P") return Provenance::paired_P;
    if (s == "mixed_Dalpha") return Provenance::mixed_Dalpha;
    if (s == "paired_Dbeta") return Provenance::paired_Dbeta;
    if (s == "custom") return Provenance::custom;
    throw CorpusError("unknown corpus provenance \"" + std::string(s) + "\"");
}

struct Counts {
    std::size_t human = 0;
    std::size_t chatgpt = 0;
    std::size_t total() const { return human + chatgpt; }
    bool operator==(const Counts&) const = default;
};

struct Corpus {
    std::vector<Snippet> snippets;
    Provenance provenance = Provenance::custom;

    Counts counts() const {
        Counts c;
        for (const auto& s : snippets)
            (s.origin == Origin::human ? c.human : c.chatgpt) += 1;
        return c;
    }
    std::size_t size() const { return snippets.size(); }
    bool is_paired() const {
        return provenance == Provenance::paired_P || provenance == Provenance::paired_Dbeta;
    }
    const Snippet* find(std::string_view id) const {
        for (const auto& s : snippets)
            if (s.id == id) return &s;
        return nullptr;
    }
};

struct PairGroup {
    std::string pairing_key;
    std::vector<std::string> human_ids;
    std::vector<std::string> chatgpt_ids;
};

struct DatasetSplit {
    std::vector<std::string> train, validation, test;
    std::array<int, 3> ratios{80, 10, 10};
    std::uint64_t seed = 42;
    bool stratified = true;
    bool pair_aware = false;

    const std::vector<std::string>& part(std::size_t i) const {
        return i == 0 ? train : i == 1 ? validation : test;
    }
};

// One JSON object per manifest line; `path` is relative to the corpus root.
struct ManifestRecord {
    std::string id;
    Origin origin = Origin::human;
    std::optional<std::string> pairing_key;
    std::string path;
    std::string source;
};

inline std::vector<ManifestRecord> load_manifest(const std::filesystem::path& path) {
    std::vector<ManifestRecord> out;
    std::istringstream in(io::read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw CorpusError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        ManifestRecord rec;
        try {
            rec.id = j.at("id").get<std::string>();
            rec.origin = origin_from_string(j.at("label").get<std::string>());
            rec.path = j.at("path").get<std::string>();
            if (j.contains("pairing_key") && !j["pairing_key"].is_null())
                rec.pairing_key = j["pairing_key"].get<std::string>();
            if (j.contains("source") && !j["source"].is_null())
                rec.source = j["source"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw CorpusError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

inline void save_manifest(const std::vector<ManifestRecord>& records,
                          const std::filesystem::path& path) {
    std::string out;
    for (const auto& rec : records) {
        nlohmann::json j;
        j["id"] = rec.id;
        j["label"] = codeprov::to_string(rec.origin);
        j["pairing_key"] = rec.pairing_key ? nlohmann::json(*rec.pairing_key)
                                           : nlohmann::json(nullptr);
        j["path"] = rec.path;
        j["source"] = rec.source;
        out += j.dump() + "\n";
    }
    io::atomic_write_file(path, out);
}

// Reads every file the manifest references. Labels come from the manifest
// alone; directory names carry no meaning.
inline Corpus ingest_corpus(const std::filesystem::path& root,
                            const std::vector<ManifestRecord>& manifest,
                            Provenance provenance = Provenance::custom) {
    Corpus corpus;
    corpus.provenance = provenance;
    std::set<std::string> seen;
    for (const auto& rec : manifest) {
        if (!seen.insert(rec.id).second)
            throw CorpusError("duplicate snippet id \"" + rec.id + "\"");
        std::string text;
        try {
            text = io::read_file(root / rec.path);
        } catch (const Error& e) {
            throw CorpusError("snippet \"" + rec.id + "\": " + e.what());
        }
        auto s = make_snippet(rec.id, rec.origin, std::move(text), rec.pairing_key);
        if (corpus.is_paired() && !s.pairing_key)
            throw CorpusError("snippet \"" + rec.id + "\" lacks a pairing key in a paired corpus");
        corpus.snippets.push_back(std::move(s));
    }
    return corpus;
}

inline Corpus ingest_corpus(const std::filesystem::path& root,
                            const std::filesystem::path& manifest_path,
                            Provenance provenance = Provenance::custom) {
    return ingest_corpus(root, load_manifest(manifest_path), provenance);
}

// Groups snippets by pairing_key. A key present on only one side is an error
// unless drop_unmatched is set, in which case the group is silently skipped.
inline std::vector<PairGroup> pair_snippets(const Corpus& corpus, bool drop_unmatched = false) {
    std::map<std::string, PairGroup> groups;
    for (const auto& s : corpus.snippets) {
        if (!s.pairing_key)
            throw CorpusError("snippet \"" + s.id + "\" has no pairing key");
        auto& g = groups[*s.pairing_key];
        g.pairing_key = *s.pairing_key;
        (s.origin == Origin::human ? g.human_ids : g.chatgpt_ids).push_back(s.id);
    }
    std::vector<PairGroup> out;
    std::vector<std::string> unmatched;
    for (auto& [key, g] : groups) {
        if (g.human_ids.empty() || g.chatgpt_ids.empty()) {
            if (!drop_unmatched) unmatched.push_back(key);
            continue;
        }
        out.push_back(std::move(g));
    }
    if (!unmatched.empty()) {
        std::string msg = "unmatched pairing keys:";
        for (const auto& k : unmatched) msg += " " + k;
        throw CorpusError(msg);
    }
    return out;
}

// Union of two corpora with disjoint ids, deterministically shuffled.
inline Corpus mix_datasets(const Corpus& u, const Corpus& p, std::uint64_t seed) {
    Corpus out;
    out.provenance = Provenance::mixed_Dalpha;
    out.snippets = u.snippets;
    std::set<std::string> ids;
    for (const auto& s : u.snippets) ids.insert(s.id);
    for (const auto& s : p.snippets) {
        if (ids.contains(s.id))
            throw CorpusError("id collision between corpora: \"" + s.id + "\"");
        out.snippets.push_back(s);
    }
    std::sort(out.snippets.begin(), out.snippets.end(),
              [](const Snippet& a, const Snippet& b) { return a.id < b.id; });
    std::mt19937_64 engine(seed);
    rng::shuffle(out.snippets, engine);
    return out;
}

namespace detail {

// Largest-remainder allocation of `total` into three parts; ties between
// equal remainders go to the earlier part.
inline std::array<std::size_t, 3> allocate(std::size_t total, const std::array<int, 3>& ratios) {
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        double exact = static_cast<double>(total) * ratios[i] / 100.0;
        sizes[i] = static_cast<std::size_t>(exact);
        remainders[i] = exact - static_cast<double>(sizes[i]);
        assigned += sizes[i];
    }
    for (std::size_t left = total - assigned; left > 0; --left) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (remainders[i] > remainders[best]) best = i;
        sizes[best] += 1;
        remainders[best] = -1.0;
    }
    return sizes;
}

}  // namespace detail

// Deterministic train/validation/test partition. Stratified mode allocates
// per origin class so each part mirrors the corpus balance; pair-aware mode
// additionally keeps every pairing_key group inside one part, assigning
// shuffled groups (largest first) to the part with the most room.
inline DatasetSplit split(const Corpus& corpus, std::array<int, 3> ratios, std::uint64_t seed,
                          bool stratified = true, bool pair_aware = false) {
    if (ratios[0] + ratios[1] + ratios[2] != 100)
        throw CorpusError("split ratios must sum to 100");
    for (int r : ratios)
        if (r <= 0) throw CorpusError("split ratios must be positive");

    DatasetSplit out;
    out.ratios = ratios;
    out.seed = seed;
    out.stratified = stratified;
    out.pair_aware = pair_aware;
    std::array<std::vector<std::string>*, 3> parts = {&out.train, &out.validation, &out.test};
    std::mt19937_64 engine(seed);

    if (pair_aware) {
        // Group members stay together; classes are balanced greedily.
        struct Group {
            std::string key;
            std::vector<std::string> ids;
            std::array<std::size_t, 2> by_class{};  // human, chatgpt
        };
        std::map<std::string, Group> by_key;
        std::size_t singleton = 0;
        for (const auto& s : corpus.snippets) {
            std::string key = s.pairing_key ? "k:" + *s.pairing_key
                                            : "s:" + std::to_string(singleton++);
            auto& g = by_key[key];
            g.key = key;
            g.ids.push_back(s.id);
            g.by_class[s.origin == Origin::human ? 0 : 1] += 1;
        }
        std::vector<Group> groups;
        for (auto& [_, g] : by_key) {
            std::sort(g.ids.begin(), g.ids.end());
            groups.push_back(std::move(g));
        }
        std::sort(groups.begin(), groups.end(),
                  [](const Group& a, const Group& b) { return a.key < b.key; });
        rng::shuffle(groups, engine);
        std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
            return a.ids.size() > b.ids.size();
        });

        auto counts = corpus.counts();
        std::array<std::array<std::size_t, 3>, 2> target = {
            detail::allocate(counts.human, ratios), detail::allocate(counts.chatgpt, ratios)};
        std::array<std::array<std::size_t, 3>, 2> filled{};

        for (const auto& g : groups) {
            std::size_t best = 0;
            long best_overflow = -1;
            double best_need = -1.0;
            for (std::size_t p = 0; p < 3; ++p) {
                long overflow = 0;
                std::size_t part_target = 0, part_filled = 0;
                for (std::size_t c = 0; c < 2; ++c) {
                    long room = static_cast<long>(target[c][p]) -
                                static_cast<long>(filled[c][p] + g.by_class[c]);
                    if (room < 0) overflow -= room;
                    part_target += target[c][p];
                    part_filled += filled[c][p];
                }
                double need = part_target == 0
                                  ? 0.0
                                  : static_cast<double>(part_target - part_filled) /
                                        static_cast<double>(part_target);
                if (best_overflow < 0 || overflow < best_overflow ||
                    (overflow == best_overflow && need > best_need)) {
                    best = p;
                    best_overflow = overflow;
                    best_need = need;
                }
            }
            for (std::size_t c = 0; c < 2; ++c) filled[c][best] += g.by_class[c];
            for (const auto& id : g.ids) parts[best]->push_back(id);
        }
    } else if (stratified) {
        for (Origin origin : {Origin::chatgpt, Origin::human}) {  // class name order
            std::vector<std::string> ids;
            for (const auto& s : corpus.snippets)
                if (s.origin == origin) ids.push_back(s.id);
            std::sort(ids.begin(), ids.end());
            rng::shuffle(ids, engine);
            auto sizes = detail::allocate(ids.size(), ratios);
            std::size_t at = 0;
            for (std::size_t p = 0; p < 3; ++p)
                for (std::size_t i = 0; i < sizes[p]; ++i) parts[p]->push_back(ids[at++]);
        }
    } else {
        std::vector<std::string> ids;
        for (const auto& s : corpus.snippets) ids.push_back(s.id);
        std::sort(ids.begin(), ids.end());
        rng::shuffle(ids, engine);
        auto sizes = detail::allocate(ids.size(), ratios);
        std::size_t at = 0;
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < sizes[p]; ++i) parts[p]->push_back(ids[at++]);
    }

    for (auto* part : parts) std::sort(part->begin(), part->end());

    if (stratified) {
        // A part may miss its per-class share by at most one snippet.
        std::array<Counts, 3> got{};
        std::map<std::string, Origin> origin_of;
        for (const auto& s : corpus.snippets) origin_of[s.id] = s.origin;
        for (std::size_t p = 0; p < 3; ++p)
            for (const auto& id : *parts[p])
                (origin_of[id] == Origin::human ? got[p].human : got[p].chatgpt) += 1;
        auto counts = corpus.counts();
        for (std::size_t p = 0; p < 3; ++p) {
            double human_exact = static_cast<double>(counts.human) * ratios[p] / 100.0;
            double chatgpt_exact = static_cast<double>(counts.chatgpt) * ratios[p] / 100.0;
            if (std::abs(static_cast<double>(got[p].human) - human_exact) > 1.0 + 1e-9 ||
                std::abs(static_cast<double>(got[p].chatgpt) - chatgpt_exact) > 1.0 + 1e-9)
                throw CorpusError("corpus too small or pairs too lumpy to honor stratification");
        }
    }
    return out;
}

// Split files carry the id lists plus everything needed to reproduce them.
inline void save_split(const DatasetSplit& s, const std::filesystem::path& path) {
    nlohmann::json j = {{"ratios", s.ratios},
                        {"seed", s.seed},
                        {"stratified", s.stratified},
                        {"pair_aware", s.pair_aware},
                        {"train", s.train},
                        {"validation", s.validation},
                        {"test", s.test}};
    io::atomic_write_file(path, j.dump(2) + "\n");
}

inline DatasetSplit load_split(const std::filesystem::path& path) {
    DatasetSplit s;
    try {
        auto j = nlohmann::json::parse(io::read_file(path));
        auto ratios = j.at("ratios").get<std::vector<int>>();
        if (ratios.size() != 3) throw CorpusError("split file needs exactly 3 ratios");
        std::copy(ratios.begin(), ratios.end(), s.ratios.begin());
        s.seed = j.at("seed").get<std::uint64_t>();
        s.stratified = j.at("stratified").get<bool>();
        s.pair_aware = j.at("pair_aware").get<bool>();
        s.train = j.at("train").get<std::vector<std::string>>();
        s.validation = j.at("validation").get<std::vector<std::string>>();
        s.test = j.at("test").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw CorpusError(path.string() + ": not a split file: " + e.what());
    }
    return s;
}

struct ValidationReport {
    struct Line {
        std::string label;
        std::size_t expected = 0;
        std::size_t actual = 0;
        long delta() const { return static_cast<long>(actual) - static_cast<long>(expected); }
    };
    std::vector<Line> lines;
    bool ok = true;

    std::string to_text() const {
        std::string out;
        for (const auto& l : lines) {
            out += l.label + ": expected " + std::to_string(l.expected) + ", actual " +
                   std::to_string(l.actual);
            if (l.delta() != 0) out += " (delta " + std::to_string(l.delta()) + ")";
            out += "\n";
        }
        out += ok ? "counts match\n" : "counts mismatch\n";
        return out;
    }
};

inline ValidationReport validate_counts(const Corpus& corpus, const Counts& expected) {
    auto actual = corpus.counts();
    ValidationReport report;
    report.lines.push_back({"human", expected.human, actual.human});
    report.lines.push_back({"chatgpt", expected.chatgpt, actual.chatgpt});
    report.lines.push_back({"total", expected.total(), actual.total()});
    for (const auto& l : report.lines)
        if (l.delta() != 0) report.ok = false;
    return report;
}

}  // namespace codeprov::corpus
