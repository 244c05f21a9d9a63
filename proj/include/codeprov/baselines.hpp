#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "codeprov/corpus.hpp"
#include "codeprov/errors.hpp"
#include "codeprov/io.hpp"
#include "codeprov/rng.hpp"
#include "codeprov/snippet.hpp"

namespace codeprov::baselines {

enum class BaselineId { gptzero, openai_classifier };

inline std::string to_string(BaselineId id) {
    return id == BaselineId::gptzero ? "gptzero" : "openai_classifier";
}

inline BaselineId baseline_id_from_string(const std::string& s) {
    if (s == "gptzero") return BaselineId::gptzero;
    if (s == "openai_classifier") return BaselineId::openai_classifier;
    throw BaselineError("unknown baseline: " + s);
}

struct VerdictRule {
    std::string answer_text;
    Origin label;
};

// Ordered, first-match-wins mapping from a detector's verbatim answer text to
// a binary label. Matching is exact after whitespace normalization - fuzzy
// matching would make the mapping unauditable.
struct VerdictMapping {
    BaselineId baseline_id = BaselineId::gptzero;
    std::vector<VerdictRule> rules;
};

// Collapses whitespace runs to single spaces and trims the ends, so that line
// wrapping in a recorded answer cannot defeat the match.
inline std::string normalize_answer(const std::string& text) {
    std::string out;
    bool pending_space = false;
    for (char ch : text) {
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') {
            if (!out.empty()) pending_space = true;
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += ch;
        }
    }
    return out;
}

// The four answer strings each detector can return.
inline VerdictMapping default_mapping(BaselineId id) {
    VerdictMapping m;
    m.baseline_id = id;
    if (id == BaselineId::gptzero) {
        m.rules = {
            {"Your text is likely to be written entirely by a human", Origin::human},
            {"Your text is most likely human written but there are some sentences "
             "with low perplexities",
             Origin::human},
            {"Your text is likely to be written entirely by AI", Origin::chatgpt},
            {"Your text may include parts written by AI", Origin::chatgpt},
        };
    } else {
        m.rules = {
            {"The classifier considers the text to be unclear if it is AI-generated",
             Origin::human},
            {"The classifier considers the text to be unlikely AI-generated", Origin::human},
            {"The classifier considers the text to be likely AI-generated", Origin::chatgpt},
            {"The classifier considers the text to be possibly AI-generated", Origin::chatgpt},
        };
    }
    return m;
}

inline Origin map_verdict(const VerdictMapping& mapping, const std::string& answer_text) {
    const std::string normalized = normalize_answer(answer_text);
    for (const auto& rule : mapping.rules)
        if (normalize_answer(rule.answer_text) == normalized) return rule.label;
    throw BaselineError("unmapped verdict for " + to_string(mapping.baseline_id) + ": \"" +
                        answer_text + "\"");
}

inline Origin map_verdict(BaselineId id, const std::string& answer_text) {
    return map_verdict(default_mapping(id), answer_text);
}

// Character-count gate for detectors with input size requirements. The lower
// bound is exclusive ("more than N characters"); the upper bound, when
// present, is inclusive.
struct LengthConstraint {
    std::size_t min_chars = 0;
    std::optional<std::size_t> max_chars;

    void validate() const {
        if (max_chars && *max_chars <= min_chars)
            throw BaselineError("max_chars must exceed min_chars");
    }

    bool admits(const Snippet& s) const {
        if (s.char_count <= min_chars) return false;
        if (max_chars && s.char_count > *max_chars) return false;
        return true;
    }
};

// Picks n_per_class eligible snippets per class, seed-deterministically and
// independently of corpus order: eligible ids are sorted, shuffled with the
// seed, and the head taken. Output is chatgpt then human, each sorted by id.
inline std::vector<Snippet> select_comparison_set(const corpus::Corpus& c,
                                                  const LengthConstraint& constraint,
                                                  std::size_t n_per_class,
                                                  std::uint32_t seed) {
    constraint.validate();
    std::vector<const Snippet*> eligible[2];  // chatgpt, human
    for (const auto& s : c.snippets)
        if (constraint.admits(s))
            eligible[s.origin == Origin::chatgpt ? 0 : 1].push_back(&s);
    if (eligible[0].size() < n_per_class || eligible[1].size() < n_per_class)
        throw BaselineError("not enough eligible snippets: chatgpt " +
                            std::to_string(eligible[0].size()) + ", human " +
                            std::to_string(eligible[1].size()) + "; need " +
                            std::to_string(n_per_class) + " per class");

    std::mt19937_64 engine(seed);
    std::vector<Snippet> out;
    for (auto& pool : eligible) {
        std::sort(pool.begin(), pool.end(),
                  [](const Snippet* a, const Snippet* b) { return a->id < b->id; });
        rng::shuffle(pool, engine);
        std::vector<const Snippet*> chosen(pool.begin(),
                                           pool.begin() + static_cast<long>(n_per_class));
        std::sort(chosen.begin(), chosen.end(),
                  [](const Snippet* a, const Snippet* b) { return a->id < b->id; });
        for (const Snippet* s : chosen) out.push_back(*s);
    }
    return out;
}

// One recorded detector session: (snippet_id, answer_text) rows in file order.
struct ReplayFixture {
    std::vector<std::pair<std::string, std::string>> rows;
    std::map<std::string, std::size_t> index;

    void add(const std::string& id, const std::string& answer) {
        auto it = index.find(id);
        if (it != index.end()) {
            rows[it->second].second = answer;
            return;
        }
        index[id] = rows.size();
        rows.emplace_back(id, answer);
    }

    const std::string* find(const std::string& id) const {
        auto it = index.find(id);
        return it == index.end() ? nullptr : &rows[it->second].second;
    }
};

namespace detail {

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        out += ch;
        if (ch == '"') out += '"';
    }
    out += '"';
    return out;
}

}  // namespace detail

// Fixture CSV: snippet_id,answer_text with the answer always quoted. The
// parser also accepts bare answers and quoted answers spanning lines.
inline ReplayFixture load_fixture(const std::filesystem::path& path) {
    const std::string text = io::read_file(path);
    ReplayFixture fixture;
    std::size_t pos = 0, lineno = 1;
    auto fail = [&](const std::string& what) {
        throw BaselineError(path.string() + ":" + std::to_string(lineno) + ": " + what);
    };
    while (pos < text.size()) {
        if (text[pos] == '\n') {  // blank line
            ++pos, ++lineno;
            continue;
        }
        std::size_t comma = text.find(',', pos);
        std::size_t eol = text.find('\n', pos);
        if (comma == std::string::npos || (eol != std::string::npos && comma > eol))
            fail("expected snippet_id,answer_text");
        std::string id = text.substr(pos, comma - pos);
        pos = comma + 1;
        std::string answer;
        if (pos < text.size() && text[pos] == '"') {
            ++pos;
            while (true) {
                if (pos >= text.size()) fail("unterminated quoted answer");
                if (text[pos] == '"') {
                    if (pos + 1 < text.size() && text[pos + 1] == '"') {
                        answer += '"';
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                if (text[pos] == '\n') ++lineno;
                answer += text[pos++];
            }
            if (pos < text.size() && text[pos] != '\n') fail("garbage after closing quote");
        } else {
            std::size_t end = eol == std::string::npos ? text.size() : eol;
            answer = text.substr(pos, end - pos);
            if (!answer.empty() && answer.back() == '\r') answer.pop_back();
            pos = end;
        }
        if (pos < text.size() && text[pos] == '\n') ++pos, ++lineno;
        if (id == "snippet_id") continue;  // header row
        fixture.add(id, answer);
    }
    return fixture;
}

inline void save_fixture(const ReplayFixture& fixture, const std::filesystem::path& path) {
    std::string out = "snippet_id,answer_text\n";
    for (const auto& [id, answer] : fixture.rows)
        out += id + "," + detail::csv_quote(answer) + "\n";
    io::atomic_write_file(path, out);
}

enum class QueryMode { live, replay };

// Live-mode wiring. The endpoint speaks a minimal JSON protocol: POST
// {"snippet_id", "text"}, response {"answer_text"}. The token is read from
// the named environment variable at request time and sent as a bearer header
// when present.
struct LiveConfig {
    std::string endpoint_url;
    std::string auth_token_env = "CODEPROV_BASELINE_TOKEN";
    int min_interval_ms = 1000;
    int max_retries = 3;
};

// Queries one external detector, replay-first: CI runs never touch the
// network. Live mode serializes requests, honors the minimum interval, and
// records every fresh answer to the fixture so a session can be frozen.
class BaselineClient {
public:
    static BaselineClient replay(BaselineId id, const std::filesystem::path& fixture_path) {
        BaselineClient client(id, fixture_path);
        client.fixture_ = load_fixture(fixture_path);
        return client;
    }

    // An existing fixture is reloaded so recording accumulates across runs.
    static BaselineClient live(BaselineId id, LiveConfig config,
                               const std::filesystem::path& fixture_path) {
        BaselineClient client(id, fixture_path);
        client.live_ = std::move(config);
        if (std::filesystem::exists(fixture_path)) client.fixture_ = load_fixture(fixture_path);
        return client;
    }

    BaselineId baseline_id() const { return id_; }
    QueryMode mode() const { return live_ ? QueryMode::live : QueryMode::replay; }
    const ReplayFixture& fixture() const { return fixture_; }

    std::string query(const Snippet& snippet) {
        // Recorded answers win in both modes; live queries are spent quota.
        if (const std::string* answer = fixture_.find(snippet.id)) return *answer;
        if (!live_)
            throw ReplayMissError("no recorded answer for snippet " + snippet.id + " in " +
                                  fixture_path_.string());
        std::string answer = query_live(snippet);
        fixture_.add(snippet.id, answer);
        save_fixture(fixture_, fixture_path_);
        return answer;
    }

private:
    BaselineClient(BaselineId id, std::filesystem::path fixture_path)
        : id_(id), fixture_path_(std::move(fixture_path)) {}

    std::string query_live(const Snippet& snippet) {
        std::lock_guard<std::mutex> lock(*mutex_);  // one in-flight request per baseline
        auto [base, path] = split_url(live_->endpoint_url);
        httplib::Client http(base);
        http.set_connection_timeout(10);
        http.set_read_timeout(30);

        httplib::Headers headers;
        if (const char* token = std::getenv(live_->auth_token_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + token);

        nlohmann::json body = {{"snippet_id", snippet.id}, {"text", snippet.text}};
        std::string last_failure;
        for (int attempt = 1; attempt <= live_->max_retries; ++attempt) {
            throttle();
            auto res = http.Post(path, headers, body.dump(), "application/json");
            last_request_ = std::chrono::steady_clock::now();
            if (!res) {
                last_failure = "transport error " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {  // transient server side, worth retrying
                last_failure = "http status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw BaselineError(to_string(id_) + " request rejected with http status " +
                                    std::to_string(res->status));
            try {
                return nlohmann::json::parse(res->body).at("answer_text").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw BaselineError(to_string(id_) + " returned an unparseable answer: " +
                                    e.what());
            }
        }
        throw BaselineError(to_string(id_) + " request failed after " +
                            std::to_string(live_->max_retries) + " attempts: " + last_failure);
    }

    void throttle() {
        if (!last_request_) return;
        auto earliest = *last_request_ + std::chrono::milliseconds(live_->min_interval_ms);
        std::this_thread::sleep_until(earliest);
    }

    static std::pair<std::string, std::string> split_url(const std::string& url) {
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            throw BaselineError("endpoint URL lacks a scheme: " + url);
        auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) return {url, "/"};
        return {url.substr(0, path_start), url.substr(path_start)};
    }

    BaselineId id_;
    std::filesystem::path fixture_path_;
    ReplayFixture fixture_;
    std::optional<LiveConfig> live_;
    std::optional<std::chrono::steady_clock::time_point> last_request_;
    std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
};

struct BaselineScore {
    std::size_t correct = 0;
    std::size_t total = 0;
    std::vector<Origin> predictions;  // parallel to the scored snippets
    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

// Queries every snippet, maps the answers, and scores against the recorded
// origins. Deterministic in replay mode by construction.
inline BaselineScore score_baseline(BaselineClient& client, const VerdictMapping& mapping,
                                    const std::vector<Snippet>& snippets) {
    BaselineScore score;
    for (const auto& s : snippets) {
        Origin predicted = map_verdict(mapping, client.query(s));
        score.predictions.push_back(predicted);
        if (predicted == s.origin) ++score.correct;
        ++score.total;
    }
    return score;
}

}  // namespace codeprov::baselines
