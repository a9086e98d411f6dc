#pragma once
// Independent oracles shared by the unit tests and the acceptance gate.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "correlate.hpp"
#include "digest.hpp"
#include "forge.hpp"
#include "model.hpp"
#include "netleak.hpp"

namespace oracle {

namespace fs = std::filesystem;

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t") {
        static std::mt19937_64 g(std::random_device{}());
        path_ = fs::temp_directory_path() / ("gsnx-" + tag + "-" + std::to_string(g()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& s) const { return path_ / s; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, std::string_view bytes) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// --- calendar, by counting ----------------------------------------------------------

inline bool leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

/// UTC rendering of epoch milliseconds by walking years and months one at a time.
inline std::string brute_force_utc(std::int64_t epoch_ms) {
    std::int64_t days = epoch_ms / 86400000;
    std::int64_t rem = epoch_ms % 86400000;
    std::int64_t year = 1970;
    while (days >= (leap(year) ? 366 : 365)) days -= leap(year++) ? 366 : 365;
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int month = 0;
    while (true) {
        const int len = mdays[month] + (month == 1 && leap(year) ? 1 : 0);
        if (days < len) break;
        days -= len;
        ++month;
    }
    const std::int64_t h = rem / 3600000, mi = rem / 60000 % 60, s = rem / 1000 % 60, ms = rem % 1000;
    char buf[64];
    if (ms)
        std::snprintf(buf, sizeof buf, "%04lld-%02d-%02lldT%02lld:%02lld:%02lld.%03lldZ", static_cast<long long>(year), month + 1,
                      static_cast<long long>(days + 1), static_cast<long long>(h), static_cast<long long>(mi),
                      static_cast<long long>(s), static_cast<long long>(ms));
    else
        std::snprintf(buf, sizeof buf, "%04lld-%02d-%02lldT%02lld:%02lld:%02lldZ", static_cast<long long>(year), month + 1,
                      static_cast<long long>(days + 1), static_cast<long long>(h), static_cast<long long>(mi),
                      static_cast<long long>(s));
    return buf;
}

// --- manifest comparison --------------------------------------------------------------

template <typename T>
std::string show(const std::optional<T>& v) {
    if (!v) return "<none>";
    std::ostringstream os;
    os << *v;
    return os.str();
}
inline std::string show(const std::optional<gsnx::Instant>& v) { return v ? gsnx::format_instant(*v) : "<none>"; }

struct Diff {
    std::vector<std::string> problems;
    std::size_t expected = 0;
    std::size_t recovered = 0;

    template <typename A, typename B>
    void field(const std::string& where, const char* name, const A& want, const B& got) {
        if (!(want == got)) problems.push_back(where + ": " + name + " differs");
    }
};

inline Diff compare_messages(const std::vector<gsnx::ChatMessage>& want, const std::vector<gsnx::ChatMessage>& got) {
    Diff d;
    std::map<std::pair<gsnx::AppId, std::string>, const gsnx::ChatMessage*> idx;
    for (const auto& m : got) idx[{m.app, m.message_id}] = &m;
    for (const auto& w : want) {
        ++d.expected;
        const std::string where = std::string(gsnx::app_name(w.app)) + " message " + w.message_id;
        auto it = idx.find({w.app, w.message_id});
        if (it == idx.end()) {
            d.problems.push_back(where + ": missing");
            continue;
        }
        const auto& g = *it->second;
        const std::size_t before = d.problems.size();
        d.field(where, "sender_id", w.sender_id, g.sender_id);
        d.field(where, "recipient_id", w.recipient_id, g.recipient_id);
        d.field(where, "counterpart_id", w.counterpart_id, g.counterpart_id);
        d.field(where, "thread_id", w.thread_id, g.thread_id);
        d.field(where, "sent_at", gsnx::format_instant(w.sent_at), gsnx::format_instant(g.sent_at));
        d.field(where, "body", w.body, g.body);
        d.field(where, "body_is_media", w.body_is_media, g.body_is_media);
        d.field(where, "direction", w.direction, g.direction);
        d.field(where, "unread", w.unread, g.unread);
        d.field(where, "failed", w.failed, g.failed);
        d.field(where, "admin_origin", w.admin_origin, g.admin_origin);
        d.field(where, "confidence", w.confidence, g.confidence);
        d.field(where, "source.file_path", w.source.file_path, g.source.file_path);
        if (d.problems.size() == before) ++d.recovered;
    }
    return d;
}

inline Diff compare_profiles(const std::vector<gsnx::ProfileRecord>& want, const std::vector<gsnx::ProfileRecord>& got) {
    Diff d;
    std::map<std::pair<gsnx::AppId, std::string>, const gsnx::ProfileRecord*> idx;
    for (const auto& p : got) idx[{p.app, p.profile_id}] = &p;
    for (const auto& w : want) {
        ++d.expected;
        const std::string where = std::string(gsnx::app_name(w.app)) + " profile " + w.profile_id;
        auto it = idx.find({w.app, w.profile_id});
        if (it == idx.end()) {
            d.problems.push_back(where + ": missing");
            continue;
        }
        const auto& g = *it->second;
        const std::size_t before = d.problems.size();
        d.field(where, "display_name", w.display_name, g.display_name);
        d.field(where, "birth_date", w.birth_date, g.birth_date);
        d.field(where, "age", w.age, g.age);
        d.field(where, "social_ids", w.social_ids, g.social_ids);
        d.field(where, "image_hash", w.image_hash, g.image_hash);
        d.field(where, "picture_url", w.picture_url, g.picture_url);
        d.field(where, "last_seen", show(w.last_seen), show(g.last_seen));
        d.field(where, "last_message_at", show(w.last_message_at), show(g.last_message_at));
        d.field(where, "is_owner", w.is_owner, g.is_owner);
        d.field(where, "origin_table", w.origin_table, g.origin_table);
        d.field(where, "source.file_path", w.source.file_path, g.source.file_path);
        if (d.problems.size() == before) ++d.recovered;
    }
    return d;
}

inline Diff compare_matches(const std::vector<gsnx::MatchRecord>& want, const std::vector<gsnx::MatchRecord>& got) {
    Diff d;
    std::map<std::pair<gsnx::AppId, std::string>, const gsnx::MatchRecord*> idx;
    for (const auto& m : got) idx[{m.app, m.match_id}] = &m;
    for (const auto& w : want) {
        ++d.expected;
        const std::string where = std::string(gsnx::app_name(w.app)) + " match " + w.match_id;
        auto it = idx.find({w.app, w.match_id});
        if (it == idx.end()) {
            d.problems.push_back(where + ": missing");
            continue;
        }
        const auto& g = *it->second;
        const std::size_t before = d.problems.size();
        d.field(where, "counterpart_user_id", w.counterpart_user_id, g.counterpart_user_id);
        d.field(where, "counterpart_name", w.counterpart_name, g.counterpart_name);
        d.field(where, "created_at", gsnx::format_instant(w.created_at), gsnx::format_instant(g.created_at));
        d.field(where, "last_activity", show(w.last_activity), show(g.last_activity));
        d.field(where, "viewed", w.viewed, g.viewed);
        d.field(where, "source.file_path", w.source.file_path, g.source.file_path);
        if (d.problems.size() == before) ++d.recovered;
    }
    return d;
}

inline Diff compare_tokens(const std::vector<gsnx::AuthToken>& want, const std::vector<gsnx::AuthToken>& got) {
    Diff d;
    using Key = std::tuple<gsnx::AppId, gsnx::TokenProvider, std::string, std::string>;
    std::multiset<Key> have;
    for (const auto& t : got) have.insert({t.app, t.provider, t.token, t.source.file_path});
    for (const auto& w : want) {
        ++d.expected;
        auto it = have.find({w.app, w.provider, w.token, w.source.file_path});
        if (it == have.end()) {
            d.problems.push_back(std::string(gsnx::app_name(w.app)) + " " + std::string(gsnx::provider_name(w.provider)) +
                                 " token from " + w.source.file_path + ": missing");
            continue;
        }
        have.erase(it);
        ++d.recovered;
    }
    return d;
}

inline Diff compare_image_links(const std::vector<gsnx::ImageLinkTruth>& want, const std::vector<gsnx::ImageLink>& got) {
    Diff d;
    std::set<std::tuple<gsnx::AppId, std::string, std::string, std::string>> have;
    for (const auto& l : got) have.insert({l.app, l.profile_id, l.origin_url, l.content_hash});
    for (const auto& w : want) {
        ++d.expected;
        if (have.count({w.app, w.profile_id, w.origin_url, w.content_hash})) ++d.recovered;
        else d.problems.push_back(std::string(gsnx::app_name(w.app)) + " image link for " + w.profile_id + ": missing");
    }
    return d;
}

// --- leak detector scoring ---------------------------------------------------------

struct Score {
    std::size_t planted = 0, detected = 0, true_positive = 0, false_positive = 0;
    std::vector<std::string> misses;
    double recall() const { return planted ? static_cast<double>(true_positive) / static_cast<double>(planted) : 1.0; }
};

inline Score score_findings(const std::vector<gsnx::PlantedLeak>& planted, const std::vector<gsnx::LeakFinding>& found) {
    Score s;
    std::set<std::tuple<std::size_t, gsnx::LeakCategory, gsnx::AppId>> truth;
    for (const auto& p : planted) truth.insert({p.transaction_index, p.category, p.app});
    std::set<std::tuple<std::size_t, gsnx::LeakCategory, gsnx::AppId>> got;
    for (const auto& f : found) got.insert({f.evidence.transaction_index, f.category, f.app});
    s.planted = truth.size();
    s.detected = got.size();
    for (const auto& g : got) {
        if (truth.count(g)) ++s.true_positive;
        else {
            ++s.false_positive;
            s.misses.push_back("false positive: txn " + std::to_string(std::get<0>(g)) + " " +
                               std::string(gsnx::leak_category_name(std::get<1>(g))));
        }
    }
    for (const auto& t : truth) {
        if (!got.count(t))
            s.misses.push_back("missed: txn " + std::to_string(std::get<0>(t)) + " " +
                               std::string(gsnx::leak_category_name(std::get<1>(t))));
    }
    return s;
}

/// 50 planted leaks cycling every category over every app, plus 200 decoys.
inline gsnx::ForgeSpec leak_benchmark_spec(std::uint64_t seed) {
    gsnx::ForgeSpec s;
    s.seed = seed;
    for (auto app : gsnx::kKnownApps) s.apps[app] = {};
    constexpr gsnx::LeakCategory cats[] = {
        gsnx::LeakCategory::PlaintextMessage, gsnx::LeakCategory::PlaintextImage,   gsnx::LeakCategory::PlaintextImageUrl,
        gsnx::LeakCategory::ExactLocation,    gsnx::LeakCategory::CoarseLocation,   gsnx::LeakCategory::EmailAddress,
        gsnx::LeakCategory::TokenInTransit,   gsnx::LeakCategory::LocationInFilename,
    };
    for (int i = 0; i < 50; ++i) {
        const auto app = gsnx::kKnownApps[static_cast<std::size_t>(i) % gsnx::kKnownApps.size()];
        const auto cat = cats[static_cast<std::size_t>(i / 8 + i) % 8];
        s.leaks.push_back({app, cat, 1});
    }
    s.decoys = 200;
    return s;
}

// --- summary matrix expectation --------------------------------------------------------

/// Expected primary class per app and column for the canonical corpus and log.
inline const std::map<gsnx::AppId, std::map<gsnx::MatrixColumn, std::string>>& expected_matrix() {
    using A = gsnx::AppId;
    using C = gsnx::MatrixColumn;
    static const std::map<A, std::map<C, std::string>> m = {
        {A::Badoo, {{C::Messages, "cache_preview"}, {C::Images, "cached_files"}, {C::Location, "suburb_level"},
                    {C::Email, "none observed"}, {C::Auth, "Facebook Token"}}},
        {A::Grindr, {{C::Messages, "database"}, {C::Images, "cached_files"}, {C::Location, "network_exact"},
                     {C::Email, "on_device"}, {C::Auth, "Grindr Token"}}},
        {A::Skout, {{C::Messages, "database"}, {C::Images, "network_urls"}, {C::Location, "network_coarse"},
                    {C::Email, "none observed"}, {C::Auth, "Facebook Token"}}},
        {A::Tinder, {{C::Messages, "database"}, {C::Images, "cached_files"}, {C::Location, "network_exact"},
                     {C::Email, "none observed"}, {C::Auth, "Facebook Token + Tinder Token"}}},
        {A::MeetMe, {{C::Messages, "database"}, {C::Images, "cached_files"}, {C::Location, "none observed"},
                     {C::Email, "none observed"}, {C::Auth, "Facebook Token"}}},
        {A::Jaumo, {{C::Messages, "none observed"}, {C::Images, "urls_on_device"}, {C::Location, "filename"},
                    {C::Email, "none observed"}, {C::Auth, "Facebook Token"}}},
        {A::FullCircle, {{C::Messages, "network_plaintext"}, {C::Images, "network_plaintext"}, {C::Location, "network_coarse"},
                         {C::Email, "network_plaintext"}, {C::Auth, "Facebook Token"}}},
        {A::MiuMeet, {{C::Messages, "network_plaintext"}, {C::Images, "network_urls"}, {C::Location, "network_exact"},
                      {C::Email, "network_plaintext"}, {C::Auth, "MiuMeet Token"}}},
    };
    return m;
}

/// SHA-256 and size of every regular file under root, keyed by relative path.
inline std::map<std::string, std::string> digest_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        out[fs::relative(e.path(), root).generic_string()] = gsnx::sha256_file(e.path()) + ":" + std::to_string(e.file_size());
    }
    return out;
}

}  // namespace oracle
