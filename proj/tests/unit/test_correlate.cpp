#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "correlate.hpp"
#include "errors.hpp"
#include "pipeline.hpp"

using namespace gsnx;

namespace {

Instant at_s(std::int64_t s) { return normalize_epoch(s).instant; }

ChatMessage msg(AppId app, std::string from, std::string to, std::int64_t s, std::string id) {
    ChatMessage m;
    m.app = app;
    m.sender_id = std::move(from);
    m.recipient_id = std::move(to);
    m.sent_at = at_s(s);
    m.message_id = id;
    m.source.file_path = "db";
    m.source.detail = std::move(id);
    return m;
}

MatchRecord match(AppId app, std::string who, std::int64_t s) {
    MatchRecord m;
    m.app = app;
    m.match_id = "match-" + who;
    m.counterpart_user_id = std::move(who);
    m.created_at = at_s(s);
    m.source.file_path = "db";
    return m;
}

std::string timeline_key(const std::vector<TimelineEvent>& t) {
    std::string out;
    for (const auto& e : t) out += format_instant(e.at) + "|" + std::string(app_name(e.app)) + "|" + std::string(event_kind_name(e.kind)) + "|" + e.summary + "\n";
    return out;
}

}  // namespace

TEST_CASE("timeline ordering") {
    SUBCASE("two messages and a match") {
        EvidenceBundle b;
        b.owners[AppId::Tinder] = "me";
        b.messages = {msg(AppId::Tinder, "me", "u1", 300, "a"), msg(AppId::Tinder, "u1", "me", 100, "b")};
        b.matches = {match(AppId::Tinder, "u1", 200)};
        const auto t = build_timeline(b);
        REQUIRE(t.size() == 3);
        CHECK(t[0].at == at_s(100));
        CHECK(t[1].kind == EventKind::Match);
        CHECK(t[2].at == at_s(300));
        for (const auto& e : t) CHECK_FALSE(e.refs.empty());
    }
    SUBCASE("empty bundle") { CHECK(build_timeline(EvidenceBundle{}).empty()); }
    SUBCASE("equal timestamps break by app then kind") {
        EvidenceBundle b;
        b.matches = {match(AppId::Tinder, "u1", 100)};
        b.messages = {msg(AppId::Tinder, "me", "u1", 100, "a"), msg(AppId::Badoo, "x", "y", 100, "c")};
        const auto t = build_timeline(b);
        REQUIRE(t.size() == 3);
        CHECK(t[0].app == AppId::Badoo);
        CHECK(t[1].kind == EventKind::Message);
        CHECK(t[2].kind == EventKind::Match);
        CHECK(timeline_key(build_timeline(b)) == timeline_key(t));
    }
}

TEST_CASE("property: timeline is a sorted permutation of its inputs") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 100; ++round) {
        EvidenceBundle b;
        const int n = static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            const AppId app = kKnownApps[rng() % 4];
            const std::int64_t s = 1403136000 + static_cast<std::int64_t>(rng() % 5);
            if (rng() % 3) b.messages.push_back(msg(app, "a", "b", s, "m" + std::to_string(i)));
            else b.matches.push_back(match(app, "u" + std::to_string(i), s));
        }
        const auto t = build_timeline(b);
        REQUIRE(t.size() == b.messages.size() + b.matches.size());
        for (std::size_t i = 1; i < t.size(); ++i) {
            const auto ka = std::tuple(t[i - 1].at, t[i - 1].app, t[i - 1].kind);
            const auto kb = std::tuple(t[i].at, t[i].app, t[i].kind);
            CHECK_FALSE(kb < ka);
        }
        // shuffling the input does not change the output order of distinct keys
        EvidenceBundle shuffled = b;
        std::shuffle(shuffled.matches.begin(), shuffled.matches.end(), rng);
        const auto t2 = build_timeline(shuffled);
        REQUIRE(t2.size() == t.size());
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::tuple(t[i].at, t[i].app, t[i].kind) == std::tuple(t2[i].at, t2[i].app, t2[i].kind));
    }
}

TEST_CASE("profile image links") {
    EvidenceBundle b;
    ProfileRecord g;
    g.app = AppId::Grindr;
    g.profile_id = "2002";
    g.image_hash = "a1b2c3d4";
    ProfileRecord s;
    s.app = AppId::Skout;
    s.profile_id = "77";
    s.picture_url = "http://i.skout.com/pics/77.jpg";
    b.profiles = {g, s};
    SUBCASE("no images") { CHECK(link_profile_images(b).empty()); }
    SUBCASE("hash and picUrl") {
        CachedImage gi;
        gi.app = AppId::Grindr;
        gi.origin_url = "https://cdns.grindr.com/images/profile/1024x1024/a1b2c3d4";
        gi.content_hash = "h1";
        CachedImage si;
        si.app = AppId::Skout;
        si.origin_url = "http://i.skout.com/pics/77.jpg";
        si.content_hash = "h2";
        CachedImage other;
        other.app = AppId::Tinder;
        other.origin_url = "https://cdns.grindr.com/images/profile/1024x1024/a1b2c3d4";
        b.images = {gi, si, other};
        const auto l = link_profile_images(b);
        REQUIRE(l.size() == 2);
        CHECK(l[0].profile_id == "2002");
        CHECK(l[0].reason == "image_hash");
        CHECK(l[0].image_index == 0);
        CHECK(l[1].profile_id == "77");
        CHECK(l[1].reason == "picture_url");
        CHECK(l[1].content_hash == "h2");
    }
}

TEST_CASE("contact evidence") {
    EvidenceBundle b;
    b.owners[AppId::Grindr] = "me";
    for (int i = 0; i < 5; ++i) b.messages.push_back(msg(AppId::Grindr, i % 2 ? "me" : "them", i % 2 ? "them" : "me", 1000 + i * 100, "m" + std::to_string(i)));
    b.messages.push_back(msg(AppId::Grindr, "me", "someone-else", 5000, "x"));
    const Identity me{AppId::Grindr, "me"}, them{AppId::Grindr, "them"};

    SUBCASE("all five") {
        const auto c = contact_evidence(b, me, them);
        REQUIRE(c);
        CHECK(c->message_count == 5);
        CHECK(c->first_contact == at_s(1000));
        CHECK(c->last_contact == at_s(1400));
        CHECK(c->supporting.size() == 5);
        const auto r = contact_evidence(b, them, me);
        REQUIRE(r);
        CHECK(r->message_count == c->message_count);
        CHECK(r->first_contact == c->first_contact);
        CHECK(r->last_contact == c->last_contact);
    }
    SUBCASE("never together") { CHECK_FALSE(contact_evidence(b, them, {AppId::Grindr, "someone-else"})); }
    SUBCASE("before between the second and third") {
        const auto c = contact_evidence(b, me, them, at_s(1150));
        REQUIRE(c);
        CHECK(c->message_count == 2);
        CHECK(c->last_contact == at_s(1100));
    }
    SUBCASE("identity map bridges two apps") {
        b.owners[AppId::Tinder] = "tme";
        b.matches.push_back(match(AppId::Tinder, "tthem", 900));
        const Identity tthem{AppId::Tinder, "tthem"};
        CHECK(contact_evidence(b, me, tthem) == std::nullopt);
        const auto map = IdentityMap::parse("# analyst notes\nGrindr:me = Tinder:tme\n\nTinder:tthem=Grindr:them\n");
        const auto c = contact_evidence(b, me, tthem, std::nullopt, map);
        REQUIRE(c);
        CHECK(c->message_count == 5);
        CHECK(c->match_count == 1);
        CHECK(c->first_contact == at_s(900));
    }
    CHECK_THROWS_AS(IdentityMap::parse("Grindr:me Tinder:x"), UsageError);
    CHECK_THROWS_AS(IdentityMap::parse("Nope:me=Tinder:x"), UsageError);
    CHECK_THROWS_AS(parse_identity("Grindr"), UsageError);
    CHECK(parse_identity("Meet Me:42") == Identity{AppId::MeetMe, "42"});
}

TEST_CASE("property: contact evidence is symmetric and agrees with a brute-force count") {
    std::mt19937_64 rng(55);
    const std::vector<std::string> people = {"p0", "p1", "p2", "p3"};
    for (int round = 0; round < 200; ++round) {
        EvidenceBundle b;
        for (int i = 0; i < static_cast<int>(rng() % 25); ++i) {
            const auto& x = people[rng() % people.size()];
            const auto& y = people[rng() % people.size()];
            b.messages.push_back(msg(AppId::Skout, x, y, 1000 + static_cast<std::int64_t>(rng() % 500), "m" + std::to_string(i)));
        }
        const auto& pa = people[rng() % people.size()];
        const auto& pb = people[rng() % people.size()];
        const std::optional<Instant> before = rng() % 2 ? std::optional(at_s(1000 + static_cast<std::int64_t>(rng() % 500))) : std::nullopt;
        std::size_t want = 0;
        for (const auto& m : b.messages) {
            const bool pair = (m.sender_id == pa && m.recipient_id == pb) || (m.sender_id == pb && m.recipient_id == pa);
            if (pa != pb && pair && (!before || m.sent_at < *before)) ++want;
        }
        const Identity a{AppId::Skout, pa}, c{AppId::Skout, pb};
        const auto ab = contact_evidence(b, a, c, before);
        const auto ba = contact_evidence(b, c, a, before);
        CHECK(ab.has_value() == ba.has_value());
        CHECK((ab ? ab->message_count : 0) == want);
        if (ab && ba) {
            CHECK(ab->first_contact == ba->first_contact);
            CHECK(ab->last_contact == ba->last_contact);
            CHECK(ab->first_contact <= ab->last_contact);
        }
    }
}

TEST_CASE("forged contact pair") {
    oracle::TempDir dir("contact");
    ForgeSpec spec;
    spec.seed = 31;
    spec.apps[AppId::Grindr] = {.profiles = 2, .messages = 5};
    const auto manifest = forge_corpus(spec, dir / "out");
    const auto ex = extract_evidence(dir / ("out/" + std::string(kForgeEvidenceDir)));
    const std::string owner = manifest.owners.at(AppId::Grindr);
    // brute force over the forge's ground truth
    std::map<std::string, std::vector<Instant>> by_peer;
    for (const auto& m : manifest.messages) {
        if (m.app != AppId::Grindr) continue;
        const std::string peer = m.sender_id == owner ? m.recipient_id : m.sender_id;
        by_peer[peer].push_back(m.sent_at);
    }
    REQUIRE_FALSE(by_peer.empty());
    for (const auto& [peer, times] : by_peer) {
        const auto c = contact_evidence(ex.bundle, {AppId::Grindr, owner}, {AppId::Grindr, peer});
        REQUIRE(c);
        CHECK(c->message_count == times.size());
        CHECK(c->first_contact == *std::min_element(times.begin(), times.end()));
        CHECK(c->last_contact == *std::max_element(times.begin(), times.end()));
    }
}

TEST_CASE("owner location history") {
    SUBCASE("empty") { CHECK(location_history(EvidenceBundle{}).empty()); }
    SUBCASE("prefs fix plus analytics fixes, suburb preview, other people excluded") {
        EvidenceBundle b;
        LocationFix sp;
        sp.app = AppId::Tinder;
        sp.lat = -34.9285;
        sp.lon = 138.6007;
        LocationFix a1 = sp, a2 = sp;
        a1.at = at_s(2000);
        a2.at = at_s(1000);
        LocationFix suburb;
        suburb.app = AppId::Badoo;
        suburb.precision = Precision::Suburb;
        suburb.suburb = "Glenelg";
        LocationFix theirs = sp;
        theirs.subject_profile = "2002";
        theirs.at = at_s(1500);
        b.locations = {sp, a1, theirs, a2, suburb};
        const auto h = location_history(b);
        REQUIRE(h.size() == 4);
        CHECK(h[0].fix.at == at_s(1000));
        CHECK(h[1].fix.at == at_s(2000));
        CHECK(h[2].untimed);
        CHECK(h[3].untimed);
        CHECK(h[3].fix.precision == Precision::Suburb);
        CHECK(h[3].fix.suburb == "Glenelg");
    }
}
