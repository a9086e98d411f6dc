#include <doctest.h>
#include <sqlite3.h>

#include <random>

#include "../support/oracles.hpp"
#include "cache.hpp"
#include "errors.hpp"
#include "pipeline.hpp"

using namespace gsnx;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

std::vector<std::string> column_values(const fs::path& db_file, const std::string& sql) {
    sqlite3* db = nullptr;
    REQUIRE(sqlite3_open_v2(db_file.string().c_str(), &db, SQLITE_OPEN_READONLY, nullptr) == SQLITE_OK);
    sqlite3_stmt* st = nullptr;
    REQUIRE(sqlite3_prepare_v2(db, sql.c_str(), -1, &st, nullptr) == SQLITE_OK);
    std::vector<std::string> out;
    while (sqlite3_step(st) == SQLITE_ROW) {
        if (const auto* t = sqlite3_column_text(st, 0)) out.emplace_back(reinterpret_cast<const char*>(t));
    }
    sqlite3_finalize(st);
    sqlite3_close(db);
    return out;
}

}  // namespace

TEST_CASE("Picasso meta and image pair") {
    const auto meta = bytes_of("GET http://cdn.example/img/abc.jpg HTTP/1.1\r\nHost: cdn.example\r\n\r\n");
    const auto img = tiny_jpeg("abc");
    const auto e = parse_picasso_pair(meta, img, {.file_path = "c/x.o"}, {.file_path = "c/x.i"});
    CHECK(e.request_url == "http://cdn.example/img/abc.jpg");
    CHECK(e.image.origin_url == std::optional<std::string>("http://cdn.example/img/abc.jpg"));
    CHECK(e.image.format == ImageFormat::Jpeg);
    CHECK(e.image.content_hash == sha256_hex(img));
    CHECK(e.image.bytes_ref.file_path == "c/x.i");

    // leading binary header before the request line
    std::vector<std::uint8_t> framed = {0x00, 0x01, 0xFF, '\n'};
    framed.insert(framed.end(), meta.begin(), meta.end());
    CHECK(parse_picasso_pair(framed, img).request_url == "http://cdn.example/img/abc.jpg");

    const std::vector<std::uint8_t> unknown = {'n', 'o', 'p', 'e'};
    CHECK(parse_picasso_pair(meta, unknown).image.format == ImageFormat::Unknown);

    CHECK_THROWS_AS(parse_picasso_pair(bytes_of("POST http://x/ HTTP/1.1\r\n"), img), CacheParseError);
    CHECK_THROWS_AS(parse_picasso_pair(bytes_of(""), img), CacheParseError);
}

TEST_CASE("forged Grindr corpus: every profile image hash links to a cached image") {
    oracle::TempDir dir("grindrcache");
    ForgeSpec spec;
    spec.seed = 8;
    spec.apps[AppId::Grindr] = {.profiles = 6, .messages = 2, .images = 6};
    forge_corpus(spec, dir / "out");
    const fs::path root = dir / ("out/" + std::string(kForgeEvidenceDir));
    const fs::path pkg = root / "data/data/com.grindapp.android";

    const auto hashes = column_values(pkg / "databases/grindr.db", "SELECT profileImageHash FROM profile WHERE profileImageHash IS NOT NULL");
    REQUIRE_FALSE(hashes.empty());

    // independent reading of the cache directory: GET lines of every .o file
    std::vector<std::string> get_lines;
    for (const auto& f : fs::directory_iterator(pkg / "cache/Picasso-cache")) {
        if (f.path().extension() != ".o") continue;
        std::istringstream in(oracle::read_file(f.path()));
        for (std::string line; std::getline(in, line);)
            if (line.rfind("GET ", 0) == 0) get_lines.push_back(line);
    }
    for (const auto& h : hashes) {
        CHECK(std::any_of(get_lines.begin(), get_lines.end(), [&](const std::string& l) { return l.find(h) != std::string::npos; }));
    }

    const auto ex = extract_evidence(root);
    const auto links = link_profile_images(ex.bundle);
    std::set<std::string> linked;
    for (const auto& l : links) {
        if (l.app == AppId::Grindr && l.reason == "image_hash") linked.insert(l.origin_url);
    }
    for (const auto& h : hashes) {
        CHECK(std::any_of(linked.begin(), linked.end(), [&](const std::string& u) { return u.find(h) != std::string::npos; }));
    }
}

TEST_CASE("Volley match cache") {
    SUBCASE("single entry") {
        const auto r = parse_volley_match_cache(bytes_of(R"({"match_id":"m1","matched":true,"date":"2014-06-19T00:00:00Z"})"));
        REQUIRE(r.events.size() == 1);
        CHECK(r.events[0].match_id == "m1");
        CHECK(r.events[0].matched);
        CHECK(r.events[0].occurred_at == normalize_epoch(1403136000).instant);
    }
    SUBCASE("empty input") {
        const auto r = parse_volley_match_cache({});
        CHECK(r.events.empty());
    }
    SUBCASE("no JSON") {
        const auto r = parse_volley_match_cache(bytes_of("\x01\x02 binary only"));
        CHECK(r.events.empty());
        CHECK(r.warnings.size() == 1);
    }
    SUBCASE("two entries behind binary headers keep file order") {
        std::string blob = "\x00\x11\x22\x33header";
        blob += R"({"match_id":"m2","matched":false,"date":1403136000000})";
        blob += std::string("\x00\x01\x02", 3);
        blob += R"({"match_id":"m1","matched":true,"date":1403136100})";
        const auto r = parse_volley_match_cache(bytes_of(blob));
        REQUIRE(r.events.size() == 2);
        CHECK(r.events[0].match_id == "m2");
        CHECK_FALSE(r.events[0].matched);
        CHECK(r.events[1].match_id == "m1");
        CHECK(r.events[1].occurred_at == normalize_epoch(1403136100).instant);
    }
}

TEST_CASE("string record carving") {
    using namespace std::string_literals;
    SUBCASE("one record") {
        const std::string blob = "\x01\x02\x03"s + "alice\0http://cdn.example/u/p.jpg\0hey there\0Adelaide"s + "\x00\xff\x01"s;
        const auto r = carve_string_records(bytes_of(blob));
        REQUIRE(r.size() == 1);
        CHECK(r[0].username == "alice");
        CHECK(r[0].profile_pic_url == "http://cdn.example/u/p.jpg");
        CHECK(r[0].last_message == "hey there");
        CHECK(r[0].location_suburb == "Adelaide");
        REQUIRE(r[0].source.byte_range);
        CHECK(r[0].source.byte_range->offset == 3);
        CHECK(blob.substr(3, r[0].source.byte_range->length) == "alice\0http://cdn.example/u/p.jpg\0hey there\0Adelaide"s);
    }
    SUBCASE("all binary") {
        std::vector<std::uint8_t> b(512);
        std::mt19937 rng(1);
        for (auto& x : b) x = static_cast<std::uint8_t>(rng() % 0x20);
        CHECK(carve_string_records(b).empty());
    }
    SUBCASE("two groups in offset order") {
        const std::string blob = "bob\0https://i.example/b.png\0yo\0nope\0Glenelg"s + std::string(200, '\0') +
                                 "carol\0http://i.example/c.jpg\0dinner?\0Norwood"s;
        const auto r = carve_string_records(bytes_of(blob));
        REQUIRE(r.size() == 2);
        CHECK(r[0].username == "bob");
        CHECK(r[0].last_message == "nope");  // "yo" is shorter than the minimum run
        CHECK(r[0].location_suburb == "Glenelg");
        CHECK(r[1].username == "carol");
        CHECK(r[1].location_suburb == "Norwood");
        CHECK(r[0].source.byte_range->offset < r[1].source.byte_range->offset);
    }
}

TEST_CASE("property: carving recovers planted records from random noise") {
    using namespace std::string_literals;
    std::mt19937_64 rng(314);
    const std::vector<std::string> names = {"alice", "bruno", "chen", "dara", "emil"};
    const std::vector<std::string> suburbs = {"Adelaide", "Unley", "Prospect", "Semaphore"};
    for (int round = 0; round < 200; ++round) {
        std::string blob;
        std::vector<std::tuple<std::string, std::string, std::string, std::string>> want;
        const int n = static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
            // control-byte noise never forms a printable run
            for (int k = 0; k < 70 + static_cast<int>(rng() % 30); ++k) blob.push_back(static_cast<char>(rng() % 0x1F));
            const auto name = names[rng() % names.size()];
            const auto url = "http://img.example/" + std::to_string(rng() % 100000) + ".jpg";
            const auto msg = "msg number " + std::to_string(i);
            const auto sub = suburbs[rng() % suburbs.size()];
            blob += name + "\0"s + url + "\0"s + msg + "\0"s + sub;
            want.emplace_back(name, url, msg, sub);
        }
        for (int k = 0; k < 70; ++k) blob.push_back('\0');
        const auto got = carve_string_records(bytes_of(blob));
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got[i].username == std::get<0>(want[i]));
            CHECK(got[i].profile_pic_url == std::get<1>(want[i]));
            CHECK(got[i].last_message == std::get<2>(want[i]));
            CHECK(got[i].location_suburb == std::get<3>(want[i]));
        }
    }
}
