#include <doctest.h>

#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <jpeglib.h>
#include <sqlite3.h>

#include <random>

#include "../support/oracles.hpp"
#include "cache.hpp"
#include "errors.hpp"
#include "scanner.hpp"

using namespace gsnx;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> encode_jpeg_1x1() {
    jpeg_compress_struct c{};
    jpeg_error_mgr err{};
    c.err = jpeg_std_error(&err);
    jpeg_create_compress(&c);
    unsigned char* buf = nullptr;
    unsigned long size = 0;
    jpeg_mem_dest(&c, &buf, &size);
    c.image_width = 1;
    c.image_height = 1;
    c.input_components = 3;
    c.in_color_space = JCS_RGB;
    jpeg_set_defaults(&c);
    jpeg_start_compress(&c, TRUE);
    unsigned char px[3] = {200, 40, 90};
    JSAMPROW row = px;
    jpeg_write_scanlines(&c, &row, 1);
    jpeg_finish_compress(&c);
    std::vector<std::uint8_t> out(buf, buf + size);
    jpeg_destroy_compress(&c);
    std::free(buf);
    return out;
}

std::pair<int, int> decode_jpeg_size(const std::vector<std::uint8_t>& bytes) {
    jpeg_decompress_struct d{};
    jpeg_error_mgr err{};
    d.err = jpeg_std_error(&err);
    jpeg_create_decompress(&d);
    jpeg_mem_src(&d, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&d, TRUE);
    jpeg_start_decompress(&d);
    std::vector<unsigned char> row(d.output_width * d.output_components);
    JSAMPROW r = row.data();
    while (d.output_scanline < d.output_height) jpeg_read_scanlines(&d, &r, 1);
    const std::pair<int, int> wh{static_cast<int>(d.output_width), static_cast<int>(d.output_height)};
    jpeg_finish_decompress(&d);
    jpeg_destroy_decompress(&d);
    return wh;
}

std::vector<std::uint8_t> sqlite_header_of_fresh_db(const fs::path& p) {
    sqlite3* db = nullptr;
    REQUIRE(sqlite3_open(p.string().c_str(), &db) == SQLITE_OK);
    REQUIRE(sqlite3_exec(db, "CREATE TABLE t(a)", nullptr, nullptr, nullptr) == SQLITE_OK);
    sqlite3_close(db);
    return read_file_prefix(p, kHeaderBytes);
}

}  // namespace

TEST_CASE("lookup_app maps package directories") {
    CHECK(lookup_app("com.tinder") == AppId::Tinder);
    CHECK(lookup_app("com.grindapp.android") == AppId::Grindr);
    CHECK(lookup_app("com.skout.android") == AppId::Skout);
    CHECK(lookup_app("com.badoo.mobile") == AppId::Badoo);
    CHECK(lookup_app("") == AppId::Unknown);
    CHECK(lookup_app("com.example.notes") == AppId::Unknown);
    CHECK(lookup_app("COM.TINDER") == AppId::Unknown);

    // the shipped config file and the built-in defaults agree
    const auto from_file = AppRegistry::from_config_file(fs::path(GSNX_SOURCE_DIR) / "config/registry.tsv");
    const auto defaults = AppRegistry::defaults();
    for (const auto& e : defaults.entries()) CHECK(from_file.lookup(e.package).app == e.app);
    for (const auto& e : from_file.entries()) CHECK(e.package != "com.example.notes");
}

TEST_CASE("registry config rejects lines without a tab") {
    CHECK_THROWS_AS(AppRegistry::from_config_text("data/data/com.foo Foo\n"), UsageError);
    const auto reg = AppRegistry::from_config_text("# comment\n\ndata/data/com.jaumo/\tJaumo\n");
    CHECK(reg.lookup("com.jaumo").app == AppId::Jaumo);
    CHECK(reg.lookup("com.jaumo").extended);
    CHECK(reg.lookup("com.fullcircle.android").app == AppId::Unknown);
}

TEST_CASE("normalize_epoch against the calendar walk") {
    CHECK(format_instant(normalize_epoch(0).instant) == "1970-01-01T00:00:00Z");
    CHECK(normalize_epoch(0).unit == EpochUnit::Seconds);

    const auto s = normalize_epoch(1403136000);
    CHECK(s.unit == EpochUnit::Seconds);
    CHECK(format_instant(s.instant) == oracle::brute_force_utc(1403136000LL * 1000));
    const auto ms = normalize_epoch(1403136000000);
    CHECK(ms.unit == EpochUnit::Milliseconds);
    CHECK(ms.instant == s.instant);

    CHECK(normalize_epoch(kMillisecondThreshold).unit == EpochUnit::Seconds);
    CHECK(normalize_epoch(kMillisecondThreshold + 1).unit == EpochUnit::Milliseconds);
    CHECK_THROWS_AS(normalize_epoch(-1), MalformedTimestamp);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t raw = static_cast<std::int64_t>(rng() % 2000000000000ull);
        const auto r = normalize_epoch(raw);
        const std::int64_t want_ms = raw > kMillisecondThreshold ? raw : raw * 1000;
        REQUIRE(format_instant(r.instant) == oracle::brute_force_utc(want_ms));
    }
}

TEST_CASE("instant text round trip") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const Instant t{std::chrono::milliseconds{static_cast<std::int64_t>(rng() % 4000000000000ull)}};
        const auto back = parse_instant(format_instant(t));
        REQUIRE(back.has_value());
        CHECK(*back == t);
    }
    CHECK(parse_instant("2014-06-19T00:00:00+00:00") == normalize_epoch(1403136000).instant);
    CHECK_FALSE(parse_instant("19/06/2014").has_value());
    CHECK(format_date(normalize_epoch(1403136000).instant) == "2014-06-19");
}

TEST_CASE("classify_file uses magic bytes") {
    oracle::TempDir dir("classify");
    const auto header = sqlite_header_of_fresh_db(dir / "x.db");
    CHECK(header.size() == 16);
    CHECK(classify_file("anything.bin", header) == FileKind::SqliteDb);
    CHECK(classify_file("empty", {}) == FileKind::Opaque);

    const auto jpeg = encode_jpeg_1x1();
    CHECK(classify_file("photo.png", std::span(jpeg).first(16)) == FileKind::Jpeg);
    CHECK(sniff_image_format(jpeg) == ImageFormat::Jpeg);

    const auto webp = tiny_webp();
    CHECK(classify_file("x", std::span(webp).first(16)) == FileKind::WebP);

    const std::string xml = "<?xml version='1.0'?><map/>";
    const auto* xb = reinterpret_cast<const std::uint8_t*>(xml.data());
    CHECK(classify_file("data/data/com.tinder/shared_prefs/SP.xml", {xb, 16}) == FileKind::PrefsXml);
    CHECK(classify_file("data/data/com.tinder/files/SP.xml", {xb, 16}) == FileKind::Opaque);
    CHECK(classify_file("data/data/com.tinder/cache/Picasso-cache/ab.o", {xb, 4}) == FileKind::PicassoMeta);
}

TEST_CASE("forged tiny images decode with an independent decoder") {
    const auto a = tiny_jpeg("one");
    const auto b = tiny_jpeg("two");
    CHECK(a != b);
    CHECK(decode_jpeg_size(a) == std::pair{1, 1});
    CHECK(decode_jpeg_size(b) == std::pair{1, 1});
    const auto w = tiny_webp();
    REQUIRE(w.size() >= 12);
    const std::uint32_t riff = w[4] | (w[5] << 8) | (w[6] << 16) | (static_cast<std::uint32_t>(w[7]) << 24);
    CHECK(riff + 8 == w.size());
}

TEST_CASE("property: classification of magic-bearing files ignores the file name") {
    oracle::TempDir dir("rename");
    const auto sqlite = sqlite_header_of_fresh_db(dir / "a.db");
    const auto jpeg = encode_jpeg_1x1();
    const auto webp = tiny_webp();
    const std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n', 0, 0, 0, 13, 'I', 'H', 'D', 'R'};
    const std::vector<std::pair<std::vector<std::uint8_t>, FileKind>> samples = {
        {sqlite, FileKind::SqliteDb}, {jpeg, FileKind::Jpeg}, {webp, FileKind::WebP}, {png, FileKind::Png}};
    const std::vector<std::string> dirs = {"", "shared_prefs/", "cache/", "cache/Picasso-cache/", "databases/", "files/x/"};
    const std::vector<std::string> exts = {"", ".db", ".xml", ".o", ".i", ".jpg", ".png", ".0", ".json"};
    std::mt19937_64 rng(77);
    for (int i = 0; i < 500; ++i) {
        const auto& [bytes, kind] = samples[rng() % samples.size()];
        std::string name = "data/data/com.example/" + dirs[rng() % dirs.size()];
        for (int k = 0; k < 1 + static_cast<int>(rng() % 12); ++k) name.push_back("abcxyz0129_-"[rng() % 12]);
        name += exts[rng() % exts.size()];
        REQUIRE(classify_file(name, std::span(bytes).first(std::min<std::size_t>(16, bytes.size()))) == kind);
    }
}

TEST_CASE("scan_root finds installs and catalogs files") {
    oracle::TempDir dir("scan");
    SUBCASE("empty directory") {
        const auto cat = scan_root(dir.path());
        CHECK(cat.installs.empty());
        CHECK(cat.entries.empty());
    }
    SUBCASE("single Grindr package") {
        oracle::write_file(dir / "data/data/com.grindapp.android/shared_prefs/Rules.xml", "<?xml version='1.0'?><map/>");
        oracle::write_file(dir / "data/data/com.example.notes/files/a.txt", "hello");
        const auto cat = scan_root(dir.path());
        REQUIRE(cat.installs.size() == 1);
        CHECK(cat.installs[0].app == AppId::Grindr);
        CHECK(cat.installs[0].package_path == "data/data/com.grindapp.android");
        CHECK_FALSE(cat.installs[0].registry_extended);
        CHECK(cat.entries.size() == 2);
        CHECK(cat.packages_prefix == "data/data");
    }
    SUBCASE("rooted at data/data") {
        oracle::write_file(dir / "com.tinder/shared_prefs/SP.xml", "<?xml version='1.0'?><map/>");
        const auto cat = scan_root(dir.path());
        REQUIRE(cat.installs.size() == 1);
        CHECK(cat.installs[0].package_path == "com.tinder");
        CHECK(owning_install(cat, "com.tinder/shared_prefs/SP.xml") == &cat.installs[0]);
        CHECK(owning_install(cat, "com.tinderx/a") == nullptr);
    }
    SUBCASE("not a directory") {
        oracle::write_file(dir / "file", "x");
        CHECK_THROWS_AS(scan_root(dir / "file"), ScanError);
        CHECK_THROWS_AS(scan_root(dir / "missing"), ScanError);
    }
}

TEST_CASE("forged corpus with the four documented apps has exactly four installs") {
    oracle::TempDir dir("four");
    ForgeSpec spec;
    spec.seed = 3;
    for (auto app : {AppId::Badoo, AppId::Grindr, AppId::Skout, AppId::Tinder}) spec.apps[app] = {.profiles = 1, .messages = 1, .credentials = 1};
    forge_corpus(spec, dir.path());
    const auto cat = scan_root(dir / std::string(kForgeEvidenceDir));
    CHECK(cat.installs.size() == 4);
    for (const auto& i : cat.installs) CHECK_FALSE(i.registry_extended);
}
