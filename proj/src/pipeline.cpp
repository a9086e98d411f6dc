#include "pipeline.hpp"

#include <algorithm>
#include <set>

#include "cache.hpp"
#include "db_extract.hpp"
#include "digest.hpp"
#include "errors.hpp"
#include "prefs.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;

namespace gsnx {

namespace {

template <typename T>
void append(std::vector<T>& dst, std::vector<T>& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

void merge(EvidenceBundle& dst, EvidenceBundle& src) {
    append(dst.messages, src.messages);
    append(dst.profiles, src.profiles);
    append(dst.matches, src.matches);
    append(dst.locations, src.locations);
    append(dst.tokens, src.tokens);
    append(dst.images, src.images);
    append(dst.media, src.media);
    append(dst.emails, src.emails);
    append(dst.activity, src.activity);
    append(dst.device_ids, src.device_ids);
    append(dst.volley, src.volley);
    append(dst.previews, src.previews);
    append(dst.side_rows, src.side_rows);
    append(dst.warnings, src.warnings);
    dst.disclosures.insert(src.disclosures.begin(), src.disclosures.end());
    dst.epoch_seconds += src.epoch_seconds;
    dst.epoch_milliseconds += src.epoch_milliseconds;
}

ArtifactSource source_of(const CatalogEntry& e) { return {e.path, e.kind, std::nullopt, {}}; }

bool is_image(FileKind k) { return k == FileKind::Jpeg || k == FileKind::Png || k == FileKind::WebP; }

/// Path of `e` relative to its package directory, or empty.
std::string_view package_relative(const ScanCatalog& cat, const CatalogEntry& e) {
    const AppInstall* inst = owning_install(cat, e.path);
    if (!inst) return {};
    std::string_view p = e.path;
    if (p.size() <= inst->package_path.size() + 1) return {};
    return p.substr(inst->package_path.size() + 1);
}

class Assembler {
public:
    Assembler(const fs::path& root, const ExtractOptions& opts) : root_(root), opts_(opts) {}

    Extraction run() {
        out_.catalog = scan_root(root_, opts_.registry);
        auto& b = out_.bundle;
        b.root = root_;
        b.installs = out_.catalog.installs;
        b.warnings = out_.catalog.warnings;

        for (const auto& e : out_.catalog.entries) {
            if (e.kind == FileKind::PrefsXml && e.app != AppId::Unknown) prefs(e);
        }
        for (const auto& e : out_.catalog.entries) {
            if (e.kind == FileKind::SqliteDb) database(e);
        }
        caches();

        if (b.epoch_seconds + b.epoch_milliseconds > 0) b.disclosures.insert(std::string(kDisclosureEpochUnits));
        if (opts_.acquisition_time) check_times(*opts_.acquisition_time);
        return std::move(out_);
    }

private:
    void prefs(const CatalogEntry& e) {
        auto& b = out_.bundle;
        PrefsDocument doc;
        try {
            doc = parse_prefs_xml(std::span<const std::uint8_t>(read_file_bytes(root_ / e.path)), source_of(e));
        } catch (const Error& err) {
            b.warnings.push_back(e.path + ": " + err.what());
            return;
        }
        append(b.warnings, doc.warnings);
        auto f = extract_known_prefs(doc, e.app);
        append(b.tokens, f.tokens);
        append(b.locations, f.locations);
        for (auto& addr : f.emails) b.emails.push_back({e.app, std::move(addr), Confidence::Exact, source_of(e)});
        if (f.last_active) {
            (f.last_active->unit == EpochUnit::Seconds ? b.epoch_seconds : b.epoch_milliseconds)++;
            b.activity.push_back({e.app, f.last_active->instant, "last active (" + text::basename(e.path) + ")", source_of(e)});
        }
        if (f.owner_id && !b.owners.count(e.app)) b.owners[e.app] = *f.owner_id;
        append(b.warnings, f.warnings);
        b.disclosures.insert(f.disclosures.begin(), f.disclosures.end());
    }

    void database(const CatalogEntry& e) {
        auto& b = out_.bundle;
        std::optional<std::string> owner;
        if (auto it = b.owners.find(e.app); it != b.owners.end()) owner = it->second;
        DbContribution c;
        try {
            // unregistered apps only get the heuristic sweep
            c = e.app == AppId::Unknown ? generic_sweep(e.app, root_, source_of(e)) : extract_normalized(e.app, root_, source_of(e), owner);
        } catch (const Error& err) {
            b.warnings.push_back(err.what());
            return;
        }
        for (const auto& t : c.tables) {
            out_.tables.push_back({e.path, t.table_name, t.matched_spec != nullptr, t.column_overlap});
        }
        if (c.owner_id && !b.owners.count(e.app)) b.owners[e.app] = *c.owner_id;
        merge(b, c.partial);
    }

    void caches() {
        auto& b = out_.bundle;
        const auto& cat = out_.catalog;
        std::set<std::string> paired_images;
        std::map<std::string, const CatalogEntry*> by_path;
        for (const auto& e : cat.entries) by_path[e.path] = &e;

        for (const auto& e : cat.entries) {
            if (e.kind != FileKind::PicassoMeta || e.app == AppId::Unknown) continue;
            const std::string image_path = e.path.substr(0, e.path.size() - 2) + ".i";
            auto it = by_path.find(image_path);
            if (it == by_path.end()) {
                b.warnings.push_back(e.path + ": Picasso entry has no image file");
                continue;
            }
            try {
                const auto meta = read_file_bytes(root_ / e.path);
                const auto img = read_file_bytes(root_ / image_path);
                auto entry = parse_picasso_pair(meta, img, source_of(e), source_of(*it->second));
                entry.image.app = e.app;
                paired_images.insert(image_path);
                b.images.push_back(std::move(entry.image));
            } catch (const Error& err) {
                b.warnings.push_back(e.path + ": " + err.what());
            }
        }

        for (const auto& e : cat.entries) {
            if (e.app == AppId::Unknown) continue;
            const std::string_view rel = package_relative(cat, e);
            if (rel.empty()) continue;

            if (rel.rfind("cache/volley/", 0) == 0 && e.kind != FileKind::PicassoMeta && !is_image(e.kind)) {
                volley(e);
            } else if (e.kind == FileKind::Opaque && rel.rfind("cache/", 0) == 0 &&
                       rel.find('/', 6) == std::string_view::npos) {
                carve(e);
            } else if (is_image(e.kind) && !paired_images.count(e.path)) {
                CachedImage ci;
                ci.app = e.app;
                try {
                    ci.content_hash = sha256_file(root_ / e.path);
                } catch (const Error& err) {
                    b.warnings.push_back(e.path + ": " + err.what());
                    continue;
                }
                ci.format = e.kind == FileKind::Jpeg ? ImageFormat::Jpeg
                            : e.kind == FileKind::Png ? ImageFormat::Png
                                                      : ImageFormat::WebP;
                ci.bytes_ref = source_of(e);
                b.images.push_back(std::move(ci));
            }
        }
    }

    void volley(const CatalogEntry& e) {
        auto& b = out_.bundle;
        std::vector<std::uint8_t> bytes;
        try {
            bytes = read_file_bytes(root_ / e.path);
        } catch (const Error& err) {
            b.warnings.push_back(e.path + ": " + err.what());
            return;
        }
        auto parsed = parse_volley_match_cache(bytes);
        for (auto& w : parsed.warnings) b.warnings.push_back(e.path + ": " + w);
        for (auto& ev : parsed.events) b.volley.push_back({e.app, std::move(ev), source_of(e)});
    }

    void carve(const CatalogEntry& e) {
        auto& b = out_.bundle;
        std::vector<std::uint8_t> bytes;
        try {
            bytes = read_file_bytes(root_ / e.path);
        } catch (const Error& err) {
            b.warnings.push_back(e.path + ": " + err.what());
            return;
        }
        auto previews = carve_string_records(bytes, RecordGrammar{}, source_of(e));
        for (auto& p : previews) {
            p.app = e.app;
            if (!p.location_suburb.empty()) {
                LocationFix f;
                f.app = e.app;
                f.precision = Precision::Suburb;
                f.suburb = p.location_suburb;
                f.source = p.source;
                b.locations.push_back(std::move(f));
                b.disclosures.insert(std::string(kDisclosureCarvedSuburb));
            }
            b.previews.push_back(std::move(p));
        }
    }

    void check_times(Instant acquisition) {
        auto& b = out_.bundle;
        const Instant limit = acquisition + std::chrono::hours(24);
        for (const auto& m : b.messages) {
            if (m.sent_at > limit) {
                b.warnings.push_back(m.source.file_path + " (" + m.source.detail + "): message time " +
                                     format_instant(m.sent_at) + " is after acquisition time");
            }
        }
    }

    fs::path root_;
    const ExtractOptions& opts_;
    Extraction out_;
};

}  // namespace

Extraction extract_evidence(const fs::path& root, const ExtractOptions& options) {
    return Assembler(root, options).run();
}

NetworkAnalysis analyze_network(const std::string& http_log_path, const EvidenceBundle& bundle) {
    NetworkAnalysis out;
    auto ingested = ingest_transactions_file(http_log_path);
    out.transactions = std::move(ingested.transactions);
    for (auto& w : ingested.warnings) out.warnings.push_back("http log " + w);
    out.findings = detect_leaks(out.transactions, bundle.tokens);
    return out;
}

}  // namespace gsnx
