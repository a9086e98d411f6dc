#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace gsnx {

struct PicassoEntry {
    std::string meta_path;
    std::string image_path;
    std::string request_url;
    CachedImage image;
};

ImageFormat sniff_image_format(std::span<const std::uint8_t> bytes);

/// URL is the request-target of the first line starting with "GET ".
/// Throws CacheParseError when the meta file has no GET line.
PicassoEntry parse_picasso_pair(std::span<const std::uint8_t> meta_bytes, std::span<const std::uint8_t> image_bytes,
                                const ArtifactSource& meta_source = {}, const ArtifactSource& image_source = {});

struct VolleyParse {
    std::vector<VolleyMatchEvent> events;
    std::vector<std::string> warnings;
};

/// Scans past any binary entry header to each JSON object; every object carrying a match id yields an event.
VolleyParse parse_volley_match_cache(std::span<const std::uint8_t> bytes);

struct RecordGrammar {
    std::size_t min_run = 3;         // shortest printable run considered
    std::size_t window = 64;         // max gap in bytes between neighbouring runs of one record
    std::size_t fields_before_url = 1;  // username
    std::size_t fields_after_url = 2;   // last message, suburb
};

struct PrintableRun {
    std::uint64_t offset = 0;
    std::string text;
};

/// Runs of printable ASCII / well-formed UTF-8 of at least `min_run` code points.
std::vector<PrintableRun> printable_runs(std::span<const std::uint8_t> bytes, std::size_t min_run);

/// Groups printable runs around URL-shaped runs. Byte ranges in the result are relative to `bytes`.
std::vector<CarvedMessagePreview> carve_string_records(std::span<const std::uint8_t> bytes,
                                                       const RecordGrammar& grammar = {},
                                                       const ArtifactSource& source = {});

}  // namespace gsnx
