#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsnx::text {

std::string lower(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);
bool iequals(std::string_view a, std::string_view b);

struct Match {
    std::size_t offset = 0;
    std::size_t length = 0;
    std::string_view value;
};

/// local@domain.tld occurrences, non-overlapping, left to right.
std::vector<Match> find_emails(std::string_view s);
bool is_email(std::string_view s);

/// http:// or https:// URLs up to whitespace, quotes, or control bytes.
std::vector<Match> find_urls(std::string_view s);
bool is_url(std::string_view s);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

std::string basename(std::string_view path);
std::string trim(std::string_view s);

}  // namespace gsnx::text
