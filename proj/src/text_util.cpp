#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

namespace gsnx::text {

namespace {

bool is_local_char(unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

bool is_domain_char(unsigned char c) { return std::isalnum(c) || c == '.' || c == '-'; }

bool is_url_char(unsigned char c) {
    return c > 0x20 && c < 0x7F && c != '"' && c != '\'' && c != '<' && c != '>' && c != '\\' && c != '`';
}

}  // namespace

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    return lower(haystack).find(lower(needle)) != std::string::npos;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && lower(a) == lower(b);
}

std::vector<Match> find_emails(std::string_view s) {
    std::vector<Match> out;
    std::size_t pos = 0;
    while ((pos = s.find('@', pos)) != std::string_view::npos) {
        std::size_t begin = pos;
        while (begin > 0 && is_local_char(static_cast<unsigned char>(s[begin - 1]))) --begin;
        std::size_t end = pos + 1;
        while (end < s.size() && is_domain_char(static_cast<unsigned char>(s[end]))) ++end;
        // Trim trailing dots/hyphens from the domain.
        while (end > pos + 1 && (s[end - 1] == '.' || s[end - 1] == '-')) --end;
        const std::string_view local = s.substr(begin, pos - begin);
        const std::string_view domain = s.substr(pos + 1, end - pos - 1);
        const auto dot = domain.rfind('.');
        bool ok = !local.empty() && dot != std::string_view::npos && dot > 0 && domain.size() - dot - 1 >= 2;
        if (ok) {
            const auto tld = domain.substr(dot + 1);
            ok = std::all_of(tld.begin(), tld.end(), [](unsigned char c) { return std::isalpha(c); });
        }
        if (ok) {
            out.push_back({begin, end - begin, s.substr(begin, end - begin)});
            pos = end;
        } else {
            ++pos;
        }
    }
    return out;
}

bool is_email(std::string_view s) {
    const auto m = find_emails(s);
    return m.size() == 1 && m[0].offset == 0 && m[0].length == s.size();
}

std::vector<Match> find_urls(std::string_view s) {
    std::vector<Match> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto h = s.find("http", pos);
        if (h == std::string_view::npos) break;
        std::size_t start = std::string_view::npos;
        if (s.compare(h, 7, "http://") == 0) start = h;
        else if (s.compare(h, 8, "https://") == 0) start = h;
        if (start == std::string_view::npos) {
            pos = h + 4;
            continue;
        }
        std::size_t end = s.find("://", start) + 3;
        const std::size_t host_begin = end;
        while (end < s.size() && is_url_char(static_cast<unsigned char>(s[end]))) ++end;
        while (end > host_begin && (s[end - 1] == ',' || s[end - 1] == ';' || s[end - 1] == ')' || s[end - 1] == '}' ||
                                    s[end - 1] == ']'))
            --end;
        if (end > host_begin) out.push_back({start, end - start, s.substr(start, end - start)});
        pos = end > h ? end : h + 4;
    }
    return out;
}

bool is_url(std::string_view s) {
    const auto m = find_urls(s);
    return m.size() == 1 && m[0].offset == 0 && m[0].length == s.size();
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    std::int64_t v = 0;
    const char* first = t.data();
    if (*first == '+') ++first;
    auto [p, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return std::nullopt;
    if (v != v) return std::nullopt;  // NaN
    return v;
}

std::string basename(std::string_view path) {
    const auto slash = path.rfind('/');
    return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace gsnx::text
