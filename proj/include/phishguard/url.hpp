#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "phishguard/error.hpp"

namespace phishguard {

/// Lowercases and strips one trailing dot.
inline std::string normalize_host(std::string_view host) {
    std::string h(host);
    std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!h.empty() && h.back() == '.') h.pop_back();
    return h;
}

/// Host component of an absolute URL (scheme://[user@]host[:port][/...]), normalized.
inline std::string extract_host(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0)
        throw Error(ErrorCode::malformed_url, "'" + std::string(url) + "' has no scheme");
    for (char c : url.substr(0, scheme_end))
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.'))
            throw Error(ErrorCode::malformed_url, "'" + std::string(url) + "' has an invalid scheme");
    std::string_view rest = url.substr(scheme_end + 3);
    rest = rest.substr(0, rest.find_first_of("/?#"));
    if (auto at = rest.rfind('@'); at != std::string_view::npos) rest = rest.substr(at + 1);
    if (!rest.empty() && rest.front() == '[')
        throw Error(ErrorCode::malformed_url, "'" + std::string(url) + "': IP literal hosts are not supported");
    if (auto colon = rest.find(':'); colon != std::string_view::npos) {
        const auto port = rest.substr(colon + 1);
        if (!std::all_of(port.begin(), port.end(), [](unsigned char c) { return std::isdigit(c); }))
            throw Error(ErrorCode::malformed_url, "'" + std::string(url) + "' has a non-numeric port");
        rest = rest.substr(0, colon);
    }
    std::string host = normalize_host(rest);
    if (host.empty()) throw Error(ErrorCode::malformed_url, "'" + std::string(url) + "' has an empty host");
    std::size_t label_start = 0;
    for (std::size_t i = 0; i <= host.size(); ++i) {
        if (i == host.size() || host[i] == '.') {
            if (i == label_start) throw Error(ErrorCode::malformed_url, "'" + std::string(url) + "' has an empty host label");
            label_start = i + 1;
            continue;
        }
        const unsigned char c = static_cast<unsigned char>(host[i]);
        if (!(std::isalnum(c) || c == '-' || c == '_'))
            throw Error(ErrorCode::malformed_url, "'" + std::string(url) + "' has an invalid host character");
    }
    return host;
}

/// True when `host` equals `domain` or is a subdomain of it on a label boundary.
inline bool host_within_domain(std::string_view host, std::string_view domain) {
    if (domain.empty() || host.size() < domain.size()) return false;
    if (host == domain) return true;
    return host.size() > domain.size() && host.ends_with(domain) && host[host.size() - domain.size() - 1] == '.';
}

struct BlacklistHit {
    std::string entry;
    std::string host;

    friend bool operator==(const BlacklistHit&, const BlacklistHit&) = default;
};

/// Phishing host list. Lines are either a bare host (exact match) or
/// "domain:<suffix>" (the suffix and all of its subdomains); '#' starts a comment.
class Blacklist {
public:
    Blacklist() = default;

    static Blacklist parse(std::string_view text) {
        Blacklist bl;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
            if (line.starts_with("domain:")) {
                std::string d = normalize_host(line.substr(7));
                if (d.empty()) throw Error(ErrorCode::parse_error, "blacklist line " + std::to_string(lineno) + ": empty domain");
                bl.domains_.push_back(std::move(d));
            } else {
                bl.hosts_.push_back(normalize_host(line));
            }
        }
        return bl;
    }

    static Blacklist from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::io_error, "cannot open blacklist " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    void add_host(std::string host) { hosts_.push_back(normalize_host(host)); }
    void add_domain(std::string domain) { domains_.push_back(normalize_host(domain)); }

    std::optional<BlacklistHit> match_host(std::string_view raw_host) const {
        const std::string host = normalize_host(raw_host);
        for (const auto& h : hosts_)
            if (h == host) return BlacklistHit{h, host};
        for (const auto& d : domains_)
            if (host_within_domain(host, d)) return BlacklistHit{"domain:" + d, host};
        return std::nullopt;
    }

    std::size_t size() const noexcept { return hosts_.size() + domains_.size(); }
    bool empty() const noexcept { return size() == 0; }

private:
    std::vector<std::string> hosts_;
    std::vector<std::string> domains_;
};

/// URL pre-filter run before any visual analysis.
inline std::optional<BlacklistHit> prefilter_url(std::string_view url, const Blacklist& blacklist) {
    return blacklist.match_host(extract_host(url));
}

} // namespace phishguard
