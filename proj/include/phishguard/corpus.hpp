#pragma once

// Seeded synthetic corpora: brand vocabularies, page layouts, URLs and the
// matching ground-truth records.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phishguard/classification.hpp"
#include "phishguard/manifest.hpp"
#include "phishguard/rng.hpp"
#include "phishguard/scene.hpp"
#include "phishguard/synthetic.hpp"
#include "phishguard/url.hpp"

namespace phishguard {

/// `count` brands: a fixed list of well-known names first, then numbered fillers.
inline BrandVocabulary make_vocabulary(std::size_t count) {
    static const std::vector<BrandEntry> known = {
        {"DHL", {"dhl.com", "dhlsameday.com", "dhl.de"}},
        {"PayPal", {"paypal.com", "paypal.me"}},
        {"Microsoft", {"microsoft.com", "live.com", "office.com", "microsoftonline.com"}},
        {"Apple", {"apple.com", "icloud.com"}},
        {"Amazon", {"amazon.com", "amazon.de", "amazon.co.uk"}},
        {"Netflix", {"netflix.com"}},
        {"Facebook", {"facebook.com", "fb.com"}},
        {"Google", {"google.com", "gmail.com"}},
        {"Adobe", {"adobe.com"}},
        {"Dropbox", {"dropbox.com"}},
        {"LinkedIn", {"linkedin.com"}},
        {"Instagram", {"instagram.com"}},
        {"Chase", {"chase.com"}},
        {"Wells Fargo", {"wellsfargo.com"}},
        {"Bank of America", {"bankofamerica.com"}},
        {"DocuSign", {"docusign.com", "docusign.net"}},
        {"Yahoo", {"yahoo.com"}},
        {"Outlook", {"outlook.com", "live.com"}},
        {"Steam", {"steampowered.com", "steamcommunity.com"}},
        {"Coinbase", {"coinbase.com"}},
    };
    std::vector<BrandEntry> entries;
    for (std::size_t i = 0; i < count; ++i) {
        if (i < known.size()) {
            entries.push_back(known[i]);
        } else {
            char name[32];
            std::snprintf(name, sizeof name, "Brand %03zu", i + 1);
            char domain[32];
            std::snprintf(domain, sizeof domain, "brand%03zu.com", i + 1);
            entries.push_back({name, {domain}});
        }
    }
    return BrandVocabulary(std::move(entries));
}

enum class CorpusKind { separable, adversarial };

constexpr std::string_view to_string(CorpusKind k) noexcept { return k == CorpusKind::adversarial ? "adversarial" : "separable"; }

struct CorpusConfig {
    std::size_t pages = 1000;
    std::uint64_t seed = 7;
    CorpusKind kind = CorpusKind::separable;
    int frame_width = 1024;
    int frame_height = 640;
    /// Share of phishing pages whose host is also put on the blacklist.
    double blacklisted_fraction = 0.1;
};

struct Corpus {
    std::vector<DatasetRecord> records;
    Blacklist blacklist;
    std::vector<std::string> blacklist_lines;
};

inline SyntheticDetectorConfig detector_config_for(CorpusKind kind) {
    SyntheticDetectorConfig d;
    if (kind == CorpusKind::separable) {
        d.jitter = 0.02;
        d.duplicate_rate = 0.3;
        d.clutter = 5;
        d.crp_signal = 0.08;
    } else {
        d.jitter = 0.08;
        d.duplicate_rate = 0.5;
        d.clutter = 15;
        d.crp_signal = 0.015;
    }
    return d;
}

namespace detail {

inline std::string random_word(Rng& rng, std::size_t lo, std::size_t hi) {
    static constexpr std::string_view letters = "abcdefghijklmnopqrstuvwxyz";
    const std::size_t n = lo + rng.below(hi - lo + 1);
    std::string w;
    for (std::size_t i = 0; i < n; ++i) w += letters[rng.below(letters.size())];
    return w;
}

inline std::string slug(std::string_view name) {
    std::string s;
    for (char c : name)
        if (std::isalnum(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::string foreign_host(Rng& rng, const BrandVocabulary& vocab, const std::optional<std::string>& brand) {
    static constexpr std::array<std::string_view, 7> tlds{".com", ".net", ".top", ".xyz", ".info", ".online", ".site"};
    static constexpr std::array<std::string_view, 6> lures{"secure", "login", "verify", "account", "support", "update"};
    for (;;) {
        std::string host;
        const auto style = rng.below(3);
        const std::string b = brand ? slug(*brand) : random_word(rng, 4, 8);
        if (style == 0) host = b + "-" + std::string(lures[rng.below(lures.size())]) + "-" + random_word(rng, 3, 6);
        else if (style == 1) host = std::string(lures[rng.below(lures.size())]) + "." + b + "." + random_word(rng, 5, 9);
        else host = random_word(rng, 5, 10);
        host += tlds[rng.below(tlds.size())];
        bool owned = false;
        for (const auto& e : vocab.entries())
            for (const auto& d : e.domains)
                if (host_within_domain(host, d)) owned = true;
        if (!owned) return host;
    }
}

inline Rect sized_rect(Rng& rng, double x, double y, double w_lo, double w_hi, double h_lo, double h_hi) {
    const double w = rng.uniform(w_lo, w_hi), h = rng.uniform(h_lo, h_hi);
    return Rect(x, y, x + w, y + h);
}

inline double planted_score(Rng& rng, CorpusKind kind) {
    return kind == CorpusKind::separable ? rng.uniform(0.6, 0.99) : rng.uniform(0.25, 0.95);
}

inline std::vector<SceneElement> page_layout_impl(Rng& rng, CorpusKind kind, bool logo, bool crp) {
    std::vector<SceneElement> els;
    auto add = [&](ElementClass c, const Rect& r) { els.push_back({c, r, planted_score(rng, kind)}); };

    const double header_h = rng.uniform(0.08, 0.13);
    add(ElementClass::block, Rect(0.0, 0.0, 1.0, header_h));
    if (logo) add(ElementClass::logo, sized_rect(rng, rng.uniform(0.02, 0.08), header_h * 0.15, 0.09, 0.16, header_h * 0.55, header_h * 0.7));
    const std::size_t nav = rng.below(4);
    for (std::size_t i = 0; i < nav; ++i)
        add(ElementClass::label, sized_rect(rng, 0.45 + 0.12 * static_cast<double>(i), header_h * 0.35, 0.06, 0.09, 0.02, 0.03));

    if (crp) {
        const double fx = rng.uniform(0.3, 0.4), fy = rng.uniform(0.2, 0.3), fw = rng.uniform(0.26, 0.34);
        double y = fy + 0.05;
        const std::size_t fields = 1 + rng.below(3);
        for (std::size_t i = 0; i < fields; ++i) {
            add(ElementClass::label, Rect(fx + 0.02, y, fx + 0.02 + rng.uniform(0.08, 0.14), y + 0.03));
            add(ElementClass::input, Rect(fx + 0.02, y + 0.04, fx + fw - 0.02, y + 0.1));
            y += 0.14;
        }
        add(ElementClass::button, Rect(fx + 0.02, y + 0.01, fx + fw - 0.02, y + 0.08));
        add(ElementClass::block, Rect(fx, fy, fx + fw, y + 0.11));
    } else {
        const std::size_t cols = 1 + rng.below(3);
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = 0.05 + 0.31 * static_cast<double>(c);
            const double top = rng.uniform(0.2, 0.3);
            add(ElementClass::block, Rect(x, top, x + 0.27, top + rng.uniform(0.35, 0.55)));
            add(ElementClass::label, Rect(x + 0.02, top + 0.03, x + 0.2, top + 0.07));
            if (rng.bernoulli(0.5)) add(ElementClass::button, Rect(x + 0.02, top + 0.25, x + 0.12, top + 0.31));
        }
    }
    return els;
}

} // namespace detail

/// Element layout of one synthetic page: a header band, an optional logo in
/// it, and either a credential form or plain content columns.
inline std::vector<SceneElement> page_layout(Rng& rng, CorpusKind kind, bool logo, bool crp) {
    return detail::page_layout_impl(rng, kind, logo, crp);
}

/// Generates a labelled corpus. Page mix: impersonating credential pages on
/// foreign hosts (phishing), the same brands' own login pages, brand pages
/// without credential forms, credential pages with unlisted logos, and pages
/// without a logo (all benign).
inline Corpus generate_corpus(const CorpusConfig& cfg, const BrandVocabulary& vocab) {
    if (vocab.size() == 0) throw Error(ErrorCode::invalid_argument, "corpus needs a non-empty brand vocabulary");
    Rng rng(mix_seed(cfg.seed, 0xc0));
    Corpus corpus;
    for (std::size_t i = 0; i < cfg.pages; ++i) {
        DatasetRecord r;
        char name[32];
        std::snprintf(name, sizeof name, "pages/page_%05zu.png", i);
        r.image = name;
        r.frame_width = cfg.frame_width;
        r.frame_height = cfg.frame_height;
        r.seed = mix_seed(cfg.seed, 1000 + i);
        r.detector = detector_config_for(cfg.kind);

        const double kind = rng.uniform();
        const auto& brand_entry = vocab.entries()[rng.below(vocab.size())];
        bool logo = true;
        std::string host;
        if (kind < 0.35) {
            r.brand = brand_entry.name;
            r.crp = true;
            r.verdict = Decision::phishing;
            host = detail::foreign_host(rng, vocab, r.brand);
        } else if (kind < 0.50) {
            r.brand = brand_entry.name;
            r.crp = true;
            const auto& d = brand_entry.domains[rng.below(brand_entry.domains.size())];
            static constexpr std::array<std::string_view, 4> subs{"", "www.", "login.", "account."};
            host = std::string(subs[rng.below(subs.size())]) + d;
        } else if (kind < 0.65) {
            r.brand = brand_entry.name;
            r.crp = false;
            host = rng.bernoulli(0.5) ? brand_entry.domains.front() : detail::foreign_host(rng, vocab, r.brand);
        } else if (kind < 0.80) {
            std::string other = detail::random_word(rng, 5, 9);
            other[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(other[0])));
            r.brand = other + " Ltd";
            r.crp = true;
            host = detail::foreign_host(rng, vocab, r.brand);
        } else {
            logo = false;
            r.crp = rng.bernoulli(0.5);
            host = detail::foreign_host(rng, vocab, std::nullopt);
        }
        r.boxes = page_layout(rng, cfg.kind, logo, r.crp);
        r.url = "https://" + host + "/" + detail::random_word(rng, 3, 8);

        // Browser window somewhere on screen; 16:9 web area; occasional scroll container offset.
        const int w = 640 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.frame_width - 640 + 1)));
        const int h = std::min(cfg.frame_height - 40, w * 9 / 16);
        const int left = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.frame_width - w + 1)));
        const int top = 40 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.frame_height - 40 - h + 1)));
        const int dy = rng.bernoulli(0.2) ? static_cast<int>(rng.below(200)) : 0;
        r.roi = {{left, top + dy, left + w, top + h + dy}, 0, dy};

        if (r.verdict == Decision::phishing && rng.bernoulli(cfg.blacklisted_fraction)) {
            if (rng.bernoulli(0.5)) {
                corpus.blacklist.add_host(host);
                corpus.blacklist_lines.push_back(host);
            } else {
                const auto dot = host.find('.');
                const std::string domain = host.substr(dot + 1).find('.') != std::string::npos ? host.substr(dot + 1) : host;
                corpus.blacklist.add_domain(domain);
                corpus.blacklist_lines.push_back("domain:" + domain);
            }
        }
        r.validate();
        corpus.records.push_back(std::move(r));
    }
    return corpus;
}

/// Renders the full-screen frame a record describes.
inline Image render_record(const DatasetRecord& r, const BrandVocabulary& vocab, const BrandCodebook& codebook) {
    return render_frame(r.scene(), vocab, codebook, r.frame_width, r.frame_height, r.roi.on_screen());
}

} // namespace phishguard
