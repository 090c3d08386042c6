#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phishguard/classification.hpp"
#include "phishguard/detection.hpp"
#include "phishguard/error.hpp"
#include "phishguard/geometry.hpp"
#include "phishguard/image.hpp"
#include "phishguard/url.hpp"

namespace phishguard {

struct Frame {
    Image pixels;
    /// Monotonic capture time in seconds.
    double timestamp = 0.0;
    std::optional<std::string> page_url;
};

/// Web-content area of a frame. `rect` is reported relative to the scroll
/// container; subtracting `scroll_offset` gives its on-screen position.
struct RegionOfInterest {
    PixelRect rect;
    int scroll_dx = 0;
    int scroll_dy = 0;

    PixelRect on_screen() const noexcept {
        return {rect.left - scroll_dx, rect.top - scroll_dy, rect.right - scroll_dx, rect.bottom - scroll_dy};
    }

    static RegionOfInterest full(const Image& img) { return {{0, 0, img.width(), img.height()}, 0, 0}; }

    friend bool operator==(const RegionOfInterest&, const RegionOfInterest&) = default;
};

/// Crops the web area out of a full-screen frame and resizes it to the detector canvas.
inline Image crop_roi(const Image& frame, const RegionOfInterest& roi, CanvasSize canvas = kDefaultCanvas) {
    const PixelRect r = roi.on_screen().clamped(frame.width(), frame.height());
    if (r.empty()) throw Error(ErrorCode::empty_roi, "region of interest is empty after clamping to the frame");
    return resize_bilinear(crop(frame, r), canvas.width, canvas.height);
}

enum class Decision { phishing, benign, inconclusive };

enum class MatchedRule { blacklist_hit, no_logo, unknown_brand, non_crp, domain_legitimate, impersonation, missing_url };

constexpr std::string_view to_string(Decision d) noexcept {
    switch (d) {
    case Decision::phishing: return "phishing";
    case Decision::benign: return "benign";
    case Decision::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

constexpr std::string_view to_string(MatchedRule r) noexcept {
    switch (r) {
    case MatchedRule::blacklist_hit: return "blacklist-hit";
    case MatchedRule::no_logo: return "no-logo";
    case MatchedRule::unknown_brand: return "unknown-brand";
    case MatchedRule::non_crp: return "non-crp";
    case MatchedRule::domain_legitimate: return "domain-legitimate";
    case MatchedRule::impersonation: return "impersonation";
    case MatchedRule::missing_url: return "missing-url";
    }
    return "missing-url";
}

struct Evidence {
    std::optional<DetectionBox> logo_box;
    std::optional<BrandPrediction> brand;
    std::optional<CrpResult> crp;
    std::optional<BlacklistHit> blacklist;
    std::optional<std::string> host;
    std::size_t elements = 0;
};

/// Seconds spent per stage; stages that did not run stay at zero.
struct StageLatency {
    double prefilter = 0.0;
    double roi = 0.0;
    double detect = 0.0;
    double brand = 0.0;
    double crp = 0.0;
    double total = 0.0;
};

struct Verdict {
    Decision decision = Decision::inconclusive;
    MatchedRule matched_rule = MatchedRule::missing_url;
    Evidence evidence;
    StageLatency latency;
    /// Detections after suppression, kept for evaluation.
    std::vector<DetectionBox> detections;

    /// Score used for ROC sweeps: 1 for blacklist hits, the CRP probability
    /// for pages showing a reference brand on a foreign (or unknown) domain,
    /// 0 for everything else.
    double phishing_score() const {
        if (matched_rule == MatchedRule::blacklist_hit) return 1.0;
        if (matched_rule == MatchedRule::domain_legitimate) return 0.0;
        if (evidence.brand && evidence.brand->known() && evidence.crp) return evidence.crp->score;
        return 0.0;
    }

    /// A phishing decision must be backed by a blacklist hit, or by a known
    /// brand on a credential page served from a domain the brand does not own.
    bool sound(const BrandVocabulary& vocab) const {
        if (decision != Decision::phishing) return true;
        if (matched_rule == MatchedRule::blacklist_hit) return evidence.blacklist.has_value();
        return matched_rule == MatchedRule::impersonation && evidence.brand && evidence.brand->known() &&
               evidence.crp && evidence.crp->label == CrpLabel::crp && evidence.host &&
               !vocab.is_legitimate_host(evidence.brand->brand, *evidence.host);
    }
};

/// Read-only model bundle for one analysis.
struct Models {
    const DetectorBackend& detector;
    const BrandModel& brand;
    const CrpModel& crp;
    NmsConfig nms{};
    BrandClassifierConfig brand_cfg{};
};

namespace detail {
class StageTimer {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};
} // namespace detail

/// Ordered rule evaluation: blacklist, logo presence, brand, credential
/// page, then domain ownership. The first rule that fires decides.
inline Verdict analyze(const Frame& frame, const RegionOfInterest& roi, const Models& models, const BrandVocabulary& vocab,
                       const Blacklist& blacklist) {
    const auto started = std::chrono::steady_clock::now();
    detail::StageTimer timer;
    Verdict v;
    auto finish = [&](Decision d, MatchedRule r) {
        v.decision = d;
        v.matched_rule = r;
        v.latency.total = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return v;
    };

    if (frame.page_url) {
        v.evidence.host = extract_host(*frame.page_url);
        v.evidence.blacklist = blacklist.match_host(*v.evidence.host);
    }
    v.latency.prefilter = timer.lap();
    if (v.evidence.blacklist) return finish(Decision::phishing, MatchedRule::blacklist_hit);

    const Image canvas = crop_roi(frame.pixels, roi, models.detector.canvas());
    v.latency.roi = timer.lap();

    const FeatureTensor features = models.detector.extract_features(canvas);
    v.detections = decode_detections(models.detector.detect_objects(features), models.nms).front();
    v.evidence.elements = v.detections.size();
    v.evidence.logo_box = select_logo(v.detections);
    v.latency.detect = timer.lap();
    if (!v.evidence.logo_box) return finish(Decision::benign, MatchedRule::no_logo);

    v.evidence.brand = classify_brand(models.brand, canvas, *v.evidence.logo_box, models.brand_cfg);
    v.latency.brand = timer.lap();
    if (!v.evidence.brand->known() || !vocab.find(v.evidence.brand->brand))
        return finish(Decision::benign, MatchedRule::unknown_brand);

    v.evidence.crp = classify_crp(models.crp, features).front();
    v.latency.crp = timer.lap();
    if (v.evidence.crp->label != CrpLabel::crp) return finish(Decision::benign, MatchedRule::non_crp);

    if (!v.evidence.host) return finish(Decision::inconclusive, MatchedRule::missing_url);
    if (vocab.is_legitimate_host(v.evidence.brand->brand, *v.evidence.host))
        return finish(Decision::benign, MatchedRule::domain_legitimate);
    return finish(Decision::phishing, MatchedRule::impersonation);
}

} // namespace phishguard
