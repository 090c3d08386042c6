#pragma once

// Deterministic stand-ins for the trained models, used for desk-scale runs
// and tests. The detector reports a planted SceneSpec; the brand model matches
// the mean colour of a logo crop against a per-brand colour codebook that the
// fixture renderer also paints with.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "phishguard/classification.hpp"
#include "phishguard/detection.hpp"
#include "phishguard/error.hpp"
#include "phishguard/image.hpp"
#include "phishguard/rng.hpp"
#include "phishguard/scene.hpp"

namespace phishguard {

namespace feature_layout {
// Channels 0..5 hold class logits (five element classes, then no-object),
// 6..9 the box, and the rest carry class embedding, page context and noise.
inline constexpr std::size_t kClassLogits = 0;
inline constexpr std::size_t kNumLogits = 6;
inline constexpr std::size_t kBox = 6;
inline constexpr std::size_t kContext = 10;
} // namespace feature_layout

struct SyntheticDetectorConfig {
    DetectorCapacity capacity{};
    CanvasSize canvas = kDefaultCanvas;
    /// Per-coordinate box jitter as a fraction of the box extent.
    double jitter = 0.0;
    /// Chance that an element also yields a weaker, near-identical proposal.
    double duplicate_rate = 0.0;
    /// Number of low-confidence background proposals.
    std::size_t clutter = 0;
    /// Per-channel magnitude of the credential-page context direction.
    double crp_signal = 0.08;
    double noise_sigma = 1.0;
    double class_embedding_scale = 0.5;
};

namespace detail {

inline constexpr std::uint64_t kFeatureUniverseSeed = 0x70687367756172ull;

inline const std::vector<float>& class_embedding(int code, std::size_t hidden) {
    static const std::vector<std::vector<float>> table = [hidden] {
        std::vector<std::vector<float>> t(feature_layout::kNumLogits);
        for (std::size_t c = 0; c < t.size(); ++c) {
            Rng rng(mix_seed(kFeatureUniverseSeed, c));
            t[c].resize(hidden);
            for (auto& v : t[c]) v = static_cast<float>(rng.normal());
        }
        return t;
    }();
    if (table.front().size() != hidden) throw Error(ErrorCode::invalid_argument, "hidden width changed between detectors");
    return table[static_cast<std::size_t>(code)];
}

inline const std::vector<float>& crp_direction(std::size_t hidden) {
    static const std::vector<float> dir = [hidden] {
        std::vector<float> d(hidden);
        Rng rng(mix_seed(kFeatureUniverseSeed, 100));
        for (auto& v : d) v = rng.bernoulli(0.5) ? 1.0f : -1.0f;
        return d;
    }();
    if (dir.size() != hidden) throw Error(ErrorCode::invalid_argument, "hidden width changed between detectors");
    return dir;
}

struct Proposal {
    int code = static_cast<int>(ElementClass::no_object);
    std::array<float, 4> box{};
    double score = 0.0;
};

inline std::array<float, feature_layout::kNumLogits> slot_logits(const Proposal& p) {
    std::array<float, feature_layout::kNumLogits> logits{};
    if (p.code == static_cast<int>(ElementClass::no_object)) {
        logits.fill(static_cast<float>(std::log(0.004)));
        logits[feature_layout::kNumLogits - 1] = static_cast<float>(std::log(0.98));
        return logits;
    }
    // A max-probability readout over six entries never drops below 1/6.
    const double s = std::clamp(p.score, 0.17, 1.0 - 1e-4);
    logits.fill(static_cast<float>(std::log((1.0 - s) / (feature_layout::kNumLogits - 1))));
    logits[static_cast<std::size_t>(p.code)] = static_cast<float>(std::log(s));
    return logits;
}

// Box-head readout shared by detect_objects and the reference path.
inline void read_slot(const float* logits, const float* box, float* out_slot, float* out_conf) {
    double mx = logits[0];
    for (std::size_t i = 1; i < feature_layout::kNumLogits; ++i) mx = std::max(mx, static_cast<double>(logits[i]));
    double sum = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < feature_layout::kNumLogits; ++i) {
        sum += std::exp(logits[i] - mx);
        if (logits[i] > logits[best]) best = i;
    }
    std::copy(box, box + 4, out_slot);
    out_slot[4] = static_cast<float>(best);
    *out_conf = static_cast<float>(std::exp(logits[best] - mx) / sum);
}

inline std::array<float, 4> jittered(const Rect& r, double amount, Rng& rng) {
    const double jx = amount * r.width(), jy = amount * r.height();
    const Rect j(r.x_min() + rng.uniform(-jx, jx), r.y_min() + rng.uniform(-jy, jy), r.x_max() + rng.uniform(-jx, jx),
                 r.y_max() + rng.uniform(-jy, jy));
    return {static_cast<float>(j.x_min()), static_cast<float>(j.y_min()), static_cast<float>(j.x_max()),
            static_cast<float>(j.y_max())};
}

} // namespace detail

/// Detector that reports a planted scene. Slot contents are fixed at
/// construction from (seed, scene); canvas pixels are validated but not read.
class SyntheticDetector final : public DetectorBackend {
public:
    SyntheticDetector(std::uint64_t seed, SceneSpec scene, SyntheticDetectorConfig cfg = {})
        : seed_(seed), scene_(std::move(scene)), cfg_(cfg), plan_(cfg.capacity.slots) {
        if (cfg_.capacity.hidden < feature_layout::kContext + 1)
            throw Error(ErrorCode::invalid_argument, "hidden width too small for the synthetic feature layout");
        if (scene_.elements.size() > cfg_.capacity.slots)
            throw Error(ErrorCode::invalid_argument, "scene has " + std::to_string(scene_.elements.size()) +
                                                         " elements, detector capacity is " +
                                                         std::to_string(cfg_.capacity.slots));
        Rng rng(mix_seed(seed_, 1));
        std::vector<detail::Proposal> proposals;
        for (const auto& e : scene_.elements)
            proposals.push_back({static_cast<int>(e.class_id), detail::jittered(e.rect, cfg_.jitter, rng), e.score});
        for (const auto& e : scene_.elements) {
            if (proposals.size() >= cfg_.capacity.slots) break;
            if (rng.bernoulli(cfg_.duplicate_rate))
                proposals.push_back({static_cast<int>(e.class_id), detail::jittered(e.rect, cfg_.jitter + 0.02, rng),
                                     e.score * rng.uniform(0.4, 0.8)});
        }
        for (std::size_t k = 0; k < cfg_.clutter && proposals.size() < cfg_.capacity.slots; ++k) {
            const double x = rng.uniform(0.0, 0.9), y = rng.uniform(0.0, 0.9);
            const Rect r(x, y, x + rng.uniform(0.02, 0.1), y + rng.uniform(0.02, 0.1));
            proposals.push_back({static_cast<int>(rng.below(kNumElementClasses)), detail::jittered(r, 0.0, rng),
                                 rng.uniform(0.18, 0.28)});
        }
        std::vector<std::size_t> slots(cfg_.capacity.slots);
        std::iota(slots.begin(), slots.end(), std::size_t{0});
        for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng.below(i)]);
        for (std::size_t i = 0; i < proposals.size(); ++i) plan_[slots[i]] = proposals[i];
    }

    DetectorCapacity capacity() const override { return cfg_.capacity; }
    CanvasSize canvas() const override { return cfg_.canvas; }
    const SceneSpec& scene() const noexcept { return scene_; }
    std::uint64_t seed() const noexcept { return seed_; }

    FeatureTensor extract_features(const Image& canvas) const override {
        if (canvas.width() != cfg_.canvas.width || canvas.height() != cfg_.canvas.height)
            throw Error(ErrorCode::shape_mismatch, "canvas is " + std::to_string(canvas.width()) + "x" +
                                                       std::to_string(canvas.height()) + ", expected " +
                                                       std::to_string(cfg_.canvas.width) + "x" +
                                                       std::to_string(cfg_.canvas.height));
        const std::size_t slots = cfg_.capacity.slots, hidden = cfg_.capacity.hidden;
        const auto& dir = detail::crp_direction(hidden);
        const double crp = scene_.crp ? cfg_.crp_signal : -cfg_.crp_signal;
        Rng noise(mix_seed(seed_, 2));
        std::vector<float> data(slots * hidden);
        for (std::size_t n = 0; n < slots; ++n) {
            float* v = data.data() + n * hidden;
            const auto& p = plan_[n];
            const auto logits = detail::slot_logits(p);
            std::copy(logits.begin(), logits.end(), v + feature_layout::kClassLogits);
            std::copy(p.box.begin(), p.box.end(), v + feature_layout::kBox);
            const auto& emb = detail::class_embedding(p.code, hidden);
            for (std::size_t k = feature_layout::kContext; k < hidden; ++k)
                v[k] = static_cast<float>(cfg_.noise_sigma * noise.normal() + cfg_.class_embedding_scale * emb[k] +
                                          crp * dir[k]);
        }
        return FeatureTensor(Tensor({1, slots, hidden}, std::move(data)), cfg_.capacity);
    }

    RawDetections detect_objects(const FeatureTensor& features) const override {
        if (features.capacity() != cfg_.capacity)
            throw Error(ErrorCode::shape_mismatch, "features come from a detector with a different capacity");
        const std::size_t batch = features.batch(), slots = cfg_.capacity.slots, hidden = cfg_.capacity.hidden;
        std::vector<float> out(batch * slots * 5), conf(batch * slots);
        const float* f = features.tensor().data().data();
        for (std::size_t i = 0; i < batch * slots; ++i) {
            const float* v = f + i * hidden;
            detail::read_slot(v + feature_layout::kClassLogits, v + feature_layout::kBox, &out[i * 5], &conf[i]);
        }
        return RawDetections(Tensor({batch, slots, 5}, std::move(out)), Tensor({batch, slots}, std::move(conf)));
    }

    /// Box-head output computed straight from the planted slots, without
    /// synthesizing features. Equal to detect_objects(extract_features(img)).
    RawDetections reference_detections() const {
        const std::size_t slots = cfg_.capacity.slots;
        std::vector<float> out(slots * 5), conf(slots);
        for (std::size_t n = 0; n < slots; ++n) {
            const auto logits = detail::slot_logits(plan_[n]);
            detail::read_slot(logits.data(), plan_[n].box.data(), &out[n * 5], &conf[n]);
        }
        return RawDetections(Tensor({1, slots, 5}, std::move(out)), Tensor({1, slots}, std::move(conf)));
    }

private:
    std::uint64_t seed_;
    SceneSpec scene_;
    SyntheticDetectorConfig cfg_;
    std::vector<detail::Proposal> plan_;
};

/// Distinct logo colours per vocabulary entry, drawn from the non-grey points
/// of an 8-level RGB lattice. Grey lattice points are left for logos of
/// brands outside the vocabulary.
class BrandCodebook {
public:
    static constexpr int kLevels = 8;
    static constexpr double kMatchRadius = 8.0;

    explicit BrandCodebook(std::size_t brands) {
        std::vector<Rgb> lattice;
        for (int r = 0; r < kLevels; ++r)
            for (int g = 0; g < kLevels; ++g)
                for (int b = 0; b < kLevels; ++b)
                    if (!(r == g && g == b)) lattice.push_back({level(r), level(g), level(b)});
        if (brands > lattice.size())
            throw Error(ErrorCode::invalid_argument, "codebook holds at most " + std::to_string(lattice.size()) + " brands");
        std::stable_sort(lattice.begin(), lattice.end(), [](const Rgb& a, const Rgb& b) { return key(a) < key(b); });
        lattice.resize(brands);
        colors_ = std::move(lattice);
    }

    std::size_t size() const noexcept { return colors_.size(); }
    const Rgb& color(std::size_t brand_index) const { return colors_.at(brand_index); }
    const std::vector<Rgb>& colors() const noexcept { return colors_; }

    /// Logo colour for brands outside the vocabulary.
    static Rgb unknown_color(std::size_t k) {
        const auto v = level(static_cast<int>(1 + k % (kLevels - 2)));
        return {v, v, v};
    }

private:
    static std::uint8_t level(int i) { return static_cast<std::uint8_t>(16 + 32 * i); }
    static std::uint64_t key(const Rgb& c) { return mix_seed((std::uint64_t(c[0]) << 16) | (std::uint64_t(c[1]) << 8) | c[2]); }

    std::vector<Rgb> colors_;
};

/// Brand classifier over the mean colour of the central half of a crop.
/// Brand weights fall off as exp(-d^2/2) with RGB distance d; "other" gets the
/// weight of a colour exactly kMatchRadius away.
class CodebookBrandModel final : public BrandModel {
public:
    explicit CodebookBrandModel(const BrandVocabulary& vocab) : labels_(vocab.labels()), codebook_(vocab.size()) {}

    const std::vector<std::string>& labels() const override { return labels_; }
    const BrandCodebook& codebook() const noexcept { return codebook_; }

    std::vector<double> classify(const Image& crop) const override {
        const int x0 = crop.width() / 4, x1 = std::max(x0 + 1, crop.width() - crop.width() / 4);
        const int y0 = crop.height() / 4, y1 = std::max(y0 + 1, crop.height() - crop.height() / 4);
        std::array<double, 3> mean{};
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                for (int c = 0; c < 3; ++c) mean[c] += crop.at(x, y, c);
        const double n = static_cast<double>(x1 - x0) * (y1 - y0);
        for (auto& m : mean) m /= n;

        std::vector<double> logw(labels_.size());
        for (std::size_t i = 0; i < codebook_.size(); ++i) {
            double d2 = 0.0;
            for (int c = 0; c < 3; ++c) d2 += (mean[c] - codebook_.color(i)[c]) * (mean[c] - codebook_.color(i)[c]);
            logw[i] = -0.5 * d2;
        }
        logw.back() = -0.5 * BrandCodebook::kMatchRadius * BrandCodebook::kMatchRadius;
        const double mx = *std::max_element(logw.begin(), logw.end());
        double sum = 0.0;
        for (auto& w : logw) sum += (w = std::exp(w - mx));
        for (auto& w : logw) w /= sum;
        return logw;
    }

private:
    std::vector<std::string> labels_;
    BrandCodebook codebook_;
};

namespace palette {
inline constexpr Rgb kBackground{250, 250, 250};
inline constexpr Rgb kChrome{58, 58, 64};
inline constexpr Rgb kDesktop{20, 24, 32};
inline constexpr Rgb kBlock{228, 228, 232};
inline constexpr Rgb kLabel{70, 70, 76};
inline constexpr Rgb kInput{255, 255, 255};
inline constexpr Rgb kInputBorder{150, 150, 156};
inline constexpr Rgb kButton{30, 110, 220};
} // namespace palette

/// Paints a scene at width x height. Logos take the brand's codebook colour,
/// or a grey when the brand is absent or not in the vocabulary.
inline Image render_page(const SceneSpec& scene, const BrandVocabulary& vocab, const BrandCodebook& codebook, int width,
                         int height) {
    Image img(width, height, palette::kBackground);
    Rgb logo_color = BrandCodebook::unknown_color(scene.brand ? fnv1a(*scene.brand) : 0);
    if (scene.brand)
        if (auto idx = vocab.index_of(*scene.brand); idx && *idx < codebook.size()) logo_color = codebook.color(*idx);

    auto px = [&](const Rect& r) { return to_pixel_rect(r, width, height); };
    for (ElementClass pass : {ElementClass::block, ElementClass::label, ElementClass::input, ElementClass::button,
                              ElementClass::logo}) {
        for (const auto& e : scene.elements) {
            if (e.class_id != pass) continue;
            const PixelRect p = px(e.rect);
            switch (pass) {
            case ElementClass::block: img.fill_rect(p.left, p.top, p.right, p.bottom, palette::kBlock); break;
            case ElementClass::label: img.fill_rect(p.left, p.top, p.right, p.bottom, palette::kLabel); break;
            case ElementClass::input:
                img.fill_rect(p.left, p.top, p.right, p.bottom, palette::kInputBorder);
                img.fill_rect(p.left + 1, p.top + 1, p.right - 1, p.bottom - 1, palette::kInput);
                break;
            case ElementClass::button: img.fill_rect(p.left, p.top, p.right, p.bottom, palette::kButton); break;
            case ElementClass::logo: img.fill_rect(p.left, p.top, p.right, p.bottom, logo_color); break;
            case ElementClass::no_object: break;
            }
        }
    }
    return img;
}

/// Full-screen frame: desktop, a browser chrome bar above the web area, and
/// the rendered page placed at `web_area`.
inline Image render_frame(const SceneSpec& scene, const BrandVocabulary& vocab, const BrandCodebook& codebook,
                          int frame_width, int frame_height, const PixelRect& web_area) {
    Image frame(frame_width, frame_height, palette::kDesktop);
    const PixelRect area = web_area.clamped(frame_width, frame_height);
    if (area.empty()) throw Error(ErrorCode::empty_roi, "web area lies outside the frame");
    frame.fill_rect(area.left, std::max(0, area.top - 40), area.right, area.top, palette::kChrome);
    const Image page = render_page(scene, vocab, codebook, area.width(), area.height());
    for (int y = 0; y < page.height(); ++y)
        for (int x = 0; x < page.width(); ++x)
            for (int c = 0; c < 3; ++c) frame.at(area.left + x, area.top + y, c) = page.at(x, y, c);
    return frame;
}

} // namespace phishguard
