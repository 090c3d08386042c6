#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "phishguard/detection.hpp"
#include "phishguard/error.hpp"
#include "phishguard/geometry.hpp"
#include "phishguard/image.hpp"
#include "phishguard/mlp.hpp"
#include "phishguard/tensor.hpp"
#include "phishguard/url.hpp"

namespace phishguard {

inline constexpr std::string_view kOtherBrand = "other";

struct BrandEntry {
    std::string name;
    std::vector<std::string> domains;

    friend bool operator==(const BrandEntry&, const BrandEntry&) = default;
};

/// Reference list of protected brands and the domains each legitimately
/// serves. Text form: one "name<TAB>domain[,domain...]" line per brand.
class BrandVocabulary {
public:
    BrandVocabulary() = default;

    explicit BrandVocabulary(std::vector<BrandEntry> entries) {
        for (auto& e : entries) add(std::move(e));
    }

    void add(BrandEntry e) {
        if (e.name.empty() || e.name == kOtherBrand)
            throw Error(ErrorCode::invalid_argument, "brand name '" + e.name + "' is reserved or empty");
        if (index_.contains(e.name)) throw Error(ErrorCode::invalid_argument, "duplicate brand '" + e.name + "'");
        for (auto& d : e.domains) d = normalize_host(d);
        index_.emplace(e.name, entries_.size());
        entries_.push_back(std::move(e));
    }

    static BrandVocabulary parse(std::string_view text) {
        BrandVocabulary vocab;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos || tab == 0)
                throw Error(ErrorCode::parse_error, "brand vocabulary line " + std::to_string(lineno) + ": expected name<TAB>domains");
            BrandEntry e{line.substr(0, tab), {}};
            std::stringstream domains(line.substr(tab + 1));
            std::string d;
            while (std::getline(domains, d, ','))
                if (!d.empty()) e.domains.push_back(d);
            try {
                vocab.add(std::move(e));
            } catch (const Error& err) {
                throw Error(ErrorCode::parse_error, "brand vocabulary line " + std::to_string(lineno) + ": " + err.detail());
            }
        }
        return vocab;
    }

    static BrandVocabulary from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::io_error, "cannot open brand vocabulary " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    std::string to_text() const {
        std::string out;
        for (const auto& e : entries_) {
            out += e.name;
            out += '\t';
            for (std::size_t i = 0; i < e.domains.size(); ++i) {
                if (i) out += ',';
                out += e.domains[i];
            }
            out += '\n';
        }
        return out;
    }

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<BrandEntry>& entries() const noexcept { return entries_; }

    std::optional<std::size_t> index_of(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const BrandEntry* find(std::string_view name) const {
        auto i = index_of(name);
        return i ? &entries_[*i] : nullptr;
    }

    /// True when `host` is one of the brand's domains or a subdomain of one.
    bool is_legitimate_host(std::string_view brand, std::string_view host) const {
        const BrandEntry* e = find(brand);
        if (!e) return false;
        const std::string h = normalize_host(host);
        for (const auto& d : e->domains)
            if (host_within_domain(h, d)) return true;
        return false;
    }

    /// Vocabulary names followed by "other": the label order of brand distributions.
    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(entries_.size() + 1);
        for (const auto& e : entries_) out.push_back(e.name);
        out.emplace_back(kOtherBrand);
        return out;
    }

private:
    std::vector<BrandEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Logo-crop classifier. `classify` returns a probability vector aligned with
/// `labels()`, whose last entry is "other".
class BrandModel {
public:
    virtual ~BrandModel() = default;
    virtual const std::vector<std::string>& labels() const = 0;
    virtual std::vector<double> classify(const Image& crop) const = 0;
};

struct BrandPrediction {
    std::string brand{kOtherBrand};
    double confidence = 0.0;

    bool known() const { return brand != kOtherBrand; }
    friend bool operator==(const BrandPrediction&, const BrandPrediction&) = default;
};

/// Pixel bounds of a normalized rect on a width x height raster: floor the
/// near edges, ceil the far edges, clamp to the raster.
inline PixelRect to_pixel_rect(const Rect& r, int width, int height) {
    const PixelRect p{static_cast<int>(std::floor(r.x_min() * width)), static_cast<int>(std::floor(r.y_min() * height)),
                      static_cast<int>(std::ceil(r.x_max() * width)), static_cast<int>(std::ceil(r.y_max() * height))};
    return p.clamped(width, height);
}

struct BrandClassifierConfig {
    /// Predictions below this confidence are reported as "other".
    double min_confidence = 0.5;
};

inline BrandPrediction classify_brand(const BrandModel& model, const Image& canvas, const DetectionBox& logo_box,
                                      const BrandClassifierConfig& cfg = {}) {
    if (logo_box.class_id != ElementClass::logo)
        throw Error(ErrorCode::invalid_argument, "brand classification needs a logo box");
    const PixelRect px = to_pixel_rect(logo_box.rect, canvas.width(), canvas.height());
    if (px.empty()) throw Error(ErrorCode::empty_crop, "logo box is degenerate on the canvas");

    const auto dist = model.classify(crop(canvas, px));
    const auto& labels = model.labels();
    if (dist.size() != labels.size())
        throw Error(ErrorCode::shape_mismatch, "brand distribution has " + std::to_string(dist.size()) + " entries for " +
                                                   std::to_string(labels.size()) + " labels");
    std::size_t best = 0;
    for (std::size_t i = 1; i < dist.size(); ++i)
        if (dist[i] > dist[best]) best = i;

    BrandPrediction pred{labels[best], dist[best]};
    if (pred.confidence < cfg.min_confidence) pred.brand = std::string(kOtherBrand);
    return pred;
}

enum class CrpLabel { non_crp = 0, crp = 1 };

constexpr std::string_view to_string(CrpLabel l) noexcept { return l == CrpLabel::crp ? "crp" : "non-crp"; }

struct CrpResult {
    CrpLabel label = CrpLabel::non_crp;
    /// Probability of the credential-required class.
    double score = 0.0;
};

/// Credential-required-page head over flattened detector features.
struct CrpModel {
    MlpSpec spec;
    WeightStore weights;
    DetectorCapacity capacity;

    static CrpModel from_weights(WeightStore w, DetectorCapacity cap = {}, double dropout_rate = 0.0) {
        CrpModel m{MlpSpec::from_weights(w, dropout_rate), std::move(w), cap};
        if (m.spec.input_dim() != cap.flat_size())
            throw Error(ErrorCode::shape_mismatch, "CRP head input is " + std::to_string(m.spec.input_dim()) + ", expected " +
                                                       std::to_string(cap.flat_size()));
        if (m.spec.output_dim() != 2)
            throw Error(ErrorCode::shape_mismatch, "CRP head must emit 2 logits, got " + std::to_string(m.spec.output_dim()));
        return m;
    }
};

inline std::vector<CrpResult> classify_crp(const CrpModel& model, const FeatureTensor& features) {
    if (features.capacity() != model.capacity)
        throw Error(ErrorCode::shape_mismatch, "features do not match the CRP head capacity");
    const Tensor probs = softmax(mlp_forward(model.spec, model.weights, features.flattened()));
    std::vector<CrpResult> out(features.batch());
    for (std::size_t b = 0; b < out.size(); ++b) {
        const auto row = probs.data().subspan(2 * b, 2);
        out[b].label = argmax(row) == 1 ? CrpLabel::crp : CrpLabel::non_crp;
        out[b].score = row[1];
    }
    return out;
}

} // namespace phishguard
