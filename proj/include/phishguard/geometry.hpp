#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "phishguard/error.hpp"

namespace phishguard {

/// Layout element classes produced by the detector. `no_object` is the
/// reserved code for empty detector slots and never appears in a DetectionBox.
enum class ElementClass : int { logo = 0, button = 1, input = 2, label = 3, block = 4, no_object = 5 };

inline constexpr int kNumElementClasses = 5;

constexpr std::string_view to_string(ElementClass c) noexcept {
    switch (c) {
    case ElementClass::logo: return "logo";
    case ElementClass::button: return "button";
    case ElementClass::input: return "input";
    case ElementClass::label: return "label";
    case ElementClass::block: return "block";
    case ElementClass::no_object: return "no-object";
    }
    return "no-object";
}

inline std::optional<ElementClass> parse_element_class(std::string_view s) {
    for (int i = 0; i < kNumElementClasses; ++i) {
        auto c = static_cast<ElementClass>(i);
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

/// Axis-aligned rectangle in normalized page coordinates.
///
/// Construction clamps every coordinate into [0,1] and orders the corners, so
/// a Rect value always satisfies x_min <= x_max and y_min <= y_max.
class Rect {
public:
    constexpr Rect() = default;

    Rect(double x0, double y0, double x1, double y1) {
        if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(x1) || !std::isfinite(y1))
            throw Error(ErrorCode::invalid_argument, "rect coordinates must be finite");
        x0 = std::clamp(x0, 0.0, 1.0);
        x1 = std::clamp(x1, 0.0, 1.0);
        y0 = std::clamp(y0, 0.0, 1.0);
        y1 = std::clamp(y1, 0.0, 1.0);
        x_min_ = std::min(x0, x1);
        x_max_ = std::max(x0, x1);
        y_min_ = std::min(y0, y1);
        y_max_ = std::max(y0, y1);
    }

    constexpr double x_min() const noexcept { return x_min_; }
    constexpr double y_min() const noexcept { return y_min_; }
    constexpr double x_max() const noexcept { return x_max_; }
    constexpr double y_max() const noexcept { return y_max_; }
    constexpr double width() const noexcept { return x_max_ - x_min_; }
    constexpr double height() const noexcept { return y_max_ - y_min_; }
    constexpr double area() const noexcept { return width() * height(); }
    constexpr bool empty() const noexcept { return area() <= 0.0; }

    std::array<double, 4> as_array() const noexcept { return {x_min_, y_min_, x_max_, y_max_}; }

    friend constexpr bool operator==(const Rect&, const Rect&) = default;

private:
    double x_min_ = 0.0;
    double y_min_ = 0.0;
    double x_max_ = 0.0;
    double y_max_ = 0.0;
};

struct DetectionBox {
    Rect rect;
    ElementClass class_id = ElementClass::block;
    double score = 0.0;

    friend bool operator==(const DetectionBox&, const DetectionBox&) = default;
};

struct NmsConfig {
    double iou_threshold = 0.5;
    double score_threshold = 0.3;
    bool class_aware = true;

    void validate() const {
        if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
            throw Error(ErrorCode::invalid_argument, "iou_threshold must lie in (0,1]");
        if (!(score_threshold >= 0.0 && score_threshold < 1.0))
            throw Error(ErrorCode::invalid_argument, "score_threshold must lie in [0,1)");
    }
};

/// Intersection over union; 0 when the union has zero area.
inline double iou(const Rect& a, const Rect& b) noexcept {
    const double iw = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
    const double ih = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

/// Indices of `boxes` ordered by score descending, ties by input index.
inline std::vector<std::size_t> score_order(std::span<const DetectionBox> boxes) {
    std::vector<std::size_t> order(boxes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return boxes[l].score > boxes[r].score; });
    return order;
}

/// Greedy non-maximum suppression.
///
/// Boxes are visited best-first; a box survives when its score exceeds
/// `score_threshold` and its IoU with every previously kept box (of the same
/// class when `class_aware`) is at most `iou_threshold`. The result is sorted
/// by score descending.
inline std::vector<DetectionBox> nms(std::span<const DetectionBox> boxes, const NmsConfig& cfg = {}) {
    cfg.validate();
    std::vector<DetectionBox> kept;
    kept.reserve(boxes.size());
    for (std::size_t idx : score_order(boxes)) {
        const DetectionBox& cand = boxes[idx];
        if (!(cand.score > cfg.score_threshold)) continue;
        const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const DetectionBox& k) {
            if (cfg.class_aware && k.class_id != cand.class_id) return false;
            return iou(k.rect, cand.rect) > cfg.iou_threshold;
        });
        if (!overlaps) kept.push_back(cand);
    }
    return kept;
}

} // namespace phishguard
