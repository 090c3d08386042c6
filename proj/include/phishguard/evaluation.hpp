#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phishguard/error.hpp"
#include "phishguard/geometry.hpp"
#include "phishguard/pipeline.hpp"

namespace phishguard {

struct GroundTruthBox {
    Rect rect;
    ElementClass class_id = ElementClass::block;

    friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

inline std::vector<double> coco_iou_thresholds() {
    std::vector<double> t;
    for (int k = 0; k < 10; ++k) t.push_back(0.50 + 0.05 * k);
    return t;
}

struct MetricsConfig {
    std::vector<double> iou_thresholds = coco_iou_thresholds();
    /// Classes averaged into mAP; logo-only by default.
    std::vector<ElementClass> classes{ElementClass::logo};
    /// Number of evenly spaced ROC thresholds in [0, 1]; 0 sweeps every distinct score.
    std::size_t roc_resolution = 0;

    void validate() const {
        if (iou_thresholds.empty()) throw Error(ErrorCode::invalid_argument, "no IoU thresholds");
        for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
            if (!(iou_thresholds[i] > 0.0 && iou_thresholds[i] < 1.0))
                throw Error(ErrorCode::invalid_argument, "IoU thresholds must lie in (0,1)");
            if (i && !(iou_thresholds[i] > iou_thresholds[i - 1]))
                throw Error(ErrorCode::invalid_argument, "IoU thresholds must be strictly increasing");
        }
        if (classes.empty()) throw Error(ErrorCode::invalid_argument, "no classes to evaluate");
    }
};

/// Interpolated average precision for one class at one IoU threshold, over a
/// dataset given as parallel per-image prediction and ground-truth lists.
///
/// Predictions are visited by score (descending; ties in image then input
/// order). Each one claims the unmatched same-class ground-truth box of
/// highest IoU, provided IoU >= threshold. Precision is interpolated at the
/// 101 recall points 0, 0.01, ..., 1. Absent when the class has no ground truth.
inline std::optional<double> average_precision(std::span<const std::vector<DetectionBox>> predictions,
                                               std::span<const std::vector<GroundTruthBox>> ground_truth,
                                               double iou_threshold, ElementClass cls = ElementClass::logo) {
    if (predictions.size() != ground_truth.size())
        throw Error(ErrorCode::length_mismatch, "predictions and ground truth cover different image counts");

    std::size_t n_gt = 0;
    for (const auto& img : ground_truth)
        n_gt += static_cast<std::size_t>(std::count_if(img.begin(), img.end(), [&](const auto& g) { return g.class_id == cls; }));
    if (n_gt == 0) return std::nullopt;

    struct Ref {
        double score;
        std::size_t image;
        std::size_t index;
    };
    std::vector<Ref> order;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        for (std::size_t j = 0; j < predictions[i].size(); ++j)
            if (predictions[i][j].class_id == cls) order.push_back({predictions[i][j].score, i, j});
    std::stable_sort(order.begin(), order.end(), [](const Ref& a, const Ref& b) { return a.score > b.score; });

    std::vector<std::vector<char>> taken(ground_truth.size());
    for (std::size_t i = 0; i < ground_truth.size(); ++i) taken[i].assign(ground_truth[i].size(), 0);

    // (tp, fp) after each prediction
    std::vector<std::pair<std::size_t, std::size_t>> curve;
    curve.reserve(order.size());
    std::size_t tp = 0, fp = 0;
    for (const Ref& r : order) {
        const Rect& pr = predictions[r.image][r.index].rect;
        const auto& gts = ground_truth[r.image];
        std::optional<std::size_t> best;
        double best_iou = iou_threshold;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (gts[g].class_id != cls || taken[r.image][g]) continue;
            const double o = iou(pr, gts[g].rect);
            if (o >= best_iou && (!best || o > best_iou)) {
                best = g;
                best_iou = o;
            }
        }
        if (best) {
            taken[r.image][*best] = 1;
            ++tp;
        } else {
            ++fp;
        }
        curve.emplace_back(tp, fp);
    }

    // Envelope: best precision at or beyond each point.
    std::vector<double> prec(curve.size());
    for (std::size_t k = curve.size(); k-- > 0;) {
        const double p = static_cast<double>(curve[k].first) / static_cast<double>(curve[k].first + curve[k].second);
        prec[k] = (k + 1 < curve.size()) ? std::max(p, prec[k + 1]) : p;
    }
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t level = 0; level <= 100; ++level) {
        // first point with recall >= level / 100, compared exactly in integers
        while (k < curve.size() && curve[k].first * 100 < level * n_gt) ++k;
        if (k == curve.size()) break;
        sum += prec[k];
    }
    return sum / 101.0;
}

struct MapReport {
    std::vector<double> iou_thresholds;
    std::vector<ElementClass> classes;
    /// ap[t][c]: AP at threshold t for class c, absent when that class has no ground truth.
    std::vector<std::vector<std::optional<double>>> ap;
    /// Mean over present classes at each threshold.
    std::vector<double> per_threshold;
    double map = 0.0;
};

/// mAP averaged over IoU thresholds and the configured classes.
inline MapReport map_sweep(std::span<const std::vector<DetectionBox>> predictions,
                           std::span<const std::vector<GroundTruthBox>> ground_truth, const MetricsConfig& cfg = {}) {
    cfg.validate();
    MapReport rep{cfg.iou_thresholds, cfg.classes, {}, {}, 0.0};
    bool any = false;
    for (double t : cfg.iou_thresholds) {
        std::vector<std::optional<double>> row;
        double sum = 0.0;
        std::size_t n = 0;
        for (ElementClass c : cfg.classes) {
            row.push_back(average_precision(predictions, ground_truth, t, c));
            if (row.back()) {
                sum += *row.back();
                ++n;
            }
        }
        if (n == 0) throw Error(ErrorCode::empty_dataset, "no ground-truth boxes for the evaluated classes");
        any = true;
        rep.ap.push_back(std::move(row));
        rep.per_threshold.push_back(sum / static_cast<double>(n));
    }
    if (!any) throw Error(ErrorCode::empty_dataset, "no IoU thresholds evaluated");
    rep.map = std::accumulate(rep.per_threshold.begin(), rep.per_threshold.end(), 0.0) /
              static_cast<double>(rep.per_threshold.size());
    return rep;
}

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

struct VerdictMetrics {
    ConfusionCounts counts;
    /// Absent when the ratio is 0/0.
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> fpr;
};

inline VerdictMetrics metrics_from_counts(const ConfusionCounts& c) {
    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    return {c, ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn), ratio(c.fp, c.fp + c.tn)};
}

/// Phishing is the positive class; inconclusive predictions count as negative.
inline VerdictMetrics verdict_metrics(std::span<const Decision> predicted, std::span<const Decision> truth) {
    if (predicted.size() != truth.size())
        throw Error(ErrorCode::length_mismatch, std::to_string(predicted.size()) + " verdicts for " +
                                                    std::to_string(truth.size()) + " labels");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] == Decision::phishing;
        const bool t = truth[i] == Decision::phishing;
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return metrics_from_counts(c);
}

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    /// Scores >= threshold are called positive.
    double threshold = 0.0;
};

struct RocCurve {
    /// Ordered by threshold descending, from (0,0) to (1,1).
    std::vector<RocPoint> points;
    double auc = 0.0;
};

inline RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels, const MetricsConfig& cfg = {}) {
    if (scores.size() != labels.size())
        throw Error(ErrorCode::length_mismatch, "scores and labels differ in length");
    const std::size_t pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw Error(ErrorCode::degenerate_labels, "ROC needs both positive and negative labels");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<double> thresholds;
    if (cfg.roc_resolution == 0) {
        for (std::size_t i : order)
            if (thresholds.empty() || scores[i] < thresholds.back()) thresholds.push_back(scores[i]);
    } else {
        for (std::size_t k = cfg.roc_resolution + 1; k-- > 0;)
            thresholds.push_back(static_cast<double>(k) / static_cast<double>(cfg.roc_resolution));
    }

    RocCurve roc;
    roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0, k = 0;
    for (double t : thresholds) {
        while (k < order.size() && scores[order[k]] >= t) {
            (labels[order[k]] ? tp : fp) += 1;
            ++k;
        }
        roc.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos, t});
    }
    if (roc.points.back().fpr < 1.0 || roc.points.back().tpr < 1.0)
        roc.points.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});

    for (std::size_t i = 1; i < roc.points.size(); ++i) {
        const auto& a = roc.points[i - 1];
        const auto& b = roc.points[i];
        roc.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return roc;
}

} // namespace phishguard
