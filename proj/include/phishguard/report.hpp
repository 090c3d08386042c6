#pragma once

// JSON, CSV and SVG renderings of verdicts and evaluation reports, plus the
// thresholds file used to gate an evaluation run.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishguard/error.hpp"
#include "phishguard/evaluation.hpp"
#include "phishguard/harness.hpp"
#include "phishguard/pipeline.hpp"
#include "phishguard/scene.hpp"

namespace phishguard {

inline Json box_to_json(const DetectionBox& b) {
    return Json{{"class", std::string(to_string(b.class_id))}, {"rect", rect_to_json(b.rect)}, {"score", b.score}};
}

inline Json latency_to_json(const StageLatency& l) {
    return Json{{"prefilter", l.prefilter}, {"roi", l.roi}, {"detect", l.detect},
                {"brand", l.brand},         {"crp", l.crp}, {"total", l.total}};
}

/// Verdict as a JSON object. Latencies are wall-clock and can be left out
/// when the output has to be reproducible.
inline Json verdict_to_json(const Verdict& v, bool with_latency = true) {
    const Evidence& e = v.evidence;
    Json ev{{"elements", e.elements}};
    ev["host"] = e.host ? Json(*e.host) : Json(nullptr);
    ev["blacklist"] = e.blacklist ? Json{{"entry", e.blacklist->entry}, {"host", e.blacklist->host}} : Json(nullptr);
    ev["logo"] = e.logo_box ? box_to_json(*e.logo_box) : Json(nullptr);
    ev["brand"] = e.brand ? Json{{"name", e.brand->brand}, {"confidence", e.brand->confidence}} : Json(nullptr);
    ev["crp"] = e.crp ? Json{{"label", e.crp->label == CrpLabel::crp ? "crp" : "non-crp"}, {"score", e.crp->score}}
                      : Json(nullptr);
    Json j{{"decision", std::string(to_string(v.decision))},
           {"matched_rule", std::string(to_string(v.matched_rule))},
           {"phishing_score", v.phishing_score()},
           {"evidence", ev}};
    if (with_latency) j["latency"] = latency_to_json(v.latency);
    return j;
}

namespace detail {

inline std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

} // namespace detail

/// One row per metric; empty value for undefined ratios.
inline std::string metrics_csv(const EvaluationReport& r) {
    std::ostringstream o;
    const auto& c = r.metrics.counts;
    o << "metric,value\n";
    o << "records," << r.verdicts.size() << "\n";
    o << "tp," << c.tp << "\nfp," << c.fp << "\nfn," << c.fn << "\ntn," << c.tn << "\n";
    o << "precision," << detail::fmt_opt(r.metrics.precision) << "\n";
    o << "recall," << detail::fmt_opt(r.metrics.recall) << "\n";
    o << "fpr," << detail::fmt_opt(r.metrics.fpr) << "\n";
    o << "roc_auc," << (r.roc ? detail::fmt_double(r.roc->auc) : "") << "\n";
    o << "logo_map," << (r.logo_map ? detail::fmt_double(r.logo_map->map) : "") << "\n";
    o << "element_map," << (r.element_map ? detail::fmt_double(r.element_map->map) : "") << "\n";
    o << "unsound_verdicts," << r.unsound << "\n";
    return o.str();
}

/// Per-threshold, per-class AP table.
inline std::string ap_csv(const MapReport& m) {
    std::ostringstream o;
    o << "iou_threshold";
    for (auto c : m.classes) o << ',' << to_string(c);
    o << ",mean\n";
    for (std::size_t t = 0; t < m.iou_thresholds.size(); ++t) {
        o << detail::fmt_double(m.iou_thresholds[t]);
        for (const auto& ap : m.ap[t]) o << ',' << detail::fmt_opt(ap);
        o << ',' << detail::fmt_double(m.per_threshold[t]) << "\n";
    }
    return o.str();
}

inline std::string roc_csv(const RocCurve& roc) {
    std::ostringstream o;
    o << "threshold,fpr,tpr\n";
    for (const auto& p : roc.points)
        o << detail::fmt_double(p.threshold) << ',' << detail::fmt_double(p.fpr) << ',' << detail::fmt_double(p.tpr) << "\n";
    return o.str();
}

/// Wall-clock figures, kept apart from the reproducible metric files.
inline std::string timing_csv(const StageSummary& s, double wall_seconds, std::size_t samples) {
    std::ostringstream o;
    o << "stage,mean,p50,p95,max\n";
    auto row = [&](const char* name, const LatencySummary& l) {
        o << name << ',' << detail::fmt_double(l.mean) << ',' << detail::fmt_double(l.p50) << ','
          << detail::fmt_double(l.p95) << ',' << detail::fmt_double(l.max) << "\n";
    };
    row("detect", s.detect);
    row("brand", s.brand);
    row("crp", s.crp);
    row("total", s.total);
    o << "wall," << detail::fmt_double(wall_seconds) << ",,,\n";
    o << "samples_per_second," << detail::fmt_double(wall_seconds > 0 ? samples / wall_seconds : 0.0) << ",,,\n";
    return o.str();
}

inline std::string deltas_csv(const QuantizationComparison& q) {
    std::ostringstream o;
    o << "row,precision,recall,fpr\n";
    auto row = [&](const char* name, const std::optional<double>& p, const std::optional<double>& r,
                   const std::optional<double>& f) {
        o << name << ',' << detail::fmt_opt(p) << ',' << detail::fmt_opt(r) << ',' << detail::fmt_opt(f) << "\n";
    };
    row("f32", q.f32.metrics.precision, q.f32.metrics.recall, q.f32.metrics.fpr);
    row("f16", q.f16.metrics.precision, q.f16.metrics.recall, q.f16.metrics.fpr);
    row("delta", q.deltas.precision, q.deltas.recall, q.deltas.fpr);
    return o.str();
}

/// ROC as a standalone SVG line plot. With `log_fpr` the x axis is
/// log10(fpr) over [1e-3, 1].
inline std::string roc_svg(const RocCurve& roc, bool log_fpr = false) {
    constexpr double W = 480, H = 480, M = 50;
    auto sx = [&](double fpr) {
        double u = fpr;
        if (log_fpr) u = (std::log10(std::max(fpr, 1e-3)) + 3.0) / 3.0;
        return M + u * (W - 2 * M);
    };
    auto sy = [&](double tpr) { return H - M - tpr * (H - 2 * M); };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\"" << H - 2 * M
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!log_fpr)
        o << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1) << "\" y2=\"" << sy(1)
          << "\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n";
    o << "<polyline fill=\"none\" stroke=\"#1e6edc\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < roc.points.size(); ++i) {
        if (i) o << ' ';
        o << detail::fmt_double(sx(roc.points[i].fpr)) << ',' << detail::fmt_double(sy(roc.points[i].tpr));
    }
    o << "\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"14\">"
      << (log_fpr ? "false positive rate (log)" : "false positive rate") << "</text>\n";
    o << "<text x=\"15\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 15 "
      << H / 2 << ")\">true positive rate</text>\n";
    o << "<text x=\"" << W - M << "\" y=\"" << M - 10 << "\" text-anchor=\"end\" font-size=\"13\">AUC "
      << detail::fmt_double(std::round(roc.auc * 1e4) / 1e4) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

/// Writes metrics.csv, ap.csv, element_ap.csv, roc.csv, roc.svg and timing.csv into `dir`.
inline void write_evaluation(const std::filesystem::path& dir, const EvaluationReport& r) {
    std::filesystem::create_directories(dir);
    detail::write_text(dir / "metrics.csv", metrics_csv(r));
    if (r.logo_map) detail::write_text(dir / "ap.csv", ap_csv(*r.logo_map));
    if (r.element_map) detail::write_text(dir / "element_ap.csv", ap_csv(*r.element_map));
    if (r.roc) {
        detail::write_text(dir / "roc.csv", roc_csv(*r.roc));
        detail::write_text(dir / "roc.svg", roc_svg(*r.roc));
    }
    detail::write_text(dir / "timing.csv", timing_csv(r.latency, r.wall_seconds, r.verdicts.size()));
}

/// Acceptance floors and ceilings for an evaluation run; unset fields are not checked.
struct Thresholds {
    std::optional<double> min_precision;
    std::optional<double> min_recall;
    std::optional<double> max_fpr;
    std::optional<double> min_logo_map;
    std::optional<double> min_agreement;

    static Thresholds parse(std::string_view text) {
        try {
            const Json j = Json::parse(text);
            if (!j.is_object()) throw Error(ErrorCode::parse_error, "thresholds file must hold a JSON object");
            Thresholds t;
            for (const auto& [key, value] : j.items()) {
                const double v = value.get<double>();
                if (key == "min_precision") t.min_precision = v;
                else if (key == "min_recall") t.min_recall = v;
                else if (key == "max_fpr") t.max_fpr = v;
                else if (key == "min_logo_map") t.min_logo_map = v;
                else if (key == "min_agreement") t.min_agreement = v;
                else throw Error(ErrorCode::parse_error, "unknown threshold '" + key + "'");
            }
            return t;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::parse_error, std::string("thresholds: ") + e.what());
        }
    }

    static Thresholds from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::io_error, "cannot open thresholds file " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    /// Human-readable violations; an undefined metric violates any bound on it.
    std::vector<std::string> violations(const EvaluationReport& r, std::optional<double> agreement = std::nullopt) const {
        std::vector<std::string> out;
        auto check = [&](const char* name, const std::optional<double>& bound, const std::optional<double>& value,
                         bool floor) {
            if (!bound) return;
            if (!value) {
                out.push_back(std::string(name) + " is undefined");
                return;
            }
            if (floor ? *value < *bound : *value > *bound)
                out.push_back(std::string(name) + " " + detail::fmt_double(*value) + (floor ? " < " : " > ") +
                              detail::fmt_double(*bound));
        };
        check("precision", min_precision, r.metrics.precision, true);
        check("recall", min_recall, r.metrics.recall, true);
        check("fpr", max_fpr, r.metrics.fpr, false);
        check("logo_map", min_logo_map, r.logo_map ? std::optional<double>(r.logo_map->map) : std::nullopt, true);
        if (min_agreement) check("agreement", min_agreement, agreement, true);
        return out;
    }
};

} // namespace phishguard
