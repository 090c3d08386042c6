#pragma once

// Dataset-level runs of the analysis pipeline: metric reports, fp16 vs fp32
// comparison and throughput benchmarking.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "phishguard/classification.hpp"
#include "phishguard/evaluation.hpp"
#include "phishguard/manifest.hpp"
#include "phishguard/pipeline.hpp"
#include "phishguard/synthetic.hpp"
#include "phishguard/url.hpp"

namespace phishguard {

/// Supplies the full-screen frame pixels for a record.
using FrameSource = std::function<Image(const DatasetRecord&)>;

/// Everything except the detector, which is built per record from its planted scene.
struct EvalModels {
    const BrandModel& brand;
    const CrpModel& crp;
    const BrandVocabulary& vocab;
    const Blacklist& blacklist;
    NmsConfig nms{};
    BrandClassifierConfig brand_cfg{};
};

struct LatencySummary {
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

/// Linearly interpolated percentile, q in [0, 100].
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(values.size() - 1, lo + 1);
    return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

inline LatencySummary summarize(const std::vector<double>& values) {
    LatencySummary s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.p50 = percentile(values, 50.0);
    s.p95 = percentile(values, 95.0);
    s.max = *std::max_element(values.begin(), values.end());
    return s;
}

struct StageSummary {
    LatencySummary detect;
    LatencySummary brand;
    LatencySummary crp;
    LatencySummary total;
};

/// Stage summaries over the verdicts in which each stage ran.
inline StageSummary summarize_stages(std::span<const Verdict> verdicts) {
    std::vector<double> detect, brand, crp, total;
    for (const auto& v : verdicts) {
        if (v.matched_rule != MatchedRule::blacklist_hit) detect.push_back(v.latency.detect);
        if (v.evidence.brand) brand.push_back(v.latency.brand);
        if (v.evidence.crp) crp.push_back(v.latency.crp);
        total.push_back(v.latency.total);
    }
    return {summarize(detect), summarize(brand), summarize(crp), summarize(total)};
}

struct EvaluationReport {
    std::vector<Verdict> verdicts;
    VerdictMetrics metrics;
    /// Absent when the labels hold a single class.
    std::optional<RocCurve> roc;
    /// Logo detection mAP over the configured IoU thresholds.
    std::optional<MapReport> logo_map;
    /// mAP over all five element classes.
    std::optional<MapReport> element_map;
    std::size_t unsound = 0;
    StageSummary latency;
    double wall_seconds = 0.0;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct RecordRun {
    Verdict verdict;
    std::vector<DetectionBox> detections;
};

inline RecordRun run_record(const DatasetRecord& r, const Image& pixels, const EvalModels& m) {
    const SyntheticDetector detector(r.seed, r.scene(), r.detector);
    const Frame frame{pixels, 0.0, r.url};
    RecordRun run{analyze(frame, r.roi, Models{detector, m.brand, m.crp, m.nms, m.brand_cfg}, m.vocab, m.blacklist), {}};
    if (run.verdict.matched_rule == MatchedRule::blacklist_hit) {
        // The pre-filter skipped detection; run it anyway so every page counts towards mAP.
        const Image canvas = crop_roi(pixels, r.roi, detector.canvas());
        run.detections = decode_detections(detector.detect_objects(detector.extract_features(canvas)), m.nms).front();
    } else {
        run.detections = run.verdict.detections;
    }
    return run;
}

} // namespace detail

/// Runs every record through the pipeline with up to `jobs` workers. Results
/// are stored by record index, so the report does not depend on `jobs`.
inline EvaluationReport evaluate_dataset(std::span<const DatasetRecord> records, const FrameSource& source,
                                         const EvalModels& models, const MetricsConfig& cfg = {}, std::size_t jobs = 1) {
    cfg.validate();
    if (records.empty()) throw Error(ErrorCode::empty_dataset, "manifest has no records");
    const auto started = std::chrono::steady_clock::now();

    std::vector<detail::RecordRun> runs(records.size());
    detail::parallel_for(records.size(), jobs,
                         [&](std::size_t i) { runs[i] = detail::run_record(records[i], source(records[i]), models); });

    EvaluationReport rep;
    std::vector<Decision> predicted, truth;
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    std::vector<std::vector<DetectionBox>> preds;
    std::vector<std::vector<GroundTruthBox>> gts;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const Verdict& v = runs[i].verdict;
        predicted.push_back(v.decision);
        truth.push_back(records[i].verdict);
        scores.push_back(v.phishing_score());
        labels.push_back(records[i].verdict == Decision::phishing ? 1 : 0);
        if (!v.sound(models.vocab)) ++rep.unsound;
        preds.push_back(std::move(runs[i].detections));
        gts.push_back(records[i].ground_truth());
        rep.verdicts.push_back(v);
    }
    rep.metrics = verdict_metrics(predicted, truth);
    try {
        rep.roc = roc_curve(scores, labels, cfg);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate_labels) throw;
    }
    auto sweep = [&](std::vector<ElementClass> classes) -> std::optional<MapReport> {
        MetricsConfig c = cfg;
        c.classes = std::move(classes);
        try {
            return map_sweep(preds, gts, c);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::empty_dataset) throw;
            return std::nullopt;
        }
    };
    rep.logo_map = sweep(cfg.classes);
    rep.element_map = sweep({ElementClass::logo, ElementClass::button, ElementClass::input, ElementClass::label,
                             ElementClass::block});
    rep.latency = summarize_stages(rep.verdicts);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rep;
}

struct MetricDeltas {
    /// f16 minus f32; absent when either side is undefined.
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> fpr;
};

struct QuantizationComparison {
    EvaluationReport f32;
    EvaluationReport f16;
    MetricDeltas deltas;
    /// Share of records whose decision is identical under both models.
    double agreement = 0.0;
};

/// Evaluates the same records under two CRP heads and compares the outcome.
inline QuantizationComparison compare_quantization(std::span<const DatasetRecord> records, const FrameSource& source,
                                                   const EvalModels& f32_models, const CrpModel& f16_crp,
                                                   const MetricsConfig& cfg = {}, std::size_t jobs = 1) {
    QuantizationComparison cmp;
    cmp.f32 = evaluate_dataset(records, source, f32_models, cfg, jobs);
    EvalModels f16_models{f32_models.brand, f16_crp, f32_models.vocab, f32_models.blacklist, f32_models.nms,
                          f32_models.brand_cfg};
    cmp.f16 = evaluate_dataset(records, source, f16_models, cfg, jobs);
    auto diff = [](const std::optional<double>& a, const std::optional<double>& b) -> std::optional<double> {
        if (!a || !b) return std::nullopt;
        return *b - *a;
    };
    cmp.deltas = {diff(cmp.f32.metrics.precision, cmp.f16.metrics.precision),
                  diff(cmp.f32.metrics.recall, cmp.f16.metrics.recall), diff(cmp.f32.metrics.fpr, cmp.f16.metrics.fpr)};
    std::size_t same = 0;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (cmp.f32.verdicts[i].decision == cmp.f16.verdicts[i].decision) ++same;
    cmp.agreement = static_cast<double>(same) / static_cast<double>(records.size());
    return cmp;
}

/// Peak resident set size in KiB, when the host reports it.
inline std::optional<std::size_t> peak_rss_kib() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            try {
                return static_cast<std::size_t>(std::stoull(line.substr(6)));
            } catch (const std::exception&) {
                return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

struct BenchReport {
    std::size_t samples = 0;
    double wall_seconds = 0.0;
    double samples_per_second = 0.0;
    /// Per-call analyze latency.
    LatencySummary latency;
    StageSummary stages;
    std::optional<std::size_t> peak_rss_kib;
};

/// Times `iterations` sequential analyze calls, cycling through the records,
/// after `warmup` untimed calls. Frames are rendered before timing starts.
inline BenchReport bench_throughput(std::span<const DatasetRecord> records, const FrameSource& source,
                                    const EvalModels& models, std::size_t warmup, std::size_t iterations) {
    if (iterations == 0) throw Error(ErrorCode::invalid_argument, "bench needs at least one iteration");
    if (records.empty()) throw Error(ErrorCode::empty_dataset, "manifest has no records");
    const std::size_t distinct = std::min(records.size(), warmup + iterations);
    std::vector<Image> frames;
    std::vector<SyntheticDetector> detectors;
    for (std::size_t i = 0; i < distinct; ++i) {
        frames.push_back(source(records[i]));
        detectors.emplace_back(records[i].seed, records[i].scene(), records[i].detector);
    }
    auto call = [&](std::size_t k) {
        const std::size_t i = k % distinct;
        const Frame frame{frames[i], 0.0, records[i].url};
        return analyze(frame, records[i].roi, Models{detectors[i], models.brand, models.crp, models.nms, models.brand_cfg},
                       models.vocab, models.blacklist);
    };
    for (std::size_t k = 0; k < warmup; ++k) call(k);

    BenchReport rep;
    std::vector<Verdict> verdicts;
    std::vector<double> per_call;
    const auto started = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < iterations; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        verdicts.push_back(call(warmup + k));
        per_call.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    rep.samples = iterations;
    rep.samples_per_second = rep.wall_seconds > 0.0 ? static_cast<double>(iterations) / rep.wall_seconds : 0.0;
    rep.latency = summarize(per_call);
    rep.stages = summarize_stages(verdicts);
    rep.peak_rss_kib = peak_rss_kib();
    return rep;
}

} // namespace phishguard
