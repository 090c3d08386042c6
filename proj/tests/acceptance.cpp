// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "oracles.hpp"
#include "phishguard/corpus.hpp"
#include "phishguard/fp16.hpp"
#include "phishguard/governor.hpp"
#include "phishguard/harness.hpp"
#include "phishguard/weight_file.hpp"

using namespace phishguard;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s %-22s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void nms_criterion() {
    Rng rng(1000);
    std::size_t mismatches = 0, max_boxes = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < 1000; ++t) {
        const auto c = oracle::random_nms_case(rng, 15);
        max_boxes = std::max(max_boxes, c.boxes.size());
        if (nms(c.boxes, c.config()) != oracle::nms_oracle(c)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    report(mismatches == 0 && secs < 5.0 && max_boxes <= 20, "nms-oracle",
           fmt("1000 cases, up to %zu boxes, %zu mismatches, %.3f s", max_boxes, mismatches, secs));
}

void iou_criterion() {
    Rng rng(1001);
    std::size_t bad = 0;
    for (int i = 0; i < 20000; ++i) {
        const Rect a = oracle::grid_rect(rng), b = oracle::grid_rect(rng);
        const double ab = iou(a, b);
        const auto o = oracle::overlap(a, b);
        if (ab != iou(b, a) || ab < 0.0 || ab > 1.0 || std::fabs(ab - o.inter / o.uni) > 1e-12) ++bad;
        if (!a.empty() && iou(a, a) != 1.0) ++bad;
    }
    const double seventh = iou(Rect(0.0, 0.0, 0.2, 0.2), Rect(0.1, 0.1, 0.3, 0.3));
    const double err = std::fabs(seventh - 1.0 / 7.0);
    report(bad == 0 && err <= 1e-12, "iou-geometry", fmt("20000 random pairs, %zu violations, |iou - 1/7| = %.2e", bad, err));
}

void map_criterion() {
    Rng rng(1002);
    const std::vector<ElementClass> classes{ElementClass::logo, ElementClass::button};
    std::size_t checked = 0, mismatches = 0, non_monotone = 0;
    double worst = 0.0;
    while (checked < 200) {
        const auto c = oracle::random_ap_case(rng, 6);
        bool any = false;
        for (const auto& g : c.gts) any = any || !g.empty();
        if (!any) continue;
        ++checked;
        MetricsConfig cfg;
        cfg.classes = classes;
        const auto rep = map_sweep(c.preds, c.gts, cfg);
        const double d = std::fabs(rep.map - oracle::map(c, cfg.iou_thresholds, classes));
        worst = std::max(worst, d);
        if (d > 1e-9) ++mismatches;
        for (std::size_t k = 1; k < rep.per_threshold.size(); ++k)
            if (rep.per_threshold[k] > rep.per_threshold[k - 1]) {
                ++non_monotone;
                break;
            }
    }
    report(mismatches == 0 && non_monotone == 0, "map-oracle",
           fmt("200 micro-datasets, max |diff| %.2e, %zu non-monotone", worst, non_monotone));
}

void mlp_criterion() {
    Rng rng(1003);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        auto c = oracle::random_mlp_case(rng);
        c.spec.layers.back().activation = Activation::none;
        const Tensor y = mlp_forward(c.spec, c.weights, c.input);
        const auto ref = oracle::mlp_forward(c);
        for (std::size_t i = 0; i < ref.size(); ++i)
            worst = std::max(worst, std::fabs(static_cast<double>(y[i]) - ref[i]) / std::max(std::fabs(static_cast<double>(ref[i])), 1e-12));
    }
    report(worst <= 1e-5, "mlp-oracle", fmt("100 triples, max relative error %.2e", worst));
}

struct Setup {
    BrandVocabulary vocab = make_vocabulary(277);
    CodebookBrandModel brand{vocab};
    WeightStore f32_weights = read_weight_file(fs::path(PHISHGUARD_DATA_DIR) / "crp_head.pgwt");
    CrpModel crp = CrpModel::from_weights(f32_weights);
    CrpModel crp16 = CrpModel::from_weights(quantize(f32_weights, DType::f16));

    FrameSource source() const {
        return [this](const DatasetRecord& r) { return render_record(r, vocab, brand.codebook()); };
    }
};

void quantization_criterion(const QuantizationComparison& q) {
    // every positive f32 in [2^-14, 65504]
    const std::uint32_t lo = std::bit_cast<std::uint32_t>(std::ldexp(1.0f, -14));
    const std::uint32_t hi = std::bit_cast<std::uint32_t>(65504.0f);
    double worst = 0.0;
    for (std::uint32_t u = lo; u <= hi; ++u) {
        const float f = std::bit_cast<float>(u);
        const double rel = std::fabs(static_cast<double>(round_to_half(f)) - f) / f;
        worst = std::max(worst, rel);
    }
    const auto f32_bytes = save_weights(load_weights(read_file_bytes(fs::path(PHISHGUARD_DATA_DIR) / "crp_head.pgwt"))).size();
    const auto f16_bytes = save_weights(quantize(load_weights(read_file_bytes(fs::path(PHISHGUARD_DATA_DIR) / "crp_head.pgwt")), DType::f16)).size();
    const double ratio = static_cast<double>(f16_bytes) / static_cast<double>(f32_bytes);
    const bool ok = worst <= std::ldexp(1.0, -11) && ratio <= 0.55 && q.agreement >= 0.99;
    report(ok, "quantization",
           fmt("%u normals, max rel err %.3e (bound %.3e); f16/f32 size %.4f; verdict agreement %.4f on %zu pages",
               hi - lo + 1, worst, std::ldexp(1.0, -11), ratio, q.agreement, q.f32.verdicts.size()));
}

void soundness_criterion(const Setup& s, const QuantizationComparison& separable, const EvaluationReport& adversarial) {
    const std::size_t unsound = separable.f32.unsound + separable.f16.unsound + adversarial.unsound;
    const std::size_t verdicts = separable.f32.verdicts.size() + separable.f16.verdicts.size() + adversarial.verdicts.size();

    // A DHL login page served from a DHL domain and from a foreign one.
    const SceneSpec scene{{{ElementClass::logo, Rect(0.05, 0.04, 0.2, 0.12), 0.95},
                           {ElementClass::label, Rect(0.35, 0.3, 0.5, 0.34), 0.9},
                           {ElementClass::input, Rect(0.35, 0.36, 0.65, 0.42), 0.92},
                           {ElementClass::input, Rect(0.35, 0.52, 0.65, 0.58), 0.91},
                           {ElementClass::button, Rect(0.35, 0.64, 0.5, 0.7), 0.93}},
                          true,
                          "DHL"};
    const RegionOfInterest roi{{100, 120, 868, 552}, 0, 0};
    const Image frame = render_frame(scene, s.vocab, s.brand.codebook(), 1024, 640, roi.on_screen());
    const SyntheticDetector det(7, scene, detector_config_for(CorpusKind::separable));
    const Models models{det, s.brand, s.crp};
    const Blacklist none;
    const Verdict legit = analyze({frame, 0.0, "https://dhlsameday.com/login"}, roi, models, s.vocab, none);
    const Verdict fake = analyze({frame, 0.0, "https://dhl-express-parcel.top/login"}, roi, models, s.vocab, none);
    const bool pair = legit.decision == Decision::benign && legit.matched_rule == MatchedRule::domain_legitimate &&
                      fake.decision == Decision::phishing && fake.matched_rule == MatchedRule::impersonation;
    report(unsound == 0 && pair && fake.sound(s.vocab), "verdict-soundness",
           fmt("%zu unsound of %zu verdicts; dhlsameday.com -> %s/%s, foreign -> %s/%s", unsound, verdicts,
               std::string(to_string(legit.decision)).c_str(), std::string(to_string(legit.matched_rule)).c_str(),
               std::string(to_string(fake.decision)).c_str(), std::string(to_string(fake.matched_rule)).c_str()));
}

void end_to_end_criterion(const EvaluationReport& rep) {
    const double p = rep.metrics.precision.value_or(0.0), r = rep.metrics.recall.value_or(0.0);
    const auto& c = rep.metrics.counts;
    report(p >= 0.95 && r >= 0.90, "separable-benchmark",
           fmt("%zu pages: precision %.4f (>= 0.95), recall %.4f (>= 0.90), fpr %.4f, tp %zu fp %zu fn %zu tn %zu, logo mAP %.4f",
               rep.verdicts.size(), p, r, rep.metrics.fpr.value_or(0.0), c.tp, c.fp, c.fn, c.tn,
               rep.logo_map ? rep.logo_map->map : 0.0));
}

void governor_criterion(const Setup& s, const Corpus& corpus) {
    // 30 FPS for 10 s of real analysis; frames cycle over a few pages.
    struct Item {
        double t;
        std::size_t page;
    };
    std::vector<Item> stream;
    for (int k = 0; k < 300; ++k) stream.push_back({k / 30.0, static_cast<std::size_t>(k / 30) % 5});
    std::vector<Image> frames;
    std::vector<SyntheticDetector> detectors;
    for (std::size_t i = 0; i < 5; ++i) {
        frames.push_back(render_record(corpus.records[i], s.vocab, s.brand.codebook()));
        detectors.emplace_back(corpus.records[i].seed, corpus.records[i].scene(), corpus.records[i].detector);
    }
    double measured = 0.0;
    auto process = [&](const Item& it) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto& r = corpus.records[it.page];
        const Verdict v = analyze({frames[it.page], it.t, r.url}, r.roi, Models{detectors[it.page], s.brand, s.crp}, s.vocab,
                                  corpus.blacklist);
        measured += seconds_since(t0);
        return v.decision;
    };
    const auto run = run_governed(std::span<const Item>(stream), GovernorConfig{}, process, [](const Item& it) { return it.t; });
    const double expected_idle = std::clamp(1.0 - measured / (static_cast<double>(run.stats.processed) * 1.0), 0.0, 1.0);
    const bool count_ok = run.stats.processed >= 9 && run.stats.processed <= 11;
    const bool idle_ok = std::fabs(run.stats.idle_fraction - expected_idle) <= 0.05;

    double now = 0.0;
    const auto fake = run_governed(
        std::span<const Item>(stream), GovernorConfig{}, [&](const Item&) { now += 0.25; return 0; },
        [](const Item& it) { return it.t; }, [&] { return now; });
    const bool fake_ok = fake.stats.processed == 10 && std::fabs(fake.stats.idle_fraction - 0.75) <= 0.05;

    report(count_ok && idle_ok && fake_ok, "governor",
           fmt("%zu of %zu frames processed (10 +/- 1), idle %.4f vs measured %.4f; 0.25 s fake load -> %zu frames, idle %.4f",
               run.stats.processed, run.stats.input, run.stats.idle_fraction, expected_idle, fake.stats.processed,
               fake.stats.idle_fraction));
}

void throughput_criterion(const Setup& s, const Corpus& corpus) {
    const Blacklist& bl = corpus.blacklist;
    const EvalModels models{s.brand, s.crp, s.vocab, bl};
    const BenchReport b = bench_throughput(corpus.records, s.source(), models, 5, 100);
    report(b.samples_per_second >= 1.0, "throughput",
           fmt("%.1f samples/s over %zu calls (target 3.9: %s), p50 %.2f ms, p95 %.2f ms", b.samples_per_second, b.samples,
               b.samples_per_second >= 3.9 ? "met" : "not met", 1e3 * b.latency.p50, 1e3 * b.latency.p95));
}

} // namespace

int main() {
    try {
        nms_criterion();
        iou_criterion();
        map_criterion();
        mlp_criterion();

        const Setup s;
        CorpusConfig cfg;
        cfg.pages = 1000;
        cfg.seed = 7;
        cfg.kind = CorpusKind::separable;
        const Corpus separable = generate_corpus(cfg, s.vocab);
        cfg.kind = CorpusKind::adversarial;
        const Corpus adversarial = generate_corpus(cfg, s.vocab);

        const QuantizationComparison q =
            compare_quantization(separable.records, s.source(), {s.brand, s.crp, s.vocab, separable.blacklist}, s.crp16);
        const EvaluationReport adv = evaluate_dataset(adversarial.records, s.source(), {s.brand, s.crp, s.vocab, adversarial.blacklist});

        quantization_criterion(q);
        soundness_criterion(s, q, adv);
        end_to_end_criterion(q.f32);
        governor_criterion(s, separable);
        throughput_criterion(s, separable);
    } catch (const std::exception& e) {
        std::printf("FAIL %-22s %s\n", "harness", e.what());
        return 1;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
