#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "phishguard/corpus.hpp"
#include "phishguard/harness.hpp"
#include "phishguard/report.hpp"
#include "phishguard/weight_file.hpp"

using namespace phishguard;

namespace {

struct Bundle {
    BrandVocabulary vocab = make_vocabulary(277);
    CodebookBrandModel brand{vocab};
    CrpModel crp = CrpModel::from_weights(read_weight_file(std::filesystem::path(PHISHGUARD_DATA_DIR) / "crp_head.pgwt"));
    Corpus corpus;

    explicit Bundle(std::size_t pages, CorpusKind kind = CorpusKind::separable) {
        CorpusConfig cfg;
        cfg.pages = pages;
        cfg.kind = kind;
        corpus = generate_corpus(cfg, vocab);
    }

    EvalModels models() const { return {brand, crp, vocab, corpus.blacklist}; }
    FrameSource source() const {
        return [this](const DatasetRecord& r) { return render_record(r, vocab, brand.codebook()); };
    }
};

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST(Harness, ReportDoesNotDependOnWorkerCount) {
    const Bundle b(60, CorpusKind::adversarial);
    const auto one = evaluate_dataset(b.corpus.records, b.source(), b.models(), {}, 1);
    const auto four = evaluate_dataset(b.corpus.records, b.source(), b.models(), {}, 4);
    EXPECT_EQ(metrics_csv(one), metrics_csv(four));
    EXPECT_EQ(ap_csv(*one.logo_map), ap_csv(*four.logo_map));
    EXPECT_EQ(roc_csv(*one.roc), roc_csv(*four.roc));
    for (std::size_t i = 0; i < one.verdicts.size(); ++i) {
        EXPECT_EQ(verdict_to_json(one.verdicts[i], false), verdict_to_json(four.verdicts[i], false));
        EXPECT_EQ(one.verdicts[i].detections, four.verdicts[i].detections);
    }
}

TEST(Harness, SeparableCorpusEvaluation) {
    const Bundle b(200);
    const auto rep = evaluate_dataset(b.corpus.records, b.source(), b.models());
    EXPECT_EQ(rep.unsound, 0u);
    EXPECT_GE(*rep.metrics.precision, 0.9);
    EXPECT_GE(*rep.metrics.recall, 0.85);
    ASSERT_TRUE(rep.logo_map);
    EXPECT_GT(rep.logo_map->map, 0.9);
    ASSERT_TRUE(rep.element_map);
    EXPECT_EQ(rep.element_map->classes.size(), 5u);
    ASSERT_TRUE(rep.roc);
    EXPECT_GT(rep.roc->auc, 0.9);
}

TEST(Harness, EmptyDatasetAndSourceErrors) {
    const Bundle b(3);
    try {
        evaluate_dataset({}, b.source(), b.models());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_dataset);
    }
    const FrameSource failing = [](const DatasetRecord& r) -> Image { throw Error(ErrorCode::io_error, "no frame for " + r.image); };
    EXPECT_THROW(evaluate_dataset(b.corpus.records, failing, b.models(), {}, 2), Error);
}

TEST(Harness, SameModelComparisonHasZeroDeltas) {
    const Bundle b(40);
    const auto cmp = compare_quantization(b.corpus.records, b.source(), b.models(), b.crp);
    EXPECT_EQ(cmp.agreement, 1.0);
    EXPECT_EQ(*cmp.deltas.precision, 0.0);
    EXPECT_EQ(*cmp.deltas.recall, 0.0);
    EXPECT_EQ(*cmp.deltas.fpr, 0.0);
    const auto rows = lines(deltas_csv(cmp));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "row,precision,recall,fpr");
    EXPECT_EQ(rows[3], "delta,0,0,0");
}

TEST(Harness, HalfPrecisionHeadAgreesOnLabels) {
    const Bundle b(150, CorpusKind::adversarial);
    const CrpModel f16 = CrpModel::from_weights(quantize(b.crp.weights, DType::f16));
    const auto cmp = compare_quantization(b.corpus.records, b.source(), b.models(), f16);
    EXPECT_GE(cmp.agreement, 0.99);
}

TEST(Bench, SingleIterationGivesOneSample) {
    const Bundle b(1);
    const auto rep = bench_throughput(b.corpus.records, b.source(), b.models(), 0, 1);
    EXPECT_EQ(rep.samples, 1u);
    EXPECT_GT(rep.latency.mean, 0.0);
    EXPECT_EQ(rep.latency.p50, rep.latency.mean);
    EXPECT_NEAR(rep.samples_per_second, 1.0 / rep.latency.mean, 0.05 / rep.latency.mean);
    EXPECT_GT(rep.stages.total.mean, 0.0);
    EXPECT_THROW(bench_throughput(b.corpus.records, b.source(), b.models(), 0, 0), Error);
}

TEST(Bench, CyclesThroughRecords) {
    const Bundle b(4);
    const auto rep = bench_throughput(b.corpus.records, b.source(), b.models(), 2, 10);
    EXPECT_EQ(rep.samples, 10u);
    EXPECT_LE(rep.latency.p50, rep.latency.p95);
    EXPECT_LE(rep.latency.p95, rep.latency.max);
}

TEST(Percentile, LinearInterpolation) {
    EXPECT_EQ(percentile({}, 50), 0.0);
    EXPECT_EQ(percentile({3.0}, 95), 3.0);
    EXPECT_DOUBLE_EQ(percentile({4.0, 1.0, 2.0, 3.0}, 50), 2.5);
    EXPECT_DOUBLE_EQ(percentile({0.0, 10.0}, 95), 9.5);
    const auto s = summarize({1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.max, 3.0);
}

TEST(Reports, CsvSchemas) {
    const Bundle b(30);
    const auto rep = evaluate_dataset(b.corpus.records, b.source(), b.models());
    const auto m = lines(metrics_csv(rep));
    const std::vector<std::string> keys{"metric", "records", "tp", "fp", "fn", "tn", "precision", "recall",
                                        "fpr", "roc_auc", "logo_map", "element_map", "unsound_verdicts"};
    ASSERT_EQ(m.size(), keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) EXPECT_EQ(m[i].substr(0, m[i].find(',')), keys[i]);
    EXPECT_EQ(m[1], "records,30");

    const auto ap = lines(ap_csv(*rep.element_map));
    EXPECT_EQ(ap[0], "iou_threshold,logo,button,input,label,block,mean");
    EXPECT_EQ(ap.size(), 11u);
    EXPECT_EQ(ap[1].substr(0, 4), "0.5,");

    const auto roc = lines(roc_csv(*rep.roc));
    EXPECT_EQ(roc[0], "threshold,fpr,tpr");
    EXPECT_EQ(roc[1], "inf,0,0");
    EXPECT_EQ(roc.back().substr(roc.back().find(',')), ",1,1");

    const auto svg = roc_svg(*rep.roc, true);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "phishguard_report_test";
    std::filesystem::remove_all(dir);
    write_evaluation(dir, rep);
    for (const char* f : {"metrics.csv", "ap.csv", "element_ap.csv", "roc.csv", "roc.svg", "timing.csv"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    std::filesystem::remove_all(dir);
}

TEST(Reports, VerdictJson) {
    Verdict v;
    v.decision = Decision::phishing;
    v.matched_rule = MatchedRule::blacklist_hit;
    v.evidence.blacklist = BlacklistHit{"domain:evil.top", "a.evil.top"};
    v.evidence.host = "a.evil.top";
    const Json j = verdict_to_json(v);
    EXPECT_EQ(j["decision"], "phishing");
    EXPECT_EQ(j["matched_rule"], "blacklist-hit");
    EXPECT_EQ(j["phishing_score"], 1.0);
    EXPECT_EQ(j["evidence"]["blacklist"]["entry"], "domain:evil.top");
    EXPECT_TRUE(j.contains("latency"));
    EXPECT_FALSE(verdict_to_json(v, false).contains("latency"));
}

TEST(Thresholds, ParseAndCheck) {
    const auto t = Thresholds::parse(R"({"min_precision": 0.95, "max_fpr": 0.01, "min_agreement": 0.99})");
    EvaluationReport rep;
    rep.metrics = metrics_from_counts({90, 10, 5, 895});
    const auto v = t.violations(rep, 0.995);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0].rfind("precision 0.9 < 0.95", 0), 0u);
    EXPECT_EQ(v[1].rfind("fpr", 0), 0u);
    EXPECT_EQ(t.violations(rep, std::nullopt).size(), 3u);
    rep.metrics = metrics_from_counts({0, 0, 5, 10});
    EXPECT_EQ(Thresholds::parse(R"({"min_precision": 0.5})").violations(rep)[0], "precision is undefined");
    EXPECT_THROW(Thresholds::parse(R"({"min_speed": 1})"), Error);
    EXPECT_THROW(Thresholds::parse("[1]"), Error);
    EXPECT_THROW(Thresholds::parse("{"), Error);
    EXPECT_THROW(Thresholds::from_file("/nonexistent/t.json"), Error);
}
