#include <gtest/gtest.h>

#include <filesystem>

#include "phishguard/corpus.hpp"
#include "phishguard/pipeline.hpp"
#include "phishguard/synthetic.hpp"
#include "phishguard/weight_file.hpp"

using namespace phishguard;

namespace {

const DetectorCapacity kCap{};

// Constant-output head: ignores the features and always answers `crp`.
CrpModel constant_head(bool crp) {
    WeightStore w;
    w.insert("layer0.w", Tensor::zeros({kCap.flat_size(), 2}));
    w.insert("layer0.b", crp ? Tensor({2}, {0.0f, 1.0f}) : Tensor({2}, {1.0f, 0.0f}));
    return CrpModel::from_weights(std::move(w), kCap);
}

const CrpModel& trained_head() {
    static const CrpModel m =
        CrpModel::from_weights(read_weight_file(std::filesystem::path(PHISHGUARD_DATA_DIR) / "crp_head.pgwt"));
    return m;
}

struct Fixture {
    BrandVocabulary vocab = make_vocabulary(277);
    CodebookBrandModel brand{vocab};
    Blacklist blacklist;

    SceneSpec dhl_login() const {
        return {{{ElementClass::logo, Rect(0.05, 0.04, 0.2, 0.12), 0.95},
                 {ElementClass::label, Rect(0.35, 0.3, 0.5, 0.34), 0.9},
                 {ElementClass::input, Rect(0.35, 0.36, 0.65, 0.42), 0.92},
                 {ElementClass::label, Rect(0.35, 0.46, 0.5, 0.5), 0.88},
                 {ElementClass::input, Rect(0.35, 0.52, 0.65, 0.58), 0.91},
                 {ElementClass::button, Rect(0.35, 0.64, 0.5, 0.7), 0.93},
                 {ElementClass::block, Rect(0.3, 0.25, 0.7, 0.75), 0.8}},
                true,
                "DHL"};
    }

    Frame frame_for(const SceneSpec& s, std::optional<std::string> url, const RegionOfInterest& roi) const {
        return {render_frame(s, vocab, brand.codebook(), 1024, 640, roi.on_screen()), 0.0, std::move(url)};
    }

    Verdict run(const SceneSpec& s, std::optional<std::string> url, const CrpModel& crp, std::uint64_t seed = 3) const {
        const RegionOfInterest roi{{100, 120, 868, 552}, 0, 0};
        const SyntheticDetector det(seed, s, detector_config_for(CorpusKind::separable));
        return analyze(frame_for(s, std::move(url), roi), roi, Models{det, brand, crp}, vocab, blacklist);
    }
};

} // namespace

TEST(Analyze, DhlImpersonationOnForeignHost) {
    const Fixture f;
    const Verdict v = f.run(f.dhl_login(), "https://dhl-delivery-check.top/confirm", trained_head());
    EXPECT_EQ(v.decision, Decision::phishing);
    EXPECT_EQ(v.matched_rule, MatchedRule::impersonation);
    EXPECT_EQ(v.evidence.brand->brand, "DHL");
    EXPECT_EQ(v.evidence.crp->label, CrpLabel::crp);
    EXPECT_EQ(*v.evidence.host, "dhl-delivery-check.top");
    EXPECT_TRUE(v.sound(f.vocab));
}

TEST(Analyze, DhlLoginOnItsOwnDomain) {
    const Fixture f;
    const Verdict v = f.run(f.dhl_login(), "https://dhlsameday.com/login", trained_head());
    EXPECT_EQ(v.decision, Decision::benign);
    EXPECT_EQ(v.matched_rule, MatchedRule::domain_legitimate);
    EXPECT_EQ(v.evidence.brand->brand, "DHL");
    EXPECT_EQ(v.phishing_score(), 0.0);
}

TEST(Analyze, BlankSceneHasNoLogo) {
    const Fixture f;
    const Verdict v = f.run(SceneSpec{}, "https://example.org/", constant_head(true));
    EXPECT_EQ(v.decision, Decision::benign);
    EXPECT_EQ(v.matched_rule, MatchedRule::no_logo);
    EXPECT_FALSE(v.evidence.brand);
    EXPECT_FALSE(v.evidence.crp);
}

TEST(Analyze, UnlistedBrandIsBenign) {
    const Fixture f;
    SceneSpec s = f.dhl_login();
    s.brand = "Quorvex Ltd";
    const Verdict v = f.run(s, "https://quorvex.example/login", constant_head(true));
    EXPECT_EQ(v.matched_rule, MatchedRule::unknown_brand);
    EXPECT_EQ(v.decision, Decision::benign);
    EXPECT_EQ(v.evidence.brand->brand, "other");
}

TEST(Analyze, NonCredentialPageIsBenign) {
    const Fixture f;
    const Verdict v = f.run(f.dhl_login(), "https://dhl-delivery-check.top/", constant_head(false));
    EXPECT_EQ(v.matched_rule, MatchedRule::non_crp);
    EXPECT_EQ(v.decision, Decision::benign);
    EXPECT_LT(v.evidence.crp->score, 0.5);
}

TEST(Analyze, MissingUrlIsInconclusive) {
    const Fixture f;
    const Verdict v = f.run(f.dhl_login(), std::nullopt, constant_head(true));
    EXPECT_EQ(v.decision, Decision::inconclusive);
    EXPECT_EQ(v.matched_rule, MatchedRule::missing_url);
    EXPECT_FALSE(v.evidence.host);
    EXPECT_TRUE(v.sound(f.vocab));
}

TEST(Analyze, BlacklistHitShortCircuits) {
    Fixture f;
    f.blacklist.add_domain("delivery-check.top");
    const Verdict v = f.run(f.dhl_login(), "https://www.delivery-check.top/", constant_head(false));
    EXPECT_EQ(v.decision, Decision::phishing);
    EXPECT_EQ(v.matched_rule, MatchedRule::blacklist_hit);
    EXPECT_EQ(v.evidence.blacklist->entry, "domain:delivery-check.top");
    EXPECT_TRUE(v.detections.empty());
    EXPECT_EQ(v.latency.detect, 0.0);
    EXPECT_EQ(v.phishing_score(), 1.0);
    EXPECT_TRUE(v.sound(f.vocab));
}

TEST(Analyze, MalformedUrlPropagates) {
    const Fixture f;
    try {
        f.run(f.dhl_login(), "dhl.com/login", constant_head(true));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::malformed_url);
    }
}

TEST(Analyze, RuleOrderFollowsFirstFailingCheck) {
    const Fixture f;
    // A brand with no logo box never reaches brand or credential checks.
    SceneSpec s = f.dhl_login();
    s.elements.erase(s.elements.begin());
    EXPECT_EQ(f.run(s, "https://dhl-delivery-check.top/", constant_head(true)).matched_rule, MatchedRule::no_logo);
    // An unlisted brand wins over a missing URL.
    s = f.dhl_login();
    s.brand = std::nullopt;
    EXPECT_EQ(f.run(s, std::nullopt, constant_head(true)).matched_rule, MatchedRule::unknown_brand);
    // Non-credential pages are benign even without a URL.
    EXPECT_EQ(f.run(f.dhl_login(), std::nullopt, constant_head(false)).matched_rule, MatchedRule::non_crp);
}

TEST(Analyze, LatencyAndEvidencePopulated) {
    const Fixture f;
    const Verdict v = f.run(f.dhl_login(), "https://dhl-delivery-check.top/", trained_head());
    EXPECT_GT(v.latency.total, 0.0);
    EXPECT_GT(v.latency.detect, 0.0);
    EXPECT_LE(v.latency.prefilter + v.latency.roi + v.latency.detect + v.latency.brand + v.latency.crp, v.latency.total);
    EXPECT_EQ(v.evidence.elements, v.detections.size());
    EXPECT_EQ(v.evidence.logo_box->class_id, ElementClass::logo);
}

TEST(Analyze, SoundAndDeterministicOverGeneratedCorpora) {
    const Fixture f;
    for (auto kind : {CorpusKind::separable, CorpusKind::adversarial}) {
        CorpusConfig cfg;
        cfg.pages = 120;
        cfg.seed = 31;
        cfg.kind = kind;
        const Corpus corpus = generate_corpus(cfg, f.vocab);
        for (const auto& r : corpus.records) {
            const Image frame = render_record(r, f.vocab, f.brand.codebook());
            const SyntheticDetector det(r.seed, r.scene(), r.detector);
            const Models models{det, f.brand, trained_head()};
            const Verdict a = analyze({frame, 0.0, r.url}, r.roi, models, f.vocab, corpus.blacklist);
            const Verdict b = analyze({frame, 0.0, r.url}, r.roi, models, f.vocab, corpus.blacklist);
            EXPECT_TRUE(a.sound(f.vocab)) << r.image;
            EXPECT_EQ(a.decision, b.decision);
            EXPECT_EQ(a.matched_rule, b.matched_rule);
            EXPECT_EQ(a.detections, b.detections);
        }
    }
}

TEST(Verdict, SoundnessRejectsBrokenEvidence) {
    const BrandVocabulary vocab = make_vocabulary(20);
    Verdict v;
    v.decision = Decision::phishing;
    v.matched_rule = MatchedRule::impersonation;
    v.evidence.brand = BrandPrediction{"DHL", 0.99};
    v.evidence.crp = CrpResult{CrpLabel::crp, 0.9};
    v.evidence.host = "evil.top";
    EXPECT_TRUE(v.sound(vocab));
    v.evidence.host = "www.dhl.de";
    EXPECT_FALSE(v.sound(vocab));
    v.evidence.host = "evil.top";
    v.evidence.crp->label = CrpLabel::non_crp;
    EXPECT_FALSE(v.sound(vocab));
    v.evidence.crp->label = CrpLabel::crp;
    v.evidence.brand->brand = "other";
    EXPECT_FALSE(v.sound(vocab));
    v.matched_rule = MatchedRule::blacklist_hit;
    EXPECT_FALSE(v.sound(vocab));
    v.evidence.blacklist = BlacklistHit{"evil.top", "evil.top"};
    EXPECT_TRUE(v.sound(vocab));
}
