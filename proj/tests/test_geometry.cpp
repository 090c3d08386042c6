#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phishguard/geometry.hpp"

using namespace phishguard;

TEST(Rect, ClampsAndOrdersCorners) {
    const Rect r(0.8, 1.4, -0.2, 0.3);
    EXPECT_EQ(r.x_min(), 0.0);
    EXPECT_EQ(r.x_max(), 0.8);
    EXPECT_EQ(r.y_min(), 0.3);
    EXPECT_EQ(r.y_max(), 1.0);
    EXPECT_THROW(Rect(0, 0, std::nan(""), 1), Error);
    EXPECT_TRUE(Rect(0.2, 0.2, 0.2, 0.9).empty());
}

TEST(Iou, HandDerivedOneSeventh) {
    // 0.2 squares offset by half a side on both axes: 0.01 / (0.04 + 0.04 - 0.01).
    const Rect a(0.0, 0.0, 0.2, 0.2), b(0.1, 0.1, 0.3, 0.3);
    EXPECT_NEAR(iou(a, b), 1.0 / 7.0, 1e-12);
    EXPECT_NEAR(iou(Rect(0, 0, 0.2, 0.2), Rect(0.1, 0, 0.3, 0.2)), 1.0 / 3.0, 1e-12);
}

TEST(Iou, IdentityDisjointAndDegenerate) {
    const Rect a(0.1, 0.2, 0.5, 0.7);
    EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
    EXPECT_EQ(iou(a, Rect(0.6, 0.2, 0.9, 0.7)), 0.0);
    EXPECT_EQ(iou(a, Rect(0.5, 0.2, 0.9, 0.7)), 0.0); // touching edge
    EXPECT_EQ(iou(Rect(0.3, 0.3, 0.3, 0.3), Rect(0.3, 0.3, 0.3, 0.3)), 0.0);
}

TEST(Iou, PropertiesOnRandomRects) {
    Rng rng(11);
    for (int i = 0; i < 5000; ++i) {
        const Rect a = oracle::grid_rect(rng), b = oracle::grid_rect(rng);
        const double ab = iou(a, b), ba = iou(b, a);
        EXPECT_EQ(ab, ba);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
        const auto o = oracle::overlap(a, b);
        EXPECT_NEAR(ab, o.inter / o.uni, 1e-12);
        EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
    }
}

TEST(ElementClass, NamesRoundTrip) {
    for (int i = 0; i < kNumElementClasses; ++i) {
        const auto c = static_cast<ElementClass>(i);
        EXPECT_EQ(parse_element_class(to_string(c)), c);
    }
    EXPECT_FALSE(parse_element_class("no-object"));
    EXPECT_FALSE(parse_element_class("Logo"));
}

TEST(Nms, KeepsBestOfOverlappingPair) {
    const std::vector<DetectionBox> boxes{{Rect(0, 0, 0.4, 0.4), ElementClass::logo, 0.6},
                                          {Rect(0.01, 0, 0.41, 0.4), ElementClass::logo, 0.9},
                                          {Rect(0.6, 0.6, 0.9, 0.9), ElementClass::logo, 0.5}};
    const auto kept = nms(boxes);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0], boxes[1]);
    EXPECT_EQ(kept[1], boxes[2]);
}

TEST(Nms, ScoreThresholdIsStrict) {
    const std::vector<DetectionBox> boxes{{Rect(0, 0, 0.1, 0.1), ElementClass::logo, 0.3},
                                          {Rect(0.5, 0.5, 0.6, 0.6), ElementClass::logo, 0.30001}};
    const auto kept = nms(boxes);
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_EQ(kept[0].score, 0.30001);
}

TEST(Nms, ClassAwareness) {
    const std::vector<DetectionBox> boxes{{Rect(0, 0, 0.4, 0.4), ElementClass::logo, 0.9},
                                          {Rect(0, 0, 0.4, 0.4), ElementClass::button, 0.8}};
    EXPECT_EQ(nms(boxes).size(), 2u);
    EXPECT_EQ(nms(boxes, {0.5, 0.3, false}).size(), 1u);
}

TEST(Nms, IouExactlyAtThresholdSurvives) {
    // b covers exactly half of a.
    const Rect a(0.0, 0.0, 0.5, 0.5), b(0.0, 0.0, 0.5, 0.25);
    ASSERT_EQ(iou(a, b), 0.5);
    const std::vector<DetectionBox> boxes{{a, ElementClass::logo, 0.9}, {b, ElementClass::logo, 0.8}};
    EXPECT_EQ(nms(boxes).size(), 2u);
}

TEST(Nms, TiesResolvedByInputOrder) {
    const std::vector<DetectionBox> boxes{{Rect(0, 0, 0.4, 0.4), ElementClass::logo, 0.7},
                                          {Rect(0.01, 0.01, 0.41, 0.41), ElementClass::logo, 0.7}};
    const auto kept = nms(boxes);
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_EQ(kept[0], boxes[0]);
}

TEST(Nms, EmptyAndInvalidConfig) {
    EXPECT_TRUE(nms({}).empty());
    EXPECT_THROW(nms({}, {0.0, 0.3, true}), Error);
    EXPECT_THROW(nms({}, {0.5, 1.0, true}), Error);
}

TEST(NmsProperty, MatchesSuppressionMatrixOracle) {
    Rng rng(2024);
    for (int t = 0; t < 2000; ++t) {
        const auto c = oracle::random_nms_case(rng, 15);
        EXPECT_EQ(nms(c.boxes, c.config()), oracle::nms_oracle(c)) << "case " << t;
    }
}

TEST(NmsProperty, UniqueFixedPointByEnumeration) {
    Rng rng(77);
    for (int t = 0; t < 300; ++t) {
        const auto c = oracle::random_nms_case(rng, 9);
        const auto fp = oracle::nms_fixed_point(c);
        ASSERT_TRUE(fp.has_value()) << "case " << t;
        std::uint32_t mask = 0;
        for (std::size_t i : oracle::nms_kept(c)) mask |= 1u << i;
        EXPECT_EQ(*fp, mask) << "case " << t;
    }
}

TEST(NmsProperty, IdempotentSortedAndPairwiseSeparated) {
    Rng rng(5);
    for (int t = 0; t < 1000; ++t) {
        const auto c = oracle::random_nms_case(rng, 15);
        const auto cfg = c.config();
        const auto once = nms(c.boxes, cfg);
        EXPECT_EQ(nms(once, cfg), once);
        for (std::size_t i = 0; i < once.size(); ++i) {
            EXPECT_GT(once[i].score, cfg.score_threshold);
            if (i) EXPECT_GE(once[i - 1].score, once[i].score);
            for (std::size_t j = 0; j < i; ++j)
                if (!cfg.class_aware || once[i].class_id == once[j].class_id)
                    EXPECT_LE(iou(once[i].rect, once[j].rect), cfg.iou_threshold);
        }
    }
}
