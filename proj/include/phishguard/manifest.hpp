#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishguard/error.hpp"
#include "phishguard/evaluation.hpp"
#include "phishguard/pipeline.hpp"
#include "phishguard/scene.hpp"
#include "phishguard/synthetic.hpp"

namespace phishguard {

/// One ground-truth page. `boxes` doubles as the planted scene for the
/// synthetic detector, with `seed` and `detector` fixing its behaviour.
struct DatasetRecord {
    std::string image;
    int frame_width = 0;
    int frame_height = 0;
    RegionOfInterest roi;
    std::vector<SceneElement> boxes;
    std::optional<std::string> brand;
    bool crp = false;
    Decision verdict = Decision::benign;
    std::optional<std::string> url;
    std::uint64_t seed = 0;
    SyntheticDetectorConfig detector{};

    SceneSpec scene() const { return {boxes, crp, brand}; }

    std::vector<GroundTruthBox> ground_truth() const {
        std::vector<GroundTruthBox> gt;
        for (const auto& b : boxes) gt.push_back({b.rect, b.class_id});
        return gt;
    }

    /// Checks label consistency: a phishing page shows a brand and asks for credentials.
    void validate() const {
        if (verdict == Decision::inconclusive) throw Error(ErrorCode::parse_error, "verdict label must be phishing or benign");
        if (verdict == Decision::phishing && (!brand || !crp))
            throw Error(ErrorCode::parse_error, "phishing record '" + image + "' lacks a brand or credential form");
    }
};

inline Json record_to_json(const DatasetRecord& r) {
    Json boxes = Json::array();
    for (const auto& b : r.boxes) boxes.push_back(element_to_json(b));
    const auto& d = r.detector;
    return Json{{"image", r.image},
                {"frame_size", Json::array({r.frame_width, r.frame_height})},
                {"roi", Json{{"rect", Json::array({r.roi.rect.left, r.roi.rect.top, r.roi.rect.right, r.roi.rect.bottom})},
                             {"scroll_offset", Json::array({r.roi.scroll_dx, r.roi.scroll_dy})}}},
                {"boxes", boxes},
                {"brand", r.brand ? Json(*r.brand) : Json(nullptr)},
                {"crp", r.crp},
                {"verdict", std::string(to_string(r.verdict))},
                {"url", r.url ? Json(*r.url) : Json(nullptr)},
                {"seed", r.seed},
                {"detector", Json{{"jitter", d.jitter},
                                  {"duplicate_rate", d.duplicate_rate},
                                  {"clutter", d.clutter},
                                  {"crp_signal", d.crp_signal},
                                  {"noise_sigma", d.noise_sigma}}}};
}

inline RegionOfInterest roi_from_json(const Json& j) {
    const auto& rect = j.at("rect");
    if (!rect.is_array() || rect.size() != 4) throw Error(ErrorCode::parse_error, "roi.rect must be [left, top, right, bottom]");
    RegionOfInterest roi{{rect[0].get<int>(), rect[1].get<int>(), rect[2].get<int>(), rect[3].get<int>()}, 0, 0};
    if (j.contains("scroll_offset")) {
        const auto& s = j.at("scroll_offset");
        if (!s.is_array() || s.size() != 2) throw Error(ErrorCode::parse_error, "roi.scroll_offset must be [dx, dy]");
        roi.scroll_dx = s[0].get<int>();
        roi.scroll_dy = s[1].get<int>();
    }
    return roi;
}

inline DatasetRecord record_from_json(const Json& j) {
    try {
        DatasetRecord r;
        r.image = j.at("image").get<std::string>();
        if (j.contains("frame_size")) {
            r.frame_width = j.at("frame_size").at(0).get<int>();
            r.frame_height = j.at("frame_size").at(1).get<int>();
        }
        r.roi = roi_from_json(j.at("roi"));
        for (const auto& b : j.at("boxes")) r.boxes.push_back(element_from_json(b));
        if (!j.at("brand").is_null()) r.brand = j.at("brand").get<std::string>();
        r.crp = j.at("crp").get<bool>();
        const auto v = j.at("verdict").get<std::string>();
        if (v == "phishing") r.verdict = Decision::phishing;
        else if (v == "benign") r.verdict = Decision::benign;
        else throw Error(ErrorCode::parse_error, "verdict must be phishing or benign, got '" + v + "'");
        if (j.contains("url") && !j.at("url").is_null()) r.url = j.at("url").get<std::string>();
        r.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("detector")) {
            const auto& d = j.at("detector");
            r.detector.jitter = d.value("jitter", 0.0);
            r.detector.duplicate_rate = d.value("duplicate_rate", 0.0);
            r.detector.clutter = d.value("clutter", std::size_t{0});
            r.detector.crp_signal = d.value("crp_signal", r.detector.crp_signal);
            r.detector.noise_sigma = d.value("noise_sigma", r.detector.noise_sigma);
        }
        r.validate();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, e.what());
    }
}

inline std::string write_manifest(const std::vector<DatasetRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

inline std::vector<DatasetRecord> parse_manifest(std::string_view text) {
    std::vector<DatasetRecord> records;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(record_from_json(Json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::parse_error, "manifest line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::parse_error, "manifest line " + std::to_string(lineno) + ": " + e.detail());
        }
    }
    return records;
}

inline std::vector<DatasetRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open manifest " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

} // namespace phishguard
