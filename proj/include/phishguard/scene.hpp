#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phishguard/error.hpp"
#include "phishguard/geometry.hpp"

namespace phishguard {

using Json = nlohmann::ordered_json;

struct SceneElement {
    ElementClass class_id = ElementClass::block;
    Rect rect;
    double score = 1.0;

    friend bool operator==(const SceneElement&, const SceneElement&) = default;
};

/// A planted page: the layout elements a synthetic detector reports, whether
/// the page asks for credentials, and the brand its logo shows (absent when
/// the logo is not a reference brand).
struct SceneSpec {
    std::vector<SceneElement> elements;
    bool crp = false;
    std::optional<std::string> brand;

    friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

inline Json rect_to_json(const Rect& r) { return Json::array({r.x_min(), r.y_min(), r.x_max(), r.y_max()}); }

inline Rect rect_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::parse_error, "rect must be [x_min, y_min, x_max, y_max]");
    for (const auto& v : j)
        if (!v.is_number()) throw Error(ErrorCode::parse_error, "rect coordinates must be numbers");
    return Rect(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

inline Json element_to_json(const SceneElement& e) {
    return Json{{"class", std::string(to_string(e.class_id))}, {"rect", rect_to_json(e.rect)}, {"score", e.score}};
}

inline SceneElement element_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::parse_error, "element must be an object");
    SceneElement e;
    const auto cls = parse_element_class(j.at("class").get<std::string>());
    if (!cls) throw Error(ErrorCode::parse_error, "unknown element class '" + j.at("class").get<std::string>() + "'");
    e.class_id = *cls;
    e.rect = rect_from_json(j.at("rect"));
    e.score = j.value("score", 1.0);
    if (!(e.score >= 0.0 && e.score <= 1.0)) throw Error(ErrorCode::parse_error, "element score must lie in [0,1]");
    return e;
}

inline Json scene_to_json(const SceneSpec& s) {
    Json elements = Json::array();
    for (const auto& e : s.elements) elements.push_back(element_to_json(e));
    return Json{{"elements", elements}, {"crp", s.crp}, {"brand", s.brand ? Json(*s.brand) : Json(nullptr)}};
}

inline SceneSpec scene_from_json(const Json& j) {
    try {
        SceneSpec s;
        for (const auto& e : j.at("elements")) s.elements.push_back(element_from_json(e));
        s.crp = j.value("crp", false);
        if (j.contains("brand") && !j.at("brand").is_null()) s.brand = j.at("brand").get<std::string>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("scene: ") + e.what());
    }
}

} // namespace phishguard
