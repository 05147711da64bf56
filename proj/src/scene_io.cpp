// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "trmusic/scene_io.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trmusic/errors.hpp"
#include "trmusic/io.hpp"

namespace trmusic {

namespace {

using nlohmann::json;

// Best-effort line hint for a semantic error: locate the nth occurrence of
// the leaf key in the raw document.
std::string line_hint(const std::string& raw, const std::string& leaf_key, int occurrence) {
    if (raw.empty() || leaf_key.empty()) return {};
    const std::string needle = "\"" + leaf_key + "\"";
    size_t pos = 0;
    for (int i = 0; i <= occurrence; ++i) {
        pos = raw.find(needle, pos);
        if (pos == std::string::npos) return {};
        if (i < occurrence) pos += needle.size();
    }
    int line = 1;
    for (size_t i = 0; i < pos; ++i)
        if (raw[i] == '\n') ++line;
    std::ostringstream os;
    os << " (line " << line << ")";
    return os.str();
}

[[noreturn]] void fail(const std::string& msg, const std::string& path, const std::string& raw,
                       const std::string& leaf = {}, int occurrence = 0) {
    throw ConfigError(msg + " at " + path + line_hint(raw, leaf, occurrence), path);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& path, const std::string& raw) {
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) fail("unknown key '" + key + "'", path + "." + key, raw, key);
}

Point parse_point(const json& j, const std::string& path, const std::string& raw) {
    if (!j.is_array() || j.empty()) fail("expected a coordinate array", path, raw);
    Point p(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail("coordinate must be a number", path, raw);
        p(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return p;
}

std::vector<Point> parse_elements(const json& j, const std::string& path, const std::string& raw) {
    if (!j.is_array() || j.empty()) fail("expected a nonempty element list", path, raw);
    std::vector<Point> out;
    out.reserve(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        std::ostringstream os;
        os << path << "[" << i << "]";
        out.push_back(parse_point(j[i], os.str(), raw));
    }
    return out;
}

}  // namespace

SceneConfig scene_from_json(const json& j, const std::string& raw) {
    if (!j.is_object()) fail("scene must be an object", "scene", raw);
    reject_unknown_keys(j, {"kappa", "lambda", "unit", "model", "tx", "rx", "scatterers"},
                        "scene", raw);

    SceneConfig s;
    const bool has_kappa = j.contains("kappa");
    const bool has_lambda = j.contains("lambda");
    if (has_kappa && has_lambda)
        fail("give either 'kappa' or 'lambda', not both", "scene.kappa", raw, "kappa");
    if (has_kappa) {
        if (!j["kappa"].is_number() || !(j["kappa"].get<double>() > 0))
            fail("'kappa' must be a positive number", "scene.kappa", raw, "kappa");
        s.kappa = j["kappa"].get<double>();
    } else if (has_lambda) {
        if (!j["lambda"].is_number() || !(j["lambda"].get<double>() > 0))
            fail("'lambda' must be a positive number", "scene.lambda", raw, "lambda");
        s.kappa = 2.0 * M_PI / j["lambda"].get<double>();
    }
    if (j.contains("unit")) {
        if (!j["unit"].is_string()) fail("'unit' must be a string", "scene.unit", raw, "unit");
        s.length_unit = j["unit"].get<std::string>();
    }
    if (!j.contains("model")) fail("missing 'model'", "scene.model", raw);
    const std::string model = j["model"].get<std::string>();
    if (model == "born")
        s.model = ScatteringModel::BornApproximated;
    else if (model == "foldy-lax")
        s.model = ScatteringModel::FoldyLax;
    else
        fail("'model' must be \"born\" or \"foldy-lax\"", "scene.model", raw, "model");

    for (const char* arr : {"tx", "rx"}) {
        if (!j.contains(arr)) fail(std::string("missing '") + arr + "'", std::string("scene.") + arr, raw);
        const json& ja = j[arr];
        if (!ja.is_object()) fail("array description must be an object", std::string("scene.") + arr, raw, arr);
        reject_unknown_keys(ja, {"elements"}, std::string("scene.") + arr, raw);
        if (!ja.contains("elements"))
            fail("missing 'elements'", std::string("scene.") + arr + ".elements", raw, arr);
        auto elems = parse_elements(ja["elements"], std::string("scene.") + arr + ".elements", raw);
        (std::string(arr) == "tx" ? s.tx : s.rx).elements = std::move(elems);
    }

    if (!j.contains("scatterers")) fail("missing 'scatterers'", "scene.scatterers", raw);
    const json& js = j["scatterers"];
    if (!js.is_array() || js.empty())
        fail("'scatterers' must be a nonempty array", "scene.scatterers", raw, "scatterers");
    for (size_t k = 0; k < js.size(); ++k) {
        std::ostringstream os;
        os << "scene.scatterers[" << k << "]";
        const std::string path = os.str();
        const json& jk = js[k];
        if (!jk.is_object()) fail("scatterer must be an object", path, raw);
        reject_unknown_keys(jk, {"position", "tau_re", "tau_im"}, path, raw);
        if (!jk.contains("position")) fail("missing 'position'", path + ".position", raw);
        if (!jk.contains("tau_re"))
            fail("missing 'tau_re'", path + ".tau_re", raw, "position", static_cast<int>(k));
        Scatterer sc;
        sc.position = parse_point(jk["position"], path + ".position", raw);
        if (!jk["tau_re"].is_number())
            fail("'tau_re' must be a number", path + ".tau_re", raw, "tau_re", static_cast<int>(k));
        const double re = jk["tau_re"].get<double>();
        double im = 0.0;
        if (jk.contains("tau_im")) {
            if (!jk["tau_im"].is_number())
                fail("'tau_im' must be a number", path + ".tau_im", raw, "tau_im",
                     static_cast<int>(k));
            im = jk["tau_im"].get<double>();
        }
        sc.tau = {re, im};
        s.scatterers.push_back(std::move(sc));
    }

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid scene: ") + e.what(), "scene");
    }
    return s;
}

SceneConfig load_scene(const std::string& path) {
    const std::string raw = read_text_file(path);
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line:column.
        size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        if (byte > raw.size()) byte = raw.size();
        int line = 1, col = 1;
        for (size_t i = 0; i < byte; ++i) {
            if (raw[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << path << ":" << line << ":" << col << ": " << e.what();
        throw ConfigError(os.str());
    }
    return scene_from_json(j, raw);
}

nlohmann::json scene_to_json(const SceneConfig& scene) {
    json j;
    j["kappa"] = scene.kappa;
    j["unit"] = scene.length_unit;
    j["model"] = scene.model == ScatteringModel::BornApproximated ? "born" : "foldy-lax";
    auto dump_elems = [](const ArrayGeometry& a) {
        json out = json::array();
        for (const auto& e : a.elements) {
            json pt = json::array();
            for (Eigen::Index i = 0; i < e.size(); ++i) pt.push_back(e(i));
            out.push_back(std::move(pt));
        }
        return out;
    };
    j["tx"] = {{"elements", dump_elems(scene.tx)}};
    j["rx"] = {{"elements", dump_elems(scene.rx)}};
    json sc = json::array();
    for (const auto& s : scene.scatterers) {
        json pt = json::array();
        for (Eigen::Index i = 0; i < s.position.size(); ++i) pt.push_back(s.position(i));
        sc.push_back({{"position", std::move(pt)}, {"tau_re", s.tau.real()}, {"tau_im", s.tau.imag()}});
    }
    j["scatterers"] = std::move(sc);
    return j;
}

void save_scene(const SceneConfig& scene, const std::string& path) {
    write_text_file(path, scene_to_json(scene).dump(2) + "\n");
}

}  // namespace trmusic
