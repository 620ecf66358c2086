// This file is part of imchit, a C++ library for bounding hitting
// probabilities and expected hitting times of Markov chains with
// set-valued transition rows.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.

// Model and result (de)serialization. Parsing leans on a JSON library;
// emitting is hand-rolled so the byte layout is fully deterministic: fixed
// key order, fixed spacing, %.17g numbers (which round-trip doubles
// exactly), and the string "inf" for infinite times.

#pragma once

#include "imchit/imprecise.hpp"
#include "imchit/model.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace imchit {

namespace detail {

inline std::string format_number(prec_t v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (const char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c));
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

inline std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

inline std::string emit_numvec(const numvec& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_number(v[i]);
    }
    return out + "]";
}

inline std::string emit_extended(const std::vector<ExtendedValue>& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += v[i].is_finite() ? format_number(v[i].value()) : std::string("\"inf\"");
    }
    return out + "]";
}

/// Members of `s` as a label array, in state-index order.
inline std::string emit_labelset(const StateSpace& states, const stateset& s) {
    std::string out = "[";
    bool first = true;
    for (size_t x : s) {
        if (!first) out += ", ";
        first = false;
        out += quoted(states.labels[x]);
    }
    return out + "]";
}

inline numvec read_numvec(const nlohmann::json& j, const std::string& context) {
    if (!j.is_array()) throw std::invalid_argument(context + " must be an array of numbers");
    numvec out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw std::invalid_argument(context + " must be an array of numbers");
        out.push_back(e.get<prec_t>());
    }
    return out;
}

inline std::vector<std::string> read_labels(const nlohmann::json& j, const std::string& context) {
    if (!j.is_array()) throw std::invalid_argument(context + " must be an array of state labels");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_string()) throw std::invalid_argument(context + " must be an array of state labels");
        out.push_back(e.get<std::string>());
    }
    return out;
}

inline nlohmann::json parse_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("could not parse JSON: ") + e.what());
    }
}

} // namespace detail

/**
 * Reads a model from its JSON form:
 *
 *   { "states": ["1", "2"],
 *     "target": ["2"],
 *     "rows": { "1": {"type": "interval", "lower": [..], "upper": [..]},
 *               "2": {"type": "vertices", "vertices": [[..], ..]} } }
 *
 * Throws std::invalid_argument with a schema message on malformed input and
 * with all validation findings (joined) when the model is structurally
 * well-formed but invalid.
 */
inline Model parse_model(const std::string& text) {
    const nlohmann::json j = detail::parse_json(text);
    auto fail = [](const std::string& what) -> void { throw std::invalid_argument("model JSON: " + what); };
    if (!j.is_object()) fail("top level must be an object");
    if (!j.contains("states")) fail("missing \"states\"");
    if (!j.contains("target")) fail("missing \"target\"");
    if (!j.contains("rows") || !j["rows"].is_object()) fail("\"rows\" must be an object keyed by state label");

    Model m;
    m.states.labels = detail::read_labels(j["states"], "\"states\"");
    const auto target_labels = detail::read_labels(j["target"], "\"target\"");

    const auto& rows = j["rows"];
    for (auto it = rows.begin(); it != rows.end(); ++it)
        if (!m.states.has_label(it.key())) fail("rows mention unknown state label \"" + it.key() + "\"");
    for (const auto& label : m.states.labels) {
        if (!rows.contains(label)) fail("missing row for state \"" + label + "\"");
        const auto& row = rows[label];
        if (!row.is_object() || !row.contains("type") || !row["type"].is_string())
            fail("row \"" + label + "\": missing \"type\"");
        const std::string type = row["type"].get<std::string>();
        if (type == "interval") {
            if (!row.contains("lower") || !row.contains("upper"))
                fail("row \"" + label + "\": interval rows need \"lower\" and \"upper\"");
            IntervalRow iv;
            iv.lower = detail::read_numvec(row["lower"], "row \"" + label + "\": \"lower\"");
            iv.upper = detail::read_numvec(row["upper"], "row \"" + label + "\": \"upper\"");
            m.rows.emplace_back(std::move(iv));
        } else if (type == "vertices") {
            if (!row.contains("vertices") || !row["vertices"].is_array())
                fail("row \"" + label + "\": vertex rows need a \"vertices\" array");
            VertexRow vr;
            for (const auto& v : row["vertices"])
                vr.vertices.push_back(detail::read_numvec(v, "row \"" + label + "\": vertex"));
            m.rows.emplace_back(std::move(vr));
        } else {
            fail("row \"" + label + "\": unknown type \"" + type + "\" (expected \"interval\" or \"vertices\")");
        }
    }

    m.target = target_from_labels(m.states, target_labels);

    const auto errors = validate_model(m);
    if (!errors.empty()) {
        std::string joined = "invalid model: " + errors[0];
        for (size_t i = 1; i < errors.size(); ++i) joined += "; " + errors[i];
        throw std::invalid_argument(joined);
    }
    return m;
}

/// parse_model applied to a file's contents.
inline Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open model file \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

/// Deterministic inverse of parse_model; see the file header for the
/// byte-layout guarantees.
inline std::string serialize_model(const Model& m) {
    using detail::quoted;
    std::string out = "{\n  \"states\": [";
    for (size_t i = 0; i < m.states.labels.size(); ++i) {
        if (i > 0) out += ", ";
        out += quoted(m.states.labels[i]);
    }
    out += "],\n  \"target\": ";
    out += detail::emit_labelset(m.states, m.target.members);
    out += ",\n  \"rows\": {\n";
    for (size_t x = 0; x < m.size(); ++x) {
        out += "    " + quoted(m.states.labels[x]) + ": ";
        if (const auto* iv = std::get_if<IntervalRow>(&m.rows[x])) {
            out += "{\"type\": \"interval\", \"lower\": " + detail::emit_numvec(iv->lower) +
                   ", \"upper\": " + detail::emit_numvec(iv->upper) + "}";
        } else {
            const auto& vr = std::get<VertexRow>(m.rows[x]);
            out += "{\"type\": \"vertices\", \"vertices\": [";
            for (size_t k = 0; k < vr.vertices.size(); ++k) {
                if (k > 0) out += ", ";
                out += detail::emit_numvec(vr.vertices[k]);
            }
            out += "]}";
        }
        out += x + 1 < m.size() ? ",\n" : "\n";
    }
    out += "  }\n}\n";
    return out;
}

/// Deterministic JSON form of an analysis: the four envelope vectors, the
/// qualitative partition as label arrays, and regions in slot notation.
inline std::string serialize_result(const AnalysisResult& r) {
    using detail::quoted;
    std::string out = "{\n  \"states\": [";
    for (size_t i = 0; i < r.states.labels.size(); ++i) {
        if (i > 0) out += ", ";
        out += quoted(r.states.labels[i]);
    }
    out += "],\n  \"target\": " + detail::emit_labelset(r.states, r.target.members);
    out += ",\n  \"lower_prob\": " + detail::emit_numvec(r.lower_prob);
    out += ",\n  \"upper_prob\": " + detail::emit_numvec(r.upper_prob);
    out += ",\n  \"lower_time\": " + detail::emit_extended(r.lower_time);
    out += ",\n  \"upper_time\": " + detail::emit_extended(r.upper_time);
    out += ",\n  \"partition\": {";
    out += "\n    \"avoidable\": " + detail::emit_labelset(r.states, r.partition.avoidable);
    out += ",\n    \"avoidable_exposure\": " + detail::emit_labelset(r.states, r.partition.avoidable_exposure);
    out += ",\n    \"unreachable\": " + detail::emit_labelset(r.states, r.partition.unreachable);
    out += ",\n    \"unreachable_exposure\": " + detail::emit_labelset(r.states, r.partition.unreachable_exposure);
    out += ",\n    \"almost_sure\": " + detail::emit_labelset(r.states, r.partition.almost_sure);
    out += "\n  },\n  \"regions\": [";
    for (size_t i = 0; i < r.regions.size(); ++i) {
        if (i > 0) out += ", ";
        out += quoted(region_pattern(r.regions[i]));
    }
    out += "],\n  \"findings\": [";
    for (size_t i = 0; i < r.findings.size(); ++i) {
        if (i > 0) out += ", ";
        out += quoted(r.findings[i]);
    }
    out += "]\n}\n";
    return out;
}

/// Inverse of serialize_result. Throws std::invalid_argument on schema
/// violations, unknown labels, or unknown region patterns.
inline AnalysisResult parse_result(const std::string& text) {
    const nlohmann::json j = detail::parse_json(text);
    auto fail = [](const std::string& what) -> void { throw std::invalid_argument("result JSON: " + what); };
    if (!j.is_object()) fail("top level must be an object");
    for (const char* key : {"states", "target", "lower_prob", "upper_prob", "lower_time", "upper_time",
                            "partition", "regions"})
        if (!j.contains(key)) fail(std::string("missing \"") + key + "\"");

    AnalysisResult r;
    r.states.labels = detail::read_labels(j["states"], "\"states\"");
    r.target = target_from_labels(r.states, detail::read_labels(j["target"], "\"target\""));
    r.lower_prob = detail::read_numvec(j["lower_prob"], "\"lower_prob\"");
    r.upper_prob = detail::read_numvec(j["upper_prob"], "\"upper_prob\"");

    auto read_extended = [&](const nlohmann::json& a, const std::string& ctx) {
        if (!a.is_array()) fail(ctx + " must be an array");
        std::vector<ExtendedValue> out;
        for (const auto& e : a) {
            if (e.is_number())
                out.push_back(ExtendedValue::finite(e.get<prec_t>()));
            else if (e.is_string() && e.get<std::string>() == "inf")
                out.push_back(ExtendedValue::infinity());
            else
                fail(ctx + " entries must be numbers or \"inf\"");
        }
        return out;
    };
    r.lower_time = read_extended(j["lower_time"], "\"lower_time\"");
    r.upper_time = read_extended(j["upper_time"], "\"upper_time\"");

    const auto& part = j["partition"];
    if (!part.is_object()) fail("\"partition\" must be an object");
    auto read_set = [&](const char* key) {
        if (!part.contains(key)) fail(std::string("partition missing \"") + key + "\"");
        stateset out;
        for (const auto& label : detail::read_labels(part[key], std::string("partition \"") + key + "\""))
            out.insert(r.states.index_of(label));
        return out;
    };
    r.partition.avoidable = read_set("avoidable");
    r.partition.avoidable_exposure = read_set("avoidable_exposure");
    r.partition.unreachable = read_set("unreachable");
    r.partition.unreachable_exposure = read_set("unreachable_exposure");
    r.partition.almost_sure = read_set("almost_sure");

    if (!j["regions"].is_array()) fail("\"regions\" must be an array of patterns");
    for (const auto& e : j["regions"]) {
        if (!e.is_string()) fail("\"regions\" must be an array of patterns");
        r.regions.push_back(region_from_pattern(e.get<std::string>()));
    }
    if (j.contains("findings")) r.findings = detail::read_labels(j["findings"], "\"findings\"");
    return r;
}

} // namespace imchit
