#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zxq/diagram.hpp"
#include "zxq/error.hpp"
#include "zxq/proof.hpp"
#include "zxq/semantics.hpp"

namespace zxq {

using Json = nlohmann::ordered_json;

inline constexpr int diagram_format_version = 1;

inline std::string read_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::parse, path + ": cannot open file");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(std::string const& path, std::string const& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::invalid_argument, path + ": cannot write file");
    out << text;
}

// -- diagrams ----------------------------------------------------------------

inline Json diagram_to_json(Diagram const& d) {
    Json j;
    j["version"] = diagram_format_version;
    j["variables"] = Json::array();
    for (auto const& v : d.variables()) j["variables"].push_back(v);
    j["vertices"] = Json::array();
    for (auto const& [id, v] : d.vertices()) {
        Json jv{{"id", id}, {"kind", std::string(1, kind_letter(v.kind))}};
        if (is_spider(v.kind) && !v.phase.is_zero()) jv["phase"] = {{"num", v.phase.num()}, {"den", v.phase.den()}};
        if (v.conditional()) jv["cond"] = v.cond.str();
        j["vertices"].push_back(jv);
    }
    j["edges"] = Json::array();
    for (auto const& e : d.edges()) j["edges"].push_back({e.a, e.b});
    j["inputs"] = d.inputs();
    j["outputs"] = d.outputs();
    return j;
}

namespace detail {

inline VertexKind kind_from_letter(std::string const& s) {
    if (s == "Z") return VertexKind::z;
    if (s == "X") return VertexKind::x;
    if (s == "H") return VertexKind::h;
    if (s == "B") return VertexKind::boundary;
    throw Error(ErrorKind::parse, "unknown vertex kind '" + s + "'");
}

template <class F>
auto json_field(std::string const& what, F f) -> decltype(f()) {
    try {
        return f();
    } catch (Json::exception const& e) {
        throw Error(ErrorKind::parse, what + ": " + e.what());
    }
}

}  // namespace detail

inline Diagram diagram_from_json(Json const& j) {
    return detail::json_field("diagram", [&] {
        if (!j.is_object()) throw Error(ErrorKind::parse, "a diagram must be a JSON object");
        int const version = j.value("version", diagram_format_version);
        if (version != diagram_format_version)
            throw Error(ErrorKind::parse, "unsupported diagram version " + std::to_string(version));
        Diagram d;
        std::set<std::string> vars;
        if (j.contains("variables"))
            for (auto const& v : j.at("variables")) vars.insert(v.get<std::string>());
        for (auto const& jv : j.at("vertices")) {
            Vertex v;
            v.kind = detail::kind_from_letter(jv.at("kind").get<std::string>());
            if (jv.contains("phase")) {
                auto const& p = jv.at("phase");
                std::int64_t const den = p.value("den", std::int64_t{1});
                if (den <= 0) throw Error(ErrorKind::parse, "phase denominator must be positive");
                v.phase = Phase(p.at("num").get<std::int64_t>(), den);
            }
            if (jv.contains("cond")) {
                v.cond = parse_formula(jv.at("cond").get<std::string>(), vars);
                v.cond.collect_vars(vars);
            }
            try {
                d.add_vertex_with_id(jv.at("id").get<VertexId>(), v);
            } catch (Error const& e) {
                throw Error(ErrorKind::parse, e.what());
            }
        }
        for (auto const& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::parse, "an edge must be a pair of ids");
            VertexId const a = e[0].get<VertexId>(), b = e[1].get<VertexId>();
            if (!d.has_vertex(a) || !d.has_vertex(b))
                throw Error(ErrorKind::parse, "edge [" + std::to_string(a) + "," + std::to_string(b) +
                                                  "] names a missing vertex");
            d.add_edge(a, b);
        }
        auto ids = [&](char const* key) {
            std::vector<VertexId> out;
            if (j.contains(key))
                for (auto const& x : j.at(key)) out.push_back(x.get<VertexId>());
            return out;
        };
        d.set_inputs(ids("inputs"));
        d.set_outputs(ids("outputs"));
        d.set_variables(vars);
        if (auto problems = validate(d); !problems.empty()) throw Error(ErrorKind::parse, problems.front());
        return d;
    });
}

/// One vertex per line; the other fields compact.
inline std::string diagram_to_text(Diagram const& d) {
    Json const j = diagram_to_json(d);
    std::ostringstream out;
    out << "{\n  \"version\": " << j["version"].dump() << ",\n  \"variables\": " << j["variables"].dump()
        << ",\n  \"vertices\": [";
    auto const& vs = j["vertices"];
    for (std::size_t i = 0; i < vs.size(); ++i) out << (i ? ",\n    " : "\n    ") << vs[i].dump();
    out << (vs.empty() ? "]" : "\n  ]");
    out << ",\n  \"edges\": " << j["edges"].dump() << ",\n  \"inputs\": " << j["inputs"].dump()
        << ",\n  \"outputs\": " << j["outputs"].dump() << "\n}\n";
    return out.str();
}

inline Diagram diagram_from_text(std::string const& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (Json::parse_error const& e) {
        throw Error(ErrorKind::parse, e.what());
    }
    return diagram_from_json(j);
}

/// Loads a diagram file; errors are prefixed with the path.
inline Diagram load_diagram(std::string const& path) {
    std::string const text = read_file(path);
    try {
        return diagram_from_text(text);
    } catch (Error const& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

inline void save_diagram(std::string const& path, Diagram const& d) { write_file(path, diagram_to_text(d)); }

// -- proof scripts -----------------------------------------------------------

inline Json script_to_json(ProofScript const& s) {
    Json j;
    j["name"] = s.name;
    j["start"] = s.start;
    j["steps"] = Json::array();
    for (auto const& st : s.steps)
        j["steps"].push_back({{"rule", to_string(st.name.rule)},
                              {"colour", to_string(st.name.colour)},
                              {"direction", to_string(st.name.direction)},
                              {"locus", st.locus}});
    if (s.expected_end) j["expected_end"] = diagram_to_json(*s.expected_end);
    return j;
}

inline ProofScript script_from_json(Json const& j) {
    return detail::json_field("proof script", [&] {
        ProofScript s;
        s.name = j.value("name", std::string{});
        s.start = j.value("start", std::string{});
        std::size_t i = 0;
        for (auto const& js : j.at("steps")) {
            try {
                RewriteStep st;
                st.name.rule = rule_from_string(js.at("rule").get<std::string>());
                st.name.colour = colour_from_string(js.value("colour", std::string("green")));
                st.name.direction = direction_from_string(js.value("direction", std::string("forward")));
                st.locus = js.at("locus").get<std::vector<VertexId>>();
                s.steps.push_back(std::move(st));
            } catch (Error const& e) {
                throw Error(ErrorKind::parse, "step " + std::to_string(i) + ": " + e.what());
            }
            ++i;
        }
        if (j.contains("expected_end")) s.expected_end = diagram_from_json(j.at("expected_end"));
        return s;
    });
}

inline std::string script_to_text(ProofScript const& s) {
    // one step per line keeps long scripts readable in a diff
    Json j = script_to_json(s);
    std::ostringstream out;
    out << "{\n  \"name\": " << Json(s.name).dump() << ",\n  \"start\": " << Json(s.start).dump()
        << ",\n  \"steps\": [";
    for (std::size_t i = 0; i < j["steps"].size(); ++i) out << (i ? ",\n    " : "\n    ") << j["steps"][i].dump();
    out << (j["steps"].empty() ? "]" : "\n  ]");
    if (s.expected_end) out << ",\n  \"expected_end\": " << j["expected_end"].dump();
    out << "\n}\n";
    return out.str();
}

inline ProofScript load_script(std::string const& path) {
    std::string const text = read_file(path);
    try {
        return script_from_json(Json::parse(text));
    } catch (Json::parse_error const& e) {
        throw Error(ErrorKind::parse, path + ": " + e.what());
    } catch (Error const& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

inline void save_script(std::string const& path, ProofScript const& s) { write_file(path, script_to_text(s)); }

// -- matrices ----------------------------------------------------------------

/// Fixed-format number with `precision` significant digits; negative zero prints as 0.
inline std::string format_number(double x, int precision) {
    if (std::abs(x) < std::pow(10.0, -precision - 3)) x = 0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

/// {"shape": [rows, cols], "data": [[re, im], ...]} with the data row-major.
inline std::string matrix_to_text(Matrix const& m, int precision = 12) {
    std::ostringstream out;
    out << "{\"shape\": [" << m.rows() << ", " << m.cols() << "], \"data\": [";
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << (r == 0 && c == 0 ? "" : ", ") << "[" << format_number(m(r, c).real(), precision) << ", "
                << format_number(m(r, c).imag(), precision) << "]";
        }
    out << "]}";
    return out.str();
}

inline std::string channel_to_text(KrausChannel const& ch, int precision = 12) {
    std::ostringstream out;
    out << "{\"variables\": " << Json(ch.variables).dump() << ", \"kraus\": [";
    bool first = true;
    for (std::size_t k = 0; k < ch.kraus.size(); ++k) {
        Valuation const v = valuation_from_index(ch.variables, k);
        Json jv = Json::object();
        for (auto const& name : ch.variables) jv[name] = v.at(name) ? 1 : 0;
        out << (first ? "\n  " : ",\n  ") << "{\"valuation\": " << jv.dump()
            << ", \"matrix\": " << matrix_to_text(ch.kraus.at(v), precision) << "}";
        first = false;
    }
    out << "\n]}";
    return out.str();
}

/// Parses the output of matrix_to_text.
inline Matrix matrix_from_text(std::string const& text) {
    return detail::json_field("matrix", [&] {
        Json const j = Json::parse(text);
        auto const shape = j.at("shape").get<std::vector<Eigen::Index>>();
        if (shape.size() != 2) throw Error(ErrorKind::parse, "shape must have two entries");
        auto const& data = j.at("data");
        if (data.size() != static_cast<std::size_t>(shape[0] * shape[1]))
            throw Error(ErrorKind::parse, "data length does not match the shape");
        Matrix m(shape[0], shape[1]);
        for (Eigen::Index k = 0; k < m.size(); ++k)
            m(k / shape[1], k % shape[1]) = Complex{data[k].at(0).get<double>(), data[k].at(1).get<double>()};
        return m;
    });
}

}  // namespace zxq
