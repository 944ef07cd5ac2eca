#pragma once

#include <map>
#include <queue>
#include <sstream>
#include <string>

#include "zxq/diagram.hpp"

namespace zxq {

namespace detail {

/// Column = breadth-first distance from the inputs (from any vertex, for parts
/// the inputs do not reach); row = position within the column.
inline std::map<VertexId, std::pair<int, int>> layout(Diagram const& d) {
    std::map<VertexId, int> depth;
    std::queue<VertexId> todo;
    auto seed = [&](VertexId v) {
        if (depth.emplace(v, 0).second) todo.push(v);
    };
    auto flood = [&] {
        while (!todo.empty()) {
            VertexId const v = todo.front();
            todo.pop();
            for (auto w : d.neighbour_set(v))
                if (depth.emplace(w, depth[v] + 1).second) todo.push(w);
        }
    };
    for (auto v : d.inputs()) seed(v);
    flood();
    for (auto const& [id, _] : d.vertices())
        if (!depth.count(id)) {
            seed(id);
            flood();
        }
    int last = 0;
    for (auto const& [_, c] : depth) last = std::max(last, c);
    for (auto v : d.outputs()) depth[v] = last + 1;
    std::map<int, int> used;
    std::map<VertexId, std::pair<int, int>> pos;
    for (auto const& [id, c] : depth) pos[id] = {c, used[c]++};
    return pos;
}

inline std::string latex_phase(Phase const& p) {
    if (p.is_zero()) return "";
    std::string const num = p.num() == 1 ? "\\pi" : std::to_string(p.num()) + "\\pi";
    if (p.den() == 1) return num;
    return "\\frac{" + num + "}{" + std::to_string(p.den()) + "}";
}

inline std::string plain_label(Vertex const& v) {
    std::string s;
    if (is_spider(v.kind) && !v.phase.is_zero()) s = v.phase.str() + "π";
    if (v.conditional()) s += (s.empty() ? "" : " ") + std::string("[") + v.cond.str() + "]";
    return s;
}

}  // namespace detail

/// Graphviz description; boundaries are points, Z green, X red, H yellow boxes.
inline std::string to_dot(Diagram const& d) {
    std::ostringstream out;
    out << "graph zx {\n  rankdir=LR;\n";
    for (auto const& [id, v] : d.vertices()) {
        out << "  v" << id << " [";
        switch (v.kind) {
            case VertexKind::boundary: {
                bool const in = std::find(d.inputs().begin(), d.inputs().end(), id) != d.inputs().end();
                out << "shape=plaintext, label=\"" << (in ? "in" : "out") << "\"";
                break;
            }
            case VertexKind::z: out << "shape=circle, style=filled, fillcolor=green"; break;
            case VertexKind::x: out << "shape=circle, style=filled, fillcolor=red"; break;
            case VertexKind::h: out << "shape=box, style=filled, fillcolor=yellow, label=\"H\""; break;
        }
        if (is_spider(v.kind)) out << ", label=\"" << detail::plain_label(v) << "\"";
        out << "];\n";
    }
    for (auto const& e : d.edges()) out << "  v" << e.a << " -- v" << e.b << ";\n";
    out << "}\n";
    return out.str();
}

/// TikZ picture with one \node per vertex and one \draw per edge.
inline std::string to_tikz(Diagram const& d) {
    auto const pos = detail::layout(d);
    std::ostringstream out;
    out << "\\begin{tikzpicture}\n";
    for (auto const& [id, v] : d.vertices()) {
        auto const [x, y] = pos.at(id);
        char const* style = v.kind == VertexKind::z   ? "Z"
                            : v.kind == VertexKind::x ? "X"
                            : v.kind == VertexKind::h ? "H"
                                                      : "boundary";
        std::string label = v.kind == VertexKind::h ? "H" : is_spider(v.kind) ? detail::latex_phase(v.phase) : "";
        if (v.conditional()) label += (label.empty() ? "" : ",\\,") + std::string("[") + v.cond.str() + "]";
        out << "  \\node [style=" << style << "] (v" << id << ") at (" << x << ", " << -y << ") {"
            << (label.empty() ? "" : "$" + label + "$") << "};\n";
    }
    for (auto const& e : d.edges()) {
        if (e.is_loop()) out << "  \\draw (v" << e.a << ") to [loop above] (v" << e.a << ");\n";
        else out << "  \\draw (v" << e.a << ") to (v" << e.b << ");\n";
    }
    out << "\\end{tikzpicture}\n";
    return out.str();
}

}  // namespace zxq
