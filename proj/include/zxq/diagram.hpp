#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "zxq/error.hpp"
#include "zxq/formula.hpp"
#include "zxq/phase.hpp"

namespace zxq {

using VertexId = int;

enum class VertexKind { boundary, z, x, h };

inline char kind_letter(VertexKind k) {
    switch (k) {
        case VertexKind::boundary: return 'B';
        case VertexKind::z: return 'Z';
        case VertexKind::x: return 'X';
        case VertexKind::h: return 'H';
    }
    return '?';
}

inline bool is_spider(VertexKind k) { return k == VertexKind::z || k == VertexKind::x; }

inline VertexKind other_colour(VertexKind k) {
    if (k == VertexKind::z) return VertexKind::x;
    if (k == VertexKind::x) return VertexKind::z;
    return k;
}

struct Vertex {
    VertexKind kind = VertexKind::boundary;
    Phase phase;
    Formula cond{true};

    bool conditional() const { return !cond.is_true(); }
};

/// Undirected edge, stored with a <= b. Self-loops have a == b.
struct Edge {
    VertexId a;
    VertexId b;

    Edge(VertexId u, VertexId v) : a(std::min(u, v)), b(std::max(u, v)) {}
    bool is_loop() const { return a == b; }
    bool touches(VertexId v) const { return a == v || b == v; }
    VertexId other(VertexId v) const { return a == v ? b : a; }
    friend bool operator==(Edge const&, Edge const&) = default;
    friend auto operator<=>(Edge const&, Edge const&) = default;
};

/// An open multigraph of Z/X/H vertices with ordered input and output
/// boundaries over a set of boolean variables.
class Diagram {
public:
    Diagram() = default;

    // -- construction ------------------------------------------------------

    /// New ids are one past the largest live id, so they depend only on the
    /// current vertex set (replays from a file and from memory agree).
    VertexId add_vertex(Vertex v) {
        VertexId const id = next_id();
        vertices_.emplace(id, std::move(v));
        return id;
    }
    VertexId add_vertex_with_id(VertexId id, Vertex v) {
        if (id < 0) throw Error(ErrorKind::invalid_argument, "negative vertex id " + std::to_string(id));
        if (vertices_.count(id)) throw Error(ErrorKind::invalid_argument, "duplicate vertex id " + std::to_string(id));
        vertices_.emplace(id, std::move(v));
        return id;
    }
    VertexId add_z(Phase p = {}, Formula cond = true) { return add_vertex({VertexKind::z, p, std::move(cond)}); }
    VertexId add_x(Phase p = {}, Formula cond = true) { return add_vertex({VertexKind::x, p, std::move(cond)}); }
    VertexId add_spider(VertexKind k, Phase p = {}, Formula cond = true) {
        return add_vertex({k, p, std::move(cond)});
    }
    VertexId add_h() { return add_vertex({VertexKind::h, {}, true}); }
    VertexId add_input() {
        VertexId const id = add_vertex({VertexKind::boundary, {}, true});
        inputs_.push_back(id);
        return id;
    }
    VertexId add_output() {
        VertexId const id = add_vertex({VertexKind::boundary, {}, true});
        outputs_.push_back(id);
        return id;
    }

    void add_edge(VertexId u, VertexId v) {
        require(u);
        require(v);
        edges_.emplace_back(u, v);
    }
    /// Removes one occurrence of the edge u-v; returns false if none exists.
    bool remove_edge(VertexId u, VertexId v) {
        auto it = std::find(edges_.begin(), edges_.end(), Edge(u, v));
        if (it == edges_.end()) return false;
        edges_.erase(it);
        return true;
    }
    void remove_vertex(VertexId v) {
        require(v);
        std::erase_if(edges_, [v](Edge const& e) { return e.touches(v); });
        vertices_.erase(v);
        std::erase(inputs_, v);
        std::erase(outputs_, v);
    }

    void set_inputs(std::vector<VertexId> ids) { inputs_ = std::move(ids); }
    void set_outputs(std::vector<VertexId> ids) { outputs_ = std::move(ids); }
    void add_variable(std::string const& name) { variables_.insert(name); }
    void set_variables(std::set<std::string> vars) { variables_ = std::move(vars); }

    Vertex& vertex(VertexId v) {
        require(v);
        return vertices_.at(v);
    }

    // -- queries -----------------------------------------------------------

    std::map<VertexId, Vertex> const& vertices() const { return vertices_; }
    std::vector<Edge> const& edges() const { return edges_; }
    std::vector<VertexId> const& inputs() const { return inputs_; }
    std::vector<VertexId> const& outputs() const { return outputs_; }
    std::set<std::string> const& variables() const { return variables_; }
    VertexId next_id() const { return vertices_.empty() ? 0 : vertices_.rbegin()->first + 1; }

    bool has_vertex(VertexId v) const { return vertices_.count(v) != 0; }
    Vertex const& vertex(VertexId v) const {
        require(v);
        return vertices_.at(v);
    }
    VertexKind kind(VertexId v) const { return vertex(v).kind; }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    /// Self-loops count twice.
    int degree(VertexId v) const {
        int d = 0;
        for (auto const& e : edges_) d += (e.a == v) + (e.b == v);
        return d;
    }
    int multiplicity(VertexId u, VertexId v) const {
        return static_cast<int>(std::count(edges_.begin(), edges_.end(), Edge(u, v)));
    }
    int self_loops(VertexId v) const { return multiplicity(v, v); }

    /// Other endpoint of every non-loop edge at v, with multiplicity, in edge order.
    std::vector<VertexId> neighbours(VertexId v) const {
        std::vector<VertexId> out;
        for (auto const& e : edges_)
            if (e.touches(v) && !e.is_loop()) out.push_back(e.other(v));
        return out;
    }
    std::set<VertexId> neighbour_set(VertexId v) const {
        auto const n = neighbours(v);
        return {n.begin(), n.end()};
    }

    bool is_input(VertexId v) const { return std::find(inputs_.begin(), inputs_.end(), v) != inputs_.end(); }
    bool is_output(VertexId v) const { return std::find(outputs_.begin(), outputs_.end(), v) != outputs_.end(); }

    bool is_unconditional() const {
        return std::all_of(vertices_.begin(), vertices_.end(), [](auto const& kv) { return !kv.second.conditional(); });
    }

    // -- standard diagrams -------------------------------------------------

    /// n parallel wires.
    static Diagram identity(int n = 1) {
        Diagram d;
        std::vector<VertexId> in, out;
        for (int i = 0; i < n; ++i) in.push_back(d.add_input());
        for (int i = 0; i < n; ++i) out.push_back(d.add_output());
        for (int i = 0; i < n; ++i) d.add_edge(in[i], out[i]);
        return d;
    }

    /// A single spider with the given numbers of input and output legs.
    static Diagram spider(VertexKind k, int n_in, int n_out, Phase p = {}, Formula cond = true) {
        Diagram d;
        std::vector<VertexId> in, out;
        for (int i = 0; i < n_in; ++i) in.push_back(d.add_input());
        VertexId const s = d.add_spider(k, p, cond);
        for (int i = 0; i < n_out; ++i) out.push_back(d.add_output());
        for (auto b : in) d.add_edge(b, s);
        for (auto b : out) d.add_edge(s, b);
        for (auto const& v : cond.vars()) d.add_variable(v);
        return d;
    }

    static Diagram hadamard() {
        Diagram d;
        VertexId const i = d.add_input();
        VertexId const h = d.add_h();
        VertexId const o = d.add_output();
        d.add_edge(i, h);
        d.add_edge(h, o);
        return d;
    }

private:
    void require(VertexId v) const {
        if (!vertices_.count(v)) throw Error(ErrorKind::invalid_argument, "no vertex " + std::to_string(v));
    }

    std::map<VertexId, Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<VertexId> inputs_;
    std::vector<VertexId> outputs_;
    std::set<std::string> variables_;
};

/// Lists every violated well-formedness invariant; empty iff the diagram is valid.
inline std::vector<std::string> validate(Diagram const& d) {
    std::vector<std::string> out;
    auto name = [](VertexId v) { return "vertex " + std::to_string(v); };
    for (auto const& e : d.edges()) {
        if (!d.has_vertex(e.a) || !d.has_vertex(e.b))
            out.push_back("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " references a missing vertex");
    }
    std::map<VertexId, int> boundary_uses;
    for (auto v : d.inputs()) ++boundary_uses[v];
    for (auto v : d.outputs()) ++boundary_uses[v];
    for (auto const& [v, _] : boundary_uses) {
        if (!d.has_vertex(v)) out.push_back(name(v) + " is listed as a boundary but does not exist");
    }
    for (auto const& [id, vx] : d.vertices()) {
        int const deg = d.degree(id);
        switch (vx.kind) {
            case VertexKind::h:
                if (deg != 2) out.push_back(name(id) + ": H vertex has degree " + std::to_string(deg) + ", expected 2");
                if (!vx.phase.is_zero() || vx.conditional())
                    out.push_back(name(id) + ": H vertex carries a phase or condition");
                break;
            case VertexKind::boundary: {
                if (deg != 1)
                    out.push_back(name(id) + ": boundary has degree " + std::to_string(deg) + ", expected 1");
                if (d.self_loops(id)) out.push_back(name(id) + ": boundary has a self-loop");
                auto it = boundary_uses.find(id);
                int const uses = it == boundary_uses.end() ? 0 : it->second;
                if (uses != 1)
                    out.push_back(name(id) + ": boundary appears " + std::to_string(uses) +
                                  " times among inputs/outputs, expected 1");
                if (!vx.phase.is_zero() || vx.conditional())
                    out.push_back(name(id) + ": boundary carries a phase or condition");
                break;
            }
            case VertexKind::z:
            case VertexKind::x:
                if (boundary_uses.count(id)) out.push_back(name(id) + ": spider listed as a boundary");
                for (auto const& var : vx.cond.vars()) {
                    if (!d.variables().count(var))
                        out.push_back(name(id) + ": condition mentions undeclared variable '" + var + "'");
                }
                break;
        }
    }
    return out;
}

namespace detail {

/// Copies `src` into `dst` with fresh ids; returns the id map.
inline std::map<VertexId, VertexId> splice(Diagram& dst, Diagram const& src) {
    std::map<VertexId, VertexId> ids;
    for (auto const& [id, v] : src.vertices()) ids[id] = dst.add_vertex(v);
    for (auto const& e : src.edges()) dst.add_edge(ids.at(e.a), ids.at(e.b));
    for (auto const& var : src.variables()) dst.add_variable(var);
    return ids;
}

inline VertexId sole_neighbour(Diagram const& d, VertexId b) {
    auto const n = d.neighbours(b);
    if (n.size() != 1 || d.self_loops(b))
        throw Error(ErrorKind::invalid_argument, "boundary " + std::to_string(b) + " does not have degree 1");
    return n.front();
}

}  // namespace detail

/// Sequential composition g∘f: outputs of f are plugged into inputs of g.
inline Diagram compose(Diagram const& g, Diagram const& f) {
    if (f.outputs().size() != g.inputs().size())
        throw Error(ErrorKind::arity_mismatch, "cannot compose: f has " + std::to_string(f.outputs().size()) +
                                                   " outputs but g has " + std::to_string(g.inputs().size()) +
                                                   " inputs");
    Diagram r;
    auto const fi = detail::splice(r, f);
    auto const gi = detail::splice(r, g);
    std::vector<VertexId> in, out;
    for (auto v : f.inputs()) in.push_back(fi.at(v));
    for (auto v : g.outputs()) out.push_back(gi.at(v));
    r.set_inputs(in);
    r.set_outputs(out);
    for (std::size_t k = 0; k < f.outputs().size(); ++k) {
        VertexId const fo = fi.at(f.outputs()[k]);
        VertexId const gin = gi.at(g.inputs()[k]);
        VertexId const a = detail::sole_neighbour(r, fo);
        VertexId const b = detail::sole_neighbour(r, gin);
        r.remove_vertex(fo);
        r.remove_vertex(gin);
        if (a == gin && b == fo) {
            // the plugged wires closed into a loop with no vertices on it
            VertexId const s = r.add_z();
            r.add_edge(s, s);
        } else {
            r.add_edge(a, b);
        }
    }
    return r;
}

/// Juxtaposition; shared variable names denote the same variable unless `strict`.
inline Diagram tensor(Diagram const& f, Diagram const& g, bool strict = false) {
    if (strict) {
        for (auto const& v : f.variables()) {
            if (g.variables().count(v))
                throw Error(ErrorKind::invalid_argument, "tensor: variable '" + v + "' occurs in both factors");
        }
    }
    Diagram r;
    auto const fi = detail::splice(r, f);
    auto const gi = detail::splice(r, g);
    std::vector<VertexId> in, out;
    for (auto v : f.inputs()) in.push_back(fi.at(v));
    for (auto v : g.inputs()) in.push_back(gi.at(v));
    for (auto v : f.outputs()) out.push_back(fi.at(v));
    for (auto v : g.outputs()) out.push_back(gi.at(v));
    r.set_inputs(in);
    r.set_outputs(out);
    return r;
}

/// Dagger: boundaries swap roles and every phase is negated.
inline Diagram adjoint(Diagram const& d) {
    Diagram r = d;
    for (auto const& [id, v] : d.vertices()) r.vertex(id).phase = -v.phase;
    r.set_inputs(d.outputs());
    r.set_outputs(d.inputs());
    return r;
}

/// Exchanges Z and X vertices.
inline Diagram colour_dual(Diagram const& d) {
    Diagram r = d;
    for (auto const& [id, v] : d.vertices()) r.vertex(id).kind = other_colour(v.kind);
    return r;
}

inline Diagram apply_valuation(Diagram const& d, Valuation const& v) {
    for (auto const& var : d.variables()) {
        if (!v.count(var)) throw Error(ErrorKind::unbound_variable, "valuation does not assign variable '" + var + "'");
    }
    Diagram r = d;
    for (auto const& [id, vx] : d.vertices()) {
        if (!vx.conditional()) continue;
        auto& w = r.vertex(id);
        if (!evaluate(vx.cond, v)) w.phase = Phase::zero();
        w.cond = true;
    }
    r.set_variables({});
    return r;
}

}  // namespace zxq
