#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zxq/diagram.hpp"
#include "zxq/error.hpp"
#include "zxq/semantics.hpp"

namespace zxq {

/// The equational rules, plus scalar dropping and four composite macros.
enum class Rule {
    spider,
    pi_spider,
    anti_loop,
    identity,
    true_rule,
    false_rule,
    copying,
    pi_commute,
    bialgebra,
    hopf,
    h_commute,
    h_cancel,
    drop_scalar,
    // macros over the rules above
    altcycle4,
    x_abelian1,
    hopf_banged,
    bialgebra1_rev,
};

enum class Colour { green, red };
enum class Direction { forward, reverse };

inline constexpr Rule base_rules[] = {Rule::spider,   Rule::pi_spider,  Rule::anti_loop, Rule::identity,
                                      Rule::true_rule, Rule::false_rule, Rule::copying,   Rule::pi_commute,
                                      Rule::bialgebra, Rule::hopf,       Rule::h_commute, Rule::h_cancel};

inline bool is_macro(Rule r) { return r >= Rule::altcycle4; }
inline bool is_colour_free(Rule r) { return r == Rule::h_cancel || r == Rule::drop_scalar; }
inline bool has_reverse(Rule r) { return r == Rule::spider || r == Rule::bialgebra || r == Rule::h_cancel; }

struct RuleName {
    Rule rule = Rule::spider;
    Colour colour = Colour::green;
    Direction direction = Direction::forward;

    friend bool operator==(RuleName const&, RuleName const&) = default;
};

inline RuleName dualize(RuleName r) {
    if (!is_colour_free(r.rule)) r.colour = r.colour == Colour::green ? Colour::red : Colour::green;
    return r;
}

inline std::string to_string(Rule r) {
    switch (r) {
        case Rule::spider: return "spider";
        case Rule::pi_spider: return "pi_spider";
        case Rule::anti_loop: return "anti_loop";
        case Rule::identity: return "identity";
        case Rule::true_rule: return "true";
        case Rule::false_rule: return "false";
        case Rule::copying: return "copying";
        case Rule::pi_commute: return "pi_commute";
        case Rule::bialgebra: return "bialgebra";
        case Rule::hopf: return "hopf";
        case Rule::h_commute: return "h_commute";
        case Rule::h_cancel: return "h_cancel";
        case Rule::drop_scalar: return "drop_scalar";
        case Rule::altcycle4: return "altcycle4";
        case Rule::x_abelian1: return "x_abelian1";
        case Rule::hopf_banged: return "hopf_banged";
        case Rule::bialgebra1_rev: return "bialgebra1_rev";
    }
    return "?";
}

inline Rule rule_from_string(std::string const& s) {
    for (int i = 0; i <= static_cast<int>(Rule::bialgebra1_rev); ++i) {
        auto const r = static_cast<Rule>(i);
        if (to_string(r) == s) return r;
    }
    if (s == "true_rule") return Rule::true_rule;
    if (s == "false_rule") return Rule::false_rule;
    if (s == "hopf-banged") return Rule::hopf_banged;
    if (s == "bialgebra1-rev") return Rule::bialgebra1_rev;
    throw Error(ErrorKind::parse, "unknown rule '" + s + "'");
}

inline std::string to_string(Colour c) { return c == Colour::green ? "green" : "red"; }
inline Colour colour_from_string(std::string const& s) {
    if (s == "green" || s == "green_primary") return Colour::green;
    if (s == "red" || s == "red_primary") return Colour::red;
    throw Error(ErrorKind::parse, "unknown colour '" + s + "'");
}
inline std::string to_string(Direction d) { return d == Direction::forward ? "forward" : "reverse"; }
inline Direction direction_from_string(std::string const& s) {
    if (s == "forward") return Direction::forward;
    if (s == "reverse") return Direction::reverse;
    throw Error(ErrorKind::parse, "unknown direction '" + s + "'");
}

inline std::string to_string(RuleName const& r) {
    std::string s = to_string(r.rule);
    if (!is_colour_free(r.rule)) s += "/" + to_string(r.colour);
    if (r.direction == Direction::reverse) s += "/reverse";
    return s;
}

/// A rule anchored at specific vertices.
struct RewriteStep {
    RuleName name;
    std::vector<VertexId> locus;
};

inline std::string describe(RewriteStep const& s) {
    std::string l;
    for (std::size_t i = 0; i < s.locus.size(); ++i) l += (i ? "," : "") + std::to_string(s.locus[i]);
    return to_string(s.name) + " at [" + l + "]";
}

namespace detail {

inline VertexKind primary(Colour c) { return c == Colour::green ? VertexKind::z : VertexKind::x; }

class StepApplier {
public:
    StepApplier(Diagram const& d, RewriteStep const& s)
        : d_(d), step_(s), p_(primary(s.name.colour)), q_(other_colour(p_)) {}

    Diagram run() {
        auto const& n = step_.name;
        if (n.direction == Direction::reverse && !has_reverse(n.rule))
            fail("rule has no reverse direction");
        switch (n.rule) {
            case Rule::spider: return n.direction == Direction::forward ? spider() : unfuse();
            case Rule::pi_spider: return pi_spider();
            case Rule::anti_loop: return anti_loop();
            case Rule::identity: return identity();
            case Rule::true_rule: return constant_condition(true);
            case Rule::false_rule: return constant_condition(false);
            case Rule::copying: return copying();
            case Rule::pi_commute: return pi_commute();
            case Rule::bialgebra: return n.direction == Direction::forward ? bialgebra() : bialgebra_reverse();
            case Rule::hopf: return hopf();
            case Rule::h_commute: return h_commute();
            case Rule::h_cancel: return n.direction == Direction::forward ? h_cancel() : h_insert();
            case Rule::drop_scalar: return drop_scalar();
            default: fail("macro passed to the base rule applier");
        }
    }

private:
    [[noreturn]] void fail(std::string const& why) const {
        throw Error(ErrorKind::no_match, "no match for " + describe(step_) + ": " + why);
    }
    void need(bool ok, std::string const& why) const {
        if (!ok) fail(why);
    }
    void arity(std::size_t n) const {
        need(step_.locus.size() == n, "expected " + std::to_string(n) + " locus entries");
    }
    VertexId at(std::size_t i) const {
        VertexId const v = step_.locus.at(i);
        need(d_.has_vertex(v), "vertex " + std::to_string(v) + " does not exist");
        return v;
    }
    bool is(VertexId v, VertexKind k) const { return d_.kind(v) == k; }
    std::string label(VertexId v) const { return "vertex " + std::to_string(v); }

    static bool effectively_plain(Vertex const& v) { return v.phase.is_zero() || !v.conditional(); }

    // Merge v into u: u keeps its id, one u-v edge is consumed, other u-v edges become loops.
    static void merge_into(Diagram& r, VertexId u, VertexId v) {
        r.remove_edge(u, v);
        std::vector<Edge> moved;
        for (auto const& e : r.edges())
            if (e.touches(v)) moved.push_back(e);
        r.remove_vertex(v);
        for (auto const& e : moved) {
            VertexId const a = e.a == v ? u : e.a;
            VertexId const b = e.b == v ? u : e.b;
            r.add_edge(a, b);
        }
    }

    Diagram spider() {
        arity(2);
        VertexId const u = at(0), v = at(1);
        need(u != v, "locus vertices must differ");
        need(is(u, p_) && is(v, p_), "both vertices must be primary-colour spiders");
        need(d_.multiplicity(u, v) >= 1, "vertices are not adjacent");
        Vertex const& a = d_.vertex(u);
        Vertex const& b = d_.vertex(v);
        Vertex merged{p_, a.phase + b.phase, true};
        if (a.phase.is_zero()) {
            merged.cond = b.cond;
        } else if (b.phase.is_zero()) {
            merged.cond = a.cond;
        } else {
            Formula const ca = simplify(a.cond), cb = simplify(b.cond);
            if (!(ca == cb))
                throw Error(ErrorKind::condition_mismatch, "cannot fuse " + describe(step_) + ": conditions '" +
                                                               a.cond.str() + "' and '" + b.cond.str() + "' differ");
            merged.cond = ca;
        }
        Diagram r = d_;
        merge_into(r, u, v);
        r.vertex(u) = merged;
        return r;
    }

    // locus [u, w1, ..., wk]: one edge to each wi moves onto a new phase-0 spider joined to u.
    Diagram unfuse() {
        need(!step_.locus.empty(), "expected a vertex");
        VertexId const u = at(0);
        need(is(u, p_), label(u) + " is not a primary-colour spider");
        std::map<VertexId, int> wanted;
        for (std::size_t i = 1; i < step_.locus.size(); ++i) {
            VertexId const w = at(i);
            need(w != u, "cannot move a self-loop");
            ++wanted[w];
        }
        for (auto const& [w, k] : wanted) need(d_.multiplicity(u, w) >= k, "not enough edges between u and " + label(w));
        Diagram r = d_;
        VertexId const n = r.add_spider(p_);
        for (std::size_t i = 1; i < step_.locus.size(); ++i) {
            r.remove_edge(u, step_.locus[i]);
            r.add_edge(n, step_.locus[i]);
        }
        r.add_edge(u, n);
        return r;
    }

    Diagram pi_spider() {
        arity(2);
        VertexId const u = at(0), v = at(1);
        need(u != v, "locus vertices must differ");
        need(is(u, p_) && is(v, p_), "both vertices must be primary-colour spiders");
        need(d_.multiplicity(u, v) >= 1, "vertices are not adjacent");
        Vertex const& a = d_.vertex(u);
        Vertex const& b = d_.vertex(v);
        need(a.phase.is_pi() && b.phase.is_pi(), "both phases must be pi");
        Diagram r = d_;
        merge_into(r, u, v);
        r.vertex(u) = Vertex{p_, Phase::pi(), simplify(a.cond ^ b.cond)};
        return r;
    }

    Diagram anti_loop() {
        arity(1);
        VertexId const u = at(0);
        need(is(u, p_), label(u) + " is not a primary-colour spider");
        need(d_.self_loops(u) >= 1, label(u) + " has no self-loop");
        Diagram r = d_;
        r.remove_edge(u, u);
        return r;
    }

    Diagram identity() {
        arity(1);
        VertexId const u = at(0);
        need(is(u, p_), label(u) + " is not a primary-colour spider");
        need(d_.vertex(u).phase.is_zero(), label(u) + " has a nonzero phase");
        need(d_.self_loops(u) == 0 && d_.degree(u) == 2, label(u) + " is not degree 2");
        auto const n = d_.neighbours(u);
        Diagram r = d_;
        r.remove_vertex(u);
        r.add_edge(n[0], n[1]);
        return r;
    }

    Diagram constant_condition(bool value) {
        arity(1);
        VertexId const u = at(0);
        need(is(u, p_), label(u) + " is not a primary-colour spider");
        Vertex const& v = d_.vertex(u);
        need(v.conditional(), label(u) + " is unconditional");
        Formula const s = simplify(v.cond);
        need(s.is_const() && s.value() == value,
             "condition '" + v.cond.str() + "' is not constantly " + (value ? "true" : "false"));
        Diagram r = d_;
        r.vertex(u).cond = true;
        if (!value) r.vertex(u).phase = Phase::zero();
        return r;
    }

    // locus [u, s]: s is a secondary-colour state (phase 0 or pi) copied through u.
    Diagram copying() {
        arity(2);
        VertexId const u = at(0), s = at(1);
        need(is(u, p_), label(u) + " is not a primary-colour spider");
        need(is(s, q_), label(s) + " is not a secondary-colour spider");
        Vertex const& sv = d_.vertex(s);
        need(!sv.conditional() && sv.phase.is_pauli(), label(s) + " must be an unconditional 0 or pi state");
        need(d_.degree(s) == 1 && d_.multiplicity(u, s) == 1, label(s) + " must be a state attached to u");
        need(d_.self_loops(u) == 0, label(u) + " has a self-loop");
        Diagram r = d_;
        std::vector<VertexId> others;
        for (auto w : d_.neighbours(u))
            if (w != s) others.push_back(w);
        r.remove_vertex(u);
        r.remove_vertex(s);
        for (auto w : others) {
            VertexId const c = r.add_spider(q_, sv.phase);
            r.add_edge(c, w);
        }
        return r;
    }

    // locus [s, u]: a secondary-colour pi on a wire into u is pushed through u.
    Diagram pi_commute() {
        arity(2);
        VertexId const s = at(0), u = at(1);
        need(is(s, q_), label(s) + " is not a secondary-colour spider");
        need(is(u, p_), label(u) + " is not a primary-colour spider");
        Vertex const& sv = d_.vertex(s);
        Vertex const& uv = d_.vertex(u);
        need(sv.phase.is_pi(), label(s) + " must carry phase pi");
        need(d_.degree(s) == 2 && d_.self_loops(s) == 0 && d_.multiplicity(s, u) == 1,
             label(s) + " must sit on a wire into u");
        need(d_.self_loops(u) == 0, label(u) + " has a self-loop");
        need(!sv.conditional() || uv.phase == -uv.phase, "a conditional pi only commutes past phases 0 and pi");
        VertexId t = -1;
        for (auto w : d_.neighbours(s))
            if (w != u) t = w;
        need(t >= 0, label(s) + " has no other neighbour");
        std::vector<VertexId> others;
        for (auto w : d_.neighbours(u))
            if (w != s) others.push_back(w);
        Diagram r = d_;
        r.remove_vertex(s);
        r.add_edge(t, u);
        r.vertex(u).phase = -uv.phase;
        for (auto w : others) {
            r.remove_edge(u, w);
            VertexId const c = r.add_vertex({q_, Phase::pi(), sv.cond});
            r.add_edge(u, c);
            r.add_edge(c, w);
        }
        return r;
    }

    // locus [u, v]: u primary, v secondary, both phase 0, joined by one edge.
    Diagram bialgebra() {
        arity(2);
        VertexId const u = at(0), v = at(1);
        need(is(u, p_) && is(v, q_), "expected a primary then a secondary spider");
        need(d_.vertex(u).phase.is_zero() && d_.vertex(v).phase.is_zero(), "phases must be 0");
        need(d_.multiplicity(u, v) == 1, "vertices must be joined by exactly one edge");
        need(d_.self_loops(u) == 0 && d_.self_loops(v) == 0, "self-loops are not allowed");
        std::vector<VertexId> a, b;
        for (auto w : d_.neighbours(u))
            if (w != v) a.push_back(w);
        for (auto w : d_.neighbours(v))
            if (w != u) b.push_back(w);
        need(!a.empty() && !b.empty(), "both spiders need further legs");
        Diagram r = d_;
        r.remove_vertex(u);
        r.remove_vertex(v);
        std::vector<VertexId> xs, zs;
        for (auto w : a) {
            xs.push_back(r.add_spider(q_));
            r.add_edge(xs.back(), w);
        }
        for (auto w : b) {
            zs.push_back(r.add_spider(p_));
            r.add_edge(zs.back(), w);
        }
        for (auto x : xs)
            for (auto z : zs) r.add_edge(x, z);
        return r;
    }

    // locus [m, x1..xm, z1..zn]: complete bipartite secondary/primary block collapses to one edge.
    Diagram bialgebra_reverse() {
        need(!step_.locus.empty(), "expected the count m");
        int const m = step_.locus[0];
        int const n = static_cast<int>(step_.locus.size()) - 1 - m;
        need(m >= 1 && n >= 1, "need m >= 1 and n >= 1");
        std::vector<VertexId> xs, zs;
        for (int i = 0; i < m; ++i) xs.push_back(at(1 + i));
        for (int j = 0; j < n; ++j) zs.push_back(at(1 + m + j));
        std::set<VertexId> block(xs.begin(), xs.end());
        block.insert(zs.begin(), zs.end());
        need(block.size() == xs.size() + zs.size(), "locus vertices must be distinct");
        auto external = [&](VertexId v, int expected_degree) {
            need(d_.vertex(v).phase.is_zero(), label(v) + " must have phase 0");
            need(d_.self_loops(v) == 0 && d_.degree(v) == expected_degree, label(v) + " has the wrong degree");
            VertexId ext = -1;
            for (auto w : d_.neighbours(v)) {
                if (!block.count(w)) {
                    need(ext < 0, label(v) + " has more than one external leg");
                    ext = w;
                }
            }
            need(ext >= 0, label(v) + " has no external leg");
            return ext;
        };
        std::vector<VertexId> a, b;
        for (auto x : xs) {
            need(is(x, q_), label(x) + " must be a secondary-colour spider");
            a.push_back(external(x, n + 1));
        }
        for (auto z : zs) {
            need(is(z, p_), label(z) + " must be a primary-colour spider");
            b.push_back(external(z, m + 1));
        }
        for (auto x : xs)
            for (auto z : zs) need(d_.multiplicity(x, z) == 1, "block is not complete bipartite");
        Diagram r = d_;
        for (auto v : block) r.remove_vertex(v);
        VertexId const u = r.add_spider(p_);
        VertexId const v = r.add_spider(q_);
        r.add_edge(u, v);
        for (auto w : a) r.add_edge(u, w);
        for (auto w : b) r.add_edge(v, w);
        return r;
    }

    Diagram hopf() {
        arity(2);
        VertexId const u = at(0), v = at(1);
        need(is(u, p_) && is(v, q_), "expected a primary then a secondary spider");
        need(d_.multiplicity(u, v) >= 2, "vertices are not joined by parallel edges");
        Diagram r = d_;
        r.remove_edge(u, v);
        r.remove_edge(u, v);
        return r;
    }

    Diagram h_commute() {
        arity(1);
        VertexId const u = at(0);
        need(is(u, p_), label(u) + " is not a primary-colour spider");
        need(d_.self_loops(u) == 0, label(u) + " has a self-loop");
        auto const hs = d_.neighbours(u);
        std::set<VertexId> const hset(hs.begin(), hs.end());
        need(hset.size() == hs.size(), "every leg must end in a distinct H vertex");
        std::vector<VertexId> outer;
        for (auto h : hs) {
            need(is(h, VertexKind::h), "every neighbour must be an H vertex");
            VertexId t = -1;
            for (auto w : d_.neighbours(h))
                if (w != u) t = w;
            need(t >= 0 && !hset.count(t), "H vertex " + std::to_string(h) + " must lead away from u");
            outer.push_back(t);
        }
        Diagram r = d_;
        for (auto h : hs) r.remove_vertex(h);
        r.vertex(u).kind = q_;
        for (auto t : outer) r.add_edge(u, t);
        return r;
    }

    Diagram h_cancel() {
        arity(2);
        VertexId const h1 = at(0), h2 = at(1);
        need(h1 != h2 && is(h1, VertexKind::h) && is(h2, VertexKind::h), "expected two H vertices");
        need(d_.multiplicity(h1, h2) == 1, "H vertices must be joined by one edge");
        auto outer = [&](VertexId h, VertexId partner) {
            for (auto w : d_.neighbours(h))
                if (w != partner) return w;
            fail("H vertex has no outer neighbour");
        };
        VertexId const t1 = outer(h1, h2), t2 = outer(h2, h1);
        Diagram r = d_;
        r.remove_vertex(h1);
        r.remove_vertex(h2);
        r.add_edge(t1, t2);
        return r;
    }

    // locus [a, b]: insert two H vertices on one a-b edge.
    Diagram h_insert() {
        arity(2);
        VertexId const a = at(0), b = at(1);
        need(d_.multiplicity(a, b) >= 1, "no edge between the locus vertices");
        Diagram r = d_;
        r.remove_edge(a, b);
        VertexId const h1 = r.add_h();
        VertexId const h2 = r.add_h();
        r.add_edge(a, h1);
        r.add_edge(h1, h2);
        r.add_edge(h2, b);
        return r;
    }

    Diagram drop_scalar() {
        arity(1);
        VertexId const start = at(0);
        std::set<VertexId> comp{start};
        std::vector<VertexId> todo{start};
        while (!todo.empty()) {
            VertexId const v = todo.back();
            todo.pop_back();
            for (auto w : d_.neighbours(v))
                if (comp.insert(w).second) todo.push_back(w);
        }
        Diagram piece;
        for (auto v : comp) {
            need(!is(v, VertexKind::boundary), "component reaches a boundary");
            need(!d_.vertex(v).conditional() || d_.vertex(v).phase.is_zero(), "component is conditional");
            piece.add_vertex_with_id(v, d_.vertex(v));
        }
        for (auto const& e : d_.edges())
            if (comp.count(e.a)) piece.add_edge(e.a, e.b);
        Complex const s = eval_matrix(piece)(0, 0);
        need(std::abs(s) > 1e-12, "component evaluates to zero");
        Diagram r = d_;
        for (auto v : comp) r.remove_vertex(v);
        return r;
    }

    Diagram const& d_;
    RewriteStep const& step_;
    VertexKind p_;
    VertexKind q_;
};

}  // namespace detail

namespace detail {

inline Diagram apply_base(Diagram const& d, RewriteStep const& step) { return StepApplier(d, step).run(); }

inline Diagram run_macro(Diagram const& d, RewriteStep const& step, std::vector<RewriteStep>* trace) {
    auto const colour = step.name.colour;
    VertexKind const p = primary(colour);
    VertexKind const q = other_colour(p);
    auto const other = colour == Colour::green ? Colour::red : Colour::green;
    auto fail = [&](std::string const& why) -> Diagram {
        throw Error(ErrorKind::no_match, "no match for " + describe(step) + ": " + why);
    };
    Diagram cur = d;
    auto apply = [&](RewriteStep const& s) {
        cur = apply_base(cur, s);
        if (trace) trace->push_back(s);
    };
    switch (step.name.rule) {
        case Rule::hopf_banged: {
            if (step.locus.size() != 2) return fail("expected [u, v]");
            RewriteStep const h{{Rule::hopf, colour, Direction::forward}, step.locus};
            apply(h);
            while (cur.multiplicity(step.locus[0], step.locus[1]) >= 2) apply(h);
            return cur;
        }
        case Rule::x_abelian1: {
            if (step.locus.size() != 1) return fail("expected [u]");
            VertexId const u = step.locus[0];
            bool any = false;
            for (;;) {
                if (!cur.has_vertex(u) || cur.kind(u) != p) return fail("u is not a primary-colour spider");
                std::optional<VertexId> next;
                for (auto w : cur.neighbours(u))
                    if (cur.kind(w) == p) {
                        next = w;
                        break;
                    }
                if (!next) break;
                apply({{Rule::spider, colour, Direction::forward}, {u, *next}});
                any = true;
            }
            if (!any) return fail("u has no same-colour neighbour");
            return cur;
        }
        case Rule::bialgebra1_rev: {
            if (step.locus.size() != 4) return fail("expected [x1, x2, z1, z2]");
            apply({{Rule::bialgebra, colour, Direction::reverse},
                   {2, step.locus[0], step.locus[1], step.locus[2], step.locus[3]}});
            return cur;
        }
        case Rule::altcycle4: {
            // bialgebra on an edge of an alternating 4-cycle, then fuse the new
            // spiders into their neighbours and cancel the doubled edges
            if (step.locus.size() != 2) return fail("expected [u, v]");
            VertexId const u = step.locus[0], v = step.locus[1];
            if (!cur.has_vertex(u) || !cur.has_vertex(v) || cur.kind(u) != p || cur.kind(v) != q)
                return fail("expected a primary then a secondary spider");
            bool cycle = false;
            for (auto a : cur.neighbour_set(u)) {
                if (a == v || cur.kind(a) != q) continue;
                for (auto b : cur.neighbour_set(v))
                    if (b != u && cur.kind(b) == p && cur.multiplicity(a, b) >= 1) cycle = true;
            }
            if (!cycle) return fail("edge is not on an alternating 4-cycle");
            std::vector<VertexId> a, b;
            for (auto w : cur.neighbours(u))
                if (w != v) a.push_back(w);
            for (auto w : cur.neighbours(v))
                if (w != u) b.push_back(w);
            Diagram without = cur;
            without.remove_vertex(u);
            without.remove_vertex(v);
            VertexId const first_new = without.next_id();
            apply({{Rule::bialgebra, colour, Direction::forward}, {u, v}});
            // new secondary spiders were created first, one per entry of a, then primaries for b
            std::vector<VertexId> touched;
            VertexId id = first_new;
            for (auto w : a) {
                VertexId const x = id++;
                if (cur.has_vertex(w) && cur.kind(w) == q && w != x) {
                    apply({{Rule::spider, other, Direction::forward}, {w, x}});
                    touched.push_back(w);
                } else {
                    touched.push_back(x);
                }
            }
            for (auto w : b) {
                VertexId const z = id++;
                if (cur.has_vertex(w) && cur.kind(w) == p && w != z) {
                    apply({{Rule::spider, colour, Direction::forward}, {w, z}});
                    touched.push_back(w);
                } else {
                    touched.push_back(z);
                }
            }
            for (auto x : touched) {
                if (!cur.has_vertex(x)) continue;
                for (auto z : cur.neighbour_set(x)) {
                    if (cur.kind(x) == q && cur.kind(z) == p) {
                        while (cur.multiplicity(z, x) >= 2) apply({{Rule::hopf, colour, Direction::forward}, {z, x}});
                    } else if (cur.kind(x) == p && cur.kind(z) == q) {
                        while (cur.multiplicity(x, z) >= 2) apply({{Rule::hopf, colour, Direction::forward}, {x, z}});
                    }
                }
            }
            return cur;
        }
        default: return fail("not a macro");
    }
}

}  // namespace detail

/// Applies one step; macro steps expand and apply in one pass because later
/// base steps address vertices created by earlier ones.
inline Diagram apply_step(Diagram const& d, RewriteStep const& step) {
    if (is_macro(step.name.rule)) return detail::run_macro(d, step, nullptr);
    return detail::apply_base(d, step);
}

/// The base steps a macro step expands to when applied to `d`.
inline std::vector<RewriteStep> expand_macro(Diagram const& d, RewriteStep const& step) {
    if (!is_macro(step.name.rule)) return {step};
    std::vector<RewriteStep> trace;
    detail::run_macro(d, step, &trace);
    return trace;
}

}  // namespace zxq
