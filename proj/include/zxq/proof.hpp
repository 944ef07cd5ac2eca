#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zxq/diagram.hpp"
#include "zxq/iso.hpp"
#include "zxq/rewrite.hpp"
#include "zxq/semantics.hpp"

namespace zxq {

enum class Soundness { sound, unsound, unchecked };

inline std::string to_string(Soundness s) {
    switch (s) {
        case Soundness::sound: return "sound";
        case Soundness::unsound: return "unsound";
        case Soundness::unchecked: return "unchecked";
    }
    return "?";
}

struct SoundCheck {
    Soundness verdict = Soundness::unchecked;
    double distance = 0;  ///< relative Choi distance; meaningless when unchecked
    std::string note;
};

/// Channel semantics if the diagram is within the evaluator's caps.
inline std::optional<KrausChannel> try_channel(Diagram const& d, EvalOptions const& opt, std::string* why = nullptr) {
    try {
        return eval_channel(d, opt);
    } catch (Error const& e) {
        if (e.kind() != ErrorKind::cap_exceeded && e.kind() != ErrorKind::too_many_variables) throw;
        if (why) *why = e.what();
        return std::nullopt;
    }
}

inline SoundCheck compare_for_soundness(KrausChannel const& a, KrausChannel const& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return {Soundness::unsound, 1.0, "arity changed"};
    auto const c = compare_channels(a, b);
    if (!c.valid) return {Soundness::unsound, c.distance, "one side is the zero channel"};
    return {c.distance <= tol ? Soundness::sound : Soundness::unsound, c.distance, {}};
}

/// Whether `before` and `after` denote the same channel up to a positive scalar.
inline SoundCheck check_sound(Diagram const& before, Diagram const& after, double tol = 1e-9,
                              EvalOptions const& opt = {}) {
    std::string why;
    auto const a = try_channel(before, opt, &why);
    if (!a) return {Soundness::unchecked, 0, why};
    auto const b = try_channel(after, opt, &why);
    if (!b) return {Soundness::unchecked, 0, why};
    return compare_for_soundness(*a, *b, tol);
}

struct ProofScript {
    std::string name;
    std::string start;  ///< reference to the start diagram (file name), informational
    std::vector<RewriteStep> steps;
    std::optional<Diagram> expected_end;
};

namespace detail {

inline std::optional<RewriteStep> first_reduction(Diagram const& d) {
    auto try_step = [&](RewriteStep const& s) -> bool {
        try {
            apply_step(d, s);
            return true;
        } catch (Error const& e) {
            if (e.kind() == ErrorKind::no_match || e.kind() == ErrorKind::condition_mismatch) return false;
            throw;
        }
    };
    for (Colour c : {Colour::green, Colour::red}) {
        VertexKind const p = primary(c);
        VertexKind const q = other_colour(p);
        for (auto const& [id, v] : d.vertices()) {
            if (v.kind != p) continue;
            if (v.conditional()) {
                auto const s = simplify(v.cond);
                if (s.is_const())
                    return RewriteStep{{s.value() ? Rule::true_rule : Rule::false_rule, c, Direction::forward}, {id}};
            }
            if (v.phase.is_zero() && d.degree(id) == 2 && d.self_loops(id) == 0)
                return RewriteStep{{Rule::identity, c, Direction::forward}, {id}};
            if (d.self_loops(id) > 0) return RewriteStep{{Rule::anti_loop, c, Direction::forward}, {id}};
            for (auto w : d.neighbour_set(id)) {
                if (d.kind(w) == p && w > id) {
                    RewriteStep const s{{Rule::spider, c, Direction::forward}, {id, w}};
                    if (try_step(s)) return s;
                }
                if (d.kind(w) == q && d.multiplicity(id, w) >= 2)
                    return RewriteStep{{Rule::hopf, c, Direction::forward}, {id, w}};
            }
        }
    }
    for (auto const& [id, v] : d.vertices()) {
        if (v.kind != VertexKind::h) continue;
        for (auto w : d.neighbour_set(id))
            if (d.kind(w) == VertexKind::h && d.multiplicity(id, w) == 1)
                return RewriteStep{{Rule::h_cancel, Colour::green, Direction::forward}, {id, w}};
    }
    return std::nullopt;
}

}  // namespace detail

/// Exhaustively applies spider fusion, identity removal, self-loop removal,
/// H cancellation, Hopf, and the constant-condition rules. Each step lowers
/// (vertices, edges, conditional vertices) lexicographically, so this terminates.
inline std::pair<Diagram, ProofScript> normalize(Diagram const& d) {
    ProofScript script{"normalize", {}, {}, std::nullopt};
    Diagram cur = d;
    while (auto s = detail::first_reduction(cur)) {
        cur = apply_step(cur, *s);
        script.steps.push_back(*s);
    }
    return {cur, script};
}

namespace detail {

inline std::size_t diagram_size(Diagram const& d) { return d.vertex_count() + d.edge_count(); }

inline bool applies(Diagram const& d, RewriteStep const& s, Diagram* out) {
    try {
        Diagram r = apply_step(d, s);
        if (out) *out = std::move(r);
        return true;
    } catch (Error const& e) {
        if (e.kind() == ErrorKind::no_match || e.kind() == ErrorKind::condition_mismatch) return false;
        throw;
    }
}

inline std::optional<RewriteStep> first_copy(Diagram const& d) {
    for (auto const& [s, sv] : d.vertices()) {
        if (!is_spider(sv.kind) || sv.conditional() || !sv.phase.is_pauli() || d.degree(s) != 1) continue;
        VertexId const u = d.neighbours(s).front();
        if (d.kind(u) != other_colour(sv.kind) || d.self_loops(u) > 0) continue;
        Colour const c = d.kind(u) == VertexKind::z ? Colour::green : Colour::red;
        return RewriteStep{{Rule::copying, c, Direction::forward}, {u, s}};
    }
    return std::nullopt;
}

inline std::optional<RewriteStep> first_scalar(Diagram const& d) {
    for (auto const& [v, vv] : d.vertices()) {
        if (vv.kind == VertexKind::boundary) continue;
        RewriteStep const s{{Rule::drop_scalar, Colour::green, Direction::forward}, {v}};
        if (applies(d, s, nullptr)) return s;
    }
    return std::nullopt;
}

/// Local simplification to a fixpoint: the normalize rules, copying, and scalar dropping.
inline Diagram settle(Diagram cur, std::vector<RewriteStep>& steps) {
    for (;;) {
        std::optional<RewriteStep> s = first_reduction(cur);
        if (!s) s = first_copy(cur);
        if (!s) s = first_scalar(cur);
        if (!s) return cur;
        cur = apply_step(cur, *s);
        steps.push_back(*s);
    }
}

}  // namespace detail

/// Greedy simplification: settle locally, then take the bialgebra or altcycle4
/// step on a Z/X edge that leaves the smallest settled diagram, as long as
/// that is smaller than the current one.
inline std::pair<Diagram, ProofScript> reduce(Diagram const& d, std::string name = "reduce") {
    ProofScript script{std::move(name), {}, {}, std::nullopt};
    Diagram cur = detail::settle(d, script.steps);
    for (;;) {
        std::optional<Diagram> best;
        std::vector<RewriteStep> best_steps;
        for (auto const& e : cur.edges()) {
            VertexId u = e.a, v = e.b;
            if (!is_spider(cur.kind(u)) || !is_spider(cur.kind(v)) || cur.kind(u) == cur.kind(v)) continue;
            if (cur.kind(u) != VertexKind::z) std::swap(u, v);
            for (Rule r : {Rule::bialgebra, Rule::altcycle4}) {
                std::vector<RewriteStep> trial{{{r, Colour::green, Direction::forward}, {u, v}}};
                Diagram next;
                if (!detail::applies(cur, trial.front(), &next)) continue;
                next = detail::settle(std::move(next), trial);
                if (!best || detail::diagram_size(next) < detail::diagram_size(*best)) {
                    best = std::move(next);
                    best_steps = std::move(trial);
                }
            }
        }
        if (!best || detail::diagram_size(*best) >= detail::diagram_size(cur)) break;
        cur = std::move(*best);
        script.steps.insert(script.steps.end(), best_steps.begin(), best_steps.end());
    }
    script.expected_end = cur;
    return {cur, script};
}

struct StepReport {
    std::size_t index = 0;
    std::string step;
    SoundCheck check;
};

struct ReplayResult {
    Diagram final;
    std::vector<StepReport> steps;

    std::size_t count(Soundness s) const {
        std::size_t n = 0;
        for (auto const& r : steps) n += r.check.verdict == s;
        return n;
    }
};

/// Replays `script` from `start`. With `check`, every step is compared with
/// the channel semantics; a mismatch raises ErrorKind::soundness naming the step.
inline ReplayResult replay(Diagram const& start, ProofScript const& script, bool check, double tol = 1e-9,
                           EvalOptions const& opt = {}) {
    ReplayResult out{start, {}};
    std::optional<KrausChannel> prev;
    std::string why;
    if (check) prev = try_channel(start, opt, &why);
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        auto const& step = script.steps[i];
        Diagram next;
        try {
            next = apply_step(out.final, step);
        } catch (Error const& e) {
            throw Error(ErrorKind::no_match, "step " + std::to_string(i) + ": " + e.what());
        }
        StepReport rep{i, describe(step), {}};
        if (check) {
            auto cur = try_channel(next, opt, &why);
            if (prev && cur) {
                rep.check = compare_for_soundness(*prev, *cur, tol);
                if (rep.check.verdict == Soundness::unsound)
                    throw Error(ErrorKind::soundness, "step " + std::to_string(i) + " (" + rep.step +
                                                          ") is unsound: Choi distance " +
                                                          std::to_string(rep.check.distance));
            } else {
                rep.check = {Soundness::unchecked, 0, why};
            }
            prev = std::move(cur);
        }
        out.steps.push_back(rep);
        out.final = std::move(next);
    }
    if (script.expected_end && !iso_equal(out.final, *script.expected_end))
        throw Error(ErrorKind::expectation, "replay of '" + script.name + "' did not reach the expected diagram");
    return out;
}

}  // namespace zxq
