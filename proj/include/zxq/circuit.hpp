#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zxq/diagram.hpp"
#include "zxq/error.hpp"
#include "zxq/formula.hpp"
#include "zxq/phase.hpp"

namespace zxq {

enum class GateKind {
    rx,
    rz,
    h,
    cnot,
    cz,
    prep0,
    prep1,
    prep_plus,  ///< |+⟩ preparation
    measure,    ///< equatorial measurement in the basis |α±⟩, outcome in `var`
    measure_z,  ///< computational-basis measurement, outcome in `var`
    x_if,       ///< Pauli X applied when `cond` holds
    z_if,       ///< Pauli Z applied when `cond` holds
};

struct Gate {
    GateKind kind = GateKind::h;
    std::vector<int> qubits;
    Phase phase;
    std::string var;
    Formula cond{true};
    int line = 0;
};

struct Circuit {
    int width = 0;
    std::vector<Gate> gates;

    Circuit& add(Gate g) {
        gates.push_back(std::move(g));
        return *this;
    }
    Circuit& add(GateKind k, std::vector<int> qs, Phase p = {}, std::string var = {}, Formula cond = Formula(true)) {
        Gate g;
        g.kind = k;
        g.qubits = std::move(qs);
        g.phase = p;
        g.var = std::move(var);
        g.cond = std::move(cond);
        return add(std::move(g));
    }
    Circuit& rx(Phase p, int q) { return add(GateKind::rx, {q}, p); }
    Circuit& rz(Phase p, int q) { return add(GateKind::rz, {q}, p); }
    Circuit& h(int q) { return add(GateKind::h, {q}); }
    Circuit& cnot(int c, int t) { return add(GateKind::cnot, {c, t}); }
    Circuit& cz(int a, int b) { return add(GateKind::cz, {a, b}); }
    Circuit& prep0(int q) { return add(GateKind::prep0, {q}); }
    Circuit& prep1(int q) { return add(GateKind::prep1, {q}); }
    Circuit& prep_plus(int q) { return add(GateKind::prep_plus, {q}); }
    Circuit& measure(int q, Phase angle, std::string var) { return add(GateKind::measure, {q}, angle, std::move(var)); }
    Circuit& measure_z(int q, std::string var) { return add(GateKind::measure_z, {q}, {}, std::move(var)); }
    Circuit& x_if(int q, Formula cond) { return add(GateKind::x_if, {q}, {}, {}, std::move(cond)); }
    Circuit& z_if(int q, Formula cond) { return add(GateKind::z_if, {q}, {}, {}, std::move(cond)); }
};

namespace detail {

enum class WireState { fresh, live, dead };

inline bool is_prep(GateKind k) { return k == GateKind::prep0 || k == GateKind::prep1 || k == GateKind::prep_plus; }
inline bool is_measure(GateKind k) { return k == GateKind::measure || k == GateKind::measure_z; }

/// Checks qubit ranges, wire liveness, and measurement-variable freshness.
/// Reports the first problem; `line` prefixes messages when gates carry line numbers.
inline void check_circuit(Circuit const& c) {
    auto fail = [](Gate const& g, std::string const& why) {
        std::string const where = g.line > 0 ? "line " + std::to_string(g.line) + ": " : "";
        throw Error(ErrorKind::parse, where + why);
    };
    if (c.width < 0) throw Error(ErrorKind::parse, "negative circuit width");
    std::vector<WireState> state(c.width, WireState::fresh);
    std::set<std::string> used;
    for (auto const& g : c.gates) {
        for (int q : g.qubits)
            if (q < 0 || q >= c.width)
                fail(g, "qubit " + std::to_string(q) + " out of range for width " + std::to_string(c.width));
        if (g.qubits.size() == 2 && g.qubits[0] == g.qubits[1]) fail(g, "two-qubit gate on a single qubit");
        if (is_measure(g.kind)) {
            if (used.count(g.var)) fail(g, "measurement variable '" + g.var + "' is not fresh");
            used.insert(g.var);
        }
        for (int q : g.qubits) {
            if (is_prep(g.kind)) {
                if (state[q] == WireState::live) fail(g, "preparation on live qubit " + std::to_string(q));
            } else if (state[q] == WireState::dead) {
                fail(g, "qubit " + std::to_string(q) + " was measured and not prepared again");
            }
        }
        g.cond.collect_vars(used);
        for (int q : g.qubits) state[q] = is_measure(g.kind) ? WireState::dead : WireState::live;
    }
}

}  // namespace detail

/// Parses the line-oriented gate list. Grammar (one statement per line, `#` comments):
///   qubits N | rx p/q Q | rz p/q Q | h Q | cnot C T | cz A B | prep0 Q | prep1 Q
///   prepplus Q | measure Q angle p/q -> VAR | measurez Q -> VAR | xc Q if F | zc Q if F
inline Circuit parse_circuit(std::string const& text) {
    Circuit c;
    bool have_width = false;
    std::set<std::string> known;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto const hash = raw.find('#');
        std::string const body = raw.substr(0, hash);
        std::istringstream ls(body);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        auto fail = [&](std::string const& why) {
            throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + why);
        };
        auto qubit = [&](std::string const& s) {
            try {
                std::size_t used = 0;
                int const q = std::stoi(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return q;
            } catch (std::logic_error const&) {
                fail("bad qubit index '" + s + "'");
            }
            return -1;
        };
        auto expect = [&](std::size_t n) {
            if (tok.size() != n) fail("'" + tok[0] + "' expects " + std::to_string(n - 1) + " arguments");
        };
        auto phase = [&](std::string const& s) {
            try {
                return Phase::parse(s);
            } catch (Error const& e) {
                fail(e.what());
            }
            return Phase{};
        };
        std::string const& op = tok[0];
        if (op == "qubits") {
            expect(2);
            if (have_width) fail("duplicate 'qubits' declaration");
            c.width = qubit(tok[1]);
            have_width = true;
            continue;
        }
        if (!have_width) fail("'qubits N' must come first");
        Gate g;
        g.line = line_no;
        if (op == "rx" || op == "rz") {
            expect(3);
            g.kind = op == "rx" ? GateKind::rx : GateKind::rz;
            g.phase = phase(tok[1]);
            g.qubits = {qubit(tok[2])};
        } else if (op == "h" || op == "prep0" || op == "prep1" || op == "prepplus") {
            expect(2);
            g.kind = op == "h"       ? GateKind::h
                     : op == "prep0" ? GateKind::prep0
                     : op == "prep1" ? GateKind::prep1
                                     : GateKind::prep_plus;
            g.qubits = {qubit(tok[1])};
        } else if (op == "cnot" || op == "cz") {
            expect(3);
            g.kind = op == "cnot" ? GateKind::cnot : GateKind::cz;
            g.qubits = {qubit(tok[1]), qubit(tok[2])};
        } else if (op == "measure") {
            expect(6);
            if (tok[2] != "angle" || tok[4] != "->") fail("expected 'measure Q angle p/q -> VAR'");
            g.kind = GateKind::measure;
            g.qubits = {qubit(tok[1])};
            g.phase = phase(tok[3]);
            g.var = tok[5];
        } else if (op == "measurez") {
            expect(4);
            if (tok[2] != "->") fail("expected 'measurez Q -> VAR'");
            g.kind = GateKind::measure_z;
            g.qubits = {qubit(tok[1])};
            g.var = tok[3];
        } else if (op == "xc" || op == "zc") {
            if (tok.size() < 4 || tok[2] != "if") fail("expected '" + op + " Q if FORMULA'");
            g.kind = op == "xc" ? GateKind::x_if : GateKind::z_if;
            g.qubits = {qubit(tok[1])};
            std::string const rest = body.substr(body.find(" if ") + 4);
            try {
                g.cond = parse_formula(rest, known);
            } catch (Error const& e) {
                fail(e.what());
            }
        } else {
            fail("unknown gate '" + op + "'");
        }
        if (detail::is_measure(g.kind)) {
            static std::string const ident = "abcdefghijklmnopqrstuvwxyz0123456789_";
            if (g.var.empty() || g.var[0] < 'a' || g.var[0] > 'z' ||
                g.var.find_first_not_of(ident) != std::string::npos)
                fail("bad variable name '" + g.var + "'");
            known.insert(g.var);
        }
        c.gates.push_back(std::move(g));
    }
    if (!have_width) throw Error(ErrorKind::parse, "missing 'qubits N' declaration");
    detail::check_circuit(c);
    return c;
}

inline std::string to_text(Circuit const& c) {
    std::ostringstream out;
    out << "qubits " << c.width << "\n";
    for (auto const& g : c.gates) {
        int const q = g.qubits.at(0);
        switch (g.kind) {
            case GateKind::rx: out << "rx " << g.phase << " " << q; break;
            case GateKind::rz: out << "rz " << g.phase << " " << q; break;
            case GateKind::h: out << "h " << q; break;
            case GateKind::cnot: out << "cnot " << q << " " << g.qubits[1]; break;
            case GateKind::cz: out << "cz " << q << " " << g.qubits[1]; break;
            case GateKind::prep0: out << "prep0 " << q; break;
            case GateKind::prep1: out << "prep1 " << q; break;
            case GateKind::prep_plus: out << "prepplus " << q; break;
            case GateKind::measure: out << "measure " << q << " angle " << g.phase << " -> " << g.var; break;
            case GateKind::measure_z: out << "measurez " << q << " -> " << g.var; break;
            case GateKind::x_if: out << "xc " << q << " if " << g.cond.str(); break;
            case GateKind::z_if: out << "zc " << q << " if " << g.cond.str(); break;
        }
        out << "\n";
    }
    return out.str();
}

/// Translates gates to vertices, time running from inputs to outputs.
/// A qubit whose first gate is a preparation has no input boundary; a measured
/// qubit ends in an effect and has no output boundary.
inline Diagram to_diagram(Circuit const& c) {
    detail::check_circuit(c);
    Diagram d;
    std::vector<VertexId> end(c.width, -1);
    std::vector<bool> has_input(c.width, true);
    std::vector<bool> seen(c.width, false);
    for (auto const& g : c.gates)
        for (int q : g.qubits) {
            if (!seen[q] && detail::is_prep(g.kind)) has_input[q] = false;
            seen[q] = true;
        }
    for (int q = 0; q < c.width; ++q)
        if (has_input[q]) end[q] = d.add_input();

    auto extend = [&](int q, VertexId v) {
        d.add_edge(end[q], v);
        end[q] = v;
    };
    for (auto const& g : c.gates) {
        int const q = g.qubits[0];
        for (auto const& var : g.cond.vars()) d.add_variable(var);
        switch (g.kind) {
            case GateKind::rx: extend(q, d.add_x(g.phase)); break;
            case GateKind::rz: extend(q, d.add_z(g.phase)); break;
            case GateKind::h: extend(q, d.add_h()); break;
            case GateKind::cnot: {
                VertexId const z = d.add_z();
                VertexId const x = d.add_x();
                extend(q, z);
                extend(g.qubits[1], x);
                d.add_edge(z, x);
                break;
            }
            case GateKind::cz: {
                VertexId const a = d.add_z();
                VertexId const b = d.add_z();
                VertexId const h = d.add_h();
                extend(q, a);
                extend(g.qubits[1], b);
                d.add_edge(a, h);
                d.add_edge(h, b);
                break;
            }
            case GateKind::prep0: end[q] = d.add_x(); break;
            case GateKind::prep1: end[q] = d.add_x(Phase::pi()); break;
            case GateKind::prep_plus: end[q] = d.add_z(); break;
            case GateKind::measure: {
                d.add_variable(g.var);
                extend(q, d.add_z(Phase::pi(), Formula::var(g.var)));
                extend(q, d.add_z(-g.phase));
                end[q] = -1;
                break;
            }
            case GateKind::measure_z: {
                d.add_variable(g.var);
                extend(q, d.add_x(Phase::pi(), Formula::var(g.var)));
                extend(q, d.add_x());
                end[q] = -1;
                break;
            }
            case GateKind::x_if: extend(q, d.add_x(Phase::pi(), g.cond)); break;
            case GateKind::z_if: extend(q, d.add_z(Phase::pi(), g.cond)); break;
        }
    }
    for (int q = 0; q < c.width; ++q)
        if (end[q] >= 0) extend(q, d.add_output());
    return d;
}

/// Reverse-order circuit with negated phases; defined for unitary gates only.
inline Circuit adjoint(Circuit const& c) {
    Circuit r{c.width, {}};
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
        Gate g = *it;
        switch (g.kind) {
            case GateKind::rx:
            case GateKind::rz: g.phase = -g.phase; break;
            case GateKind::h:
            case GateKind::cnot:
            case GateKind::cz: break;
            default: throw Error(ErrorKind::invalid_argument, "adjoint is defined for unitary circuits only");
        }
        r.gates.push_back(g);
    }
    return r;
}

}  // namespace zxq
