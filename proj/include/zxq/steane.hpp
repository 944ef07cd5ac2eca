#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zxq/circuit.hpp"
#include "zxq/diagram.hpp"
#include "zxq/formula.hpp"
#include "zxq/iso.hpp"
#include "zxq/proof.hpp"
#include "zxq/semantics.hpp"

namespace zxq::steane {

inline constexpr int code_qubits = 7;
inline constexpr int input_qubit = 3;
inline constexpr int ancillas = 6;

enum class Pauli { x, z };

inline std::string to_string(Pauli p) { return p == Pauli::x ? "X" : "Z"; }

/// Which data qubits feed each syndrome measurement. x_rows are the bits
/// a, b, c (they detect X errors); z_rows are d, e, f (they detect Z errors).
struct SyndromeSpec {
    using Rows = std::array<std::array<bool, code_qubits>, 3>;
    Rows x_rows{};
    Rows z_rows{};

    static SyndromeSpec standard() {
        // qubit i's column is the binary pattern of the table row for i
        static constexpr int pattern[code_qubits] = {0b100, 0b010, 0b001, 0b011, 0b101, 0b110, 0b111};
        SyndromeSpec s;
        for (int r = 0; r < 3; ++r)
            for (int q = 0; q < code_qubits; ++q) s.x_rows[r][q] = s.z_rows[r][q] = (pattern[q] >> (2 - r)) & 1;
        return s;
    }

    Rows const& rows(Pauli p) const { return p == Pauli::x ? x_rows : z_rows; }

    std::vector<int> support(Pauli p, int row) const {
        std::vector<int> out;
        for (int q = 0; q < code_qubits; ++q)
            if (rows(p)[row][q]) out.push_back(q);
        return out;
    }

    /// Syndrome bits of an error on qubit q, most significant first.
    int column(Pauli p, int q) const {
        int c = 0;
        for (int r = 0; r < 3; ++r) c = (c << 1) | static_cast<int>(rows(p)[r][q]);
        return c;
    }

    /// Every column is nonzero and the columns are pairwise distinct.
    bool identifies_errors(Pauli p) const {
        std::set<int> seen;
        for (int q = 0; q < code_qubits; ++q) {
            int const c = column(p, q);
            if (c == 0 || !seen.insert(c).second) return false;
        }
        return true;
    }
};

inline std::vector<std::string> const& syndrome_variables(Pauli p) {
    static std::vector<std::string> const x{"a", "b", "c"}, z{"d", "e", "f"};
    return p == Pauli::x ? x : z;
}

inline std::vector<std::string> all_syndrome_variables() { return {"a", "b", "c", "d", "e", "f"}; }

/// The minterm over the block's variables selecting the syndrome bits `bits`.
inline Formula minterm(Pauli p, int bits) {
    std::vector<Formula> lits;
    auto const& vars = syndrome_variables(p);
    for (int r = 0; r < 3; ++r) {
        Formula const v = Formula::var(vars[r]);
        lits.push_back((bits >> (2 - r)) & 1 ? v : !v);
    }
    return Formula::all_of(lits);
}

inline Formula syndrome_condition(int qubit, Pauli p, SyndromeSpec const& spec = SyndromeSpec::standard()) {
    if (qubit < 0 || qubit >= code_qubits)
        throw Error(ErrorKind::invalid_argument, "qubit " + std::to_string(qubit) + " is not a code qubit");
    return minterm(p, spec.column(p, qubit));
}

using SyndromeTable = std::map<std::pair<int, Pauli>, Formula>;

inline SyndromeTable syndrome_table(SyndromeSpec const& spec = SyndromeSpec::standard()) {
    SyndromeTable t;
    for (int q = 0; q < code_qubits; ++q)
        for (Pauli p : {Pauli::x, Pauli::z}) t[{q, p}] = syndrome_condition(q, p, spec);
    return t;
}

/// The table with the rows of two qubits exchanged (both Paulis).
inline SyndromeTable swap_rows(SyndromeTable t, int q1, int q2) {
    for (Pauli p : {Pauli::x, Pauli::z}) std::swap(t.at({q1, p}), t.at({q2, p}));
    return t;
}

// -- circuits ----------------------------------------------------------------

/// Input on qubit 3. Qubits 0, 1, 2 start in |+⟩ and spread the X-type
/// stabilisers; 4, 5, 6 start in |0⟩.
inline Circuit encoder_circuit() {
    Circuit c{code_qubits, {}};
    c.prep0(4).prep0(5).prep0(6);
    c.prep_plus(0).prep_plus(1).prep_plus(2);
    c.cnot(3, 4).cnot(3, 5);
    c.cnot(0, 4).cnot(0, 5).cnot(0, 6);
    c.cnot(1, 3).cnot(1, 5).cnot(1, 6);
    c.cnot(2, 3).cnot(2, 4).cnot(2, 6);
    return c;
}

inline Diagram build_encoder() { return to_diagram(encoder_circuit()); }

enum class BlockOrder { x_first, z_first };

/// Syndrome extraction on 13 wires: data 0..6, ancilla 7 + k for measurement k
/// (a..f). X-error bits use a |0⟩ ancilla as CNOT target and a computational
/// measurement; Z-error bits use a |+⟩ ancilla as CNOT control and an X-basis
/// measurement.
inline Circuit detector_circuit(SyndromeSpec const& spec = SyndromeSpec::standard(),
                                BlockOrder order = BlockOrder::x_first) {
    Circuit c{code_qubits + ancillas, {}};
    auto x_block = [&] {
        for (int r = 0; r < 3; ++r) {
            int const anc = code_qubits + r;
            c.prep0(anc);
            for (int q : spec.support(Pauli::x, r)) c.cnot(q, anc);
            c.measure_z(anc, syndrome_variables(Pauli::x)[r]);
        }
    };
    auto z_block = [&] {
        for (int r = 0; r < 3; ++r) {
            int const anc = code_qubits + 3 + r;
            c.prep_plus(anc);
            for (int q : spec.support(Pauli::z, r)) c.cnot(anc, q);
            c.measure(anc, Phase::zero(), syndrome_variables(Pauli::z)[r]);
        }
    };
    if (order == BlockOrder::x_first) {
        x_block();
        z_block();
    } else {
        z_block();
        x_block();
    }
    return c;
}

inline Diagram build_detector(SyndromeSpec const& spec = SyndromeSpec::standard(),
                              BlockOrder order = BlockOrder::x_first) {
    return to_diagram(detector_circuit(spec, order));
}

/// Conditional X then Z on each data qubit, conditions from `table`.
inline Circuit pauli_layer(SyndromeTable const& table, int width = code_qubits) {
    Circuit c{width, {}};
    for (int q = 0; q < code_qubits; ++q) {
        c.x_if(q, table.at({q, Pauli::x}));
        c.z_if(q, table.at({q, Pauli::z}));
    }
    return c;
}

inline Circuit append(Circuit a, Circuit const& b) {
    a.width = std::max(a.width, b.width);
    a.gates.insert(a.gates.end(), b.gates.begin(), b.gates.end());
    return a;
}

/// Detector followed by the corrections selected by `corrections`.
inline Circuit corrector_circuit(SyndromeTable const& corrections = syndrome_table(),
                                 SyndromeSpec const& spec = SyndromeSpec::standard()) {
    return append(detector_circuit(spec), pauli_layer(corrections, code_qubits + ancillas));
}

/// The error layer conditioned on the syndrome variables, then the corrector.
/// The error conditions read variables that the detector only measures later,
/// so this is assembled as a diagram rather than as one circuit.
inline Diagram build_corrector(bool with_errors, SyndromeTable const& corrections = syndrome_table(),
                               SyndromeTable const& errors = syndrome_table()) {
    Diagram c = to_diagram(corrector_circuit(corrections));
    if (!with_errors) return c;
    return compose(c, to_diagram(pauli_layer(errors)));
}

/// The corrector with every measurement outcome fixed to 0: the residual
/// conditions are all false, so this is what the corrector reduces to.
inline Diagram unconditional_corrector() {
    Valuation zero;
    for (auto const& v : all_syndrome_variables()) zero[v] = false;
    return apply_valuation(build_corrector(false), zero);
}

// -- Pauli frames ------------------------------------------------------------

struct Residual {
    std::string where;  ///< "measurement a", "X on qubit 3", ...
    Formula formula;
};

/// Pushes conditional Paulis forward through a Clifford circuit. Each
/// measurement leaves the condition (outcome XOR incoming flip) on its effect
/// and each data wire is left with the uncancelled X and Z conditions.
inline std::vector<Residual> propagate_frames(Circuit const& c) {
    std::vector<Formula> fx(c.width, Formula(false)), fz(c.width, Formula(false));
    std::vector<Residual> out;
    auto const x_or = [](Formula const& a, Formula const& b) {
        if (a.is_false()) return b;
        if (b.is_false()) return a;
        return simplify(a ^ b);
    };
    for (auto const& g : c.gates) {
        int const q = g.qubits[0];
        switch (g.kind) {
            case GateKind::x_if: fx[q] = x_or(fx[q], g.cond); break;
            case GateKind::z_if: fz[q] = x_or(fz[q], g.cond); break;
            case GateKind::h: std::swap(fx[q], fz[q]); break;
            case GateKind::cnot: {
                int const t = g.qubits[1];
                fx[t] = x_or(fx[t], fx[q]);
                fz[q] = x_or(fz[q], fz[t]);
                break;
            }
            case GateKind::cz: {
                int const t = g.qubits[1];
                fz[t] = x_or(fz[t], fx[q]);
                fz[q] = x_or(fz[q], fx[t]);
                break;
            }
            case GateKind::prep0:
            case GateKind::prep1:
            case GateKind::prep_plus:
                fx[q] = fz[q] = Formula(false);
                break;
            case GateKind::measure_z:
                out.push_back({"measurement " + g.var, x_or(Formula::var(g.var), fx[q])});
                fx[q] = fz[q] = Formula(false);
                break;
            case GateKind::measure:
                if (!g.phase.is_zero())
                    throw Error(ErrorKind::invalid_argument, "frame propagation needs X-basis measurements");
                out.push_back({"measurement " + g.var, x_or(Formula::var(g.var), fz[q])});
                fx[q] = fz[q] = Formula(false);
                break;
            case GateKind::rx:
            case GateKind::rz:
                if (!g.phase.is_zero())
                    throw Error(ErrorKind::invalid_argument, "frame propagation is defined for Clifford circuits only");
                break;
        }
    }
    for (int q = 0; q < code_qubits && q < c.width; ++q) {
        out.push_back({"X on qubit " + std::to_string(q), fx[q]});
        out.push_back({"Z on qubit " + std::to_string(q), fz[q]});
    }
    return out;
}

/// Residual conditions of the corrector with the conditional error layer.
inline std::vector<Residual> corrector_residuals(SyndromeTable const& corrections = syndrome_table(),
                                                 SyndromeTable const& errors = syndrome_table()) {
    return propagate_frames(append(pauli_layer(errors, code_qubits + ancillas), corrector_circuit(corrections)));
}

// -- derived syndromes -------------------------------------------------------

/// Injects each single Pauli error between encoder and detector and reads off
/// the only syndrome with a nonvanishing Kraus component. `no_error` receives
/// the surviving valuation for the clean code state.
inline SyndromeTable derive_syndrome_conditions(SyndromeSpec const& spec = SyndromeSpec::standard(),
                                                EvalOptions const& opt = {}, Valuation* no_error = nullptr) {
    auto const vars = all_syndrome_variables();
    auto survivor = [&](std::optional<std::pair<int, Pauli>> err) {
        Circuit c = encoder_circuit();
        c.width = code_qubits + ancillas;
        if (err) {
            if (err->second == Pauli::x) c.rx(Phase::pi(), err->first);
            else c.rz(Phase::pi(), err->first);
        }
        c = append(c, detector_circuit(spec));
        auto const ch = eval_channel(to_diagram(c), opt);
        double largest = 0;
        for (auto const& [_, k] : ch.kraus) largest = std::max(largest, max_abs(k));
        std::optional<Valuation> found;
        std::string const what = err ? to_string(err->second) + " on qubit " + std::to_string(err->first) : "no error";
        for (auto const& [val, k] : ch.kraus) {
            if (max_abs(k) <= 1e-9 * largest) continue;
            if (found)
                throw Error(ErrorKind::expectation, "syndrome for " + what + " is not unique");
            found = val;
        }
        if (!found) throw Error(ErrorKind::expectation, "no syndrome survives for " + what);
        return *found;
    };
    if (no_error) *no_error = survivor(std::nullopt);
    SyndromeTable out;
    for (int q = 0; q < code_qubits; ++q)
        for (Pauli p : {Pauli::x, Pauli::z}) {
            Valuation const v = survivor(std::pair{q, p});
            Pauli const other = p == Pauli::x ? Pauli::z : Pauli::x;
            for (auto const& name : syndrome_variables(other))
                if (v.at(name))
                    throw Error(ErrorKind::expectation, to_string(p) + " error on qubit " + std::to_string(q) +
                                                            " flips the " + to_string(other) + " syndrome bit " +
                                                            name);
            int bits = 0;
            for (auto const& name : syndrome_variables(p)) bits = (bits << 1) | static_cast<int>(v.at(name));
            out[{q, p}] = minterm(p, bits);
        }
    return out;
}

// -- composites --------------------------------------------------------------

struct ErrorModel {
    enum class Mode { none, fixed, conditional };
    Mode mode = Mode::none;
    std::optional<int> x_qubit;
    std::optional<int> z_qubit;

    static ErrorModel none() { return {}; }
    static ErrorModel conditional() { return {Mode::conditional, {}, {}}; }
    static ErrorModel fixed(std::optional<int> x, std::optional<int> z) { return {Mode::fixed, x, z}; }

    std::string describe() const {
        switch (mode) {
            case Mode::none: return "no error";
            case Mode::conditional: return "conditional error layer";
            case Mode::fixed: break;
        }
        std::string s;
        if (x_qubit) s += "X" + std::to_string(*x_qubit);
        if (z_qubit) s += std::string(s.empty() ? "" : "+") + "Z" + std::to_string(*z_qubit);
        return s.empty() ? "no error" : s;
    }
};

inline Diagram corrector_with(ErrorModel const& model, SyndromeTable const& corrections = syndrome_table()) {
    switch (model.mode) {
        case ErrorModel::Mode::none: return build_corrector(false, corrections);
        case ErrorModel::Mode::conditional: return build_corrector(true, corrections);
        case ErrorModel::Mode::fixed: break;
    }
    Circuit e{code_qubits, {}};
    if (model.x_qubit) e.rx(Phase::pi(), *model.x_qubit);
    if (model.z_qubit) e.rz(Phase::pi(), *model.z_qubit);
    return compose(build_corrector(false, corrections), to_diagram(e));
}

/// Decoder ∘ corrector ∘ encoder, one input and one output.
inline Diagram full_composite(ErrorModel const& model, SyndromeTable const& corrections = syndrome_table()) {
    Diagram const e = build_encoder();
    return compose(adjoint(e), compose(corrector_with(model, corrections), e));
}

// -- the appendix proof ------------------------------------------------------

struct AppendixProof {
    Diagram phase1_start;  ///< unconditional corrector after the encoder
    ProofScript phase1;
    Diagram phase2_start;  ///< decoder after the end of phase 1
    ProofScript phase2;
};

inline AppendixProof appendix_proof() {
    AppendixProof a;
    a.phase1_start = compose(unconditional_corrector(), build_encoder());
    auto [end1, s1] = reduce(a.phase1_start, "appendix-phase1");
    s1.start = "appendix-phase1-start.zx";
    a.phase1 = std::move(s1);
    a.phase2_start = compose(adjoint(build_encoder()), end1);
    auto [end2, s2] = reduce(a.phase2_start, "appendix-phase2");
    s2.start = "composite.zx";
    a.phase2 = std::move(s2);
    return a;
}

// -- verification report -----------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    double distance = 0;
    double seconds = 0;
    std::string detail;
};

struct Report {
    std::vector<Check> checks;

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](Check const& c) { return c.pass; });
    }
    Check const* find(std::string const& name) const {
        for (auto const& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    std::string text() const {
        std::ostringstream out;
        for (auto const& c : checks) {
            out << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(40) << c.name << std::right
                << " distance=" << std::scientific << std::setprecision(3) << c.distance << " time=" << std::fixed
                << std::setprecision(2) << c.seconds << "s";
            if (!c.detail.empty()) out << "  " << c.detail;
            out << "\n";
        }
        out << (all_passed() ? "all checks passed" : "some checks FAILED") << "\n";
        return out.str();
    }
};

struct VerifyOptions {
    double tolerance = 1e-9;
    EvalOptions eval{};
    bool replay = true;  ///< include the appendix proof replay
    SyndromeTable corrections = syndrome_table();
};

namespace detail {

inline Check timed(std::string name, std::function<void(Check&)> const& body) {
    Check c;
    c.name = std::move(name);
    auto const t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (Error const& e) {
        c.pass = false;
        c.detail = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

/// Distance of a composite's channel from the identity channel.
inline double identity_distance(Diagram const& composite, EvalOptions const& opt) {
    auto const c = compare_channels(eval_channel(composite, opt), channel_of(Matrix::Identity(2, 2)));
    return c.valid ? c.distance : 1.0;
}

/// Largest relative deviation of S·E from E over the six stabilisers.
inline double stabiliser_deviation(Matrix const& e, SyndromeSpec const& spec) {
    double worst = 0;
    double const scale = max_abs(e);
    auto bit = [](Eigen::Index r, int q) { return (r >> (code_qubits - 1 - q)) & 1; };
    for (int row = 0; row < 3; ++row) {
        Matrix sz = e, sx = e;
        auto const zs = spec.support(Pauli::x, row), xs = spec.support(Pauli::z, row);
        Eigen::Index flip = 0;
        for (int q : xs) flip |= Eigen::Index{1} << (code_qubits - 1 - q);
        for (Eigen::Index r = 0; r < e.rows(); ++r) {
            int parity = 0;
            for (int q : zs) parity ^= bit(r, q);
            if (parity) sz.row(r) = -e.row(r);
            sx.row(r ^ flip) = e.row(r);
        }
        worst = std::max({worst, max_abs(sz - e) / scale, max_abs(sx - e) / scale});
    }
    return worst;
}

}  // namespace detail

/// Encoder isometry and stabilisers.
inline Check check_encoder(VerifyOptions const& o) {
    return detail::timed("encoder isometry and stabilisers", [&](Check& c) {
        Matrix const e = eval_matrix(build_encoder(), o.eval);
        auto const iso = compare_matrices(e.adjoint() * e, Matrix::Identity(2, 2));
        double const stab = detail::stabiliser_deviation(e, SyndromeSpec::standard());
        c.distance = std::max(iso.valid ? iso.distance : 1.0, stab);
        c.pass = iso.valid && c.distance <= o.tolerance;
    });
}

inline Check check_syndromes(VerifyOptions const& o) {
    return detail::timed("syndrome table derivation", [&](Check& c) {
        Valuation clean;
        auto const derived = derive_syndrome_conditions(SyndromeSpec::standard(), o.eval, &clean);
        auto const table = syndrome_table();
        int agree = 0;
        for (auto const& [key, f] : table) agree += equivalent(derived.at(key), f);
        bool const clean_ok =
            std::all_of(clean.begin(), clean.end(), [](auto const& kv) { return !kv.second; });
        c.pass = agree == static_cast<int>(table.size()) && clean_ok;
        c.detail = std::to_string(agree) + "/" + std::to_string(table.size()) + " entries agree";
    });
}

inline Check check_unconditional(VerifyOptions const& o) {
    return detail::timed("corrector with errors is unconditional", [&](Check& c) {
        auto const ch = eval_channel(build_corrector(true, o.corrections), o.eval);
        Matrix const& ref = ch.kraus.begin()->second;
        double worst = 0;
        for (auto const& [_, k] : ch.kraus) {
            auto const cmp = compare_matrices(k, ref);
            if (!cmp.valid) {
                worst = 1;
                continue;
            }
            worst = std::max({worst, cmp.distance, std::abs(std::abs(cmp.scalar) - 1.0)});
        }
        int nonfalse = 0;
        for (auto const& r : corrector_residuals(o.corrections)) nonfalse += !equivalent(r.formula, Formula(false));
        c.distance = worst;
        c.pass = worst <= o.tolerance && nonfalse == 0;
        c.detail = std::to_string(ch.kraus.size()) + " valuations, " + std::to_string(nonfalse) +
                   " residual conditions not false";
    });
}

inline Check check_composite(std::string const& name, std::vector<ErrorModel> const& models,
                             VerifyOptions const& o) {
    return detail::timed(name, [&](Check& c) {
        int failed = 0;
        std::string first;
        for (auto const& m : models) {
            double const d = detail::identity_distance(full_composite(m, o.corrections), o.eval);
            c.distance = std::max(c.distance, d);
            if (d > o.tolerance) {
                if (failed++ == 0) first = m.describe();
            }
        }
        c.pass = failed == 0;
        c.detail = std::to_string(models.size() - failed) + "/" + std::to_string(models.size()) + " models";
        if (failed) c.detail += ", first failure " + first;
    });
}

inline std::vector<ErrorModel> single_errors(Pauli p) {
    std::vector<ErrorModel> out;
    for (int q = 0; q < code_qubits; ++q)
        out.push_back(p == Pauli::x ? ErrorModel::fixed(q, std::nullopt) : ErrorModel::fixed(std::nullopt, q));
    return out;
}

inline std::vector<ErrorModel> error_pairs() {
    std::vector<ErrorModel> out;
    for (int x = 0; x < code_qubits; ++x)
        for (int z = 0; z < code_qubits; ++z) out.push_back(ErrorModel::fixed(x, z));
    return out;
}

inline Check check_replay(AppendixProof const& proof, VerifyOptions const& o) {
    return detail::timed("appendix proof replay", [&](Check& c) {
        auto const r1 = replay(proof.phase1_start, proof.phase1, true, o.tolerance, o.eval);
        auto const r2 = replay(proof.phase2_start, proof.phase2, true, o.tolerance, o.eval);
        double worst = 0;
        for (auto const* r : {&r1, &r2})
            for (auto const& s : r->steps)
                if (s.check.verdict == Soundness::sound) worst = std::max(worst, s.check.distance);
        bool const wire = iso_equal(r2.final, Diagram::identity(1));
        c.distance = worst;
        c.pass = wire;
        c.detail = std::to_string(r1.steps.size()) + "+" + std::to_string(r2.steps.size()) + " steps, " +
                   std::to_string(r1.count(Soundness::unchecked) + r2.count(Soundness::unchecked)) +
                   " unchecked, end " + (wire ? "is" : "is not") + " a single wire";
    });
}

inline Report verify_all(VerifyOptions const& o = {}) {
    Report r;
    r.checks.push_back(check_encoder(o));
    r.checks.push_back(check_syndromes(o));
    r.checks.push_back(check_unconditional(o));
    r.checks.push_back(check_composite("identity, conditional errors", {ErrorModel::conditional()}, o));
    r.checks.push_back(check_composite("identity, single X errors", single_errors(Pauli::x), o));
    r.checks.push_back(check_composite("identity, single Z errors", single_errors(Pauli::z), o));
    r.checks.push_back(check_composite("identity, X and Z pairs", error_pairs(), o));
    r.checks.push_back(check_composite("identity, no error", {ErrorModel::none()}, o));
    if (o.replay) r.checks.push_back(check_replay(appendix_proof(), o));
    return r;
}

}  // namespace zxq::steane
