#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "zxq/iso.hpp"
#include "zxq/steane.hpp"

using namespace zxq;
using namespace zxq::steane;
using namespace zxq::testing;

namespace {

Formula f(std::string const& text) { return parse_formula(text); }

// The correction table exactly as printed, in the shorthand of the figure caption.
std::map<int, std::pair<std::string, std::string>> const printed_table{
    {6, {"abc", "def"}},     {5, {"ab!c", "de!f"}},   {4, {"a!bc", "d!ef"}},   {3, {"!abc", "!def"}},
    {2, {"!a!bc", "!d!ef"}}, {1, {"!ab!c", "!de!f"}}, {0, {"a!b!c", "d!e!f"}},
};

Matrix pauli_on(Matrix const& p, std::vector<int> const& qubits) {
    Matrix m = Matrix::Identity(1, 1);
    for (int q = 0; q < code_qubits; ++q)
        m = kron(m, std::find(qubits.begin(), qubits.end(), q) != qubits.end() ? p : eye(2));
    return m;
}

// Direct state-vector construction of the encoder: |+⟩^3 ⊗ |ψ⟩ ⊗ |0⟩^3, then the CNOTs.
Matrix encoder_by_simulation() {
    Matrix plus(2, 1), zero(2, 1);
    plus << 1, 1;
    plus /= std::sqrt(2.0);
    zero << 1, 0;
    Matrix v = kron(kron(kron(plus, plus), plus), eye(2));
    v = kron(kron(kron(v, zero), zero), zero);
    for (auto const& g : encoder_circuit().gates)
        if (g.kind == GateKind::cnot) v = embed(cnot_gate(), g.qubits, code_qubits) * v;
    return v;
}

Matrix code_state(Matrix const& e, int which) {
    Matrix psi(2, 1);
    if (which == 0) psi << 1, 0;
    else if (which == 1) psi << 0, 1;
    else psi << M_SQRT1_2, M_SQRT1_2;
    return e * psi;
}

// Channel of detector ∘ P ∘ E, restricted to a chosen input state.
KrausChannel detect(std::optional<std::pair<int, Pauli>> err) {
    Circuit c = encoder_circuit();
    c.width = code_qubits + ancillas;
    if (err) {
        if (err->second == Pauli::x) c.rx(Phase::pi(), err->first);
        else c.rz(Phase::pi(), err->first);
    }
    return eval_channel(to_diagram(append(c, detector_circuit())));
}

std::vector<Valuation> surviving(KrausChannel const& ch) {
    double largest = 0;
    for (auto const& [_, k] : ch.kraus) largest = std::max(largest, max_abs(k));
    std::vector<Valuation> out;
    for (auto const& [v, k] : ch.kraus)
        if (max_abs(k) > 1e-9 * largest) out.push_back(v);
    return out;
}

Valuation syndrome(std::string const& bits) {
    Valuation v;
    auto const names = all_syndrome_variables();
    for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = bits[i] == '1';
    return v;
}

// Exchanges a<->d, b<->e, c<->f in every condition.
Diagram swap_syndrome_blocks(Diagram d) {
    std::map<char, char> const swap{{'a', 'd'}, {'b', 'e'}, {'c', 'f'}, {'d', 'a'}, {'e', 'b'}, {'f', 'c'}};
    Diagram const original = d;
    for (auto const& [id, v] : original.vertices()) {
        if (!v.conditional()) continue;
        std::string s = v.cond.str();
        for (char& ch : s)
            if (swap.count(ch)) ch = swap.at(ch);
        d.vertex(id).cond = parse_formula(s);
    }
    return d;
}

}  // namespace

// -- syndrome specification ---------------------------------------------------

TEST(SyndromeSpec, ColumnsMatchPrintedTable) {
    auto const s = SyndromeSpec::standard();
    std::map<int, int> const expected{{6, 0b111}, {5, 0b110}, {4, 0b101}, {3, 0b011},
                                      {2, 0b001}, {1, 0b010}, {0, 0b100}};
    for (auto [q, bits] : expected) {
        EXPECT_EQ(s.column(Pauli::x, q), bits) << q;
        EXPECT_EQ(s.column(Pauli::z, q), bits) << q;
    }
    EXPECT_EQ(s.support(Pauli::x, 0), (std::vector<int>{0, 4, 5, 6}));
    EXPECT_EQ(s.support(Pauli::x, 1), (std::vector<int>{1, 3, 5, 6}));
    EXPECT_EQ(s.support(Pauli::x, 2), (std::vector<int>{2, 3, 4, 6}));
    EXPECT_TRUE(s.identifies_errors(Pauli::x));
    EXPECT_TRUE(s.identifies_errors(Pauli::z));
}

TEST(SyndromeSpec, DuplicateColumnDoesNotIdentify) {
    auto s = SyndromeSpec::standard();
    for (int r = 0; r < 3; ++r) s.x_rows[r][1] = s.x_rows[r][2];
    EXPECT_FALSE(s.identifies_errors(Pauli::x));
    EXPECT_TRUE(s.identifies_errors(Pauli::z));
}

TEST(SyndromeSpec, StabilisersCommute) {
    auto const s = SyndromeSpec::standard();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int overlap = 0;
            for (int q = 0; q < code_qubits; ++q) overlap += s.x_rows[i][q] && s.z_rows[j][q];
            EXPECT_EQ(overlap % 2, 0) << i << "," << j;
        }
}

TEST(SyndromeCondition, Examples) {
    EXPECT_TRUE(equivalent(syndrome_condition(6, Pauli::z), Formula::var("d") & Formula::var("e") & Formula::var("f")));
    EXPECT_TRUE(equivalent(syndrome_condition(0, Pauli::x), Formula::var("a") & !Formula::var("b") & !Formula::var("c")));
    EXPECT_TRUE(equivalent(syndrome_condition(3, Pauli::z), !Formula::var("d") & Formula::var("e") & Formula::var("f")));
    EXPECT_THROW(syndrome_condition(7, Pauli::x), Error);
}

TEST(SyndromeCondition, WholePrintedTable) {
    for (auto const& [q, row] : printed_table) {
        EXPECT_TRUE(equivalent(syndrome_condition(q, Pauli::x), f(row.first))) << q;
        EXPECT_TRUE(equivalent(syndrome_condition(q, Pauli::z), f(row.second))) << q;
    }
}

TEST(SyndromeCondition, MintermsPartitionTheSyndromes) {
    for (Pauli p : {Pauli::x, Pauli::z}) {
        std::vector<Formula> cases;
        for (int q = 0; q < code_qubits; ++q) cases.push_back(syndrome_condition(q, p));
        auto const& v = syndrome_variables(p);
        cases.push_back(!Formula::var(v[0]) & !Formula::var(v[1]) & !Formula::var(v[2]));
        for (std::size_t i = 0; i < cases.size(); ++i)
            for (std::size_t j = i + 1; j < cases.size(); ++j)
                EXPECT_TRUE(equivalent(cases[i] & cases[j], Formula(false))) << i << "," << j;
        EXPECT_TRUE(equivalent(Formula::any_of(cases), Formula(true)));
    }
}

TEST(SyndromeCondition, SwapRowsExchangesBothPaulis) {
    auto const t = swap_rows(syndrome_table(), 1, 2);
    EXPECT_TRUE(equivalent(t.at({1, Pauli::x}), syndrome_condition(2, Pauli::x)));
    EXPECT_TRUE(equivalent(t.at({2, Pauli::z}), syndrome_condition(1, Pauli::z)));
    EXPECT_TRUE(equivalent(t.at({6, Pauli::z}), syndrome_condition(6, Pauli::z)));
}

// -- encoder ------------------------------------------------------------------

TEST(Encoder, Shape) {
    Diagram const e = build_encoder();
    EXPECT_EQ(e.inputs().size(), 1u);
    EXPECT_EQ(e.outputs().size(), 7u);
    EXPECT_TRUE(validate(e).empty());
}

TEST(Encoder, MatchesStateVectorSimulation) {
    EXPECT_TRUE(proportional_equal(eval_matrix(build_encoder()), encoder_by_simulation(), 1e-12));
}

TEST(Encoder, IsAnIsometry) {
    Matrix const e = eval_matrix(build_encoder());
    EXPECT_TRUE(proportional_equal(e.adjoint() * e, eye(2), 1e-12));
}

TEST(Encoder, StabilisersFixTheCode) {
    Matrix const e = eval_matrix(build_encoder());
    auto const s = SyndromeSpec::standard();
    for (int r = 0; r < 3; ++r) {
        Matrix const sz = pauli_on(pauli_z(), s.support(Pauli::x, r));
        Matrix const sx = pauli_on(pauli_x(), s.support(Pauli::z, r));
        EXPECT_LT(max_abs(sz * e - e) / max_abs(e), 1e-10) << r;
        EXPECT_LT(max_abs(sx * e - e) / max_abs(e), 1e-10) << r;
    }
    EXPECT_LT(steane::detail::stabiliser_deviation(e, s), 1e-10);
}

TEST(Encoder, StabiliserCheckDetectsAWrongSupport) {
    Matrix const e = eval_matrix(build_encoder());
    auto s = SyndromeSpec::standard();
    s.x_rows[0][0] = false;
    EXPECT_GT(steane::detail::stabiliser_deviation(e, s), 0.5);
}

TEST(Encoder, NormalizeShrinksAndPreservesTheMap) {
    Diagram const e = build_encoder();
    auto const [n, script] = normalize(e);
    EXPECT_FALSE(script.steps.empty());
    EXPECT_LT(n.vertex_count() + n.edge_count(), e.vertex_count() + e.edge_count());
    EXPECT_TRUE(channel_equal(eval_channel(n), eval_channel(e), 1e-9));
    EXPECT_FALSE(zxq::detail::first_reduction(n).has_value());
}

// -- detector -----------------------------------------------------------------

TEST(Detector, Shape) {
    Diagram const d = build_detector();
    EXPECT_EQ(d.inputs().size(), 7u);
    EXPECT_EQ(d.outputs().size(), 7u);
    EXPECT_EQ(d.variables(), (std::set<std::string>{"a", "b", "c", "d", "e", "f"}));
    EXPECT_TRUE(validate(d).empty());
}

TEST(Detector, CodeStatesGiveTheTrivialSyndrome) {
    Diagram const det = build_detector();
    Matrix const e = eval_matrix(build_encoder());
    auto const ch = eval_channel(det);
    for (int which = 0; which < 3; ++which) {
        Matrix const psi = code_state(e, which);
        double largest = 0;
        for (auto const& [_, k] : ch.kraus) largest = std::max(largest, max_abs(k * psi));
        for (auto const& [v, k] : ch.kraus) {
            bool const trivial = v == syndrome("000000");
            if (trivial) EXPECT_TRUE(proportional_equal(k * psi, psi, 1e-10)) << which;
            else EXPECT_LT(max_abs(k * psi), 1e-12 * largest) << which;
        }
    }
}

TEST(Detector, XOnQubitSixGivesAllOnesOnTheFirstBlock) {
    auto const s = surviving(detect(std::pair{6, Pauli::x}));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0], syndrome("111000"));
}

TEST(Detector, ZOnQubitTwoGivesOnlyF) {
    auto const s = surviving(detect(std::pair{2, Pauli::z}));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0], syndrome("000001"));
}

TEST(Detector, ColourSymmetry) {
    Diagram const dual = swap_syndrome_blocks(colour_dual(build_detector(SyndromeSpec::standard(), BlockOrder::x_first)));
    Diagram const other = build_detector(SyndromeSpec::standard(), BlockOrder::z_first);
    EXPECT_TRUE(iso_equal(dual, other));
    auto const c1 = eval_channel(dual), c2 = eval_channel(other);
    for (auto const& [v, k] : c1.kraus) EXPECT_TRUE(proportional_equal(k, c2.kraus.at(v), 1e-10));
}

TEST(Detector, BlockOrderDoesNotMatter) {
    auto const c1 = eval_channel(build_detector(SyndromeSpec::standard(), BlockOrder::x_first));
    auto const c2 = eval_channel(build_detector(SyndromeSpec::standard(), BlockOrder::z_first));
    EXPECT_TRUE(channel_equal(c1, c2, 1e-9));
}

// -- derived syndromes ---------------------------------------------------------

TEST(DeriveSyndromes, ReproducesTheTable) {
    Valuation clean;
    auto const derived = derive_syndrome_conditions(SyndromeSpec::standard(), {}, &clean);
    for (auto const& [q, row] : printed_table) {
        EXPECT_TRUE(equivalent(derived.at({q, Pauli::x}), f(row.first))) << q;
        EXPECT_TRUE(equivalent(derived.at({q, Pauli::z}), f(row.second))) << q;
        std::set<std::string> vx, vz;
        derived.at({q, Pauli::x}).collect_vars(vx);
        derived.at({q, Pauli::z}).collect_vars(vz);
        EXPECT_EQ(vx, (std::set<std::string>{"a", "b", "c"}));
        EXPECT_EQ(vz, (std::set<std::string>{"d", "e", "f"}));
    }
    EXPECT_EQ(clean, syndrome("000000"));
    EXPECT_TRUE(equivalent(derived.at({6, Pauli::z}), f("d & e & f")));
}

TEST(DeriveSyndromes, NonStabiliserCheckIsReported) {
    // a check on qubit 0 alone has a random outcome on code states
    auto s = SyndromeSpec::standard();
    for (int q = 1; q < code_qubits; ++q) s.x_rows[0][q] = false;
    try {
        derive_syndrome_conditions(s);
        FAIL();
    } catch (Error const& e) {
        EXPECT_EQ(e.kind(), ErrorKind::expectation);
        EXPECT_NE(std::string(e.what()).find("not unique"), std::string::npos);
    }
}

// -- corrector -----------------------------------------------------------------

TEST(Corrector, Validates) {
    for (bool errors : {false, true}) {
        Diagram const c = build_corrector(errors);
        EXPECT_TRUE(validate(c).empty());
        EXPECT_EQ(c.inputs().size(), 7u);
        EXPECT_EQ(c.outputs().size(), 7u);
    }
}

TEST(Corrector, WithErrorsAllValuationsProportional) {
    auto const ch = eval_channel(build_corrector(true));
    ASSERT_EQ(ch.kraus.size(), 64u);
    Matrix const& ref = ch.kraus.begin()->second;
    ASSERT_GT(max_abs(ref), 0);
    for (auto const& [v, k] : ch.kraus) {
        auto const lambda = proportional_equal(k, ref, 1e-9);
        ASSERT_TRUE(lambda);
        EXPECT_NEAR(std::abs(*lambda), 1.0, 1e-9);
    }
}

TEST(Corrector, WithoutErrorsFixesCodeStates) {
    Matrix const e = eval_matrix(build_encoder());
    auto const ch = eval_channel(build_corrector(false));
    for (int which = 0; which < 3; ++which) {
        Matrix const psi = code_state(e, which);
        Matrix out = Matrix::Zero(psi.rows(), psi.rows());
        for (auto const& [_, k] : ch.kraus) out += (k * psi) * (k * psi).adjoint();
        EXPECT_TRUE(proportional_equal(out, psi * psi.adjoint(), 1e-10)) << which;
    }
}

TEST(Corrector, UnconditionalFormIsTheTrivialBranch) {
    Diagram const u = unconditional_corrector();
    EXPECT_TRUE(u.is_unconditional());
    auto const ch = eval_channel(build_corrector(true));
    EXPECT_TRUE(proportional_equal(eval_matrix(u), ch.kraus.at(syndrome("000000")), 1e-10));
}

// -- frames ----------------------------------------------------------------------

TEST(Frames, ResidualConditionsAreFalse) {
    auto const r = corrector_residuals();
    EXPECT_EQ(r.size(), 6u + 14u);
    for (auto const& res : r) EXPECT_TRUE(equivalent(res.formula, Formula(false))) << res.where << ": " << res.formula.str();
}

TEST(Frames, MutatedTableLeavesResiduals) {
    auto const r = corrector_residuals(swap_rows(syndrome_table(), 1, 2));
    int live = 0;
    for (auto const& res : r) live += !equivalent(res.formula, Formula(false));
    EXPECT_EQ(live, 4);  // X and Z on qubits 1 and 2
}

TEST(Frames, CnotCopiesXForwardAndZBackward) {
    Circuit c{2, {}};
    c.x_if(0, Formula::var("p")).z_if(1, Formula::var("q")).cnot(0, 1);
    auto const r = propagate_frames(c);
    std::map<std::string, Formula> by;
    for (auto const& x : r) by[x.where] = x.formula;
    EXPECT_TRUE(equivalent(by.at("X on qubit 0"), f("p")));
    EXPECT_TRUE(equivalent(by.at("X on qubit 1"), f("p")));
    EXPECT_TRUE(equivalent(by.at("Z on qubit 0"), f("q")));
    EXPECT_TRUE(equivalent(by.at("Z on qubit 1"), f("q")));
}

TEST(Frames, MatchConjugationOnRandomCliffordCircuits) {
    std::mt19937 rng(41);
    int const width = 3;
    for (int trial = 0; trial < 60; ++trial) {
        Circuit c{width, {}};
        int const q0 = trial % width;
        bool const is_x = trial % 2 == 0;
        if (is_x) c.x_if(q0, Formula(true));
        else c.z_if(q0, Formula(true));
        Matrix u = eye(8);
        for (int g = 0; g < 5; ++g) {
            int const a = rng() % width;
            int b = rng() % width;
            while (b == a) b = rng() % width;
            switch (rng() % 3) {
                case 0: c.h(a); u = embed(h_gate(), {a}, width) * u; break;
                case 1: c.cnot(a, b); u = embed(cnot_gate(), {a, b}, width) * u; break;
                default: c.cz(a, b); u = embed(cz_gate(), {a, b}, width) * u; break;
            }
        }
        Matrix p = embed(is_x ? pauli_x() : pauli_z(), {q0}, width);
        Matrix const conj = u * p * u.adjoint();
        Matrix frame = eye(8);
        for (auto const& r : propagate_frames(c)) {
            if (!r.formula.is_true()) continue;
            int const q = std::stoi(r.where.substr(r.where.rfind(' ') + 1));
            Matrix const pq = embed(r.where[0] == 'X' ? pauli_x() : pauli_z(), {q}, width);
            frame = r.where[0] == 'X' ? Matrix(pq * frame) : Matrix(frame * pq);
        }
        EXPECT_TRUE(proportional_equal(frame, conj, 1e-12)) << to_text(c);
    }
}

TEST(Frames, RejectsNonClifford) {
    Circuit c{1, {}};
    c.rz(Phase(1, 4), 0);
    EXPECT_THROW(propagate_frames(c), Error);
}

// -- composites -------------------------------------------------------------------

namespace {
void expect_identity(ErrorModel const& m, SyndromeTable const& t = syndrome_table()) {
    Diagram const d = full_composite(m, t);
    EXPECT_EQ(d.inputs().size(), 1u);
    EXPECT_EQ(d.outputs().size(), 1u);
    EXPECT_TRUE(channel_equal(eval_channel(d), channel_of(eye(2)), 1e-9)) << m.describe();
}
}  // namespace

TEST(Composite, ConditionalErrors) { expect_identity(ErrorModel::conditional()); }
TEST(Composite, NoError) { expect_identity(ErrorModel::none()); }
TEST(Composite, FixedXOnQubitFour) { expect_identity(ErrorModel::fixed(4, std::nullopt)); }
TEST(Composite, XAndZOnDifferentQubits) { expect_identity(ErrorModel::fixed(2, 5)); }

TEST(Composite, EverySingleError) {
    for (Pauli p : {Pauli::x, Pauli::z})
        for (auto const& m : single_errors(p)) expect_identity(m);
}

TEST(Composite, EveryPair) {
    for (auto const& m : error_pairs()) expect_identity(m);
}

TEST(Composite, UncorrectedErrorIsNotIdentity) {
    // without the corrections, an X error on the code becomes a logical error or worse
    Circuit e{code_qubits, {}};
    e.rx(Phase::pi(), 4);
    Diagram const enc = build_encoder();
    Diagram const d = compose(adjoint(enc), compose(to_diagram(e), enc));
    EXPECT_FALSE(channel_equal(eval_channel(d), channel_of(eye(2)), 1e-9));
}

TEST(Composite, NegativeControlFails) {
    auto const bad = swap_rows(syndrome_table(), 1, 2);
    Diagram const d = full_composite(ErrorModel::fixed(1, std::nullopt), bad);
    EXPECT_FALSE(channel_equal(eval_channel(d), channel_of(eye(2)), 1e-9));
    // qubits the swap does not touch are still corrected
    EXPECT_TRUE(channel_equal(eval_channel(full_composite(ErrorModel::fixed(5, std::nullopt), bad)), channel_of(eye(2)),
                              1e-9));
}

// -- appendix and report ------------------------------------------------------------

TEST(Appendix, PhaseTwoEndsInASingleWire) {
    auto const a = appendix_proof();
    auto const r1 = replay(a.phase1_start, a.phase1, true);
    EXPECT_TRUE(iso_equal(r1.final, *a.phase1.expected_end));
    EXPECT_TRUE(iso_equal(compose(adjoint(build_encoder()), r1.final), a.phase2_start));
    auto const r2 = replay(a.phase2_start, a.phase2, true);
    EXPECT_TRUE(iso_equal(r2.final, Diagram::identity(1)));
    EXPECT_EQ(r1.count(Soundness::unsound) + r2.count(Soundness::unsound), 0u);
    EXPECT_GT(r1.count(Soundness::sound) + r2.count(Soundness::sound), 0u);
}

TEST(Appendix, PhaseOneStartIsTheCorrectorAfterTheEncoder) {
    auto const a = appendix_proof();
    EXPECT_EQ(a.phase1_start.inputs().size(), 1u);
    EXPECT_EQ(a.phase1_start.outputs().size(), 7u);
    EXPECT_TRUE(a.phase1_start.is_unconditional());
}

TEST(Report, DefaultRunPasses) {
    auto const r = verify_all();
    EXPECT_TRUE(r.all_passed()) << r.text();
    EXPECT_EQ(r.checks.size(), 9u);
    for (auto const& c : r.checks) EXPECT_LE(c.distance, 1e-9) << c.name;
    EXPECT_NE(r.text().find("all checks passed"), std::string::npos);
}

TEST(Report, ZeroToleranceExposesRounding) {
    VerifyOptions o;
    o.tolerance = 0;
    o.replay = false;
    auto const r = verify_all(o);
    EXPECT_FALSE(r.all_passed());
    auto const* c = r.find("identity, conditional errors");
    ASSERT_NE(c, nullptr);
    EXPECT_FALSE(c->pass);
    EXPECT_GT(c->distance, 0);
    EXPECT_LT(c->distance, 1e-12);
}

TEST(Report, MutatedTableFailsTheSingleErrorCheck) {
    VerifyOptions o;
    o.replay = false;
    o.corrections = swap_rows(syndrome_table(), 1, 2);
    auto const c = check_composite("single X", single_errors(Pauli::x), o);
    EXPECT_FALSE(c.pass);
    EXPECT_NE(c.detail.find("5/7"), std::string::npos);
}
