#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "support.hpp"
#include "zxq/cli.hpp"
#include "zxq/io.hpp"
#include "zxq/render.hpp"
#include "zxq/steane.hpp"

using namespace zxq;
using namespace zxq::testing;
namespace fs = std::filesystem;

namespace {

std::string data(std::string const& name) { return (fs::path(ZXQ_DATA_DIR) / name).string(); }

fs::path scratch() {
    fs::path const p = fs::temp_directory_path() / ("zxq_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

Run zxq_cmd(std::string const& args) {
    fs::path const dir = scratch();
    std::string const out = (dir / "stdout").string(), err = (dir / "stderr").string();
    std::string const cmd = std::string("'") + ZXQ_CLI_PATH + "' " + args + " >'" + out + "' 2>'" + err + "'";
    int const raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

std::string q(std::string const& s) { return "'" + s + "'"; }

}  // namespace

// -- diagram files ----------------------------------------------------------

TEST(DiagramFile, RoundTrip) {
    std::mt19937 rng(3);
    RandomDiagramOptions o;
    o.conditional = true;
    o.vars = {"a", "v2", "ab"};
    for (int i = 0; i < 50; ++i) {
        Diagram const d = random_diagram(rng, i % 3, (i + 1) % 3, o);
        std::string const text = diagram_to_text(d);
        Diagram const back = diagram_from_text(text);
        EXPECT_TRUE(iso_equal(back, d)) << text;
        EXPECT_EQ(back.variables(), d.variables());
        EXPECT_EQ(diagram_to_text(back), text);
    }
}

TEST(DiagramFile, MultiLetterVariablesStayWhole) {
    Diagram d = Diagram::identity(1);
    d.add_variable("ab");
    VertexId const z = d.add_z(Phase::pi(), Formula::var("ab"));
    VertexId const in = d.inputs()[0], out = d.outputs()[0];
    d.remove_edge(in, out);
    d.add_edge(in, z);
    d.add_edge(z, out);
    Diagram const back = diagram_from_text(diagram_to_text(d));
    EXPECT_EQ(back.variables(), std::set<std::string>{"ab"});
    EXPECT_EQ(back.vertex(z).cond.vars(), std::set<std::string>{"ab"});
}

TEST(DiagramFile, JuxtapositionOnInput) {
    std::string const text = R"({"version": 1, "variables": ["a", "b"],
        "vertices": [{"id": 0, "kind": "B"}, {"id": 1, "kind": "Z", "phase": {"num": 1, "den": 1}, "cond": "a!b"},
                     {"id": 2, "kind": "B"}],
        "edges": [[0, 1], [1, 2]], "inputs": [0], "outputs": [2]})";
    Diagram const d = diagram_from_text(text);
    EXPECT_TRUE(equivalent(d.vertex(1).cond, Formula::var("a") & !Formula::var("b")));
}

TEST(DiagramFile, Errors) {
    std::vector<std::string> const bad{
        "not json",
        "[]",
        R"({"version": 2, "vertices": [], "edges": []})",
        R"({"vertices": [{"id": 0, "kind": "Q"}], "edges": []})",
        R"({"vertices": [{"id": 0, "kind": "Z"}], "edges": [[0, 1]]})",
        R"({"vertices": [{"id": 0, "kind": "Z", "phase": {"num": 1, "den": 0}}], "edges": []})",
        R"({"vertices": [{"id": 0, "kind": "Z"}, {"id": 0, "kind": "X"}], "edges": []})",
        R"({"vertices": [{"id": 0, "kind": "Z", "cond": "a &"}], "edges": []})",
        R"({"vertices": [{"id": 0, "kind": "B"}], "edges": [], "inputs": [0]})",
        R"({"vertices": [{"id": 0, "kind": "Z"}], "edges": [[0]]})",
    };
    for (auto const& text : bad) {
        try {
            diagram_from_text(text);
            ADD_FAILURE() << text;
        } catch (Error const& e) {
            EXPECT_EQ(e.kind(), ErrorKind::parse) << text;
        }
    }
}

TEST(DiagramFile, LoadErrorNamesTheFile) {
    fs::path const p = scratch() / "broken.zx";
    write_file(p.string(), "{\n  \"vertices\": [\n");
    try {
        load_diagram(p.string());
        FAIL();
    } catch (Error const& e) {
        std::string const w = e.what();
        EXPECT_NE(w.find("broken.zx"), std::string::npos);
        EXPECT_NE(w.find("line"), std::string::npos) << w;
    }
}

// -- scripts and matrices -----------------------------------------------------

TEST(ScriptFile, RoundTrip) {
    ProofScript s{"demo", "start.zx", {}, Diagram::identity(2)};
    s.steps.push_back({{Rule::spider, Colour::red, Direction::reverse}, {3, 4, 5}});
    s.steps.push_back({{Rule::hopf_banged, Colour::green, Direction::forward}, {1, 2}});
    s.steps.push_back({{Rule::drop_scalar, Colour::green, Direction::forward}, {9}});
    ProofScript const back = script_from_json(Json::parse(script_to_text(s)));
    EXPECT_EQ(back.name, "demo");
    EXPECT_EQ(back.start, "start.zx");
    ASSERT_EQ(back.steps.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.steps[i].name, s.steps[i].name);
        EXPECT_EQ(back.steps[i].locus, s.steps[i].locus);
    }
    ASSERT_TRUE(back.expected_end);
    EXPECT_TRUE(iso_equal(*back.expected_end, Diagram::identity(2)));
    EXPECT_EQ(script_to_text(back), script_to_text(s));
}

TEST(ScriptFile, HyphenatedSpellingsAccepted) {
    auto const s = script_from_json(Json::parse(R"({"steps": [{"rule": "hopf-banged", "locus": [1, 2]},
                                                              {"rule": "bialgebra1-rev", "locus": [1, 2, 3, 4]}]})"));
    EXPECT_EQ(s.steps[0].name.rule, Rule::hopf_banged);
    EXPECT_EQ(s.steps[1].name.rule, Rule::bialgebra1_rev);
    EXPECT_THROW(script_from_json(Json::parse(R"({"steps": [{"rule": "nope", "locus": []}]})")), Error);
}

TEST(MatrixText, ShapeHeaderAndRowMajorPairs) {
    Matrix m(2, 3);
    m << Complex(1, 0), Complex(0, -1), Complex(-0.0, 0), Complex(0.5, 0.25), Complex(2, 0), Complex(0, 0);
    std::string const text = matrix_to_text(m, 6);
    EXPECT_EQ(text, "{\"shape\": [2, 3], \"data\": [[1, 0], [0, -1], [0, 0], [0.5, 0.25], [2, 0], [0, 0]]}");
    EXPECT_LT(max_abs(matrix_from_text(text) - m), 1e-15);
}

TEST(MatrixText, RoundTripAtFullPrecision) {
    std::mt19937 rng(8);
    std::normal_distribution<double> n;
    Matrix m(4, 2);
    for (Eigen::Index k = 0; k < m.size(); ++k) m(k / 2, k % 2) = Complex(n(rng), n(rng));
    EXPECT_LT(max_abs(matrix_from_text(matrix_to_text(m, 17)) - m), 1e-15);
}

// -- rendering -----------------------------------------------------------------

TEST(Render, DotAndTikzMentionEveryVertexAndEdge) {
    Diagram const d = load_diagram(data("cnot-via-spiders.zx"));
    std::string const dot = to_dot(d), tikz = to_tikz(d);
    EXPECT_EQ(dot.rfind("graph zx {", 0), 0u);
    for (auto const& [id, _] : d.vertices()) {
        EXPECT_NE(dot.find("v" + std::to_string(id) + " ["), std::string::npos);
        EXPECT_NE(tikz.find("(v" + std::to_string(id) + ") at"), std::string::npos);
    }
    std::size_t draws = 0, dashes = 0;
    for (std::size_t p = 0; (p = tikz.find("\\draw", p)) != std::string::npos; ++p) ++draws;
    for (std::size_t p = 0; (p = dot.find(" -- ", p)) != std::string::npos; ++p) ++dashes;
    EXPECT_EQ(draws, d.edge_count());
    EXPECT_EQ(dashes, d.edge_count());
    EXPECT_NE(tikz.find("\\frac{\\pi}{2}"), std::string::npos);
}

// -- shipped data ---------------------------------------------------------------

TEST(ShippedData, MatchesTheGenerators) {
    EXPECT_EQ(read_file(data("encoder.zx")), diagram_to_text(steane::build_encoder()));
    EXPECT_EQ(read_file(data("corrector.zx")), diagram_to_text(steane::build_corrector(false)));
    EXPECT_EQ(read_file(data("corrector-with-errors.zx")), diagram_to_text(steane::build_corrector(true)));
    EXPECT_EQ(read_file(data("encoder.qc")), to_text(steane::encoder_circuit()));
    auto const proof = steane::appendix_proof();
    EXPECT_EQ(read_file(data("appendix-phase1-start.zx")), diagram_to_text(proof.phase1_start));
    EXPECT_EQ(read_file(data("composite.zx")), diagram_to_text(proof.phase2_start));
    EXPECT_EQ(read_file(data("appendix-phase1.script")), script_to_text(proof.phase1));
    EXPECT_EQ(read_file(data("appendix-phase2.script")), script_to_text(proof.phase2));
}

TEST(ShippedData, CircuitFilesTranslateToTheDiagrams) {
    EXPECT_TRUE(iso_equal(to_diagram(parse_circuit(read_file(data("encoder.qc")))), load_diagram(data("encoder.zx"))));
    EXPECT_TRUE(iso_equal(to_diagram(parse_circuit(read_file(data("corrector.qc")))), load_diagram(data("corrector.zx"))));
}

// -- the binary ------------------------------------------------------------------

TEST(Cli, EquivCnotProportional) {
    auto const r = zxq_cmd("equiv " + q(data("cnot.zx")) + " " + q(data("cnot-via-spiders.zx")));
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out.rfind("proportional(λ=", 0), 0u) << r.out;
}

TEST(Cli, EquivSameFileIsEqual) {
    auto const r = zxq_cmd("equiv " + q(data("cnot.zx")) + " " + q(data("cnot.zx")));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "equal(λ=1)\n");
}

TEST(Cli, EquivExactRejectsScalar) {
    auto const r = zxq_cmd("equiv --exact " + q(data("cnot.zx")) + " " + q(data("cnot-via-spiders.zx")));
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(r.out.rfind("distinct(max-entry-diff=", 0), 0u) << r.out;
}

TEST(Cli, EquivDifferentShapesIsDistinct) {
    auto const r = zxq_cmd("equiv " + q(data("cnot.zx")) + " " + q(data("encoder.zx")));
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(r.out, "distinct(max-entry-diff=inf)\n");
}

TEST(Cli, EquivConditionalDiagrams) {
    auto const r = zxq_cmd("equiv " + q(data("corrector.zx")) + " " + q(data("corrector.zx")));
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out.rfind("equal(", 0), 0u);
}

TEST(Cli, TranslateMatchesShippedDiagram) {
    auto const r = zxq_cmd("translate " + q(data("cnot.qc")));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, read_file(data("cnot.zx")));
}

TEST(Cli, TranslateParseErrorHasFileAndLine) {
    fs::path const p = scratch() / "bad.qc";
    write_file(p.string(), "qubits 2\ncnot 0 5\n");
    auto const r = zxq_cmd("translate " + q(p.string()));
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("bad.qc: line 2:"), std::string::npos) << r.err;
}

TEST(Cli, EvalCnot) {
    auto const r = zxq_cmd("eval " + q(data("cnot.zx")));
    EXPECT_EQ(r.status, 0);
    Matrix const m = matrix_from_text(r.out);
    EXPECT_LT(max_abs(m - cnot_gate() / std::sqrt(2.0)), 1e-11);
}

TEST(Cli, EvalConditionalDumpsEveryValuation) {
    fs::path const dir = scratch();
    write_file((dir / "m.qc").string(), "qubits 1\nmeasure 0 angle 0 -> m\n");
    ASSERT_EQ(zxq_cmd("translate " + q((dir / "m.qc").string()) + " -o " + q((dir / "m.zx").string())).status, 0);
    auto const r = zxq_cmd("eval " + q((dir / "m.zx").string()));
    EXPECT_EQ(r.status, 0) << r.err;
    Json const j = Json::parse(r.out);
    EXPECT_EQ(j["variables"], Json::array({"m"}));
    ASSERT_EQ(j["kraus"].size(), 2u);
    EXPECT_EQ(j["kraus"][1]["valuation"]["m"], 1);
    EXPECT_EQ(j["kraus"][1]["matrix"]["shape"], Json::array({1, 2}));
}

TEST(Cli, EvalCapExceeded) {
    auto const r = zxq_cmd("eval --cap 2 " + q(data("encoder.zx")));
    EXPECT_EQ(r.status, 3);
    EXPECT_NE(r.err.find("cap"), std::string::npos);
}

TEST(Cli, OutputIsDeterministic) {
    auto const a = zxq_cmd("eval " + q(data("encoder.zx")));
    auto const b = zxq_cmd("eval " + q(data("encoder.zx")));
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ReplayPhaseTwoReachesASingleWire) {
    auto const r = zxq_cmd("replay " + q(data("composite.zx")) + " " + q(data("appendix-phase2.script")) + " --check");
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("(single wire)"), std::string::npos);
    EXPECT_EQ(r.out.find("unsound"), std::string::npos);
}

TEST(Cli, ReplayPhaseOne) {
    auto const r =
        zxq_cmd("replay " + q(data("appendix-phase1-start.zx")) + " " + q(data("appendix-phase1.script")) + " --check");
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find(" sound"), std::string::npos);
}

TEST(Cli, ReplayMatchFailure) {
    fs::path const p = scratch() / "wrong.script";
    write_file(p.string(), R"({"name": "wrong", "steps": [{"rule": "spider", "locus": [0, 1]}]})");
    auto const r = zxq_cmd("replay " + q(data("cnot.zx")) + " " + q(p.string()));
    EXPECT_EQ(r.status, 4);
    EXPECT_NE(r.err.find("step 0"), std::string::npos) << r.err;
}

TEST(Cli, ReplayWrongExpectedEnd) {
    fs::path const p = scratch() / "end.script";
    write_file(p.string(), R"({"name": "end", "steps": [], "expected_end": )" + diagram_to_json(Diagram::identity(1)).dump() + "}");
    auto const r = zxq_cmd("replay " + q(data("cnot.zx")) + " " + q(p.string()));
    EXPECT_EQ(r.status, 4);
}

TEST(Cli, RenderFormats) {
    auto const t = zxq_cmd("render --format tikz " + q(data("cnot.zx")));
    EXPECT_EQ(t.status, 0);
    EXPECT_NE(t.out.find("\\begin{tikzpicture}"), std::string::npos);
    auto const d = zxq_cmd("render --format dot " + q(data("cnot.zx")));
    EXPECT_EQ(d.status, 0);
    EXPECT_NE(d.out.find("graph zx"), std::string::npos);
    EXPECT_EQ(zxq_cmd("render --format png " + q(data("cnot.zx"))).status, 2);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(zxq_cmd("").status, 2);
    EXPECT_EQ(zxq_cmd("frobnicate").status, 2);
    EXPECT_EQ(zxq_cmd("eval").status, 2);
    EXPECT_EQ(zxq_cmd("eval /nonexistent/file.zx").status, 2);
    EXPECT_EQ(zxq_cmd("equiv --tolerance -1 " + q(data("cnot.zx")) + " " + q(data("cnot.zx"))).status, 2);
    EXPECT_EQ(zxq_cmd("--help").status, 0);
}

TEST(Cli, ExitCodesPerErrorKind) {
    EXPECT_EQ(cli::exit_for(ErrorKind::parse), 2);
    EXPECT_EQ(cli::exit_for(ErrorKind::cap_exceeded), 3);
    EXPECT_EQ(cli::exit_for(ErrorKind::too_many_variables), 3);
    EXPECT_EQ(cli::exit_for(ErrorKind::no_match), 4);
    EXPECT_EQ(cli::exit_for(ErrorKind::expectation), 4);
    EXPECT_EQ(cli::exit_for(ErrorKind::soundness), 5);
}

TEST(Cli, SteaneVerifyJson) {
    auto const r = zxq_cmd("steane-verify --format json");
    EXPECT_EQ(r.status, 0) << r.out << r.err;
    Json const j = Json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["checks"].size(), 9u);
    for (auto const& c : j["checks"]) EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
}
