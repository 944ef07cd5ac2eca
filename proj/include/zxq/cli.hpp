#pragma once

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zxq/circuit.hpp"
#include "zxq/io.hpp"
#include "zxq/proof.hpp"
#include "zxq/render.hpp"
#include "zxq/steane.hpp"

namespace zxq::cli {

/// Process exit statuses.
enum Exit : int {
    positive = 0,
    distinct = 1,
    usage = 2,  ///< parse errors and bad arguments
    cap = 3,    ///< evaluation exceeded the contraction or variable cap
    match = 4,  ///< a replay step did not match, or the end diagram differs
    unsound = 5,
};

inline int exit_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::cap_exceeded:
        case ErrorKind::too_many_variables: return cap;
        case ErrorKind::no_match:
        case ErrorKind::condition_mismatch:
        case ErrorKind::expectation: return match;
        case ErrorKind::soundness: return unsound;
        default: return usage;
    }
}

inline std::string format_complex(Complex z, int precision) {
    std::string const re = format_number(z.real(), precision);
    double const im = z.imag();
    if (format_number(im, precision) == "0") return re;
    std::string const ims = format_number(std::abs(im), precision);
    if (re == "0") return (im < 0 ? "-" : "") + ims + "i";
    return re + (im < 0 ? "-" : "+") + ims + "i";
}

inline Json report_to_json(steane::Report const& r) {
    Json j;
    j["passed"] = r.all_passed();
    j["checks"] = Json::array();
    for (auto const& c : r.checks)
        j["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"distance", c.distance},
                               {"seconds", c.seconds},
                               {"detail", c.detail}});
    return j;
}

struct Options {
    double tolerance = 1e-9;
    bool check = false;
    bool exact = false;
    std::string format;
    int cap = 16;
    int precision = 12;
    std::string output;
};

inline void emit(Options const& o, std::ostream& out, std::string const& text) {
    if (o.output.empty()) out << text;
    else write_file(o.output, text);
}

inline int cmd_translate(std::string const& file, Options const& o, std::ostream& out) {
    Circuit c;
    try {
        c = parse_circuit(read_file(file));
    } catch (Error const& e) {
        throw Error(e.kind(), file + ": " + e.what());
    }
    emit(o, out, diagram_to_text(to_diagram(c)));
    return positive;
}

inline int cmd_eval(std::string const& file, Options const& o, std::ostream& out) {
    Diagram const d = load_diagram(file);
    EvalOptions const eo{o.cap};
    if (d.is_unconditional()) emit(o, out, matrix_to_text(eval_matrix(d, eo), o.precision) + "\n");
    else emit(o, out, channel_to_text(eval_channel(d, eo), o.precision) + "\n");
    return positive;
}

inline int cmd_equiv(std::string const& f1, std::string const& f2, Options const& o, std::ostream& out) {
    Diagram const d1 = load_diagram(f1), d2 = load_diagram(f2);
    EvalOptions const eo{o.cap};
    Comparison c;
    if (d1.is_unconditional() && d2.is_unconditional()) {
        Matrix const m1 = eval_matrix(d1, eo), m2 = eval_matrix(d2, eo);
        if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) {
            out << "distinct(max-entry-diff=inf)\n";
            return distinct;
        }
        c = compare_matrices(m1, m2, o.exact);
    } else {
        auto const c1 = eval_channel(d1, eo), c2 = eval_channel(d2, eo);
        if (c1.rows() != c2.rows() || c1.cols() != c2.cols()) {
            out << "distinct(max-entry-diff=inf)\n";
            return distinct;
        }
        c = compare_channels(c1, c2, o.exact);
    }
    if (!c.valid || c.distance > o.tolerance) {
        out << "distinct(max-entry-diff=" << format_number(c.valid ? c.distance : 1.0, 6) << ")\n";
        return distinct;
    }
    bool const unit = std::abs(c.scalar - Complex{1, 0}) <= o.tolerance;
    out << (unit ? "equal" : "proportional") << "(λ=" << format_complex(c.scalar, 6) << ")\n";
    return positive;
}

inline int cmd_replay(std::string const& dfile, std::string const& sfile, Options const& o, std::ostream& out) {
    Diagram const start = load_diagram(dfile);
    ProofScript const script = load_script(sfile);
    auto const r = replay(start, script, o.check, o.tolerance, EvalOptions{o.cap});
    for (auto const& s : r.steps) {
        out << "step " << s.index << ": " << s.step;
        if (o.check) {
            out << "  " << to_string(s.check.verdict);
            if (s.check.verdict == Soundness::sound) out << " (distance " << format_number(s.check.distance, 3) << ")";
        }
        out << "\n";
    }
    out << r.steps.size() << " steps";
    if (o.check)
        out << ", " << r.count(Soundness::sound) << " sound, " << r.count(Soundness::unchecked) << " unchecked";
    out << "\n";
    out << "final: " << r.final.vertex_count() << " vertices, " << r.final.edge_count() << " edges";
    if (iso_equal(r.final, Diagram::identity(1))) out << " (single wire)";
    out << "\n";
    if (!o.output.empty()) save_diagram(o.output, r.final);
    return positive;
}

inline int cmd_steane(Options const& o, std::ostream& out) {
    steane::VerifyOptions vo;
    vo.tolerance = o.tolerance;
    vo.eval.cap = o.cap;
    auto const r = steane::verify_all(vo);
    if (o.format == "json") emit(o, out, report_to_json(r).dump(2) + "\n");
    else emit(o, out, r.text());
    return r.all_passed() ? positive : distinct;
}

inline int cmd_render(std::string const& file, Options const& o, std::ostream& out) {
    Diagram const d = load_diagram(file);
    emit(o, out, o.format == "tikz" ? to_tikz(d) : to_dot(d));
    return positive;
}

inline int run(int argc, char const* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"ZX-calculus diagrams: translate, evaluate, compare, rewrite, verify"};
    app.require_subcommand(1);
    Options o;
    std::string a, b;

    auto* translate = app.add_subcommand("translate", "circuit file to diagram");
    translate->add_option("circuit", a, "circuit file")->required();
    translate->add_option("-o,--output", o.output, "write here instead of stdout");

    auto* eval = app.add_subcommand("eval", "matrix or Kraus channel of a diagram");
    eval->add_option("diagram", a)->required();
    eval->add_option("--cap", o.cap, "contraction cap (open wires)");
    eval->add_option("--precision", o.precision, "significant digits")->check(CLI::Range(1, 17));
    eval->add_option("-o,--output", o.output);

    auto* equiv = app.add_subcommand("equiv", "compare two diagrams up to a global scalar");
    equiv->add_option("first", a)->required();
    equiv->add_option("second", b)->required();
    equiv->add_option("--tolerance", o.tolerance);
    equiv->add_flag("--exact", o.exact, "require the scalar to be 1");
    equiv->add_option("--cap", o.cap);

    auto* rep = app.add_subcommand("replay", "apply a proof script");
    rep->add_option("diagram", a)->required();
    rep->add_option("script", b)->required();
    rep->add_flag("--check", o.check, "compare every step with the semantics");
    rep->add_option("--tolerance", o.tolerance);
    rep->add_option("--cap", o.cap);
    rep->add_option("-o,--output", o.output, "write the final diagram here");

    auto* verify = app.add_subcommand("steane-verify", "run every Steane code check");
    verify->add_option("--tolerance", o.tolerance);
    verify->add_option("--cap", o.cap);
    verify->add_option("--format", o.format)->check(CLI::IsMember({"text", "json"}));
    verify->add_option("-o,--output", o.output);

    auto* render = app.add_subcommand("render", "dot or tikz description of a diagram");
    render->add_option("diagram", a)->required();
    render->add_option("--format", o.format)->check(CLI::IsMember({"dot", "tikz"}))->required();
    render->add_option("-o,--output", o.output);

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return positive;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
    if (o.tolerance < 0) {
        err << "error: --tolerance must be non-negative\n";
        return usage;
    }
    try {
        if (*translate) return cmd_translate(a, o, out);
        if (*eval) return cmd_eval(a, o, out);
        if (*equiv) return cmd_equiv(a, b, o, out);
        if (*rep) return cmd_replay(a, b, o, out);
        if (*verify) return cmd_steane(o, out);
        if (*render) return cmd_render(a, o, out);
    } catch (Error const& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e.kind());
    }
    return usage;
}

}  // namespace zxq::cli
