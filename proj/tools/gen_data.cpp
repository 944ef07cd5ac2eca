// Regenerates the shipped files under data/ (or the directory given as argv[1]).
#include <filesystem>
#include <iostream>

#include "zxq/io.hpp"
#include "zxq/steane.hpp"

using namespace zxq;

namespace {

Diagram cnot_via_spiders() {
    // X target written as a Z spider with a Hadamard on every leg, each
    // Hadamard spelled out as Z(π/2) X(π/2) Z(π/2)
    Diagram d;
    Phase const quarter(1, 2);
    auto euler_h = [&](VertexId a, VertexId b) {
        VertexId const z1 = d.add_z(quarter), x = d.add_x(quarter), z2 = d.add_z(quarter);
        d.add_edge(a, z1);
        d.add_edge(z1, x);
        d.add_edge(x, z2);
        d.add_edge(z2, b);
    };
    VertexId const i0 = d.add_input(), i1 = d.add_input();
    VertexId const o0 = d.add_output(), o1 = d.add_output();
    VertexId const ctrl = d.add_z(), tgt = d.add_z();
    d.add_edge(i0, ctrl);
    d.add_edge(ctrl, o0);
    euler_h(i1, tgt);
    euler_h(tgt, o1);
    euler_h(ctrl, tgt);
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    fs::path const dir = argc > 1 ? fs::path(argv[1]) : fs::path(ZXQ_DATA_DIR);
    fs::create_directories(dir);
    auto path = [&](char const* name) { return (dir / name).string(); };
    try {
        std::string const cnot = "qubits 2\ncnot 0 1\n";
        write_file(path("cnot.qc"), cnot);
        save_diagram(path("cnot.zx"), to_diagram(parse_circuit(cnot)));
        save_diagram(path("cnot-via-spiders.zx"), cnot_via_spiders());

        write_file(path("encoder.qc"), to_text(steane::encoder_circuit()));
        write_file(path("corrector.qc"), to_text(steane::corrector_circuit()));
        save_diagram(path("encoder.zx"), steane::build_encoder());
        save_diagram(path("detector.zx"), steane::build_detector());
        save_diagram(path("corrector.zx"), steane::build_corrector(false));
        save_diagram(path("corrector-with-errors.zx"), steane::build_corrector(true));
        save_diagram(path("corrector-unconditional.zx"), steane::unconditional_corrector());
        save_diagram(path("composite-conditional.zx"), steane::full_composite(steane::ErrorModel::conditional()));

        auto const proof = steane::appendix_proof();
        save_diagram(path("appendix-phase1-start.zx"), proof.phase1_start);
        save_script(path("appendix-phase1.script"), proof.phase1);
        save_diagram(path("composite.zx"), proof.phase2_start);
        save_script(path("appendix-phase2.script"), proof.phase2);
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}
