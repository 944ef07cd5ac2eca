#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "zxq/diagram.hpp"
#include "zxq/semantics.hpp"

namespace zxq::testing {

inline Matrix kron(Matrix const& a, Matrix const& b) {
    Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline Matrix eye(Eigen::Index n) { return Matrix::Identity(n, n); }

// Gate matrices written out by hand, independent of the spider tensors.
inline Matrix rz_gate(double beta) { return mat2(1, 0, 0, std::polar(1.0, beta)); }
inline Matrix rx_gate(double alpha) {
    Complex const c = std::cos(alpha / 2), s = Complex(0, -std::sin(alpha / 2));
    return mat2(c, s, s, c);
}
inline Matrix h_gate() { return mat2(1, 1, 1, -1) / std::sqrt(2.0); }
inline Matrix pauli_x() { return mat2(0, 1, 1, 0); }
inline Matrix pauli_z() { return mat2(1, 0, 0, -1); }
inline Matrix cnot_gate() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
}
inline Matrix cz_gate() {
    Matrix m = eye(4);
    m(3, 3) = -1;
    return m;
}

/// Lifts a gate on `qubits` (in the gate's own order) to `width` qubits; qubit 0 is most significant.
inline Matrix embed(Matrix const& g, std::vector<int> const& qubits, int width) {
    int const k = static_cast<int>(qubits.size());
    Eigen::Index const dim = Eigen::Index(1) << width;
    Matrix r = Matrix::Zero(dim, dim);
    auto bit = [&](Eigen::Index x, int q) { return (x >> (width - 1 - q)) & 1; };
    for (Eigen::Index col = 0; col < dim; ++col) {
        Eigen::Index sub_col = 0;
        for (int j = 0; j < k; ++j) sub_col = (sub_col << 1) | bit(col, qubits[j]);
        for (Eigen::Index sub_row = 0; sub_row < (Eigen::Index(1) << k); ++sub_row) {
            Eigen::Index row = col;
            for (int j = 0; j < k; ++j) {
                Eigen::Index const mask = Eigen::Index(1) << (width - 1 - qubits[j]);
                row = ((sub_row >> (k - 1 - j)) & 1) ? (row | mask) : (row & ~mask);
            }
            r(row, col) += g(sub_row, sub_col);
        }
    }
    return r;
}

inline Phase random_phase(std::mt19937& rng, int den = 4) {
    return Phase(std::uniform_int_distribution<int>(0, 2 * den - 1)(rng), den);
}

struct RandomDiagramOptions {
    int max_in = 3;
    int max_out = 3;
    int max_vertices = 8;
    bool conditional = false;
    std::vector<std::string> vars = {"a", "b"};
};

inline Formula random_condition(std::mt19937& rng, std::vector<std::string> const& vars) {
    auto pick = [&] { return Formula::var(vars[std::uniform_int_distribution<std::size_t>(0, vars.size() - 1)(rng)]); };
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: return pick();
        case 1: return !pick();
        case 2: return pick() & pick();
        default: return pick() | !pick();
    }
}

/// A random valid diagram: spiders wired to the boundaries and to each other,
/// with some edges subdivided by H vertices. Loops and parallel edges occur.
inline Diagram random_diagram(std::mt19937& rng, int n_in, int n_out, RandomDiagramOptions const& o = {}) {
    Diagram d;
    std::uniform_int_distribution<int> coin(0, 1);
    int const n_spiders = std::uniform_int_distribution<int>(1, std::max(1, o.max_vertices - 2))(rng);
    std::vector<VertexId> in, out, sp;
    for (int i = 0; i < n_in; ++i) in.push_back(d.add_input());
    for (int i = 0; i < n_spiders; ++i) {
        Formula cond = true;
        if (o.conditional && std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
            cond = random_condition(rng, o.vars);
            for (auto const& v : cond.vars()) d.add_variable(v);
        }
        sp.push_back(d.add_spider(coin(rng) ? VertexKind::z : VertexKind::x, random_phase(rng), cond));
    }
    for (int i = 0; i < n_out; ++i) out.push_back(d.add_output());
    auto any = [&] { return sp[std::uniform_int_distribution<std::size_t>(0, sp.size() - 1)(rng)]; };
    for (auto b : in) d.add_edge(b, any());
    for (auto b : out) d.add_edge(any(), b);
    int const extra = std::uniform_int_distribution<int>(0, n_spiders + 1)(rng);
    std::vector<std::pair<VertexId, VertexId>> inner;
    for (int i = 0; i < extra; ++i) inner.emplace_back(any(), any());
    int budget = o.max_vertices - n_spiders;
    for (auto [u, v] : inner) {
        if (budget > 0 && u != v && coin(rng)) {
            VertexId const h = d.add_h();
            d.add_edge(u, h);
            d.add_edge(h, v);
            --budget;
        } else {
            d.add_edge(u, v);
        }
    }
    return d;
}

inline std::vector<Valuation> all_valuations(std::set<std::string> const& vars) {
    std::vector<std::string> const names(vars.begin(), vars.end());
    std::vector<Valuation> out;
    for (std::size_t k = 0; k < (std::size_t(1) << names.size()); ++k) out.push_back(valuation_from_index(names, k));
    return out;
}

}  // namespace zxq::testing
