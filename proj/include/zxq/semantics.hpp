#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zxq/diagram.hpp"
#include "zxq/error.hpp"

namespace zxq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct EvalOptions {
    int cap = 16;            ///< maximum rank of any intermediate tensor
    int max_variables = 20;  ///< maximum |S| for channel evaluation
};

/// e^{iα}, exact for multiples of π/2.
inline Complex phase_factor(Phase const& p) {
    if (p.den() == 1) return p.num() == 0 ? Complex{1, 0} : Complex{-1, 0};
    if (p.den() == 2) return p.num() == 1 ? Complex{0, 1} : Complex{0, -1};
    return std::polar(1.0, p.radians());
}

/// Entries of a spider tensor with `legs` legs; bit (legs-1-i) of the index is leg i.
/// Z: |0…0⟩⟨0…0| + e^{iα}|1…1⟩⟨1…1|.  X: |+…+⟩⟨+…+| + e^{iα}|−…−⟩⟨−…−|.
inline std::vector<Complex> spider_entries(VertexKind kind, Phase const& phase, int legs) {
    std::size_t const n = std::size_t{1} << legs;
    Complex const w = phase_factor(phase);
    std::vector<Complex> t(n, Complex{0, 0});
    if (kind == VertexKind::z) {
        if (legs == 0) return {Complex{1, 0} + w};
        t[0] += 1.0;
        t[n - 1] += w;
        return t;
    }
    if (kind == VertexKind::x) {
        double const norm = std::pow(M_SQRT1_2, legs);
        for (std::size_t i = 0; i < n; ++i) {
            bool const odd = __builtin_popcountll(i) & 1;
            t[i] = norm * (Complex{1, 0} + (odd ? -w : w));
        }
        return t;
    }
    if (kind == VertexKind::h) {
        if (legs != 2) throw Error(ErrorKind::invalid_argument, "H vertex must have exactly 2 legs");
        return {M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2};
    }
    throw Error(ErrorKind::invalid_argument, "boundary vertices have no tensor");
}

/// Entries smaller than this fraction of the same contraction run on absolute
/// values are rounding noise.
inline constexpr double noise_floor = 1e-12;

/// The linear map of a single unconditional vertex with m input legs and n
/// output legs, as a 2^n × 2^m matrix.
inline Matrix vertex_matrix(Vertex const& v, int m, int n) {
    if (v.conditional())
        throw Error(ErrorKind::invalid_argument, "conditional vertex: apply a valuation before evaluation");
    if (v.kind == VertexKind::h && m + n != 2) throw Error(ErrorKind::invalid_argument, "H vertex must have 2 legs");
    auto const t = spider_entries(v.kind, v.phase, m + n);
    Matrix out(Eigen::Index{1} << n, Eigen::Index{1} << m);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = t[(static_cast<std::size_t>(r) << m) | c];
    return out;
}

namespace detail {

/// Dense tensor; legs[0] is the most significant bit of the flat index.
struct Tensor {
    std::vector<int> legs;
    std::vector<Complex> data;
};

inline Tensor permute(Tensor const& t, std::vector<int> const& order) {
    if (order == t.legs) return t;
    int const r = static_cast<int>(order.size());
    // source bit (counted from the least significant end) of each destination bit
    std::vector<int> src_bit(r);
    for (int i = 0; i < r; ++i) {
        auto it = std::find(t.legs.begin(), t.legs.end(), order[i]);
        src_bit[r - 1 - i] = r - 1 - static_cast<int>(it - t.legs.begin());
    }
    Tensor out{order, std::vector<Complex>(t.data.size())};
    for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
        std::size_t src = 0;
        for (int b = 0; b < r; ++b) src |= ((idx >> b) & 1u) << src_bit[b];
        out.data[idx] = t.data[src];
    }
    return out;
}

/// Sums over every label that occurs twice in the same tensor.
inline Tensor self_trace(Tensor t) {
    for (;;) {
        int p = -1, q = -1;
        for (std::size_t i = 0; i < t.legs.size() && p < 0; ++i)
            for (std::size_t j = i + 1; j < t.legs.size(); ++j)
                if (t.legs[i] == t.legs[j]) {
                    p = static_cast<int>(i);
                    q = static_cast<int>(j);
                    break;
                }
        if (p < 0) return t;
        int const r = static_cast<int>(t.legs.size());
        int const bp = r - 1 - p, bq = r - 1 - q;
        Tensor out;
        for (int i = 0; i < r; ++i)
            if (i != p && i != q) out.legs.push_back(t.legs[i]);
        out.data.assign(std::size_t{1} << (r - 2), Complex{0, 0});
        for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
            if (((idx >> bp) & 1u) != ((idx >> bq) & 1u)) continue;
            std::size_t dst = 0;
            int k = 0;
            for (int b = 0; b < r; ++b) {
                if (b == bp || b == bq) continue;
                dst |= ((idx >> b) & 1u) << k++;
            }
            out.data[dst] += t.data[idx];
        }
        t = std::move(out);
    }
}

inline std::vector<int> shared_legs(std::vector<int> const& a, std::vector<int> const& b) {
    std::vector<int> s;
    for (int l : a)
        if (std::find(b.begin(), b.end(), l) != b.end()) s.push_back(l);
    return s;
}

inline Tensor contract(Tensor const& a, Tensor const& b) {
    auto const shared = shared_legs(a.legs, b.legs);
    std::vector<int> free_a, free_b;
    for (int l : a.legs)
        if (std::find(shared.begin(), shared.end(), l) == shared.end()) free_a.push_back(l);
    for (int l : b.legs)
        if (std::find(shared.begin(), shared.end(), l) == shared.end()) free_b.push_back(l);
    std::vector<int> order_a = free_a;
    order_a.insert(order_a.end(), shared.begin(), shared.end());
    std::vector<int> order_b = shared;
    order_b.insert(order_b.end(), free_b.begin(), free_b.end());
    Tensor const pa = permute(a, order_a);
    Tensor const pb = permute(b, order_b);

    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Index const rows = Eigen::Index{1} << free_a.size();
    Eigen::Index const inner = Eigen::Index{1} << shared.size();
    Eigen::Index const cols = Eigen::Index{1} << free_b.size();
    Eigen::Map<RowMajor const> ma(pa.data.data(), rows, inner);
    Eigen::Map<RowMajor const> mb(pb.data.data(), inner, cols);
    Tensor out;
    out.legs = free_a;
    out.legs.insert(out.legs.end(), free_b.begin(), free_b.end());
    out.data.resize(static_cast<std::size_t>(rows * cols));
    Eigen::Map<RowMajor> mc(out.data.data(), rows, cols);
    mc.noalias() = ma * mb;
    return out;
}

/// The structure of a diagram's tensor network together with a fixed pairwise
/// contraction order. Phases enter only when the plan is executed, so one plan
/// serves every valuation of a conditional diagram.
class ContractionPlan {
public:
    ContractionPlan(Diagram const& d, int cap) {
        std::map<VertexId, std::vector<int>> legs;
        std::map<VertexId, int> boundary_label;
        int label = 0;
        for (auto const& e : d.edges()) {
            int const l = label++;
            bool const ba = d.kind(e.a) == VertexKind::boundary;
            bool const bb = d.kind(e.b) == VertexKind::boundary;
            if (ba && bb) {
                if (e.is_loop()) throw Error(ErrorKind::invalid_argument, "boundary with a self-loop");
                int const l2 = label++;
                boundary_label[e.a] = l;
                boundary_label[e.b] = l2;
                wires_.push_back({l, l2});
                continue;
            }
            if (ba) boundary_label[e.a] = l;
            else legs[e.a].push_back(l);
            if (bb) boundary_label[e.b] = l;
            else legs[e.b].push_back(l);
        }
        for (auto const& [id, v] : d.vertices()) {
            if (v.kind == VertexKind::boundary) continue;
            vertices_.push_back(id);
            // a self-loop on a spider traces out to the same spider with two fewer legs
            initial_legs_.push_back(is_spider(v.kind) ? traced(legs[id]) : legs[id]);
        }
        for (auto b : d.outputs()) open_order_.push_back(boundary_label_at(boundary_label, b));
        for (auto b : d.inputs()) open_order_.push_back(boundary_label_at(boundary_label, b));
        n_out_ = static_cast<int>(d.outputs().size());
        n_in_ = static_cast<int>(d.inputs().size());
        plan(cap);
    }

    int width() const { return width_; }
    std::vector<VertexId> const& vertices() const { return vertices_; }

    /// Executes the plan given the (unconditional) label of each vertex.
    /// Entries below the rounding-noise floor are set to zero.
    Matrix run(Diagram const& d) const {
        std::vector<std::vector<Complex>> leaves;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            auto const& v = d.vertex(vertices_[i]);
            leaves.push_back(spider_entries(v.kind, v.phase, static_cast<int>(initial_legs_[i].size())));
        }
        Matrix m = execute([&](std::size_t i) { return leaves[i]; });
        Matrix const scale = execute([&](std::size_t i) {
            auto t = leaves[i];
            for (auto& x : t) x = std::abs(x);
            return t;
        });
        for (Eigen::Index k = 0; k < m.size(); ++k)
            if (std::abs(m.data()[k]) <= noise_floor * scale.data()[k].real()) m.data()[k] = 0;
        return m;
    }

private:
    template <class Leaf>
    Matrix execute(Leaf leaf) const {
        std::vector<Tensor> pool;
        for (std::size_t i = 0; i < vertices_.size(); ++i) pool.push_back(self_trace(Tensor{initial_legs_[i], leaf(i)}));
        for (auto const& w : wires_) pool.push_back(Tensor{{w.first, w.second}, {1, 0, 0, 1}});
        std::vector<bool> alive(pool.size(), true);
        for (auto const& [i, j] : steps_) {
            pool.push_back(self_trace(contract(pool[i], pool[j])));
            alive[i] = alive[j] = false;
            alive.push_back(true);
        }
        Tensor result{{}, {Complex{1, 0}}};
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (alive[i]) result = contract(result, pool[i]);
        result = permute(result, open_order_);
        Matrix m(Eigen::Index{1} << n_out_, Eigen::Index{1} << n_in_);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                m(r, c) = result.data[(static_cast<std::size_t>(r) << n_in_) | static_cast<std::size_t>(c)];
        return m;
    }

    static int boundary_label_at(std::map<VertexId, int> const& m, VertexId b) {
        auto it = m.find(b);
        if (it == m.end()) throw Error(ErrorKind::invalid_argument, "boundary " + std::to_string(b) + " has no edge");
        return it->second;
    }

    static std::vector<int> traced(std::vector<int> legs) {
        std::vector<int> out;
        for (int l : legs)
            if (std::count(legs.begin(), legs.end(), l) == 1) out.push_back(l);
        return out;
    }

    static std::vector<int> merged(std::vector<int> const& a, std::vector<int> const& b) {
        std::vector<int> all = a;
        all.insert(all.end(), b.begin(), b.end());
        return traced(all);
    }

    // Greedy: always contract the pair sharing a leg whose result has the fewest legs.
    void plan(int cap) {
        std::vector<std::vector<int>> pool;
        for (auto const& l : initial_legs_) {
            width_ = std::max(width_, static_cast<int>(l.size()));
            pool.push_back(traced(l));
        }
        for (auto const& w : wires_) pool.push_back({w.first, w.second});
        std::vector<bool> alive(pool.size(), true);
        std::map<int, std::vector<int>> owners;
        for (std::size_t i = 0; i < pool.size(); ++i)
            for (int l : pool[i]) owners[l].push_back(static_cast<int>(i));

        for (;;) {
            int best_i = -1, best_j = -1;
            std::size_t best_rank = 0, best_size = 0;
            for (auto const& [l, own] : owners) {
                if (own.size() != 2) continue;
                int const i = std::min(own[0], own[1]), j = std::max(own[0], own[1]);
                std::size_t const rank = merged(pool[i], pool[j]).size();
                std::size_t const size = std::max(pool[i].size(), pool[j].size());
                if (best_i < 0 || rank < best_rank || (rank == best_rank && size < best_size) ||
                    (rank == best_rank && size == best_size && std::pair(i, j) < std::pair(best_i, best_j))) {
                    best_i = i;
                    best_j = j;
                    best_rank = rank;
                    best_size = size;
                }
            }
            if (best_i < 0) break;
            width_ = std::max(width_, static_cast<int>(best_rank));
            steps_.emplace_back(best_i, best_j);
            auto const result = merged(pool[best_i], pool[best_j]);
            int const k = static_cast<int>(pool.size());
            for (int side : {best_i, best_j})
                for (int l : pool[side]) {
                    auto it = owners.find(l);
                    if (it == owners.end()) continue;
                    if (std::find(result.begin(), result.end(), l) == result.end()) {
                        owners.erase(it);
                        continue;
                    }
                    for (int& o : it->second)
                        if (o == side) o = k;
                }
            alive[best_i] = alive[best_j] = false;
            pool.push_back(result);
            alive.push_back(true);
        }
        // disconnected pieces are joined by outer products at the end
        int open = 0;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (alive[i]) open += static_cast<int>(pool[i].size());
        width_ = std::max(width_, open);
        if (width_ > cap) throw CapExceeded(width_, cap);
    }

    std::vector<VertexId> vertices_;
    std::vector<std::vector<int>> initial_legs_;
    std::vector<std::pair<int, int>> wires_;
    std::vector<int> open_order_;
    std::vector<std::pair<int, int>> steps_;
    int n_in_ = 0;
    int n_out_ = 0;
    int width_ = 0;
};

}  // namespace detail

/// Matrix of an unconditional diagram: rows are indexed by outputs, columns by
/// inputs, the first boundary being the most significant bit.
inline Matrix eval_matrix(Diagram const& d, EvalOptions const& opt = {}) {
    if (!d.is_unconditional())
        throw Error(ErrorKind::invalid_argument, "eval_matrix needs an unconditional diagram; apply a valuation");
    if (auto v = validate(d); !v.empty()) throw Error(ErrorKind::invalid_argument, "invalid diagram: " + v.front());
    return detail::ContractionPlan(d, opt.cap).run(d);
}

/// Kraus presentation ρ ↦ Σ_v K_v ρ K_v†, one operator per valuation of the variables.
struct KrausChannel {
    std::vector<std::string> variables;
    std::map<Valuation, Matrix> kraus;

    Eigen::Index rows() const { return kraus.begin()->second.rows(); }
    Eigen::Index cols() const { return kraus.begin()->second.cols(); }
};

/// Valuation number k assigns bit i of k to variables[i].
inline Valuation valuation_from_index(std::vector<std::string> const& vars, std::size_t k) {
    Valuation v;
    for (std::size_t i = 0; i < vars.size(); ++i) v[vars[i]] = (k >> i) & 1u;
    return v;
}

inline KrausChannel eval_channel(Diagram const& d, EvalOptions const& opt = {}) {
    if (auto v = validate(d); !v.empty()) throw Error(ErrorKind::invalid_argument, "invalid diagram: " + v.front());
    KrausChannel ch;
    ch.variables.assign(d.variables().begin(), d.variables().end());
    if (static_cast<int>(ch.variables.size()) > opt.max_variables)
        throw Error(ErrorKind::too_many_variables, "diagram has " + std::to_string(ch.variables.size()) +
                                                       " variables, cap is " + std::to_string(opt.max_variables));
    detail::ContractionPlan const plan(d, opt.cap);
    std::size_t const n = std::size_t{1} << ch.variables.size();
    for (std::size_t k = 0; k < n; ++k) {
        Valuation const val = valuation_from_index(ch.variables, k);
        ch.kraus.emplace(val, plan.run(apply_valuation(d, val)));
    }
    return ch;
}

inline KrausChannel channel_of(Matrix const& m) {
    KrausChannel ch;
    ch.kraus.emplace(Valuation{}, m);
    return ch;
}

inline KrausChannel channel_of(std::vector<Matrix> const& ops) {
    KrausChannel ch;
    for (std::size_t k = 0; k < ops.size(); ++k) ch.kraus.emplace(Valuation{{"k" + std::to_string(k), true}}, ops[k]);
    return ch;
}

inline double max_abs(Matrix const& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Outcome of a scalar-multiple comparison: `scalar` is the fitted factor and
/// `distance` the residual relative to the first operand's largest entry.
struct Comparison {
    Complex scalar{1, 0};
    double distance = 0;
    bool valid = true;  ///< false when no nonzero scalar can exist (e.g. one side zero)
};

inline Comparison compare_matrices(Matrix const& m1, Matrix const& m2, bool exact = false) {
    if (m1.rows() != m2.rows() || m1.cols() != m2.cols())
        throw Error(ErrorKind::invalid_argument, "shape mismatch: " + std::to_string(m1.rows()) + "x" +
                                                     std::to_string(m1.cols()) + " vs " + std::to_string(m2.rows()) +
                                                     "x" + std::to_string(m2.cols()));
    double const s1 = max_abs(m1), s2 = max_abs(m2);
    if (s1 == 0 && s2 == 0) return {};
    if (s1 == 0 || s2 == 0) return {Complex{0, 0}, 1.0, false};
    Complex lambda{1, 0};
    if (!exact) {
        Eigen::Index r = 0, c = 0;
        m2.cwiseAbs().maxCoeff(&r, &c);
        lambda = m1(r, c) / m2(r, c);
    }
    return {lambda, max_abs(m1 - lambda * m2) / s1, true};
}

/// λ ≠ 0 with m1 ≈ λ·m2 (entrywise, relative to m1's largest entry), or nullopt.
inline std::optional<Complex> proportional_equal(Matrix const& m1, Matrix const& m2, double tol = 1e-9,
                                                 bool exact = false) {
    auto const c = compare_matrices(m1, m2, exact);
    if (!c.valid || c.distance > tol) return std::nullopt;
    return c.scalar;
}

namespace detail {

/// Columns are vec(K) with index (input, output), so that Choi = V V†.
inline Matrix choi_factor(KrausChannel const& c) {
    Eigen::Index const dim = c.rows() * c.cols();
    std::vector<Matrix const*> ops;
    for (auto const& [_, k] : c.kraus)
        if (max_abs(k) > 0) ops.push_back(&k);
    Matrix v = Matrix::Zero(dim, static_cast<Eigen::Index>(ops.size()));
    for (std::size_t k = 0; k < ops.size(); ++k) {
        Matrix const& m = *ops[k];
        for (Eigen::Index i = 0; i < m.cols(); ++i)
            for (Eigen::Index a = 0; a < m.rows(); ++a) v(i * m.rows() + a, static_cast<Eigen::Index>(k)) = m(a, i);
    }
    return v;
}

}  // namespace detail

/// Choi matrix Σ_ij E_ij ⊗ Λ(E_ij).
inline Matrix choi_matrix(KrausChannel const& c) {
    Matrix const v = detail::choi_factor(c);
    return v * v.adjoint();
}

/// Channels with a Choi matrix of at most this dimension are compared entrywise;
/// larger ones by an orthogonalised Frobenius residual.
inline constexpr Eigen::Index explicit_choi_limit = 1024;

inline Comparison compare_channels(KrausChannel const& c1, KrausChannel const& c2, bool exact = false) {
    if (c1.rows() != c2.rows() || c1.cols() != c2.cols())
        throw Error(ErrorKind::invalid_argument, "channel dimension mismatch");
    Matrix const v1 = detail::choi_factor(c1);
    Matrix const v2 = detail::choi_factor(c2);
    // least-squares fit of μ in C1 ≈ μ C2:  μ = tr(C2 C1) / tr(C2 C2)
    double const cross = (v2.adjoint() * v1).squaredNorm();
    double const self2 = (v2.adjoint() * v2).squaredNorm();
    double const self1 = (v1.adjoint() * v1).squaredNorm();
    if (self1 == 0 && self2 == 0) return {};
    if (self1 == 0 || self2 == 0) return {Complex{0, 0}, 1.0, false};
    double const mu = exact ? 1.0 : cross / self2;
    if (mu <= 0) return {Complex{mu, 0}, 1.0, false};

    Eigen::Index const dim = v1.rows();
    if (dim <= explicit_choi_limit) {
        Matrix const ch1 = v1 * v1.adjoint();
        Matrix const ch2 = v2 * v2.adjoint();
        return {Complex{mu, 0}, max_abs(ch1 - mu * ch2) / max_abs(ch1), true};
    }
    Matrix w(dim, v1.cols() + v2.cols());
    w << v1, std::sqrt(mu) * v2;
    Eigen::HouseholderQR<Matrix> qr(w);
    Eigen::Index const r = std::min(w.rows(), w.cols());
    Matrix const rr = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    Matrix const r1 = rr.leftCols(v1.cols());
    Matrix const r2 = rr.rightCols(v2.cols());
    Matrix const diff = r1 * r1.adjoint() - r2 * r2.adjoint();
    return {Complex{mu, 0}, diff.norm() / std::sqrt(self1), true};
}

/// μ > 0 with Choi(c1) ≈ μ·Choi(c2), or nullopt.
inline std::optional<double> channel_equal(KrausChannel const& c1, KrausChannel const& c2, double tol = 1e-9,
                                           bool exact = false) {
    auto const c = compare_channels(c1, c2, exact);
    if (!c.valid || c.distance > tol) return std::nullopt;
    return c.scalar.real();
}

}  // namespace zxq
