#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "zxq/diagram.hpp"

namespace zxq {

enum class IsoResult { equal, distinct, unknown };

namespace detail {

struct IsoGraph {
    std::vector<VertexId> ids;
    std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbour index, multiplicity)
    std::vector<int> loops;
    std::map<std::pair<int, int>, int> mult;
};

inline IsoGraph iso_graph(Diagram const& d) {
    IsoGraph g;
    std::map<VertexId, int> index;
    for (auto const& [id, _] : d.vertices()) {
        index[id] = static_cast<int>(g.ids.size());
        g.ids.push_back(id);
    }
    g.adj.resize(g.ids.size());
    g.loops.assign(g.ids.size(), 0);
    for (auto const& e : d.edges()) {
        int const a = index.at(e.a), b = index.at(e.b);
        if (a == b) {
            ++g.loops[a];
        } else {
            ++g.mult[{a, b}];
            ++g.mult[{b, a}];
        }
    }
    for (auto const& [ab, m] : g.mult) g.adj[ab.first].emplace_back(ab.second, m);
    return g;
}

class IsoSearch {
public:
    IsoSearch(Diagram const& d1, Diagram const& d2, long budget)
        : d1_(d1), d2_(d2), g1_(iso_graph(d1)), g2_(iso_graph(d2)), budget_(budget) {}

    IsoResult run() {
        if (d1_.vertex_count() != d2_.vertex_count() || d1_.edge_count() != d2_.edge_count() ||
            d1_.inputs().size() != d2_.inputs().size() || d1_.outputs().size() != d2_.outputs().size())
            return IsoResult::distinct;
        std::vector<int> c1, c2;
        if (!initial_colours(c1, c2)) return IsoResult::distinct;
        return search(c1, c2);
    }

private:
    std::string condition_key(Formula const& f) const {
        if (f.is_true()) return "T";
        if (cond_vars_.size() > static_cast<std::size_t>(max_truth_table_vars)) return f.str();
        std::string key;
        for (auto w : truth_table(f, cond_vars_)) key += std::to_string(w) + ",";
        return key;
    }

    std::string label(Diagram const& d, VertexId id) const {
        auto const& v = d.vertex(id);
        std::string s(1, kind_letter(v.kind));
        if (is_spider(v.kind)) s += ":" + v.phase.str() + ":" + condition_key(v.cond);
        for (std::size_t i = 0; i < d.inputs().size(); ++i)
            if (d.inputs()[i] == id) s += ":in" + std::to_string(i);
        for (std::size_t i = 0; i < d.outputs().size(); ++i)
            if (d.outputs()[i] == id) s += ":out" + std::to_string(i);
        return s;
    }

    bool initial_colours(std::vector<int>& c1, std::vector<int>& c2) {
        std::set<std::string> vars;
        for (auto const* d : {&d1_, &d2_})
            for (auto const& [_, v] : d->vertices()) v.cond.collect_vars(vars);
        cond_vars_.assign(vars.begin(), vars.end());

        std::map<std::string, int> palette;
        std::vector<std::string> l1, l2;
        for (std::size_t i = 0; i < g1_.ids.size(); ++i)
            l1.push_back(label(d1_, g1_.ids[i]) + "/" + std::to_string(g1_.loops[i]));
        for (std::size_t i = 0; i < g2_.ids.size(); ++i)
            l2.push_back(label(d2_, g2_.ids[i]) + "/" + std::to_string(g2_.loops[i]));
        for (auto const& s : l1) palette.emplace(s, 0);
        for (auto const& s : l2) palette.emplace(s, 0);
        int next = 0;
        for (auto& [_, c] : palette) c = next++;
        for (auto const& s : l1) c1.push_back(palette.at(s));
        for (auto const& s : l2) c2.push_back(palette.at(s));
        return refine(c1, c2);
    }

    static std::vector<int> histogram(std::vector<int> const& c, int n) {
        std::vector<int> h(n, 0);
        for (int x : c) ++h[x];
        return h;
    }

    // Colour refinement over both graphs jointly; false if the colour classes diverge.
    bool refine(std::vector<int>& c1, std::vector<int>& c2) const {
        for (;;) {
            using Sig = std::pair<int, std::vector<std::pair<int, int>>>;
            auto signature = [](IsoGraph const& g, std::vector<int> const& c, std::size_t i) {
                Sig s{c[i], {}};
                for (auto [j, m] : g.adj[i]) s.second.emplace_back(c[j], m);
                std::sort(s.second.begin(), s.second.end());
                return s;
            };
            std::map<Sig, int> palette;
            std::vector<Sig> s1, s2;
            for (std::size_t i = 0; i < c1.size(); ++i) s1.push_back(signature(g1_, c1, i));
            for (std::size_t i = 0; i < c2.size(); ++i) s2.push_back(signature(g2_, c2, i));
            for (auto const& s : s1) palette.emplace(s, 0);
            for (auto const& s : s2) palette.emplace(s, 0);
            int next = 0;
            for (auto& [_, c] : palette) c = next++;
            std::vector<int> n1, n2;
            for (auto const& s : s1) n1.push_back(palette.at(s));
            for (auto const& s : s2) n2.push_back(palette.at(s));
            if (histogram(n1, next) != histogram(n2, next)) return false;
            int const before = static_cast<int>(std::set<int>(c1.begin(), c1.end()).size());
            c1 = std::move(n1);
            c2 = std::move(n2);
            if (next == before) return true;
        }
    }

    bool verify(std::vector<int> const& c1, std::vector<int> const& c2) const {
        std::map<int, int> by_colour;
        for (std::size_t j = 0; j < c2.size(); ++j) by_colour[c2[j]] = static_cast<int>(j);
        std::vector<int> map(c1.size());
        for (std::size_t i = 0; i < c1.size(); ++i) map[i] = by_colour.at(c1[i]);
        for (std::size_t i = 0; i < c1.size(); ++i)
            if (g1_.loops[i] != g2_.loops[map[i]]) return false;
        for (auto const& [ab, m] : g1_.mult) {
            auto it = g2_.mult.find({map[ab.first], map[ab.second]});
            if (it == g2_.mult.end() || it->second != m) return false;
        }
        return true;
    }

    IsoResult search(std::vector<int> const& c1, std::vector<int> const& c2) {
        if (--budget_ < 0) return IsoResult::unknown;
        int const n = static_cast<int>(c1.size());
        int const colours = n == 0 ? 0 : *std::max_element(c1.begin(), c1.end()) + 1;
        auto const hist = histogram(c1, colours);
        int target = -1;
        for (int c = 0; c < colours; ++c)
            if (hist[c] > 1 && (target < 0 || hist[c] < hist[target])) target = c;
        if (target < 0) return verify(c1, c2) ? IsoResult::equal : IsoResult::distinct;

        int const v1 = static_cast<int>(std::find(c1.begin(), c1.end(), target) - c1.begin());
        bool exhausted = false;
        for (int v2 = 0; v2 < n; ++v2) {
            if (c2[v2] != target) continue;
            std::vector<int> n1 = c1, n2 = c2;
            n1[v1] = colours;
            n2[v2] = colours;
            if (!refine(n1, n2)) continue;
            auto const r = search(n1, n2);
            if (r == IsoResult::equal) return r;
            if (r == IsoResult::unknown) exhausted = true;
        }
        return exhausted ? IsoResult::unknown : IsoResult::distinct;
    }

    Diagram const& d1_;
    Diagram const& d2_;
    IsoGraph g1_, g2_;
    std::vector<std::string> cond_vars_;
    long budget_;
};

}  // namespace detail

/// Graph isomorphism preserving kinds, phases, conditions up to equivalence,
/// edge multiplicities, and boundary order. `budget` bounds search nodes.
inline IsoResult isomorphic(Diagram const& d1, Diagram const& d2, long budget = 100000) {
    return detail::IsoSearch(d1, d2, budget).run();
}

inline bool iso_equal(Diagram const& d1, Diagram const& d2) { return isomorphic(d1, d2) == IsoResult::equal; }

}  // namespace zxq
