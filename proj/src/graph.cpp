#include "startrace/graph.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace startrace {

VertexKind AdmissibleGraph::kind(int v) const {
    if (v < 0 || v >= vertex_count()) throw std::out_of_range("vertex index");
    if (v < n()) return VertexKind::Bulk;
    if (v < n() + m) return VertexKind::Boundary;
    return VertexKind::White;
}

void AdmissibleGraph::validate() const {
    if (m < 0 || w < 0) throw std::invalid_argument("negative vertex count");
    for (int ki : k)
        if (ki < 0) throw std::invalid_argument("negative out-degree");
    if (vertex_count() > 255) throw std::invalid_argument("graph too large");
    std::vector<int> out(n(), 0), white_in(w, 0);
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        if (e.src < 0 || e.src >= vertex_count() || e.tgt < 0 || e.tgt >= vertex_count())
            throw std::invalid_argument("edge endpoint out of range");
        if (kind(e.src) != VertexKind::Bulk) throw std::invalid_argument("edges may only leave bulk vertices");
        if (e.src == e.tgt) throw std::invalid_argument("self-loop");
        if (!seen.insert({e.src, e.tgt}).second) throw std::invalid_argument("repeated edge");
        out[e.src]++;
        if (kind(e.tgt) == VertexKind::White) white_in[e.tgt - n() - m]++;
    }
    for (int i = 0; i < n(); ++i)
        if (out[i] != k[i]) throw std::invalid_argument("out-degree of bulk vertex " + std::to_string(i + 1) + " differs from k");
    for (int c : white_in)
        if (c != 1) throw std::invalid_argument("white vertex without exactly one incoming edge");
}

std::vector<Edge> AdmissibleGraph::slots(int i) const {
    std::vector<Edge> s;
    for (const auto& e : edges)
        if (e.src == i) s.push_back(e);
    std::sort(s.begin(), s.end(), [](const Edge& a, const Edge& b) { return a.tgt < b.tgt; });
    return s;
}

std::string CanonicalForm::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 15]);
    }
    return s;
}

CanonicalForm canonical_form(const AdmissibleGraph& g) {
    g.validate();
    CanonicalForm c;
    auto& b = c.bytes;
    b.push_back(static_cast<std::uint8_t>(g.n()));
    b.push_back(static_cast<std::uint8_t>(g.m));
    b.push_back(static_cast<std::uint8_t>(g.w));
    for (int ki : g.k) b.push_back(static_cast<std::uint8_t>(ki));
    for (int i = 0; i < g.n(); ++i) {
        std::vector<int> black;
        int whites = 0;
        for (const auto& e : g.edges) {
            if (e.src != i) continue;
            if (g.kind(e.tgt) == VertexKind::White)
                ++whites;
            else
                black.push_back(e.tgt);
        }
        std::sort(black.begin(), black.end());
        b.push_back(static_cast<std::uint8_t>(whites));
        for (int t : black) b.push_back(static_cast<std::uint8_t>(t));
    }
    return c;
}

namespace {

void choose(const std::vector<int>& pool, int r, std::size_t from, std::vector<int>& cur,
            std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == r) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = from; i < pool.size(); ++i) {
        cur.push_back(pool[i]);
        choose(pool, r, i + 1, cur, out);
        cur.pop_back();
    }
}

struct Enumerator {
    const std::vector<int>& k;
    int m;
    int w;
    std::vector<std::vector<int>> black;  // chosen black targets per bulk vertex
    std::vector<int> whites;
    std::map<CanonicalForm, AdmissibleGraph>& out;

    void run(int i, int whites_left) {
        const int n = static_cast<int>(k.size());
        if (i == n) {
            if (whites_left != 0) return;
            AdmissibleGraph g;
            g.k = k;
            g.m = m;
            g.w = w;
            int next_white = n + m;
            for (int v = 0; v < n; ++v) {
                for (int t : black[v]) g.edges.push_back({v, t});
                for (int c = 0; c < whites[v]; ++c) g.edges.push_back({v, next_white++});
            }
            out.emplace(canonical_form(g), std::move(g));
            return;
        }
        std::vector<int> pool;
        for (int t = 0; t < n + m; ++t)
            if (t != i) pool.push_back(t);
        for (int wi = 0; wi <= std::min(k[i], whites_left); ++wi) {
            const int nb = k[i] - wi;
            if (nb > static_cast<int>(pool.size())) continue;
            std::vector<std::vector<int>> subsets;
            std::vector<int> cur;
            choose(pool, nb, 0, cur, subsets);
            for (auto& s : subsets) {
                black[i] = s;
                whites[i] = wi;
                run(i + 1, whites_left - wi);
            }
        }
    }
};

}  // namespace

std::vector<AdmissibleGraph> enumerate(const std::vector<int>& k, int m, int max_white) {
    for (int ki : k)
        if (ki < 0) throw std::invalid_argument("negative out-degree");
    if (m < 0 || max_white < 0) throw std::invalid_argument("negative vertex count");
    std::map<CanonicalForm, AdmissibleGraph> found;
    for (int w = 0; w <= max_white; ++w) {
        Enumerator e{k, m, w, std::vector<std::vector<int>>(k.size()), std::vector<int>(k.size(), 0), found};
        e.run(0, w);
    }
    std::vector<AdmissibleGraph> out;
    for (auto& [c, g] : found) out.push_back(std::move(g));
    return out;
}

AdmissibleGraph wheel(int j) {
    if (j < 2) throw std::invalid_argument("wheel needs at least two cycle vertices");
    AdmissibleGraph g;
    g.k.assign(j, 1);
    g.k.push_back(j);
    for (int i = 0; i < j; ++i) g.edges.push_back({i, (i + 1) % j});
    for (int i = 0; i < j; ++i) g.edges.push_back({j, i});
    g.validate();
    return g;
}

namespace {

struct Assignment {
    std::vector<std::vector<Edge>> slots;
    std::vector<std::vector<int>> index;  // index[i][s] for slot s of bulk vertex i
    std::vector<GradedSeries> coeff;      // signed component of xi_i for the current indices
};

GradedSeries diff_all(GradedSeries f, const std::vector<int>& idx) {
    for (int l : idx) {
        if (f.is_zero()) break;
        f = diff_x(f, l);
    }
    return f;
}

}  // namespace

MultiVector evaluate_VGamma(const AdmissibleGraph& g, const std::vector<MultiVector>& xi,
                            const std::vector<GradedSeries>& a) {
    g.validate();
    const int n = g.n();
    if (static_cast<int>(xi.size()) != n) throw std::invalid_argument("evaluate_VGamma: one multivector per bulk vertex");
    if (static_cast<int>(a.size()) != g.m) throw std::invalid_argument("evaluate_VGamma: one function per boundary vertex");
    int dim = -1;
    for (const auto& x : xi) dim = dim < 0 ? x.dim() : dim;
    for (const auto& f : a) dim = dim < 0 ? f.dim() : dim;
    if (dim < 0) dim = 1;
    for (int i = 0; i < n; ++i) {
        if (xi[i].dim() != dim) throw std::invalid_argument("evaluate_VGamma: dimension mismatch");
        for (const auto& [mask, c] : xi[i].components())
            if (std::popcount(mask) != g.k[i])
                throw std::invalid_argument("evaluate_VGamma: multivector degree differs from the out-degree");
    }
    for (const auto& f : a)
        if (f.dim() != dim) throw std::invalid_argument("evaluate_VGamma: dimension mismatch");

    // per bulk vertex: every ordered index tuple with its signed component
    std::vector<std::vector<std::pair<std::vector<int>, GradedSeries>>> choices(n);
    for (int i = 0; i < n; ++i) {
        for (const auto& [mask, c] : xi[i].components()) {
            std::vector<int> idx = mask_indices(mask);
            do {
                GradedSeries s = c;
                if (sort_sign(idx) < 0) s *= GaussianRational(-1);
                choices[i].push_back({idx, std::move(s)});
            } while (std::next_permutation(idx.begin(), idx.end()));
        }
        if (choices[i].empty()) return MultiVector(dim);
    }
    std::vector<std::vector<Edge>> slots(n);
    for (int i = 0; i < n; ++i) slots[i] = g.slots(i);

    MultiVector result(dim);
    std::map<std::uint16_t, GradedSeries> acc;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
        // derivative indices landing on each black vertex
        std::vector<std::vector<int>> incoming(n + g.m);
        std::vector<int> thetas;
        for (int i = 0; i < n; ++i) {
            const auto& idx = choices[i][pick[i]].first;
            for (std::size_t s = 0; s < slots[i].size(); ++s) {
                int t = slots[i][s].tgt;
                if (g.kind(t) == VertexKind::White)
                    thetas.push_back(idx[s]);
                else
                    incoming[t].push_back(idx[s]);
            }
        }
        int sign = sort_sign(thetas);
        if (sign != 0) {
            GradedSeries term = GradedSeries::constant(dim, GaussianRational(sign));
            for (int v = 0; v < n + g.m && !term.is_zero(); ++v) {
                const GradedSeries& base = v < n ? choices[v][pick[v]].second : a[v - n];
                term = multiply(term, diff_all(base, incoming[v]));
            }
            if (!term.is_zero()) {
                std::vector<int> sorted = thetas;
                std::sort(sorted.begin(), sorted.end());
                auto mask = index_mask(sorted);
                auto it = acc.try_emplace(mask, GradedSeries(dim)).first;
                it->second += term;
            }
        }
        int p = n - 1;
        while (p >= 0 && ++pick[p] == choices[p].size()) pick[p--] = 0;
        if (p < 0) break;
    }
    for (auto& [mask, c] : acc)
        if (!c.is_zero()) result.add(mask, c);
    return result;
}

std::string to_dot(const AdmissibleGraph& g) {
    g.validate();
    std::ostringstream o;
    o << "digraph G {\n";
    for (int v = 0; v < g.n(); ++v)
        o << "  v" << v << " [shape=circle, style=filled, fillcolor=black, fontcolor=white, label=\"" << v + 1 << "\"];\n";
    if (g.m > 0) {
        o << "  { rank=same;";
        for (int b = 0; b < g.m; ++b) o << " b" << b << ";";
        o << " }\n";
        for (int b = 0; b < g.m; ++b) o << "  b" << b << " [shape=square, label=\"a" << b << "\"];\n";
    }
    for (int c = 0; c < g.w; ++c) o << "  w" << c << " [shape=circle, label=\"\"];\n";
    auto name = [&](int v) {
        switch (g.kind(v)) {
            case VertexKind::Bulk: return "v" + std::to_string(v);
            case VertexKind::Boundary: return "b" + std::to_string(v - g.n());
            default: return "w" + std::to_string(v - g.n() - g.m);
        }
    };
    std::vector<Edge> edges = g.edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& e : edges) o << "  " << name(e.src) << " -> " << name(e.tgt) << ";\n";
    o << "}\n";
    return o.str();
}

}  // namespace startrace
