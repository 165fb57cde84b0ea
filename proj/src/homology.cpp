#include "startrace/homology.hpp"

#include <bit>
#include <stdexcept>

namespace startrace {

namespace {

bool is_constant(const Monomial& m) { return m.xdeg() == 0; }

Monomial times(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (int i = 0; i < kMaxDim; ++i) r.x[i] = static_cast<std::uint8_t>(a.x[i] + b.x[i]);
    return r;
}

void check_function(const GradedSeries& s, const char* what) {
    for (const auto& [m, c] : s.terms())
        if (m.ydeg() || m.dx || m.hbar || m.u) throw std::invalid_argument(std::string(what) + ": slots must depend on x only");
}

int degree_of(const GradedSeries& s) {
    int d = -1;
    for (const auto& [m, c] : s.terms()) {
        int k = m.form_degree();
        if (d >= 0 && k != d) return -1;
        d = k;
    }
    return d;
}

std::map<int, GradedSeries> by_degree(const GradedSeries& s) {
    std::map<int, GradedSeries> parts;
    for (const auto& [m, c] : s.terms()) parts.try_emplace(m.form_degree(), GradedSeries(s.dim(), s.truncation())).first->second.add_term(m, c);
    return parts;
}

GradedSeries d_of(const Monomial& a, int dim) {
    GradedSeries r(dim);
    GradedSeries f = GradedSeries::term(dim, a, GaussianRational(1));
    for (int i = 0; i < dim; ++i) {
        auto di = diff_x(f, i);
        if (!di.is_zero()) r += multiply(di, GradedSeries::dx(dim, i));
    }
    return r;
}

// d/dtheta_i acting from the right
GradedSeries theta_right(const GradedSeries& s, int i) {
    GradedSeries r(s.dim(), s.truncation());
    const auto bit = static_cast<std::uint16_t>(1u << i);
    const auto above = static_cast<std::uint16_t>(~((bit << 1) - 1));
    for (const auto& [m, c] : s.terms()) {
        if (!(m.dx & bit)) continue;
        Monomial n = m;
        n.dx = static_cast<std::uint16_t>(m.dx & ~bit);
        bool odd = std::popcount(static_cast<unsigned>(m.dx & above)) & 1;
        r.add_term(n, odd ? -c : c);
    }
    return r;
}

// rho^{-1} by the Neumann series under the truncation t
GradedSeries inverse_density(const GradedSeries& rho, const Truncation& t) {
    GaussianRational c0 = rho.coefficient(Monomial{});
    if (c0.is_zero()) throw std::invalid_argument("volume density must have a nonzero constant term");
    GradedSeries n = rho - GradedSeries::constant(rho.dim(), c0);
    GaussianRational inv0 = GaussianRational(1) / c0;
    GradedSeries out = GradedSeries::constant(rho.dim(), inv0, t);
    if (n.is_zero()) return out;
    if (t.x_max >= kUnbounded) throw std::invalid_argument("a non-constant volume needs a finite x truncation");
    GradedSeries step = n * (-inv0);
    GradedSeries power = out;
    for (int k = 0; k <= t.x_max; ++k) {
        power = multiply(power, step, t);
        if (power.is_zero()) break;
        out += power;
    }
    return out;
}

// sum_i d/dx^i d/dtheta_i, the constant-volume part of the BV operator
GradedSeries flat_laplacian(const GradedSeries& s) {
    GradedSeries r(s.dim(), s.truncation());
    for (int i = 0; i < s.dim(); ++i) {
        auto t = theta_derivative(s, i);
        if (!t.is_zero()) r += diff_x(t, i);
    }
    return r;
}

}  // namespace

ChainElement ChainElement::word(const std::vector<GradedSeries>& a, int u_power, const GaussianRational& c) {
    if (a.empty()) throw std::invalid_argument("a chain word needs at least one slot");
    const int dim = a[0].dim();
    for (const auto& s : a) {
        if (s.dim() != dim) throw std::invalid_argument("chain word: dimension mismatch");
        check_function(s, "chain word");
    }
    ChainElement out(dim);
    std::vector<std::pair<Word, GaussianRational>> partial{{Word{u_power, {}}, c}};
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<std::pair<Word, GaussianRational>> next;
        for (const auto& [w, v] : partial)
            for (const auto& [m, x] : a[i].terms()) {
                if (i > 0 && is_constant(m)) continue;
                Word n = w;
                n.slots.push_back(m);
                next.push_back({std::move(n), v * x});
            }
        partial = std::move(next);
    }
    for (const auto& [w, v] : partial) out.add(w, v);
    return out;
}

void ChainElement::add(const Word& w, const GaussianRational& c) {
    if (c.is_zero()) return;
    for (std::size_t i = 1; i < w.slots.size(); ++i)
        if (is_constant(w.slots[i])) return;
    auto [it, fresh] = terms_.try_emplace(w, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

ChainElement& ChainElement::operator+=(const ChainElement& o) {
    for (const auto& [w, c] : o.terms_) add(w, c);
    return *this;
}

ChainElement& ChainElement::operator-=(const ChainElement& o) {
    for (const auto& [w, c] : o.terms_) add(w, -c);
    return *this;
}

ChainElement& ChainElement::operator*=(const GaussianRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [w, v] : terms_) v *= c;
    return *this;
}

ChainElement hochschild_b(const ChainElement& c) {
    ChainElement out(c.dim());
    for (const auto& [w, v] : c.terms()) {
        const int m = static_cast<int>(w.slots.size()) - 1;
        if (m == 0) continue;
        for (int i = 0; i < m; ++i) {
            ChainElement::Word n{w.u, {}};
            for (int j = 0; j < i; ++j) n.slots.push_back(w.slots[j]);
            n.slots.push_back(times(w.slots[i], w.slots[i + 1]));
            for (int j = i + 2; j <= m; ++j) n.slots.push_back(w.slots[j]);
            out.add(n, (i & 1) ? -v : v);
        }
        ChainElement::Word n{w.u, {times(w.slots[m], w.slots[0])}};
        for (int j = 1; j < m; ++j) n.slots.push_back(w.slots[j]);
        out.add(n, (m & 1) ? -v : v);
    }
    return out;
}

ChainElement connes_B(const ChainElement& c) {
    ChainElement out(c.dim());
    for (const auto& [w, v] : c.terms()) {
        const int m = static_cast<int>(w.slots.size()) - 1;
        for (int i = 0; i <= m; ++i) {
            ChainElement::Word n{w.u, {Monomial{}}};
            for (int j = 0; j <= m; ++j) n.slots.push_back(w.slots[(i + j) % (m + 1)]);
            out.add(n, ((i * m) & 1) ? -v : v);
        }
    }
    return out;
}

ChainElement cyclic_differential(const ChainElement& c) {
    ChainElement out = hochschild_b(c);
    const ChainElement Bc = connes_B(c);
    for (const auto& [w, v] : Bc.terms()) out.add({w.u + 1, w.slots}, v);
    return out;
}

GradedSeries hkr(const ChainElement& c) {
    const int d = c.dim();
    GradedSeries out(d);
    for (const auto& [w, v] : c.terms()) {
        const int m = static_cast<int>(w.slots.size()) - 1;
        Monomial a0 = w.slots[0];
        a0.u = static_cast<std::int16_t>(w.u);
        GradedSeries term = GradedSeries::term(d, a0, v / GaussianRational(factorial(m)));
        for (int i = 1; i <= m && !term.is_zero(); ++i) term = multiply(term, d_of(w.slots[i], d));
        out += term;
    }
    return out;
}

GradedSeries theta_derivative(const GradedSeries& s, int i) {
    GradedSeries r(s.dim(), s.truncation());
    const auto bit = static_cast<std::uint16_t>(1u << i);
    for (const auto& [m, c] : s.terms()) {
        if (!(m.dx & bit)) continue;
        Monomial n = m;
        n.dx = static_cast<std::uint16_t>(m.dx & ~bit);
        bool odd = std::popcount(static_cast<unsigned>(m.dx & (bit - 1))) & 1;
        r.add_term(n, odd ? -c : c);
    }
    return r;
}

GradedSeries divergence_odd(const GradedSeries& s, const GradedSeries& volume) {
    check_function(volume, "volume");
    GradedSeries r = flat_laplacian(s);
    if (volume.size() == 1 && volume.coefficient(Monomial{}) != GaussianRational(0)) return r;
    GradedSeries inv = inverse_density(volume, s.truncation());
    for (int i = 0; i < s.dim(); ++i) {
        auto t = theta_derivative(s, i);
        auto g = diff_x(volume, i);
        if (t.is_zero() || g.is_zero()) continue;
        r += multiply(multiply(g, inv, s.truncation()), t, s.truncation());
    }
    return r;
}

GradedSeries bv_laplacian(const GradedSeries& s, const GradedSeries& volume) { return -divergence_odd(s, volume); }

MultiVector bv_divergence(const MultiVector& xi, const GradedSeries& volume) {
    return MultiVector::from_odd(divergence_odd(xi.to_odd(), volume));
}

GradedSeries schouten_odd(const GradedSeries& a, const GradedSeries& b) {
    const int d = a.dim();
    GradedSeries r(d, a.truncation().meet(b.truncation()));
    for (const auto& [p, P] : by_degree(a))
        for (const auto& [q, Q] : by_degree(b)) {
            const bool flip = ((p - 1) * (q - 1)) & 1;
            for (int i = 0; i < d; ++i) {
                auto dP = theta_right(P, i), dQ = theta_right(Q, i);
                if (!dP.is_zero()) {
                    auto xQ = diff_x(Q, i);
                    if (!xQ.is_zero()) r += multiply(dP, xQ);
                }
                if (!dQ.is_zero()) {
                    auto xP = diff_x(P, i);
                    if (!xP.is_zero()) {
                        if (flip)
                            r += multiply(dQ, xP);
                        else
                            r -= multiply(dQ, xP);
                    }
                }
            }
        }
    return r;
}

MultiVector schouten_bracket(const MultiVector& xi, const MultiVector& zeta) {
    if (xi.dim() != zeta.dim()) throw std::invalid_argument("schouten_bracket: dimension mismatch");
    return MultiVector::from_odd(schouten_odd(xi.to_odd(), zeta.to_odd()));
}

PoissonData PoissonData::constant(int dim, const std::vector<std::vector<Rational>>& pi_matrix) {
    if (static_cast<int>(pi_matrix.size()) != dim) throw std::invalid_argument("Poisson matrix has the wrong size");
    PoissonData p;
    p.dim = dim;
    p.pi = MultiVector(dim);
    for (int i = 0; i < dim; ++i) {
        if (static_cast<int>(pi_matrix[i].size()) != dim) throw std::invalid_argument("Poisson matrix has the wrong size");
        for (int j = 0; j < dim; ++j)
            if (pi_matrix[i][j] != -pi_matrix[j][i]) throw std::invalid_argument("Poisson matrix must be antisymmetric");
        for (int j = i + 1; j < dim; ++j)
            if (sgn(pi_matrix[i][j]) != 0) p.pi.add(index_mask({i, j}), GradedSeries::constant(dim, pi_matrix[i][j]));
    }
    p.h = GradedSeries(dim);
    p.volume = GradedSeries::constant(dim, 1);
    return p;
}

bool PoissonData::is_unimodular() const {
    // rho (Div_Omega pi - [h, pi]) = Div_0(rho pi) - rho [h, pi], exact on polynomials
    GradedSeries odd = pi.to_odd();
    GradedSeries lhs = flat_laplacian(multiply(volume, odd)) - multiply(volume, schouten_odd(h, odd));
    return lhs.is_zero();
}

void PoissonData::validate() const {
    if (pi.dim() != dim || h.dim() != dim || volume.dim() != dim) throw std::invalid_argument("Poisson data: dimension mismatch");
    for (const auto& [mask, c] : pi.components()) {
        if (std::popcount(mask) != 2) throw std::invalid_argument("Poisson data: pi must be a bivector");
        check_function(c, "Poisson data");
    }
    check_function(h, "Poisson data");
    check_function(volume, "Poisson data");
    GaussianRational c0 = volume.coefficient(Monomial{});
    if (!c0.is_real() || sgn(c0.re) <= 0) throw std::invalid_argument("Poisson data: volume must be positive at the origin");
    GradedSeries odd = pi.to_odd();
    if (degree_of(odd) > 0 && !schouten_odd(odd, odd).is_zero()) throw std::invalid_argument("Poisson data: [pi, pi] != 0");
    if (!is_unimodular()) throw std::invalid_argument("Poisson data: Div pi - [h, pi] != 0 (not unimodular)");
}

}  // namespace startrace
