#include "startrace/weyl.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace startrace {

RationalMatrix invert(const RationalMatrix& m) {
    const std::size_t n = m.size();
    RationalMatrix a = m, inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw std::invalid_argument("matrix is not square");
        inv[i][i] = 1;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && sgn(a[piv][col]) == 0) ++piv;
        if (piv == n) throw std::invalid_argument("matrix is singular");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Rational p = a[col][col];
        for (std::size_t k = 0; k < n; ++k) {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || sgn(a[r][col]) == 0) continue;
            Rational f = a[r][col];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

SymplecticData SymplecticData::from_matrix(const RationalMatrix& omega) {
    SymplecticData s;
    s.dim = static_cast<int>(omega.size());
    if (s.dim < 2 || s.dim % 2 || s.dim > kMaxDim) throw std::invalid_argument("symplectic dimension must be even, 2..8");
    for (int i = 0; i < s.dim; ++i) {
        if (static_cast<int>(omega[i].size()) != s.dim) throw std::invalid_argument("omega is not square");
        for (int j = 0; j < s.dim; ++j)
            if (omega[i][j] != -omega[j][i]) throw std::invalid_argument("omega is not antisymmetric");
    }
    s.omega = omega;
    s.omega_inv = invert(omega);
    return s;
}

SymplecticData SymplecticData::standard(int dim) {
    RationalMatrix w(dim, std::vector<Rational>(dim, Rational(0)));
    for (int k = 0; k + 1 < dim; k += 2) {
        w[k][k + 1] = -1;
        w[k + 1][k] = 1;
    }
    return from_matrix(w);
}

GradedSeries SymplecticData::form(const Truncation& t) const {
    GradedSeries r(dim, t);
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            if (sgn(omega[i][j]) == 0) continue;
            Monomial m;
            m.dx = static_cast<std::uint16_t>((1u << i) | (1u << j));
            r.add_term(m, omega[i][j]);
        }
    return r;
}

GradedSeries SymplecticData::gamma0(const Truncation& t) const {
    GradedSeries r(dim, t);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            if (sgn(omega[i][j]) == 0) continue;
            Monomial m;
            m.y[i] = 1;
            m.dx = static_cast<std::uint16_t>(1u << j);
            r.add_term(m, omega[i][j]);
        }
    return r;
}

namespace {

using Gamma = std::vector<std::vector<std::vector<GradedSeries>>>;

Gamma zero_gamma(int d) {
    return Gamma(d, std::vector<std::vector<GradedSeries>>(d, std::vector<GradedSeries>(d, GradedSeries(d))));
}

void check_compatible(const SymplecticData& s, const Gamma& g) {
    const int d = s.dim;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                if (g[i][j][k] != g[i][k][j]) throw std::invalid_argument("connection has torsion");
    // d_k omega_ij vanishes for constant omega
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                GradedSeries acc(d);
                for (int m = 0; m < d; ++m) {
                    acc -= g[m][k][i] * GaussianRational(s.omega[m][j]);
                    acc -= g[m][k][j] * GaussianRational(s.omega[i][m]);
                }
                if (!acc.is_zero())
                    throw std::invalid_argument("connection does not preserve omega (component k=" +
                                                std::to_string(k + 1) + ", i=" + std::to_string(i + 1) +
                                                ", j=" + std::to_string(j + 1) + ")");
            }
}

}  // namespace

ConnectionData ConnectionData::flat(int dim) {
    ConnectionData c;
    c.dim = dim;
    c.gamma = zero_gamma(dim);
    return c;
}

ConnectionData ConnectionData::from_generator(const SymplecticData& s, const SymmetricGenerator& S) {
    const int d = s.dim;
    auto lookup = [&](int i, int j, int k) -> GradedSeries {
        std::array<int, 3> key{i, j, k};
        std::sort(key.begin(), key.end());
        auto it = S.find(key);
        return it == S.end() ? GradedSeries(d) : it->second;
    };
    for (const auto& [key, v] : S) {
        if (!std::is_sorted(key.begin(), key.end())) throw std::invalid_argument("generator keys must be sorted");
        for (int i : key)
            if (i < 0 || i >= d) throw std::invalid_argument("generator index out of range");
        for (const auto& [m, c] : v.terms())
            if (m.ydeg() || m.dx || m.hbar || m.u) throw std::invalid_argument("generator must depend on x only");
    }
    ConnectionData c;
    c.dim = d;
    c.gamma = zero_gamma(d);
    for (int m = 0; m < d; ++m)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int i = 0; i < d; ++i)
                    if (sgn(s.omega_inv[m][i]) != 0) c.gamma[m][j][k] += lookup(i, j, k) * GaussianRational(s.omega_inv[m][i]);
    c.generator = S;
    check_compatible(s, c.gamma);
    return c;
}

ConnectionData ConnectionData::from_christoffel(const SymplecticData& s, Gamma gamma) {
    if (static_cast<int>(gamma.size()) != s.dim) throw std::invalid_argument("Christoffel array has wrong size");
    check_compatible(s, gamma);
    ConnectionData c;
    c.dim = s.dim;
    c.gamma = std::move(gamma);
    return c;
}

bool ConnectionData::is_flat() const {
    for (const auto& a : gamma)
        for (const auto& b : a)
            for (const auto& g : b)
                if (!g.is_zero()) return false;
    return true;
}

namespace {

struct OmegaPair {
    int i;
    int j;
    Rational w;
};

class MoyalExpansion {
public:
    // odd_only keeps the terms with an odd number of contractions
    MoyalExpansion(const SymplecticData& s, const Truncation& t, GradedSeries& out, bool odd_only = false)
        : t_(t), out_(out), odd_only_(odd_only) {
        for (int i = 0; i < s.dim; ++i)
            for (int j = 0; j < s.dim; ++j)
                if (sgn(s.omega_inv[i][j]) != 0) pairs_.push_back({i, j, s.omega_inv[i][j]});
        GaussianRational step(Rational(0), frac(-1, 2));
        GaussianRational p(1);
        for (int k = 0; k <= 64; ++k) {
            minus_i_half_.push_back(p);
            p *= step;
        }
    }

    void add(const Monomial& ma, const GaussianRational& ca, const Monomial& mb, const GaussianRational& cb) {
        sign_ = wedge_sign(ma.dx, mb.dx);
        if (sign_ == 0) return;
        base_ = ma;
        for (int i = 0; i < kMaxDim; ++i) base_.x[i] = static_cast<std::uint8_t>(ma.x[i] + mb.x[i]);
        base_.hbar = static_cast<std::int16_t>(ma.hbar + mb.hbar);
        base_.u = static_cast<std::int16_t>(ma.u + mb.u);
        base_.dx = ma.dx | mb.dx;
        int room = t_.hbar_max >= kUnbounded ? 64 : t_.hbar_max - base_.hbar;
        if (room < 0) return;
        // every contraction trades two y for one hbar, so these bounds hold for all terms of the pair
        if (ma.fedosov_degree() + mb.fedosov_degree() > t_.fedosov_max) return;
        if (ma.u + mb.u > t_.u_max) return;
        if (base_.xdeg() > t_.x_max) return;
        const int ysum = ma.ydeg() + mb.ydeg();
        kmin_ = t_.y_max >= kUnbounded ? 0 : std::max(0, (ysum - t_.y_max + 1) / 2);
        kmax_ = std::min({room, ma.ydeg(), mb.ydeg(), 64});
        if (kmin_ > kmax_) return;
        la_ = ma.y;
        lb_ = mb.y;
        coeff_ = ca * cb;
        if (sign_ < 0) coeff_ = -coeff_;
        walk(0, 0, Rational(1));
    }

private:
    const Truncation& t_;
    GradedSeries& out_;
    std::vector<OmegaPair> pairs_;
    std::vector<GaussianRational> minus_i_half_;
    Monomial base_;
    std::array<std::uint8_t, kMaxDim> la_{}, lb_{};
    GaussianRational coeff_;
    bool odd_only_ = false;
    int sign_ = 1;
    int kmin_ = 0;
    int kmax_ = 0;
    GaussianRational scratch_;

    void walk(std::size_t p, int k, const Rational& weight) {
        if (p == pairs_.size()) {
            if (k < kmin_ || (odd_only_ && !(k & 1))) return;
            Monomial m = base_;
            for (int i = 0; i < kMaxDim; ++i) m.y[i] = static_cast<std::uint8_t>(la_[i] + lb_[i]);
            m.hbar = static_cast<std::int16_t>(base_.hbar + k);
            scratch_ = coeff_;
            scratch_ *= minus_i_half_[k];
            scratch_.re *= weight;
            scratch_.im *= weight;
            out_.add_admitted(m, scratch_);
            return;
        }
        const auto& [i, j, w] = pairs_[p];
        const int limit = std::min({static_cast<int>(la_[i]), static_cast<int>(lb_[j]), kmax_ - k});
        Rational factor = 1;
        for (int n = 0;; ++n) {
            walk(p + 1, k + n, weight * factor);
            if (n == limit) break;
            // d_{y^i} on the left and d_{y^j} on the right, one more time each
            factor *= w * Rational(la_[i]) * Rational(lb_[j]) / Rational(n + 1);
            la_[i]--;
            lb_[j]--;
        }
        la_[i] = static_cast<std::uint8_t>(la_[i] + limit);
        lb_[j] = static_cast<std::uint8_t>(lb_[j] + limit);
    }
};

Truncation product_truncation(const GradedSeries& a, const GradedSeries& b) {
    Truncation t = a.truncation().meet(b.truncation());
    t.min_hbar = std::min({0, a.truncation().min_hbar + b.truncation().min_hbar, t.min_hbar});
    t.min_u = std::min({0, a.truncation().min_u + b.truncation().min_u, t.min_u});
    return t;
}


}  // namespace

GradedSeries moyal(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s, const Truncation& t) {
    if (a.dim() != s.dim || b.dim() != s.dim) throw std::invalid_argument("moyal: dimension mismatch");
    GradedSeries out(s.dim, t);
    MoyalExpansion e(s, t, out);
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) e.add(ma, ca, mb, cb);
    return out;
}

GradedSeries moyal(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s) {
    return moyal(a, b, s, product_truncation(a, b));
}

namespace {

// b*a reproduces the k-th term of a*b up to (-1)^k and the Koszul sign, so the graded
// commutator is twice the odd part of the expansion
GradedSeries commutator_in(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s, const Truncation& t) {
    if (a.dim() != s.dim || b.dim() != s.dim) throw std::invalid_argument("commutator: dimension mismatch");
    GradedSeries out(s.dim, t);
    MoyalExpansion e(s, t, out, true);
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) e.add(ma, ca, mb, cb);
    out *= GaussianRational(2);
    return out;
}

}  // namespace

GradedSeries graded_commutator(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s) {
    return commutator_in(a, b, s, product_truncation(a, b));
}

GradedSeries commutator_over_hbar(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s) {
    Truncation t = product_truncation(a, b);
    Truncation deeper = t;
    if (deeper.hbar_max < kUnbounded) deeper.hbar_max += 1;
    if (deeper.fedosov_max < kUnbounded) deeper.fedosov_max += 2;
    GradedSeries c = commutator_in(a, b, s, deeper);
    if (!a.is_zero() && !b.is_zero()) {
        const int floor = a.min_hbar_present() + b.min_hbar_present();
        for (const auto& [m, v] : c.terms())
            if (m.hbar <= floor) throw std::logic_error("commutator has a surviving lowest-order term");
    }
    GradedSeries r = c.shift_hbar(-1);
    Truncation back = t;
    back.min_hbar = std::min(t.min_hbar, r.truncation().min_hbar);
    r.set_truncation(back);
    return r;
}

GradedSeries poisson_bracket_y(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s) {
    GradedSeries r(s.dim, product_truncation(a, b));
    for (int i = 0; i < s.dim; ++i)
        for (int j = 0; j < s.dim; ++j) {
            if (sgn(s.omega_inv[i][j]) == 0) continue;
            r += multiply(diff_y(a, i), diff_y(b, j)) * GaussianRational(Rational(0), -s.omega_inv[i][j]);
        }
    return r;
}

GradedSeries symbol_sigma(const GradedSeries& a) { return at_y_zero(a); }

GradedSeries delta_op(const GradedSeries& a) {
    GradedSeries r(a.dim(), a.truncation());
    for (const auto& [m, c] : a.terms())
        for (int k = 0; k < a.dim(); ++k) {
            const auto bit = static_cast<std::uint16_t>(1u << k);
            if (m.y[k] == 0 || (m.dx & bit)) continue;
            Monomial n = m;
            n.y[k]--;
            n.dx |= bit;
            bool odd = std::popcount(static_cast<unsigned>(m.dx & (bit - 1))) & 1;
            GaussianRational v = c * GaussianRational(static_cast<long>(m.y[k]));
            r.add_term(n, odd ? -v : v);
        }
    return r;
}

GradedSeries delta_star(const GradedSeries& a) {
    GradedSeries r(a.dim(), a.truncation());
    for (const auto& [m, c] : a.terms())
        for (int k = 0; k < a.dim(); ++k) {
            const auto bit = static_cast<std::uint16_t>(1u << k);
            if (!(m.dx & bit)) continue;
            Monomial n = m;
            n.y[k]++;
            n.dx = static_cast<std::uint16_t>(m.dx & ~bit);
            bool odd = std::popcount(static_cast<unsigned>(m.dx & (bit - 1))) & 1;
            r.add_term(n, odd ? -c : c);
        }
    return r;
}

GradedSeries delta_inverse(const GradedSeries& a) {
    GradedSeries r(a.dim(), a.truncation());
    for (const auto& [m, c] : a.terms()) {
        int pq = m.ydeg() + m.form_degree();
        if (pq == 0) continue;
        GaussianRational scale(frac(1, pq));
        for (int k = 0; k < a.dim(); ++k) {
            const auto bit = static_cast<std::uint16_t>(1u << k);
            if (!(m.dx & bit)) continue;
            Monomial n = m;
            n.y[k]++;
            n.dx = static_cast<std::uint16_t>(m.dx & ~bit);
            bool odd = std::popcount(static_cast<unsigned>(m.dx & (bit - 1))) & 1;
            GaussianRational v = c * scale;
            r.add_term(n, odd ? -v : v);
        }
    }
    return r;
}

GradedSeries nabla(const GradedSeries& a, const ConnectionData& c) {
    const int d = a.dim();
    if (c.dim != d) throw std::invalid_argument("nabla: dimension mismatch");
    std::vector<GradedSeries> dy;
    for (int i = 0; i < d; ++i) dy.push_back(diff_y(a, i));
    std::vector<GradedSeries> ys;
    for (int j = 0; j < d; ++j) ys.push_back(GradedSeries::y(d, j));
    GradedSeries r(d, a.truncation());
    for (int k = 0; k < d; ++k) {
        GradedSeries part = diff_x(a, k);
        for (int i = 0; i < d; ++i) {
            if (dy[i].is_zero()) continue;
            for (int j = 0; j < d; ++j) {
                const GradedSeries& g = c.gamma[i][k][j];
                if (g.is_zero()) continue;
                part -= multiply(multiply(g, ys[j]), dy[i], a.truncation());
            }
        }
        if (!part.is_zero()) r += multiply(GradedSeries::dx(d, k), part, a.truncation());
    }
    return r;
}

GradedSeries weyl_curvature_F(const ConnectionData& c, const SymplecticData& s, const Truncation& t) {
    const int d = s.dim;
    const auto& G = c.gamma;
    // curvature tensor F^m_{jkl}
    auto Fm = [&](int m, int j, int k, int l) {
        GradedSeries r = diff_x(G[m][l][j], k) - diff_x(G[m][k][j], l);
        for (int p = 0; p < d; ++p) {
            r += G[m][k][p] * G[p][l][j];
            r -= G[m][l][p] * G[p][k][j];
        }
        return r;
    };
    GradedSeries F(d, t);
    const GaussianRational quarter(frac(1, 4));
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
                if (k == l) continue;
                for (int m = 0; m < d; ++m) {
                    GradedSeries fm = Fm(m, j, k, l);
                    if (fm.is_zero()) continue;
                    for (int i = 0; i < d; ++i) {
                        if (sgn(s.omega[i][m]) == 0) continue;
                        GradedSeries mono = GradedSeries::y(d, i) * GradedSeries::y(d, j) * GradedSeries::dx(d, k) *
                                            GradedSeries::dx(d, l);
                        F += multiply(fm, mono, t) * (quarter * GaussianRational(s.omega[i][m]));
                    }
                }
            }
    return F;
}

Calibration calibrate_prefactor(const SymplecticData& s, const ConnectionData& c) {
    const int d = s.dim;
    const GaussianRational I = GaussianRational::I();
    const GaussianRational half(frac(1, 2));
    std::vector<GaussianRational> candidates{GaussianRational(1), GaussianRational(-1), I,        -I,
                                             half,                -half,               I * half, -(I * half)};
    const GradedSeries g0 = s.gamma0();
    const GradedSeries w = s.form();
    const GradedSeries F = weyl_curvature_F(c, s);

    std::vector<GradedSeries> probes;
    for (int i = 0; i < d; ++i) {
        probes.push_back(GradedSeries::y(d, i));
        for (int j = i; j < d; ++j) probes.push_back(GradedSeries::y(d, i) * GradedSeries::y(d, j));
        probes.push_back(GradedSeries::x(d, i) * GradedSeries::y(d, (i + 1) % d) * GradedSeries::dx(d, i));
    }

    const GradedSeries gg = commutator_over_hbar(g0, g0, s);
    std::vector<GradedSeries> g0_comm, curv_comm, nabla2;
    for (const auto& a : probes) {
        g0_comm.push_back(commutator_over_hbar(g0, a, s));
        curv_comm.push_back(commutator_over_hbar(F, a, s));
        nabla2.push_back(nabla(nabla(a, c), c));
    }

    std::vector<Calibration> found;
    for (const auto& cand : candidates) {
        Calibration cal{cand, false, false};
        cal.flat_identity = (gg * (cand * half)) == -w;
        for (std::size_t p = 0; p < probes.size() && cal.flat_identity; ++p)
            cal.flat_identity = (g0_comm[p] * cand) == -delta_op(probes[p]);
        cal.curvature_identity = true;
        for (std::size_t p = 0; p < probes.size() && cal.curvature_identity; ++p)
            cal.curvature_identity = nabla2[p] == curv_comm[p] * cand;
        if (cal.flat_identity && cal.curvature_identity) found.push_back(cal);
    }
    if (found.size() != 1)
        throw std::runtime_error("prefactor calibration found " + std::to_string(found.size()) + " candidates");
    return found.front();
}

}  // namespace startrace
