#include "startrace/fedosov.hpp"

#include <algorithm>
#include <string>

namespace startrace {

namespace {

Truncation internal_truncation(const Truncation& window, int cap) {
    Truncation t;
    t.x_max = window.x_max;
    t.fedosov_max = cap;
    return t;
}

GradedSeries window_of(const GradedSeries& a, const Truncation& w) {
    GradedSeries r = a.filter([&](const Monomial& m) { return w.admits(m); });
    r.set_truncation(w);
    return r;
}

// lowest graded piece (by y + 2 hbar, then y) of a nonzero series
std::pair<int, int> lowest_piece(const GradedSeries& a) {
    std::pair<int, int> best{kUnbounded, kUnbounded};
    int best_deg = kUnbounded;
    for (const auto& [m, c] : a.terms()) {
        int deg = m.fedosov_degree();
        if (deg < best_deg || (deg == best_deg && m.ydeg() < best.first)) {
            best_deg = deg;
            best = {m.ydeg(), m.hbar};
        }
    }
    return best;
}

GradedSeries fedosov_residual(const GradedSeries& gamma, const GradedSeries& F, const GradedSeries& omega_hbar,
                              const FedosovProblem& p, const GaussianRational& c) {
    GradedSeries res = nabla(gamma, p.c);
    res += commutator_over_hbar(gamma, gamma, p.s) * (c * GaussianRational(frac(1, 2)));
    res += F;
    res -= omega_hbar.truncated(gamma.truncation());
    return res;
}

}  // namespace

GradedSeries exterior_dx(const GradedSeries& a) {
    GradedSeries r(a.dim(), a.truncation());
    for (int k = 0; k < a.dim(); ++k) {
        GradedSeries dk = diff_x(a, k);
        if (!dk.is_zero()) r += multiply(GradedSeries::dx(a.dim(), k), dk);
    }
    return r;
}

FedosovProblem FedosovProblem::flat(const SymplecticData& s, int y_max, int hbar_max) {
    FedosovProblem p;
    p.s = s;
    p.c = ConnectionData::flat(s.dim);
    p.omega_hbar = -s.form();
    p.truncation.y_max = y_max;
    p.truncation.hbar_max = hbar_max;
    return p;
}

void FedosovProblem::validate() const {
    if (c.dim != s.dim || omega_hbar.dim() != s.dim) throw std::invalid_argument("fedosov problem: dimension mismatch");
    if (truncation.y_max >= kUnbounded || truncation.hbar_max >= kUnbounded)
        throw std::invalid_argument("fedosov problem needs finite y and hbar bounds");
    for (const auto& [m, v] : omega_hbar.terms()) {
        if (m.form_degree() != 2) throw std::invalid_argument("omega_hbar must be a 2-form");
        if (m.ydeg() || m.u) throw std::invalid_argument("omega_hbar must not depend on y or u");
        if (m.hbar < 0) throw std::invalid_argument("omega_hbar has negative hbar powers");
    }
    GradedSeries lead = omega_hbar.filter([](const Monomial& m) { return m.hbar == 0; });
    if (lead != -s.form()) throw std::invalid_argument("omega_hbar must start with -omega");
    if (!exterior_dx(omega_hbar).is_zero()) throw std::invalid_argument("omega_hbar is not closed");
}

FedosovSolution solve_gamma(const FedosovProblem& p) {
    p.validate();
    FedosovSolution sol;
    sol.problem = p;
    sol.c = calibrate_prefactor(p.s, p.c).c;

    const Truncation& w = p.truncation;
    int cap = w.y_max + 2 * w.hbar_max + 1;
    if (w.fedosov_max < kUnbounded) cap = std::max(cap, w.fedosov_max);
    sol.fedosov_cap = cap;
    const Truncation t = internal_truncation(w, cap);
    const int d = p.s.dim;

    sol.F = weyl_curvature_F(p.c, p.s, t);
    GradedSeries source = sol.F - (p.omega_hbar + p.s.form()).truncated(t);
    const GaussianRational half_c = sol.c * GaussianRational(frac(1, 2));

    GradedSeries r(d, t);
    const int max_iter = cap + 3;
    for (int it = 1;; ++it) {
        GradedSeries rhs = nabla(r, p.c) + source;
        if (!r.is_zero()) rhs += commutator_over_hbar(r, r, p.s) * half_c;
        GradedSeries next = delta_inverse(rhs);
        next.set_truncation(t);
        sol.iterations = it;
        if (next == r) break;
        if (it > max_iter) {
            auto [y, h] = lowest_piece(next - r);
            throw FedosovError("fedosov recursion does not settle (y " + std::to_string(y) + ", hbar " +
                                   std::to_string(h) + ")",
                               y, h);
        }
        r = std::move(next);
    }
    sol.r = r;
    sol.gamma = p.s.gamma0(t) + r;
    GradedSeries full = fedosov_residual(sol.gamma, sol.F, p.omega_hbar, p, sol.c);
    sol.residual = window_of(full, w);
    if (!sol.residual.is_zero()) {
        auto [y, h] = lowest_piece(sol.residual);
        throw FedosovError("fedosov residual does not vanish (y " + std::to_string(y) + ", hbar " +
                               std::to_string(h) + "); check the prefactor convention",
                           y, h);
    }
    return sol;
}

GradedSeries residual_check(const FedosovSolution& sol) {
    const auto& p = sol.problem;
    Truncation t = internal_truncation(p.truncation, std::max(sol.fedosov_cap, 1));
    GradedSeries gamma = sol.gamma.truncated(t);
    GradedSeries F = sol.F.is_zero() ? weyl_curvature_F(p.c, p.s, t) : sol.F.truncated(t);
    return window_of(fedosov_residual(gamma, F, p.omega_hbar, p, sol.c), p.truncation);
}

namespace {

GradedSeries rho_with_cap(const GradedSeries& f, const FedosovSolution& sol, const ExpJet& phi, int cap) {
    const auto& p = sol.problem;
    for (const auto& [m, v] : f.terms())
        if (m.ydeg() || m.dx) throw std::invalid_argument("flat_section_rho: f must be a function of x");
    if (cap + 1 > sol.fedosov_cap) throw std::invalid_argument("flat_section_rho: solution truncation too shallow");
    Truncation t = internal_truncation(p.truncation, cap);
    t.u_max = f.truncation().u_max;
    const GaussianRational c = sol.c;
    GradedSeries r = sol.r.truncated(internal_truncation(p.truncation, cap + 1));

    GradedSeries f0 = f.truncated(t);
    GradedSeries a(f.dim(), t);
    // Tphi* acts on the x-part only; hbar and u dependence is carried through
    {
        std::map<std::pair<int, int>, GradedSeries> slices;
        for (const auto& [m, v] : f0.terms()) {
            Monomial xm = m;
            xm.hbar = 0;
            xm.u = 0;
            auto it = slices.try_emplace({m.hbar, m.u}, GradedSeries(f.dim())).first;
            it->second.add_term(xm, v);
        }
        for (auto& [hu, slice] : slices) {
            Monomial s;
            s.hbar = static_cast<std::int16_t>(hu.first);
            s.u = static_cast<std::int16_t>(hu.second);
            a += multiply(pullback_Tphi(slice, phi, t), GradedSeries::term(f.dim(), s, GaussianRational(1)), t);
        }
    }
    const int max_iter = cap + 3;
    for (int it = 1;; ++it) {
        GradedSeries rhs = nabla(a, p.c);
        if (!r.is_zero()) rhs += commutator_over_hbar(r, a, p.s) * c;
        GradedSeries next = f0 + delta_inverse(rhs);
        next.set_truncation(t);
        if (next == a) break;
        if (it > max_iter) {
            auto [y, h] = lowest_piece(next - a);
            throw FedosovError("flat section recursion does not settle", y, h);
        }
        a = std::move(next);
    }
    // obstruction: D a = delta a - nabla a - (c/hbar)[r,a] must vanish below the cap
    GradedSeries obs = delta_op(a) - nabla(a, p.c);
    if (!r.is_zero()) obs -= commutator_over_hbar(r, a, p.s) * c;
    obs = obs.filter([cap](const Monomial& m) { return m.fedosov_degree() < cap; });
    if (!obs.is_zero()) {
        auto [y, h] = lowest_piece(obs);
        throw FedosovError("flat section is obstructed", y, h);
    }
    return a;
}

}  // namespace

GradedSeries flat_section_rho(const GradedSeries& f, const FedosovSolution& sol, const ExpJet& phi) {
    return rho_with_cap(f, sol, phi, sol.fedosov_cap - 1);
}

GradedSeries star_global(const GradedSeries& f, const GradedSeries& g, const FedosovSolution& sol,
                         const ExpJet& phi) {
    const int H = sol.problem.truncation.hbar_max;
    const int cap = 2 * H;
    GradedSeries a = rho_with_cap(f, sol, phi, cap);
    GradedSeries b = rho_with_cap(g, sol, phi, cap);
    Truncation t = internal_truncation(sol.problem.truncation, cap);
    GradedSeries prod = symbol_sigma(moyal(a, b, sol.problem.s, t));
    Truncation out;
    out.hbar_max = H;
    out.x_max = sol.problem.truncation.x_max;
    return prod.truncated(out);
}

}  // namespace startrace
