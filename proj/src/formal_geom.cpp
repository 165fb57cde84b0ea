#include "startrace/formal_geom.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace startrace {

ExpJet ExpJet::identity(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("jet dimension out of range");
    ExpJet j;
    j.dim = dim;
    j.coeffs.resize(dim);
    return j;
}

void ExpJet::set(int i, std::vector<int> indices, const GradedSeries& c) {
    if (i < 0 || i >= dim) throw std::out_of_range("jet component index");
    if (indices.size() < 2) throw std::invalid_argument("jet coefficients start at order 2");
    for (int k : indices)
        if (k < 0 || k >= dim) throw std::out_of_range("jet multi-index");
    for (const auto& [m, v] : c.terms())
        if (m.ydeg() || m.dx || m.hbar || m.u) throw std::invalid_argument("jet coefficients depend on x only");
    std::sort(indices.begin(), indices.end());
    auto it = coeffs[i].try_emplace(indices, GradedSeries(dim)).first;
    it->second += c;
    if (it->second.is_zero()) coeffs[i].erase(it);
}

int ExpJet::order() const {
    int o = 1;
    for (const auto& c : coeffs)
        for (const auto& [idx, v] : c) o = std::max(o, static_cast<int>(idx.size()));
    return o;
}

std::vector<GradedSeries> ExpJet::components(const Truncation& t) const {
    std::vector<GradedSeries> out;
    for (int i = 0; i < dim; ++i) {
        GradedSeries phi = GradedSeries::x(dim, i, t) + GradedSeries::y(dim, i, t);
        for (const auto& [idx, c] : coeffs[i]) {
            Monomial m;
            for (int k : idx) m.y[k]++;
            Rational denom = 1;
            for (int k = 0; k < dim; ++k) denom *= factorial(m.y[k]);
            phi += multiply(c, GradedSeries::term(dim, m, GaussianRational(Rational(1) / denom), t), t);
        }
        out.push_back(std::move(phi));
    }
    return out;
}

GradedSeries substitute_jet(const GradedSeries& f, const ExpJet& phi, const Truncation& t) {
    if (f.dim() != phi.dim) throw std::invalid_argument("substitute_jet: dimension mismatch");
    for (const auto& [m, c] : f.terms())
        if (m.ydeg() || m.dx || m.hbar || m.u) throw std::invalid_argument("substitute_jet: f must depend on x only");
    return compose(f, phi.components(t), t);
}

GradedSeries pullback_Tphi(const GradedSeries& f, const ExpJet& phi, const Truncation& t) {
    return substitute_jet(f, phi, t);
}

GradedSeries RForm::form(int j) const {
    GradedSeries r(dim, comp[j].empty() ? Truncation{} : comp[j][0].truncation());
    for (int l = 0; l < dim; ++l) r += multiply(comp[j][l], GradedSeries::dx(dim, l));
    return r;
}

int RForm::y_max() const {
    int y = kUnbounded;
    for (const auto& row : comp)
        for (const auto& c : row) y = std::min(y, c.truncation().y_max);
    return y;
}

std::vector<std::vector<GradedSeries>> unipotent_inverse(const std::vector<std::vector<GradedSeries>>& m,
                                                         const Truncation& t) {
    const std::size_t n = m.size();
    const int d = n ? m[0][0].dim() : 1;
    if (t.y_max >= kUnbounded) throw std::invalid_argument("Neumann series needs a finite y truncation");
    using Mat = std::vector<std::vector<GradedSeries>>;
    Mat N(n, std::vector<GradedSeries>(n, GradedSeries(d, t)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            N[i][j] = m[i][j].truncated(t);
            if (i == j) N[i][j] -= GradedSeries::constant(d, 1, t);
            N[i][j] *= GaussianRational(-1);
        }
    Mat inv(n, std::vector<GradedSeries>(n, GradedSeries(d, t)));
    Mat power = inv;
    for (std::size_t i = 0; i < n; ++i) {
        inv[i][i] = GradedSeries::constant(d, 1, t);
        power[i][i] = GradedSeries::constant(d, 1, t);
    }
    const int cap = 4 * (t.y_max + 2);
    for (int k = 1;; ++k) {
        Mat next(n, std::vector<GradedSeries>(n, GradedSeries(d, t)));
        bool zero = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t l = 0; l < n; ++l)
                    if (!power[i][l].is_zero() && !N[l][j].is_zero()) multiply_accumulate(next[i][j], power[i][l], N[l][j]);
                zero = zero && next[i][j].is_zero();
            }
        if (zero) break;
        if (k > cap) throw std::runtime_error("Neumann series does not terminate: matrix is not unipotent");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) inv[i][j] += next[i][j];
        power = std::move(next);
    }
    return inv;
}

RForm r_form_from_map(const std::vector<GradedSeries>& phi, const Truncation& t) {
    const int d = static_cast<int>(phi.size());
    std::vector<std::vector<GradedSeries>> J(d, std::vector<GradedSeries>(d));
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) J[k][l] = diff_y(phi[k], l).truncated(t);
    auto Jinv = unipotent_inverse(J, t);
    RForm R;
    R.dim = d;
    R.comp.assign(d, std::vector<GradedSeries>(d, GradedSeries(d, t)));
    for (int l = 0; l < d; ++l) {
        std::vector<GradedSeries> dxphi;
        for (int k = 0; k < d; ++k) dxphi.push_back(diff_x(phi[k], l));
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                if (!Jinv[j][k].is_zero() && !dxphi[k].is_zero()) multiply_accumulate(R.comp[j][l], Jinv[j][k], dxphi[k], -1);
    }
    return R;
}

RForm build_R(const ExpJet& phi, const Truncation& t) { return r_form_from_map(phi.components(t), t); }

GradedSeries grothendieck_apply(const GradedSeries& sigma, const RForm& R) {
    const int d = sigma.dim();
    if (R.dim != d) throw std::invalid_argument("grothendieck_apply: dimension mismatch");
    for (const auto& [m, c] : sigma.terms())
        if (m.dx) throw std::invalid_argument("grothendieck_apply expects a section without dx");
    Truncation t = sigma.truncation();
    int ysig = t.y_max >= kUnbounded ? kUnbounded : t.y_max - 1;
    t.y_max = std::min(ysig, R.y_max());
    GradedSeries r(d, t);
    for (int k = 0; k < d; ++k) r += multiply(GradedSeries::dx(d, k), diff_x(sigma, k), t);
    for (int j = 0; j < d; ++j) {
        GradedSeries dj = diff_y(sigma, j);
        if (!dj.is_zero()) r += multiply(R.form(j), dj, t);
    }
    return r;
}

std::vector<GradedSeries> mc_residual(const RForm& R) {
    const int d = R.dim;
    Truncation t = R.comp[0][0].truncation();
    if (t.y_max < kUnbounded) t.y_max -= 1;
    std::vector<GradedSeries> forms;
    for (int j = 0; j < d; ++j) forms.push_back(R.form(j));
    std::vector<GradedSeries> out;
    for (int j = 0; j < d; ++j) {
        GradedSeries r(d, t);
        for (int k = 0; k < d; ++k) r += multiply(GradedSeries::dx(d, k), diff_x(forms[j], k), t);
        for (int i = 0; i < d; ++i) {
            GradedSeries di = diff_y(forms[j], i);
            if (!di.is_zero()) r += multiply(forms[i], di, t);
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

// embed a series on N (dimension n) into T*N (dimension 2n) on the q-slots
GradedSeries embed(const GradedSeries& s, int n, const Truncation& t) {
    GradedSeries r(2 * n, t);
    for (const auto& [m, c] : s.terms()) r.add_term(m, c);
    return r;
}

}  // namespace

CotangentJet cotangent_lift(const ExpJet& base, const Truncation& t) {
    const int n = base.dim;
    if (2 * n > kMaxDim) throw std::invalid_argument("cotangent lift exceeds the maximal dimension");
    Truncation tb = t;
    auto phi = base.components(tb);
    std::vector<std::vector<GradedSeries>> J(n, std::vector<GradedSeries>(n));
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) J[k][l] = diff_y(phi[k], l).truncated(tb);
    auto Jinv = unipotent_inverse(J, tb);

    CotangentJet out;
    out.base = base;
    out.n = n;
    const int D = 2 * n;
    for (int i = 0; i < n; ++i) out.lifted.push_back(embed(phi[i], n, t));
    for (int i = 0; i < n; ++i) {
        // ((d_qbar phi)^T)^{-1} applied to p + pbar
        GradedSeries pi(D, t);
        for (int k = 0; k < n; ++k) {
            GradedSeries fiber = GradedSeries::x(D, n + k, t) + GradedSeries::y(D, n + k, t);
            pi += multiply(embed(Jinv[k][i], n, t), fiber, t);
        }
        out.lifted.push_back(std::move(pi));
    }
    out.R = r_form_from_map(out.lifted, t);
    return out;
}

int fiber_degree(const RForm& R, const std::vector<int>& fiber) {
    int best = 0;
    for (const auto& row : R.comp)
        for (const auto& c : row)
            for (const auto& [m, v] : c.terms()) {
                int deg = 0;
                for (int k : fiber) deg += m.y[k];
                best = std::max(best, deg);
            }
    return best;
}

}  // namespace startrace
