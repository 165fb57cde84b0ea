#include "startrace/index_classes.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace startrace {

namespace {

using Matrix = std::vector<std::vector<GradedSeries>>;

GradedSeries cap_degree(const GradedSeries& s, int max_form_degree) {
    return s.filter([max_form_degree](const Monomial& m) { return m.form_degree() <= max_form_degree; });
}

Matrix mat_mul(const Matrix& a, const Matrix& b, int dim, int max_form_degree) {
    const std::size_t r = a.size();
    Matrix out(r, std::vector<GradedSeries>(r, GradedSeries(dim)));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < r; ++k) {
            if (a[i][k].is_zero()) continue;
            for (std::size_t j = 0; j < r; ++j)
                if (!b[k][j].is_zero()) out[i][j] += multiply(a[i][k], b[k][j]);
        }
    for (auto& row : out)
        for (auto& e : row) e = cap_degree(e, max_form_degree);
    return out;
}

GradedSeries trace_of(const Matrix& m, int dim) {
    GradedSeries t(dim);
    for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
    return t;
}

bool matrix_zero(const Matrix& m) {
    for (const auto& row : m)
        for (const auto& e : row)
            if (!e.is_zero()) return false;
    return true;
}

Matrix scaled(const CurvatureMatrix& Rm, const GaussianRational& s) {
    Matrix m = Rm.entries;
    for (auto& row : m)
        for (auto& e : row) e *= s;
    return m;
}

Truncation laurent() {
    Truncation t;
    t.min_hbar = -kMaxDim;
    t.min_u = -kMaxDim;
    return t;
}

// top-form coefficients grouped by (hbar, u) power, each paired as a polynomial in x
GradedSeries pair_top(const GradedSeries& form, int dim, const BasePairing& pairing) {
    const auto top = static_cast<std::uint16_t>((1u << dim) - 1);
    std::map<std::pair<int, int>, GradedSeries> groups;
    for (const auto& [m, c] : form.terms()) {
        if (m.dx != top) continue;
        Monomial n = m;
        n.dx = 0;
        n.hbar = 0;
        n.u = 0;
        auto [it, fresh] = groups.try_emplace({m.hbar, m.u}, GradedSeries(dim));
        it->second.add_term(n, c);
    }
    GradedSeries out(dim, laurent());
    for (const auto& [key, poly] : groups) {
        GaussianRational v = pairing(poly);
        Monomial n;
        n.hbar = static_cast<std::int16_t>(key.first);
        n.u = static_cast<std::int16_t>(key.second);
        out.add_term(n, v);
    }
    return out;
}

}  // namespace

CurvatureMatrix CurvatureMatrix::zero(int dim, int rank) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("curvature: dimension out of range");
    if (rank < 1) throw std::invalid_argument("curvature: rank must be positive");
    CurvatureMatrix c;
    c.dim = dim;
    c.rank = rank;
    c.entries.assign(rank, std::vector<GradedSeries>(rank, GradedSeries(dim)));
    return c;
}

void CurvatureMatrix::validate() const {
    if (rank < 1 || static_cast<int>(entries.size()) != rank) throw std::invalid_argument("curvature: bad rank");
    for (const auto& row : entries) {
        if (static_cast<int>(row.size()) != rank) throw std::invalid_argument("curvature: matrix is not square");
        for (const auto& e : row) {
            if (!e.is_zero() && e.dim() != dim) throw std::invalid_argument("curvature: entry has the wrong dimension");
            for (const auto& [m, c] : e.terms())
                if (std::popcount(static_cast<unsigned>(m.dx)) != 2 || m.ydeg() || m.hbar || m.u)
                    throw std::invalid_argument("curvature entries must be 2-forms in dx");
        }
    }
}

GradedSeries trace_power(const CurvatureMatrix& Rm, int k, int max_form_degree) {
    Rm.validate();
    if (k < 1) throw std::invalid_argument("trace_power: k must be positive");
    Matrix p = Rm.entries;
    for (int i = 1; i < k && !matrix_zero(p); ++i) p = mat_mul(p, Rm.entries, Rm.dim, max_form_degree);
    return cap_degree(trace_of(p, Rm.dim), max_form_degree);
}

GradedSeries exp_nilpotent(const GradedSeries& n, int max_form_degree) {
    for (const auto& [m, c] : n.terms())
        if (m.form_degree() == 0) throw std::invalid_argument("exp_nilpotent: series has a form-degree 0 term");
    const int dim = n.dim();
    GradedSeries out = GradedSeries::constant(dim, 1, n.truncation());
    GradedSeries power = out;
    for (int k = 1; k <= max_form_degree; ++k) {
        power = cap_degree(multiply(power, n), max_form_degree) * GaussianRational(Rational(1, k));
        if (power.is_zero()) break;
        out += power;
    }
    return out;
}

GradedSeries a_hat_u(const CurvatureMatrix& Rm, int max_form_degree) {
    Rm.validate();
    const int cap = std::min(max_form_degree, Rm.dim);
    GradedSeries exponent(Rm.dim);
    for (int j = 1; 4 * j <= cap; ++j) {
        GradedSeries t = trace_power(Rm, 2 * j, cap);
        if (t.is_zero()) continue;
        Rational c = -bernoulli(2 * j) / (Rational(4 * j) * factorial(2 * j));
        exponent += t.shift_u(2 * j) * GaussianRational(c);
    }
    return exp_nilpotent(exponent, cap);
}

GradedSeries at_u_one(const GradedSeries& s) {
    GradedSeries r(s.dim());
    for (const auto& [m, c] : s.terms()) {
        Monomial n = m;
        n.u = 0;
        r.add_term(n, c);
    }
    return r;
}

GradedSeries chern_character(const CurvatureMatrix& Rm, const GaussianRational& scale) {
    Rm.validate();
    const Matrix a = scaled(Rm, scale);
    GradedSeries out = GradedSeries::constant(Rm.dim, Rm.rank);
    Matrix power = a;
    for (int k = 1; 2 * k <= Rm.dim && !matrix_zero(power); ++k) {
        out += trace_of(power, Rm.dim) * GaussianRational(Rational(1) / factorial(k));
        power = mat_mul(power, a, Rm.dim, Rm.dim);
    }
    return out;
}

std::map<std::uint16_t, std::complex<double>> chern_character_numeric(const CurvatureMatrix& Rm) {
    // the degree-2k part of tr exp(-R) times (2 pi i)^{-k}
    const std::complex<double> unit(0, 2 * std::acos(-1.0));
    std::map<std::uint16_t, std::complex<double>> out;
    const GradedSeries ch = chern_character(Rm);
    for (const auto& [m, c] : ch.terms()) {
        if (m.xdeg()) throw std::invalid_argument("numeric Chern character needs constant curvature");
        const int k = std::popcount(static_cast<unsigned>(m.dx)) / 2;
        out[m.dx] += c.to_complex() / std::pow(unit, k);
    }
    return out;
}

GradedSeries todd(const CurvatureMatrix& Rm, const GaussianRational& scale) {
    GradedSeries n = chern_character(Rm, scale) - GradedSeries::constant(Rm.dim, Rm.rank);
    // x / (1 - e^x) = -sum_n B_n x^n / n!
    GradedSeries out = GradedSeries::constant(Rm.dim, -1);
    GradedSeries power = GradedSeries::constant(Rm.dim, 1);
    for (int k = 1; 2 * k <= Rm.dim; ++k) {
        power = cap_degree(multiply(power, n), Rm.dim);
        if (power.is_zero()) break;
        Rational b = bernoulli(k);
        if (sgn(b) != 0) out += power * GaussianRational(-b / factorial(k));
    }
    return out;
}

BasePairing constant_pairing(const GaussianRational& volume) {
    return [volume](const GradedSeries& f) {
        GaussianRational v;
        for (const auto& [m, c] : f.terms()) {
            if (m.xdeg()) throw std::invalid_argument("constant pairing: top-form coefficient depends on x");
            v += c;
        }
        return v * volume;
    };
}

GradedSeries nest_tsygan_eval(const GradedSeries& a_hat, const GradedSeries& omega_hbar, int d,
                              const BasePairing& pairing) {
    const int dim = 2 * d;
    if (d < 1 || dim > kMaxDim) throw std::invalid_argument("nest_tsygan: d out of range");
    if (a_hat.dim() != dim || omega_hbar.dim() != dim) throw std::invalid_argument("nest_tsygan: dimension mismatch");
    for (const auto& [m, c] : omega_hbar.terms())
        if (m.form_degree() != 2 || m.ydeg() || m.u || m.hbar < 0)
            throw std::invalid_argument("nest_tsygan: omega_hbar must be a 2-form series in hbar");
    GradedSeries x(dim, laurent());
    for (const auto& [m, c] : omega_hbar.terms()) {
        Monomial n = m;
        n.hbar = static_cast<std::int16_t>(m.hbar - 1);
        x.add_term(n, c);
    }
    GradedSeries e = exp_nilpotent(x, dim);
    GradedSeries a(dim, laurent());
    a += at_u_one(a_hat);
    return pair_top(multiply(a, e), dim, pairing);
}

GradedSeries tamarkin_tsygan_eval(const ChainElement& c, const PoissonData& p, const GradedSeries& a_hat_u,
                                  const BasePairing& pairing) {
    const int dim = p.dim;
    if (a_hat_u.dim() != dim || (!c.is_zero() && c.dim() != dim))
        throw std::invalid_argument("tamarkin_tsygan: dimension mismatch");
    for (const auto& [mask, coeff] : p.pi.components())
        if (std::popcount(static_cast<unsigned>(mask)) != 2)
            throw std::invalid_argument("tamarkin_tsygan: pi must be a bivector");

    ChainElement c0(dim);
    for (const auto& [w, v] : c.terms())
        if (w.u == 0) c0.add(w, v);
    GradedSeries co(dim, laurent());
    co += hkr(c0);

    const auto top = static_cast<std::uint16_t>((1u << dim) - 1);
    Monomial vol_top;
    vol_top.dx = top;
    GradedSeries omega = multiply(p.volume, GradedSeries::term(dim, vol_top, 1));
    // exp(iota_pi / u) Omega, a finite sum in the form degree
    GradedSeries e(dim, laurent());
    GradedSeries term(dim, laurent());
    term += omega;
    for (int k = 0; !term.is_zero(); ++k) {
        e += term.shift_u(-k) * GaussianRational(Rational(1) / factorial(k));
        term = contract(p.pi, term);
    }
    GradedSeries a(dim, laurent());
    a += a_hat_u;
    return pair_top(multiply(multiply(a, co), e), dim, pairing);
}

}  // namespace startrace
