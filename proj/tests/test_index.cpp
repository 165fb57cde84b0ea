#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "startrace/index_classes.hpp"
#include "startrace/series_io.hpp"
#include "support.hpp"

#include <cmath>

using namespace startrace;
using st_test::Gen;

namespace {

GradedSeries P(const std::string& s, int dim) { return parse_series(s, dim); }

Monomial mono(std::uint16_t dx, int hbar = 0, int u = 0) {
    Monomial m;
    m.dx = dx;
    m.hbar = static_cast<std::int16_t>(hbar);
    m.u = static_cast<std::int16_t>(u);
    return m;
}

CurvatureMatrix random_curvature(Gen& g, int dim, int rank) {
    auto c = CurvatureMatrix::zero(dim, rank);
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
            for (int a = 0; a < dim; ++a)
                for (int b = a + 1; b < dim; ++b)
                    if (g.coin()) c.at(i, j).add_term(mono(index_mask({a, b})), g.coefficient());
    return c;
}

// one-variable rational power series, truncated at degree n
using Coeffs = std::vector<Rational>;

// sqrt((x/2) / sinh(x/2)) by inverting sinh(x/2)/(x/2) and taking a square root term by term
Coeffs ahat_oracle(int n) {
    Coeffs s(n + 1, Rational(0));
    for (int k = 0; 2 * k <= n; ++k) s[2 * k] = Rational(1) / (factorial(2 * k + 1) * Rational(mpz_class(1) << (2 * k)));
    Coeffs inv(n + 1, Rational(0));
    inv[0] = 1;
    for (int k = 1; k <= n; ++k) {
        Rational acc = 0;
        for (int j = 1; j <= k; ++j) acc += s[j] * inv[k - j];
        inv[k] = -acc;
    }
    Coeffs r(n + 1, Rational(0));
    r[0] = 1;
    for (int k = 1; k <= n; ++k) {
        Rational acc = inv[k];
        for (int j = 1; j < k; ++j) acc -= r[j] * r[k - j];
        r[k] = acc / 2;
    }
    return r;
}

}  // namespace

TEST_CASE("curvature validation") {
    auto c = CurvatureMatrix::zero(4, 2);
    CHECK_NOTHROW(c.validate());
    c.at(0, 1) = P("x1*dx1*dx2 - 3*dx2*dx4", 4);
    CHECK_NOTHROW(c.validate());
    c.at(1, 0) = P("dx1", 4);
    CHECK_THROWS(c.validate());
    c.at(1, 0) = P("h*dx1*dx3", 4);
    CHECK_THROWS(c.validate());
    CHECK_THROWS(CurvatureMatrix::zero(2, 0));
}

TEST_CASE("a-hat of zero curvature is one") {
    for (int r = 1; r <= 3; ++r) CHECK(a_hat_u(CurvatureMatrix::zero(4, r), 4) == GradedSeries::constant(4, 1));
}

TEST_CASE("a-hat: quadratic term on random matrices") {
    Gen g(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 4 + 2 * (trial % 3), rank = 1 + trial % 3;
        auto R = random_curvature(g, dim, rank);
        auto A = a_hat_u(R, dim);
        CHECK(A.coefficient(Monomial{}) == GaussianRational(1));
        // tr(R^2) computed entrywise
        GradedSeries tr2(dim);
        for (int i = 0; i < rank; ++i)
            for (int j = 0; j < rank; ++j) tr2 += multiply(R.at(i, j), R.at(j, i));
        auto deg4 = A.filter([](const Monomial& m) { return m.form_degree() == 4; });
        auto u2 = A.filter([](const Monomial& m) { return m.form_degree() == 4 && m.u == 2; });
        CHECK(u2.shift_u(-2) == tr2 * GaussianRational(frac(-1, 48)));
        CHECK(deg4 == u2);
        for (const auto& [m, c] : A.terms()) {
            CHECK(m.u % 2 == 0);
            CHECK(m.form_degree() == 2 * m.u);
        }
    }
}

TEST_CASE("a-hat: rank one against the sinh series") {
    // rho = dx1 dx2 + dx3 dx4 + dx5 dx6 + dx7 dx8, rho^k = k! (sum of k-fold products)
    auto R = CurvatureMatrix::zero(8, 1);
    R.at(0, 0) = P("dx1*dx2 + dx3*dx4 + dx5*dx6 + dx7*dx8", 8);
    auto A = a_hat_u(R, 8);
    auto ref = ahat_oracle(4);
    CHECK(A.coefficient(mono(0xFF, 0, 4)) == GaussianRational(ref[4] * 24));
    CHECK(A.coefficient(mono(index_mask({0, 1, 2, 3}), 0, 2)) == GaussianRational(ref[2] * 2));
    CHECK(ref[2] == frac(-1, 48));
    CHECK(ref[4] == frac(1, 2560));
    // truncating the form degree drops the top part
    auto A4 = a_hat_u(R, 4);
    CHECK(A4.coefficient(mono(0xFF, 0, 4)) == GaussianRational(0));
    CHECK(A4 == A.filter([](const Monomial& m) { return m.form_degree() <= 4; }));
}

TEST_CASE("chern character") {
    CHECK(chern_character(CurvatureMatrix::zero(2, 3)) == GradedSeries::constant(2, 3));
    auto R = CurvatureMatrix::zero(2, 1);
    R.at(0, 0) = P("5/2*dx1*dx2", 2);
    CHECK(chern_character(R) == P("1 - 5/2*dx1*dx2", 2));
    CHECK(chern_character(R, GaussianRational(3)) == P("1 + 15/2*dx1*dx2", 2));
    auto num = chern_character_numeric(R);
    const double tau = 2 * std::acos(-1.0);
    CHECK(std::abs(num.at(0) - 1.0) < 1e-15);
    CHECK(std::abs(num.at(index_mask({0, 1})) - std::complex<double>(0, 2.5 / tau)) < 1e-15);

    Gen g(4);
    for (int trial = 0; trial < 10; ++trial) {
        auto A = random_curvature(g, 4, 2), B = random_curvature(g, 4, 2);
        auto S = A;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) S.at(i, j) += B.at(i, j);
        auto two = [](const GradedSeries& s) { return s.filter([](const Monomial& m) { return m.form_degree() == 2; }); };
        CHECK(two(chern_character(S)) == two(chern_character(A)) + two(chern_character(B)));
        CHECK(chern_character(A).coefficient(Monomial{}) == GaussianRational(2));
    }
}

TEST_CASE("todd class") {
    CHECK(todd(CurvatureMatrix::zero(4, 2)) == GradedSeries::constant(4, -1));
    // rank 1, rho = a dx1 dx2 + b dx3 dx4: N = e^{-rho} - 1, and N / (1 - e^N) = -1 - rho/2 + rho^2/6
    auto R = CurvatureMatrix::zero(4, 1);
    R.at(0, 0) = P("2*dx1*dx2 - 1/3*dx3*dx4", 4);
    auto rho = R.at(0, 0);
    auto expect = GradedSeries::constant(4, -1) - rho * GaussianRational(frac(1, 2)) +
                  multiply(rho, rho) * GaussianRational(frac(1, 6));
    CHECK(todd(R) == expect);

    // not additive over direct sums
    auto R1 = CurvatureMatrix::zero(4, 1), R2 = CurvatureMatrix::zero(4, 1), S = CurvatureMatrix::zero(4, 2);
    R1.at(0, 0) = P("dx1*dx2", 4);
    R2.at(0, 0) = P("dx3*dx4", 4);
    S.at(0, 0) = R1.at(0, 0);
    S.at(1, 1) = R2.at(0, 0);
    auto sum = todd(R1) + todd(R2);
    auto whole = todd(S);
    CHECK(whole != sum);
    CHECK(whole.coefficient(mono(0xF)) != sum.coefficient(mono(0xF)));
}

TEST_CASE("nest-tsygan leading terms") {
    const GaussianRational area(frac(7, 3));
    auto pair = constant_pairing(area);
    for (int d = 1; d <= 3; ++d) {
        const int dim = 2 * d;
        GradedSeries omega(dim);
        for (int k = 0; k < d; ++k) omega += GradedSeries::dx(dim, 2 * k) * GradedSeries::dx(dim, 2 * k + 1);
        // int omega^d / d! = area, since omega^d = d! dx1 ... dx_{2d}
        auto tr = nest_tsygan_eval(GradedSeries::constant(dim, 1), -omega, d, pair);
        GaussianRational sign = d % 2 ? GaussianRational(-1) : GaussianRational(1);
        CHECK(tr.coefficient(mono(0, -d)) == sign * area);
        CHECK(tr.size() == 1);
    }
    // the mixed term: omega_hbar = -omega + hbar c dx1 dx2 on d = 2
    auto omega = P("dx1*dx2 + dx3*dx4", 4);
    auto w = -omega + GradedSeries::hbar(4) * P("5*dx1*dx2", 4);
    auto tr = nest_tsygan_eval(GradedSeries::constant(4, 1), w, 2, pair);
    CHECK(tr.coefficient(mono(0, -2)) == area);
    CHECK(tr.coefficient(mono(0, -1)) == GaussianRational(-5) * area);
    CHECK(tr.coefficient(mono(0, 0)) == GaussianRational(0));
    // a top-degree A-hat term adds at hbar^0
    auto A = GradedSeries::constant(4, 1) + P("3*dx1*dx2*dx3*dx4*u^2", 4);
    auto tr2 = nest_tsygan_eval(A, -omega, 2, pair);
    CHECK(tr2.coefficient(mono(0, 0)) == GaussianRational(3) * area);
    CHECK_THROWS(nest_tsygan_eval(GradedSeries::constant(4, 1), P("dx1", 4), 2, pair));
}

TEST_CASE("tamarkin-tsygan evaluations") {
    const GaussianRational vol(frac(3, 2));
    auto pair = constant_pairing(vol);
    auto p = PoissonData::constant(2, {{0, 0}, {0, 0}});
    auto one = GradedSeries::constant(2, 1);
    auto c1 = ChainElement::word({one});
    auto I = tamarkin_tsygan_eval(c1, p, one, pair);
    CHECK(I.coefficient(Monomial{}) == vol);
    CHECK(I.size() == 1);

    Gen g(2);
    auto A = a_hat_u(random_curvature(g, 2, 2), 2);
    CHECK(tamarkin_tsygan_eval(c1, p, A, pair) == I);

    // Co([1 | x1 | x2]) = dx1 dx2 / 2, which wedges to zero against Omega when pi = 0
    auto c2 = ChainElement::word({one, P("x1", 2), P("x2", 2)});
    CHECK(hkr(c2) == P("1/2*dx1*dx2", 2));
    CHECK(tamarkin_tsygan_eval(c2, p, one, pair).is_zero());
    // Co([x1 | x2]) = x1 dx2 has no top part
    CHECK(tamarkin_tsygan_eval(ChainElement::word({P("x1", 2), P("x2", 2)}), p, one, pair).is_zero());
    // u-shifted chains do not enter Co(c_0)
    CHECK(tamarkin_tsygan_eval(ChainElement::word({one}, 1), p, one, pair).is_zero());

    // constant pi: exp(iota_pi / u) Omega = Omega + (1/u) iota_pi Omega, with iota_{d1 ^ d2} dx1 dx2 = -1
    auto q = PoissonData::constant(2, {{0, 4}, {-4, 0}});
    auto Iq = tamarkin_tsygan_eval(c1, q, one, pair);
    CHECK(Iq == I);
    auto Iq2 = tamarkin_tsygan_eval(c2, q, one, pair);
    CHECK(Iq2.size() == 1);
    CHECK(Iq2.coefficient(mono(0, 0, -1)) == vol * GaussianRational(-2));

    CHECK_THROWS(constant_pairing(1)(P("x1", 2)));
}
