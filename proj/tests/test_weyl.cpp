#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "startrace/series_io.hpp"
#include "startrace/weyl.hpp"
#include "support.hpp"

#include <chrono>

using namespace startrace;
using st_test::Gen;

namespace {

GradedSeries P(const std::string& s, int dim = 2, Truncation t = {}) { return parse_series(s, dim, t); }

// Naive expansion over ordered index sequences:
// sum_k (-i h/2)^k / k! w^{i1 j1}...w^{ik jk} d_{i1..ik} a * d_{j1..jk} b
GradedSeries moyal_oracle(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s, int kmax) {
    const int d = s.dim;
    GradedSeries out(d, a.truncation().meet(b.truncation()));
    struct Item {
        GradedSeries l, r;
        GaussianRational w;
    };
    std::vector<Item> level{{a, b, GaussianRational(1)}};
    const GaussianRational step(Rational(0), frac(-1, 2));
    for (int k = 0; k <= kmax && !level.empty(); ++k) {
        GaussianRational pref = pow(step, k) / GaussianRational(factorial(k));
        GradedSeries hk = GradedSeries::hbar(d, k);
        for (const auto& it : level) out += multiply(multiply(it.l, it.r), hk) * (it.w * pref);
        std::vector<Item> next;
        for (const auto& it : level)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    if (sgn(s.omega_inv[i][j]) == 0) continue;
                    auto l = diff_y(it.l, i), r = diff_y(it.r, j);
                    if (!l.is_zero() && !r.is_zero()) next.push_back({l, r, it.w * GaussianRational(s.omega_inv[i][j])});
                }
        level = std::move(next);
    }
    return out;
}

ConnectionData curved_connection(const SymplecticData& s) {
    SymmetricGenerator S;
    S[{0, 0, 0}] = P("x1^2");
    S[{0, 0, 1}] = P("x2");
    S[{0, 1, 1}] = P("1/2");
    return ConnectionData::from_generator(s, S);
}

}  // namespace

TEST_CASE("symplectic data") {
    auto s = SymplecticData::standard(2);
    CHECK(s.omega_inv[0][1] == 1);
    CHECK(s.omega[0][1] == -1);
    CHECK_THROWS(SymplecticData::from_matrix({{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}));
    CHECK_THROWS(SymplecticData::from_matrix({{Rational(0), Rational(0)}, {Rational(0), Rational(0)}}));
    auto s4 = SymplecticData::from_matrix({{0, 2, 0, 1}, {-2, 0, 0, 0}, {0, 0, 0, -3}, {-1, 0, 3, 0}});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Rational acc = 0;
            for (int k = 0; k < 4; ++k) acc += s4.omega[i][k] * s4.omega_inv[k][j];
            CHECK(acc == (i == j ? 1 : 0));
        }
}

TEST_CASE("moyal examples") {
    auto s = SymplecticData::standard(2);
    auto a = P("x1*y1^2 + i*h*y2 + dx1*y1");
    CHECK(moyal(a, P("1"), s) == a);
    CHECK(moyal(P("1"), a, s) == a);
    CHECK(moyal(P("y1"), P("y2"), s) == P("y1*y2 - i/2*h"));
    CHECK(graded_commutator(P("y1"), P("y2"), s) == P("-i*h"));
    CHECK(commutator_over_hbar(P("y1"), P("y2"), s) == P("-i"));
}

TEST_CASE("moyal agrees with the naive expansion") {
    Gen g(5);
    auto s = SymplecticData::from_matrix({{0, 2, 0, 1}, {-2, 0, 0, 0}, {0, 0, 0, -3}, {-1, 0, 3, 0}});
    Gen::Shape sh{.dim = 4, .terms = 4, .xdeg = 1, .ydeg = 3, .hbar = 1, .forms = 2};
    for (int k = 0; k < 30; ++k) {
        auto a = g.series(sh), b = g.series(sh);
        CHECK(moyal(a, b, s) == moyal_oracle(a, b, s, 8));
    }
}

TEST_CASE("moyal associativity on random triples in dimension 4") {
    Gen g(1);
    auto s = SymplecticData::standard(4);
    Truncation t;
    t.hbar_max = 4;
    t.y_max = 6;
    Gen::Shape sh{.dim = 4, .terms = 4, .xdeg = 1, .ydeg = 2, .hbar = 1, .forms = 1};
    auto start = std::chrono::steady_clock::now();
    for (int k = 0; k < 100; ++k) {
        auto a = g.series(sh, t), b = g.series(sh, t), c = g.series(sh, t);
        REQUIRE(moyal(moyal(a, b, s), c, s) == moyal(a, moyal(b, c, s), s));
    }
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}

TEST_CASE("commutator reproduces the bracket at leading order") {
    Gen g(3);
    auto s = SymplecticData::standard(4);
    Gen::Shape sh{.dim = 4, .terms = 4, .xdeg = 1, .ydeg = 3, .hbar = 0};
    for (int k = 0; k < 40; ++k) {
        auto a = g.series(sh), b = g.series(sh);
        auto lead = commutator_over_hbar(a, b, s).filter([](const Monomial& m) { return m.hbar == 0; });
        CHECK(lead == poisson_bracket_y(a, b, s));
    }
}

TEST_CASE("symbol map") {
    CHECK(symbol_sigma(P("y1*y2 + h*x1")) == P("h*x1"));
    CHECK(symbol_sigma(P("1")) == P("1"));
    CHECK(symbol_sigma(P("y1")).is_zero());
}

TEST_CASE("delta operators") {
    CHECK(delta_op(P("y1*y2")) == P("dx1*y2 + dx2*y1"));
    CHECK(delta_inverse(P("dx1")) == P("y1"));
    CHECK(delta_op(P("1")).is_zero());

    Gen g(17);
    Gen::Shape sh{.dim = 3, .terms = 6, .xdeg = 1, .ydeg = 3, .hbar = 1, .forms = 3};
    for (int k = 0; k < 100; ++k) {
        auto a = g.series(sh);
        CHECK(delta_op(delta_op(a)).is_zero());
        CHECK(delta_star(delta_star(a)).is_zero());
        auto a00 = a.filter([](const Monomial& m) { return m.ydeg() == 0 && m.dx == 0; });
        CHECK(a == delta_op(delta_inverse(a)) + delta_inverse(delta_op(a)) + a00);
        // delta delta* + delta* delta = (p+q) on homogeneous pieces
        for (int p = 0; p <= 3; ++p)
            for (int q = 0; q <= 3; ++q) {
                auto h = a.filter([&](const Monomial& m) { return m.ydeg() == p && m.form_degree() == q; });
                CHECK(delta_op(delta_star(h)) + delta_star(delta_op(h)) == h * GaussianRational(p + q));
            }
    }
}

TEST_CASE("nabla examples") {
    auto s = SymplecticData::standard(2);
    auto flat = ConnectionData::flat(2);
    CHECK(nabla(P("x1*y2"), flat) == P("dx1*y2"));
    CHECK(nabla(P("1"), flat).is_zero());
    ConnectionData c = ConnectionData::flat(2);
    c.gamma[0][0][0] = P("x2");
    CHECK(nabla(P("y1"), c) == P("-x2*y1*dx1"));
}

TEST_CASE("connections from generators preserve omega") {
    auto s = SymplecticData::standard(2);
    auto c = curved_connection(s);
    CHECK(!c.is_flat());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) CHECK(c.gamma[i][j][k] == c.gamma[i][k][j]);
    CHECK(nabla(s.gamma0(), c).is_zero());
    CHECK(nabla(s.form(), c).is_zero());
    auto bad = ConnectionData::flat(2).gamma;
    bad[0][0][0] = P("1");
    CHECK_THROWS(ConnectionData::from_christoffel(s, bad));
}

TEST_CASE("nabla is a derivation") {
    Gen g(23);
    auto s = SymplecticData::standard(2);
    auto c = curved_connection(s);
    Gen::Shape sh{.dim = 2, .terms = 4, .xdeg = 2, .ydeg = 3, .hbar = 1, .forms = 1};
    for (int k = 0; k < 60; ++k) {
        auto a = g.series(sh), b = g.series(sh);
        auto ao = a.filter([](const Monomial& m) { return m.form_degree() & 1; });
        auto ae = a - ao;
        CHECK(nabla(a * b, c) == nabla(a, c) * b + ae * nabla(b, c) - ao * nabla(b, c));
        // also a derivation of the fibrewise product
        CHECK(nabla(moyal(a, b, s), c) ==
              moyal(nabla(a, c), b, s) + moyal(ae, nabla(b, c), s) - moyal(ao, nabla(b, c), s));
    }
}

TEST_CASE("weyl curvature") {
    auto s = SymplecticData::standard(2);
    CHECK(weyl_curvature_F(ConnectionData::flat(2), s).is_zero());

    // constant Gamma from S_111 = 1: the quadratic term vanishes in d = 2
    SymmetricGenerator S1;
    S1[{0, 0, 0}] = P("1");
    auto c1 = ConnectionData::from_generator(s, S1);
    CHECK(!c1.is_flat());
    CHECK(weyl_curvature_F(c1, s).is_zero());

    auto c = curved_connection(s);
    auto F = weyl_curvature_F(c, s);
    CHECK(!F.is_zero());
    for (const auto& [m, v] : F.terms()) {
        CHECK(m.form_degree() == 2);
        CHECK(m.ydeg() == 2);
    }
}

TEST_CASE("nabla squared is the inner derivation by F") {
    auto s = SymplecticData::standard(2);
    auto c = curved_connection(s);
    auto cal = calibrate_prefactor(s, c);
    CHECK(cal.c == GaussianRational::I());
    auto F = weyl_curvature_F(c, s);
    Gen g(31);
    Gen::Shape sh{.dim = 2, .terms = 5, .xdeg = 2, .ydeg = 4, .hbar = 1, .forms = 1};
    for (int k = 0; k < 60; ++k) {
        auto a = g.series(sh);
        CHECK(nabla(nabla(a, c), c) == commutator_over_hbar(F, a, s) * cal.c);
    }
    // dimension 4 with a mixed generator
    auto s4 = SymplecticData::standard(4);
    SymmetricGenerator S;
    S[{0, 1, 2}] = P("x4", 4);
    S[{1, 1, 3}] = P("x1*x3 + 1", 4);
    S[{0, 0, 0}] = P("x2", 4);
    auto c4 = ConnectionData::from_generator(s4, S);
    auto F4 = weyl_curvature_F(c4, s4);
    CHECK(!F4.is_zero());
    Gen::Shape sh4{.dim = 4, .terms = 4, .xdeg = 1, .ydeg = 3, .hbar = 1, .forms = 1};
    for (int k = 0; k < 20; ++k) {
        auto a = g.series(sh4);
        CHECK(nabla(nabla(a, c4), c4) == commutator_over_hbar(F4, a, s4) * GaussianRational::I());
    }
}

TEST_CASE("calibration in the flat case") {
    auto s = SymplecticData::standard(2);
    auto cal = calibrate_prefactor(s, ConnectionData::flat(2));
    CHECK(cal.c == GaussianRational::I());
    CHECK(cal.flat_identity);
    CHECK(cal.curvature_identity);
    auto g0 = s.gamma0();
    CHECK(commutator_over_hbar(g0, g0, s) * (GaussianRational::I() * GaussianRational(frac(1, 2))) == -s.form());
}
