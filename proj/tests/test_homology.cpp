#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "startrace/homology.hpp"
#include "startrace/series_io.hpp"
#include "support.hpp"

using namespace startrace;
using st_test::Gen;

namespace {

GradedSeries P(const std::string& s, int dim = 2, Truncation t = {}) { return parse_series(s, dim, t); }

ChainElement W(const std::vector<std::string>& slots, int dim = 2, int u = 0) {
    std::vector<GradedSeries> a;
    for (const auto& s : slots) a.push_back(P(s, dim));
    return ChainElement::word(a, u);
}

// b computed on whole slots before expansion
ChainElement b_oracle(const std::vector<GradedSeries>& a) {
    const int m = static_cast<int>(a.size()) - 1;
    ChainElement out(a[0].dim());
    if (m == 0) return out;
    for (int i = 0; i < m; ++i) {
        std::vector<GradedSeries> w;
        for (int j = 0; j < i; ++j) w.push_back(a[j]);
        w.push_back(multiply(a[i], a[i + 1]));
        for (int j = i + 2; j <= m; ++j) w.push_back(a[j]);
        out += ChainElement::word(w, 0, GaussianRational(i % 2 ? -1 : 1));
    }
    std::vector<GradedSeries> w{multiply(a[m], a[0])};
    for (int j = 1; j < m; ++j) w.push_back(a[j]);
    out += ChainElement::word(w, 0, GaussianRational(m % 2 ? -1 : 1));
    return out;
}

std::vector<GradedSeries> random_slots(Gen& g, int m, int dim) {
    Gen::Shape sh{.dim = dim, .terms = 2, .xdeg = 2};
    std::vector<GradedSeries> a;
    for (int i = 0; i <= m; ++i) a.push_back(g.series(sh));
    return a;
}

ChainElement random_chain(Gen& g, int dim) {
    ChainElement c(dim);
    for (int k = 0; k < 2; ++k) c += ChainElement::word(random_slots(g, g.uniform(0, 4), dim), g.uniform(0, 1));
    return c;
}

// homogeneous element of the odd model: coefficient polynomials times theta monomials of degree deg
GradedSeries odd_element(Gen& g, int dim, int deg, int xdeg, Truncation t = {}) {
    GradedSeries r(dim, t);
    std::vector<int> idx(dim);
    for (int i = 0; i < dim; ++i) idx[i] = i;
    for (int k = 0; k < 3; ++k) {
        std::shuffle(idx.begin(), idx.end(), g.rng);
        Monomial m;
        for (int j = 0; j < deg; ++j) m.dx |= static_cast<std::uint16_t>(1u << idx[j]);
        int xd = g.uniform(0, xdeg);
        for (int j = 0; j < xd; ++j) m.x[g.uniform(0, dim - 1)]++;
        r.add_term(m, g.coefficient());
    }
    return r;
}

GradedSeries low_x(const GradedSeries& s, int bound) {
    return s.filter([bound](const Monomial& m) { return m.xdeg() <= bound; });
}

int sign(int e) { return (e & 1) ? -1 : 1; }

}  // namespace

TEST_CASE("chain normalization") {
    CHECK(W({"x1", "1"}).is_zero());
    CHECK(W({"x1", "x2 + 3"}) == W({"x1", "x2"}));
    CHECK(!W({"1", "x1"}).is_zero());
    CHECK_THROWS(W({"x1", "y1"}));
}

TEST_CASE("hochschild b examples") {
    CHECK(hochschild_b(W({"x1", "x2"})).is_zero());
    CHECK(hochschild_b(W({"x1"})).is_zero());
    CHECK(hochschild_b(W({"x1", "x2", "x1"})) == W({"x1*x2", "x1"}) - W({"x1", "x2*x1"}) + W({"x1*x1", "x2"}));
}

TEST_CASE("hochschild b matches the slotwise formula") {
    Gen g(41);
    for (int k = 0; k < 60; ++k) {
        auto a = random_slots(g, g.uniform(0, 4), 3);
        CHECK(hochschild_b(ChainElement::word(a)) == b_oracle(a));
    }
}

TEST_CASE("connes B examples") {
    CHECK(connes_B(W({"x1"})) == W({"1", "x1"}));
    CHECK(connes_B(W({"1", "x1"})).is_zero());
    CHECK(connes_B(connes_B(W({"x1", "x2"}))).is_zero());
    // B[a0|a1] = [1|a0|a1] - [1|a1|a0]
    CHECK(connes_B(W({"x1", "x2"})) == W({"1", "x1", "x2"}) - W({"1", "x2", "x1"}));
}

TEST_CASE("cyclic complex identities on random normalized chains") {
    Gen g(7);
    for (int k = 0; k < 100; ++k) {
        auto c = random_chain(g, 3);
        auto bc = hochschild_b(c), Bc = connes_B(c);
        REQUIRE(hochschild_b(bc).is_zero());
        REQUIRE(connes_B(Bc).is_zero());
        REQUIRE((hochschild_b(Bc) + connes_B(bc)).is_zero());
        REQUIRE(cyclic_differential(cyclic_differential(c)).is_zero());
    }
}

TEST_CASE("hkr") {
    CHECK(hkr(W({"1", "x1", "x2"})) == P("1/2*dx1*dx2"));
    CHECK(hkr(W({"x1"})) == P("x1"));
    CHECK(hkr(W({"x1"}, 2, 2)) == P("u^2*x1"));
    CHECK(hkr(hochschild_b(W({"x1", "x2", "x1"}))).is_zero());
    Gen g(9);
    for (int k = 0; k < 60; ++k) {
        auto c = ChainElement::word(random_slots(g, g.uniform(1, 3), 3), g.uniform(0, 2));
        REQUIRE(hkr(hochschild_b(c)).is_zero());
    }
}

TEST_CASE("bv divergence examples") {
    auto one = P("1");
    MultiVector v(2);
    v.add(index_mask({0}), P("x1"));
    auto dv = bv_divergence(v, one);
    CHECK(dv.component(std::uint16_t{0}) == P("1"));
    MultiVector c(2);
    c.add(index_mask({0}), P("3"));
    c.add(index_mask({1}), P("-1/2"));
    CHECK(bv_divergence(c, P("5")).is_zero());

    // Omega = (1 + x1) dx: Div(d_1) = 1/(1 + x1)
    Truncation t;
    t.x_max = 4;
    MultiVector e(2);
    e.add(index_mask({0}), P("1", 2, t));
    CHECK(bv_divergence(e, P("1 + x1")).component(std::uint16_t{0}) == P("1 - x1 + x1^2 - x1^3 + x1^4"));
    CHECK_THROWS(bv_divergence(v, P("1 + x1")));
}

TEST_CASE("schouten bracket examples") {
    MultiVector d1(2), x1d2(2);
    d1.add(index_mask({0}), P("1"));
    x1d2.add(index_mask({1}), P("x1"));
    auto br = schouten_bracket(d1, x1d2);
    CHECK(br.components().size() == 1);
    CHECK(br.component(index_mask({1})) == P("1"));

    MultiVector pc(2);
    pc.add(index_mask({0, 1}), P("3"));
    CHECK(schouten_bracket(pc, pc).is_zero());
    MultiVector px(2);
    px.add(index_mask({0, 1}), P("x1"));
    CHECK(schouten_bracket(px, px).is_zero());
    MultiVector q(3);
    q.add(index_mask({0, 1}), P("x1", 3));
    q.add(index_mask({0, 2}), P("1", 3));
    CHECK(!schouten_bracket(q, q).is_zero());
}

TEST_CASE("schouten bracket on vector fields is the Lie bracket") {
    Gen g(19);
    Gen::Shape sh{.dim = 3, .terms = 3, .xdeg = 3};
    for (int k = 0; k < 40; ++k) {
        std::vector<GradedSeries> X, Y;
        MultiVector x(3), y(3);
        for (int i = 0; i < 3; ++i) {
            X.push_back(g.series(sh));
            Y.push_back(g.series(sh));
            x.add(index_mask({i}), X[i]);
            y.add(index_mask({i}), Y[i]);
        }
        MultiVector lie(3);
        for (int j = 0; j < 3; ++j) {
            GradedSeries c(3);
            for (int i = 0; i < 3; ++i) c += multiply(X[i], diff_x(Y[j], i)) - multiply(Y[i], diff_x(X[j], i));
            lie.add(index_mask({j}), c);
        }
        CHECK(schouten_bracket(x, y) == lie);
    }
}

TEST_CASE("schouten bracket algebraic identities") {
    Gen g(23);
    for (int k = 0; k < 60; ++k) {
        int pa = g.uniform(0, 3), pb = g.uniform(0, 3), pc = g.uniform(0, 3);
        auto a = odd_element(g, 4, pa, 2), b = odd_element(g, 4, pb, 2), c = odd_element(g, 4, pc, 2);
        // graded antisymmetry
        CHECK(schouten_odd(a, b) == schouten_odd(b, a) * GaussianRational(-sign((pa - 1) * (pb - 1))));
        // Leibniz rule with shifted degrees |x| = deg - 1
        const int sb = pb - 1, sc = pc - 1;
        CHECK(schouten_odd(multiply(a, b), c) ==
              multiply(a, schouten_odd(b, c)) + multiply(schouten_odd(a, c), b) * GaussianRational(sign(sc * (sb + 1))));
    }
}

TEST_CASE("BV operator identities") {
    Gen g(31);
    Truncation t;
    t.x_max = 8;
    const std::vector<GradedSeries> volumes{P("1", 4), P("2 + x1*x3 - x2", 4)};
    for (const auto& rho : volumes)
        for (int k = 0; k < 40; ++k) {
            int pa = g.uniform(0, 4), pb = g.uniform(0, 4), pc = g.uniform(0, 4);
            auto a = odd_element(g, 4, pa, 2, t), b = odd_element(g, 4, pb, 2, t), c = odd_element(g, 4, pc, 2, t);
            auto D = [&](const GradedSeries& s) { return bv_laplacian(s, rho); };
            CHECK(low_x(D(D(a)), 7).is_zero());
            auto ab = multiply(a, b), bc = multiply(b, c), ac = multiply(a, c), abc = multiply(ab, c);
            GradedSeries rhs = multiply(D(ab), c) + multiply(a, D(bc)) * GaussianRational(sign(pa)) +
                               multiply(b, D(ac)) * GaussianRational(sign((pa - 1) * pb)) - multiply(multiply(D(a), b), c) -
                               multiply(multiply(a, D(b)), c) * GaussianRational(sign(pa)) -
                               multiply(ab, D(c)) * GaussianRational(sign(pa + pb));
            CHECK(D(abc) == rhs);
            CHECK(D(GradedSeries::constant(4, 1, t)).is_zero());
            // the bracket induced by the operator is the Schouten bracket
            GradedSeries induced = (D(ab) - multiply(D(a), b)) * GaussianRational(sign(pa)) - multiply(a, D(b));
            CHECK(induced == schouten_odd(a, b).truncated(t));
        }
}

TEST_CASE("Poisson data") {
    auto p = PoissonData::constant(2, {{0, 1}, {-1, 0}});
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS(PoissonData::constant(2, {{0, 1}, {1, 0}}));

    // constant pi with a non-Casimir h is not unimodular
    auto bad = p;
    bad.h = P("x1");
    CHECK_THROWS(bad.validate());

    // d = 3, pi = d2 ^ d3 with the Casimir h = x1
    auto c = PoissonData::constant(3, {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}});
    c.h = P("x1", 3);
    CHECK_NOTHROW(c.validate());

    // pi = x1 d1 ^ d2 has divergence -d2 for dx; the density 1/x1 is not polynomial, so reject
    PoissonData lin;
    lin.dim = 2;
    lin.pi = MultiVector(2);
    lin.pi.add(index_mask({0, 1}), P("x1"));
    lin.h = GradedSeries(2);
    lin.volume = P("1");
    CHECK(!lin.is_unimodular());

    PoissonData jac;
    jac.dim = 3;
    jac.pi = MultiVector(3);
    jac.pi.add(index_mask({0, 1}), P("x1", 3));
    jac.pi.add(index_mask({0, 2}), P("1", 3));
    jac.h = GradedSeries(3);
    jac.volume = P("1", 3);
    CHECK_THROWS(jac.validate());
}
