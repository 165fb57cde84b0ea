#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "startrace/series_io.hpp"
#include "startrace/trace.hpp"
#include "support.hpp"

#include <cmath>

using namespace startrace;
using st_test::Gen;

namespace {

const double kPi = std::acos(-1.0);

GradedSeries P(const std::string& s, int dim = 2) { return parse_series(s, dim); }

GaussianPoly damped(const std::string& poly, int dim, const Rational& a = 1, std::vector<Rational> c = {}) {
    if (c.empty()) c.assign(dim, Rational(0));
    return GaussianPoly(P(poly, dim), GaussianExponent::centered(a, c));
}

// closed form: int x^n exp(-a x^2 + b x) dx via the binomial expansion around the mean
double moment_oracle(int n, double a, double b) {
    const double mu = b / (2 * a);
    double acc = 0;
    for (int k = 0; k <= n; k += 2) {
        double central = std::tgamma((k + 1) / 2.0) / std::pow(a, (k + 1) / 2.0);
        acc += std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)) * std::pow(mu, n - k) * central;
    }
    return acc * std::exp(b * b / (4 * a));
}

// midpoint rule on a box, independent of the quadrature module
std::complex<double> grid_integral(const GaussianPoly& f, double half, int cells) {
    const double h = 2 * half / cells;
    std::complex<double> acc = 0;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) acc += f.eval({-half + (i + 0.5) * h, -half + (j + 0.5) * h});
    return acc * h * h;
}

PoissonData lie_poisson_so3() {
    PoissonData p;
    p.dim = 3;
    p.pi = MultiVector(3);
    p.pi.add(index_mask({0, 1}), P("x3", 3));
    p.pi.add(index_mask({1, 2}), P("x1", 3));
    p.pi.add(index_mask({0, 2}), P("-x2", 3));
    p.h = GradedSeries(3);
    p.volume = P("1", 3);
    return p;
}

}  // namespace

TEST_CASE("gaussian moments") {
    for (int n = 0; n <= 12; ++n)
        for (double a : {0.5, 1.0, 3.0})
            for (double b : {0.0, -1.0, 2.5}) {
                double ref = moment_oracle(n, a, b);
                CHECK(gaussian_moment(n, a, b) == doctest::Approx(ref).epsilon(1e-11));
            }
    CHECK_THROWS(gaussian_moment(2, 0.0, 1.0));
}

TEST_CASE("gaussian polynomials: products and derivatives") {
    auto f = damped("x1^2 - 3*x2 + i*x1*x2", 2, frac(1, 2), {Rational(1), frac(-1, 3)});
    auto g = damped("1 + x2", 2, 2);
    std::vector<double> pt{0.3, -0.7};
    CHECK(std::abs((f * g).eval(pt) - f.eval(pt) * g.eval(pt)) < 1e-12);
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i) {
        auto a = pt, b = pt;
        a[i] += h;
        b[i] -= h;
        auto fd = (f.eval(a) - f.eval(b)) / (2 * h);
        CHECK(std::abs(f.diff(i).eval(pt) - fd) < 1e-8);
    }
    CHECK((f - f).is_zero());
    CHECK(GaussianPoly(P("5"), GaussianExponent::zero(2)).diff(0).is_zero());
}

TEST_CASE("quadrature against a grid sum") {
    auto f = damped("x1^2*x2 + 2*x2^2 - 1/3 + i*x1", 2, 1, {frac(1, 2), Rational(-1)});
    auto q = f.integrate();
    auto grid = grid_integral(f, 9.0, 1500);
    CHECK(std::abs(q - grid) < 1e-7);
    CHECK(damped("1", 2).integrate().real() == doctest::Approx(kPi).epsilon(1e-12));
    CHECK_THROWS(GaussianPoly(P("1"), GaussianExponent::zero(2)).integrate());
}

TEST_CASE("trace at leading order") {
    auto p = PoissonData::constant(2, {{0, 1}, {-1, 0}});
    TraceOptions opt;
    auto r = trace_assemble(p, damped("1", 2), opt);
    CHECK(std::abs(r.hbar.at(0).value - kPi) < 1e-6);
    CHECK(r.hbar.at(0).exact);

    auto zero = trace_assemble(p, GaussianPoly(2), opt);
    CHECK(zero.hbar.at(0).value == std::complex<double>(0));

    // constant pi: every pi graph carries a derivative of pi or a contraction of pi with itself
    opt.order = 2;
    auto r2 = trace_assemble(p, damped("x1^2 + x1*x2^3", 2, 1, {frac(1, 3), Rational(0)}), opt);
    CHECK(r2.hbar.at(1).value == std::complex<double>(0));
    CHECK(r2.hbar.at(2).value == std::complex<double>(0));
}

TEST_CASE("trace is linear in f") {
    auto p = PoissonData::constant(2, {{0, 2}, {-2, 0}});
    TraceOptions opt;
    auto f = damped("x1^2 + 1", 2, 1, {Rational(1), Rational(0)});
    auto g = damped("x1*x2 - i", 2, 2);
    auto lhs = trace_assemble(p, f * GaussianRational(2) + g * GaussianRational(-3), opt).hbar.at(0).value;
    auto rhs = 2.0 * trace_assemble(p, f, opt).hbar.at(0).value - 3.0 * trace_assemble(p, g, opt).hbar.at(0).value;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
}

TEST_CASE("h vertices carry int phi = 1") {
    // d = 3, pi = d2 ^ d3 with the Casimir h = x1
    auto p = PoissonData::constant(3, {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}});
    p.h = P("x1", 3);
    auto f = damped("1 + x1", 3);
    const double s = std::pow(kPi, 1.5);
    TraceOptions opt;
    opt.order = 1;
    auto r1 = trace_assemble(p, f, opt);
    // int f + int f h = pi^{3/2} + pi^{3/2} / 2
    CHECK(r1.hbar.at(0).value.real() == doctest::Approx(1.5 * s).epsilon(1e-12));
    CHECK(r1.hbar.at(0).exact);
    int residual = 0;
    for (const auto& c : r1.contributions)
        if (c.n_h == 1) {
            ++residual;
            CHECK(c.weight == std::complex<double>(1));
            CHECK(c.integral.real() == doctest::Approx(s / 2).epsilon(1e-12));
        }
    CHECK(residual == 1);
    opt.order = 2;
    // adds int f h^2 / 2 = pi^{3/2} / 4; the pi-h graph vanishes because h is a Casimir
    CHECK(trace_assemble(p, f, opt).hbar.at(0).value.real() == doctest::Approx(1.75 * s).epsilon(1e-12));
}

TEST_CASE("graph values agree with the graph engine on polynomials") {
    auto p = lie_poisson_so3();
    auto f = P("x1^2*x2 + x3^3 - x1*x2*x3", 3);
    GaussianPoly F(f, GaussianExponent::zero(3));
    for (const auto& g : enumerate({2, 2}, 1, 0)) {
        auto mine = trace_graph_value(g, 2, p, F);
        auto ref = evaluate_VGamma(g, {p.pi, p.pi}, {f});
        GaussianPoly expect(ref.component(std::uint16_t{0}), GaussianExponent::zero(3));
        if (ref.component(std::uint16_t{0}).is_zero()) expect = GaussianPoly(3);
        CHECK(mine == expect);
    }
}

TEST_CASE("second order with a linear Poisson structure uses sampled weights") {
    auto p = lie_poisson_so3();
    CHECK_NOTHROW(p.validate());
    TraceOptions opt;
    opt.order = 2;
    opt.samples = 50000;
    opt.seed = 3;
    auto f = damped("x1^2 + x2*x3", 3);
    auto r = trace_assemble(p, f, opt);
    CHECK(r.hbar.at(1).value == std::complex<double>(0));
    bool sampled = false;
    for (const auto& c : r.contributions) sampled = sampled || !c.exact_weight;
    CHECK(sampled);
    CHECK(!r.hbar.at(2).exact);
    CHECK(std::isfinite(r.hbar.at(2).value.real()));
    auto again = trace_assemble(p, f, opt);
    CHECK(again.hbar.at(2).value == r.hbar.at(2).value);
}

TEST_CASE("trace rejects bad input") {
    auto p = PoissonData::constant(2, {{0, 1}, {-1, 0}});
    p.h = P("x1");
    CHECK_THROWS(trace_assemble(p, damped("1", 2), TraceOptions{}));
    auto q = PoissonData::constant(2, {{0, 1}, {-1, 0}});
    TraceOptions opt;
    opt.order = 3;
    CHECK_THROWS(trace_assemble(q, damped("1", 2), opt));
    RForm R;
    R.dim = 2;
    R.comp.assign(2, std::vector<GradedSeries>(2, GradedSeries(2)));
    R.comp[0][0] = P("-1");
    R.comp[1][1] = P("-1 + y1");
    opt.order = 0;
    opt.R = &R;
    CHECK_THROWS_AS(trace_assemble(q, damped("1", 2), opt), std::domain_error);
    R.comp[1][1] = P("-1");
    CHECK_NOTHROW(trace_assemble(q, damped("1", 2), opt));
}

TEST_CASE("trace commutator check") {
    auto p = PoissonData::constant(2, {{0, 1}, {-1, 0}});
    auto f = damped("x1", 2), g = damped("x2", 2);
    CHECK(trace_commutator_check(p, f, g, 1) < 1e-6);
    CHECK(trace_commutator_check(p, f, f, 1) == 0.0);
    GaussianPoly one(P("3"), GaussianExponent::zero(2));
    CHECK(trace_commutator_check(p, one, g, 1) == 0.0);

    // the first-order commutator itself is not zero; only its integral is
    auto c = commutator_first_order(p, f, g);
    CHECK(!c.is_zero());
    CHECK(std::abs(c.eval({0.0, 0.0}) - std::complex<double>(0, -1)) < 1e-14);

    Gen gen(5);
    Gen::Shape sh{.dim = 2, .terms = 3, .xdeg = 3};
    for (int k = 0; k < 5; ++k) {
        GaussianPoly a(gen.series(sh), GaussianExponent::centered(frac(gen.uniform(1, 4), 2), {gen.small_rational(), gen.small_rational()}));
        GaussianPoly b(gen.series(sh), GaussianExponent::centered(frac(gen.uniform(1, 4), 2), {gen.small_rational(), gen.small_rational()}));
        CHECK(trace_commutator_check(p, a, b, 1) < 1e-6);
    }
}
