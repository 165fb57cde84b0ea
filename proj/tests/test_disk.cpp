#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "startrace/disk.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace startrace;

namespace {

constexpr double kPi = std::numbers::pi;

DiskPoint random_point(std::mt19937_64& rng, double rmax = 0.95) {
    std::uniform_real_distribution<double> u(0, 1);
    return std::polar(rmax * std::sqrt(u(rng)), 2 * kPi * u(rng));
}

// angle difference folded into (-pi, pi]
double fold(double a) { return std::remainder(a, 2 * kPi); }

// P from the potential (1/2pi)(arg(z-w) + arg(1 - z conj w)) plus (y dx - x dy)/2pi, by central differences
std::array<double, 4> propagator_fd(DiskPoint z, DiskPoint w) {
    auto pot = [](const std::array<double, 4>& v) {
        DiskPoint a(v[0], v[1]), b(v[2], v[3]);
        return std::arg(a - b) + std::arg(1.0 - a * std::conj(b));
    };
    std::array<double, 4> v{z.real(), z.imag(), w.real(), w.imag()}, out{};
    const double h = 1e-6;
    for (int k = 0; k < 4; ++k) {
        auto vp = v, vm = v;
        vp[k] += h;
        vm[k] -= h;
        out[k] = fold(pot(vp) - pot(vm)) / (2 * h) / (2 * kPi);
    }
    out[0] += z.imag() / (2 * kPi);
    out[1] -= z.real() / (2 * kPi);
    return out;
}

}  // namespace

TEST_CASE("propagator examples") {
    auto p = propagator_eval(0.0, 0.5);
    CHECK(p.c[2] == doctest::Approx(0.0));
    CHECK(p.c[3] == doctest::Approx(1 / kPi));
    CHECK(p.c[3] == doctest::Approx(0.3183).epsilon(1e-4));
    // at z = 0 the w-part is d arg(w) / 2 pi
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
        DiskPoint w = random_point(rng);
        auto q = propagator_eval(0.0, w);
        CHECK(q.c[2] == doctest::Approx(-w.imag() / std::norm(w) / (2 * kPi)));
        CHECK(q.c[3] == doctest::Approx(w.real() / std::norm(w) / (2 * kPi)));
    }
    CHECK_THROWS(propagator_eval(0.3, 0.3));
    CHECK(p.dz() + p.dzbar() == std::complex<double>(p.c[0], 0));
}

TEST_CASE("propagator agrees with the differentiated potential") {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 100; ++k) {
        DiskPoint z = random_point(rng), w = random_point(rng);
        if (std::abs(z - w) < 0.05) continue;
        auto p = propagator_eval(z, w);
        auto fd = propagator_fd(z, w);
        for (int c = 0; c < 4; ++c) CHECK(p.c[c] == doctest::Approx(fd[c]).epsilon(1e-6).scale(1));
        // symmetric combination: P(z,w) + P(w,z) = (1/pi) d arg(z-w) - (r_z^2 dtheta_z + r_w^2 dtheta_w)/2pi
        auto q = propagator_eval(w, z);
        DiskPoint A = 1.0 / (z - w);
        std::array<double, 4> darg{A.imag(), A.real(), -A.imag(), -A.real()};
        std::array<double, 4> rot{z.imag(), -z.real(), w.imag(), -w.real()};
        std::array<double, 4> swapped{q.c[2], q.c[3], q.c[0], q.c[1]};
        for (int c = 0; c < 4; ++c)
            CHECK(p.c[c] + swapped[c] == doctest::Approx(darg[c] / kPi + rot[c] / (2 * kPi)).scale(1));
    }
}

TEST_CASE("propagator partials agree with finite differences") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        DiskPoint z = random_point(rng), w = random_point(rng);
        if (std::abs(z - w) < 0.1) continue;
        auto d = propagator_partials(z, w);
        const double h = 1e-6;
        for (int a = 0; a < 4; ++a) {
            std::array<double, 4> v{z.real(), z.imag(), w.real(), w.imag()}, vp = v, vm = v;
            vp[a] += h;
            vm[a] -= h;
            auto pp = propagator_eval({vp[0], vp[1]}, {vp[2], vp[3]});
            auto pm = propagator_eval({vm[0], vm[1]}, {vm[2], vm[3]});
            for (int b = 0; b < 4; ++b) CHECK(d[a][b] == doctest::Approx((pp.c[b] - pm.c[b]) / (2 * h)).epsilon(1e-5).scale(1));
        }
    }
}

TEST_CASE("zero-mode form") {
    CHECK(phi_eval(0.0).scalar == 1.0);
    CHECK(phi_eval(std::polar(1.0, 0.7)).scalar == doctest::Approx(0.0));
    CHECK(phi_eval(0.3).two_form == phi_eval(-0.8).two_form);
    // (i/2pi) dz^dzbar = (1/pi) dx^dy
    CHECK(phi_eval(0.1).two_form == doctest::Approx(1 / kPi));
    for (int s = 1; s <= 5; ++s) CHECK(phi_power_exact(s) == std::map<int, Rational>{{s - 1, Rational(1)}});
    CHECK_THROWS(phi_power_exact(0));
}

TEST_CASE("equivariant differential of the propagator") {
    std::mt19937_64 rng(4);
    std::vector<std::pair<DiskPoint, DiskPoint>> pts;
    while (pts.size() < 100) {
        DiskPoint z = random_point(rng), w = random_point(rng);
        if (std::abs(z - w) > 0.05) pts.push_back({z, w});
    }
    auto r = equiv_d_check(pts);
    CHECK(r.max_residual < 1e-6);
    CHECK(r.u0_residual < 1e-6);
    auto edge = equiv_d_check({{std::polar(0.999999, 1.0), 0.2}, {std::polar(0.9999, -2.0), DiskPoint(0.1, -0.4)}});
    CHECK(edge.max_residual < 1e-6);
}

TEST_CASE("closed wheel weights") {
    CHECK(wheel_weight_closed(2) == frac(1, 48));
    CHECK(wheel_weight_closed(3) == 0);
    CHECK(wheel_weight_closed(4) == frac(1, 5760));
    for (int j = 5; j <= 11; j += 2) CHECK(wheel_weight_closed(j) == 0);
    CHECK_THROWS(wheel_weight_closed(1));
}

TEST_CASE("exact short cuts") {
    WeightProblem empty;
    auto e = mc_weight(empty, 10, 1);
    CHECK(e.exact);
    CHECK(e.at(0) == std::complex<double>(1, 0));

    WeightProblem bad;
    bad.graph.k = {1};
    bad.graph.m = 2;
    bad.graph.edges = {{0, 1}};
    auto z = mc_weight(bad, 1000, 1);
    CHECK(z.exact);
    CHECK(z.at(0) == std::complex<double>(0, 0));
    CHECK(!z.note.empty());
}

TEST_CASE("mc weights") {
    auto w2 = mc_weight(wheel_problem(2), 1000000, 7);
    CHECK(w2.stderr_at(0) < 0.002);
    CHECK(std::abs(w2.at(0).real() - 1.0 / 48) < 3 * w2.stderr_at(0));

    auto w3 = mc_weight(wheel_problem(3), 200000, 7);
    CHECK(std::abs(w3.at(0).real()) < 4 * w3.stderr_at(0));

    // the closed form integrates the ordered cycle: it equals (j-1)! times the 1/k! normalized weight
    auto w4 = mc_weight(wheel_problem(4), 400000, 11);
    CHECK(std::abs(w4.at(0).real() * 6 - wheel_weight_closed(4).get_d()) < 4 * 6 * w4.stderr_at(0));

    for (int s = 1; s <= 5; ++s) {
        auto f = mc_weight(phi_power_problem(s), 1000000, 100 + s);
        CHECK(f.u_min == s - 1);
        CHECK(std::abs(f.at(s - 1).real() - 1) < 0.01);
    }

    // one bulk vertex with phi and an edge to a moving boundary point: the angle winds once
    WeightProblem b;
    b.graph.k = {1};
    b.graph.m = 2;
    b.graph.edges = {{0, 2}};
    b.phi_power = {1};
    auto wb = mc_weight(b, 200000, 5);
    CHECK(wb.u_min == 0);
    CHECK(std::abs(wb.at(0).real() - 1) < 4 * wb.stderr_at(0) + 1e-3);
}

TEST_CASE("mc reproducibility") {
    auto a = mc_weight(wheel_problem(2), 50000, 42, 1);
    auto b = mc_weight(wheel_problem(2), 50000, 42, 4);
    CHECK(a.value == b.value);
    CHECK(a.stderr_ == b.stderr_);
    auto c = mc_weight(wheel_problem(2), 50000, 43, 2);
    CHECK(a.value != c.value);
}

TEST_CASE("vanishing integrals") {
    auto r = vanishing_check(0.2, DiskPoint(0, -0.3), 100000, 1);
    CHECK(std::abs(r.propagators.at(0)) <= 3 * r.propagators.stderr_at(0));
    for (const auto* e : {&r.phi_dx, &r.phi_dy})
        for (int u = 0; u <= 1; ++u) CHECK(std::abs(e->at(u)) <= 3 * e->stderr_at(u));
    CHECK(r.phi_dx.value.size() == 2);
    CHECK_THROWS(vanishing_check(0.2, 0.2, 10, 1));

    // a nonzero integrand is detected by the same estimator
    auto one = mc_weight(phi_power_problem(1), 1000, 1);
    CHECK(one.at(0).real() == doctest::Approx(1.0));
}
