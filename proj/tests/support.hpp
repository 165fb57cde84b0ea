#pragma once

#include "startrace/series.hpp"

#include <random>
#include <vector>

namespace st_test {

using namespace startrace;

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool coin() { return uniform(0, 1) == 1; }

    Rational small_rational() {
        int num = uniform(-5, 5);
        int den = uniform(1, 4);
        return frac(num, den);
    }

    GaussianRational coefficient(bool complex = true) {
        Rational re = small_rational();
        Rational im = complex && coin() ? small_rational() : Rational(0);
        if (re == 0 && im == 0) re = 1;
        return {re, im};
    }

    struct Shape {
        int dim = 2;
        int terms = 4;
        int xdeg = 0;
        int ydeg = 0;
        int hbar = 0;
        int u = 0;
        int forms = 0;
        bool complex = true;
    };

    Monomial monomial(const Shape& s) {
        Monomial m;
        int xd = uniform(0, s.xdeg), yd = uniform(0, s.ydeg);
        for (int k = 0; k < xd; ++k) m.x[uniform(0, s.dim - 1)]++;
        for (int k = 0; k < yd; ++k) m.y[uniform(0, s.dim - 1)]++;
        m.hbar = static_cast<std::int16_t>(uniform(0, s.hbar));
        m.u = static_cast<std::int16_t>(uniform(0, s.u));
        int q = uniform(0, s.forms);
        for (int k = 0; k < q; ++k) m.dx |= static_cast<std::uint16_t>(1u << uniform(0, s.dim - 1));
        return m;
    }

    GradedSeries series(const Shape& s, Truncation t = {}) {
        GradedSeries r(s.dim, t);
        for (int k = 0; k < s.terms; ++k) r.add_term(monomial(s), coefficient(s.complex));
        return r;
    }
};

}  // namespace st_test
