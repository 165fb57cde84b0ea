#pragma once

#include "startrace/series.hpp"

#include <complex>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace startrace {

// exp(sum_i (-alpha_i x_i^2 + beta_i x_i) + gamma), exact rational parameters
struct GaussianExponent {
    std::vector<Rational> alpha;
    std::vector<Rational> beta;
    Rational gamma = 0;

    static GaussianExponent zero(int dim);
    // exp(-a |x - c|^2)
    static GaussianExponent centered(const Rational& a, const std::vector<Rational>& center);
    GaussianExponent operator+(const GaussianExponent& o) const;
    bool integrable() const;
    bool operator<(const GaussianExponent& o) const {
        return std::tie(alpha, beta, gamma) < std::tie(o.alpha, o.beta, o.gamma);
    }
    bool operator==(const GaussianExponent& o) const {
        return alpha == o.alpha && beta == o.beta && gamma == o.gamma;
    }
};

// Finite sum of polynomial-times-Gaussian terms on R^d. Closed under products and derivatives.
class GaussianPoly {
public:
    GaussianPoly() = default;
    explicit GaussianPoly(int dim) : dim_(dim) {}
    GaussianPoly(const GradedSeries& poly, const GaussianExponent& e);

    int dim() const { return dim_; }
    const std::map<GaussianExponent, GradedSeries>& parts() const { return parts_; }
    bool is_zero() const { return parts_.empty(); }

    GaussianPoly& operator+=(const GaussianPoly& o);
    GaussianPoly& operator-=(const GaussianPoly& o);
    GaussianPoly& operator*=(const GaussianRational& c);
    friend GaussianPoly operator+(GaussianPoly a, const GaussianPoly& b) { return a += b; }
    friend GaussianPoly operator-(GaussianPoly a, const GaussianPoly& b) { return a -= b; }
    friend GaussianPoly operator*(GaussianPoly a, const GaussianRational& c) { return a *= c; }
    friend GaussianPoly operator*(const GaussianPoly& a, const GaussianPoly& b);
    friend bool operator==(const GaussianPoly& a, const GaussianPoly& b) { return a.parts_ == b.parts_; }

    GaussianPoly times(const GradedSeries& poly) const;
    GaussianPoly diff(int i) const;
    GaussianPoly diff_all(const std::vector<int>& indices) const;

    std::complex<double> eval(const std::vector<double>& x) const;
    // tensor-product Gauss-Hermite quadrature, exact for polynomial degree < 2 * points per axis
    std::complex<double> integrate(int points = 64) const;

private:
    void add_part(const GaussianExponent& e, const GradedSeries& p);
    int dim_ = 1;
    std::map<GaussianExponent, GradedSeries> parts_;
};

// 1-D integral of x^n exp(-a x^2 + b x) over R by Gauss-Hermite quadrature
double gaussian_moment(int n, double a, double b, int points = 64);

}  // namespace startrace
