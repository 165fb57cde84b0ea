#pragma once

#include <gmpxx.h>

#include <compare>
#include <complex>
#include <string>

namespace startrace {

using Rational = mpq_class;

Rational parse_rational(const std::string& text);
// n/d in canonical form
Rational frac(long n, long d);
std::string to_string(const Rational& q);

// a + b i with both parts kept canonical by GMP
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(long v) : re(v), im(0) {}
    GaussianRational(Rational r) : re(std::move(r)), im(0) { re.canonicalize(); }
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }

    static GaussianRational I() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    GaussianRational conj() const { return {re, -im}; }
    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re += o.re;
        if (sgn(o.im) != 0) im += o.im;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re -= o.re;
        if (sgn(o.im) != 0) im -= o.im;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        if (sgn(im) == 0 && sgn(o.im) == 0) {
            re *= o.re;
            return *this;
        }
        Rational r = re * o.re - im * o.im;
        Rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o);

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

std::string to_string(const GaussianRational& z);

// integer power, negative exponents allowed for nonzero z
GaussianRational pow(const GaussianRational& z, int n);

Rational factorial(int n);
Rational binomial(int n, int k);

// B_n with the convention B_1 = -1/2
Rational bernoulli(int n);

}  // namespace startrace
