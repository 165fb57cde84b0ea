#include "startrace/gaussian_poly.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace startrace {

namespace {

void check_function(const GradedSeries& s) {
    for (const auto& [m, c] : s.terms())
        if (m.ydeg() || m.dx || m.hbar || m.u) throw std::invalid_argument("Gaussian-damped data must be polynomial in x");
}

struct Rule {
    std::vector<double> nodes, weights;
};

// nodes and weights for exp(-x^2), shifted and scaled per use
const Rule& hermite_rule(int points) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(points);
    if (it != cache.end()) return it->second;
    std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> w(
        gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, points, 0.0, 1.0, 0.0, 0.0), gsl_integration_fixed_free);
    if (!w) throw std::runtime_error("Gauss-Hermite rule allocation failed");
    Rule r;
    const double* x = gsl_integration_fixed_nodes(w.get());
    const double* q = gsl_integration_fixed_weights(w.get());
    r.nodes.assign(x, x + points);
    r.weights.assign(q, q + points);
    return cache.emplace(points, std::move(r)).first->second;
}

}  // namespace

GaussianExponent GaussianExponent::zero(int dim) {
    GaussianExponent e;
    e.alpha.assign(dim, Rational(0));
    e.beta.assign(dim, Rational(0));
    return e;
}

GaussianExponent GaussianExponent::centered(const Rational& a, const std::vector<Rational>& center) {
    GaussianExponent e = zero(static_cast<int>(center.size()));
    for (std::size_t i = 0; i < center.size(); ++i) {
        e.alpha[i] = a;
        e.beta[i] = 2 * a * center[i];
        e.gamma -= a * center[i] * center[i];
    }
    e.gamma.canonicalize();
    return e;
}

GaussianExponent GaussianExponent::operator+(const GaussianExponent& o) const {
    if (alpha.size() != o.alpha.size()) throw std::invalid_argument("Gaussian exponents: dimension mismatch");
    GaussianExponent r = *this;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        r.alpha[i] += o.alpha[i];
        r.beta[i] += o.beta[i];
    }
    r.gamma += o.gamma;
    return r;
}

bool GaussianExponent::integrable() const {
    for (const auto& a : alpha)
        if (sgn(a) <= 0) return false;
    return true;
}

GaussianPoly::GaussianPoly(const GradedSeries& poly, const GaussianExponent& e) : dim_(poly.dim()) {
    if (static_cast<int>(e.alpha.size()) != dim_ || static_cast<int>(e.beta.size()) != dim_)
        throw std::invalid_argument("Gaussian exponent has the wrong dimension");
    check_function(poly);
    add_part(e, poly);
}

void GaussianPoly::add_part(const GaussianExponent& e, const GradedSeries& p) {
    if (p.is_zero()) return;
    auto [it, fresh] = parts_.try_emplace(e, p);
    if (!fresh) {
        it->second += p;
        if (it->second.is_zero()) parts_.erase(it);
    }
}

GaussianPoly& GaussianPoly::operator+=(const GaussianPoly& o) {
    if (o.dim_ != dim_ && !o.is_zero()) {
        if (!is_zero()) throw std::invalid_argument("GaussianPoly: dimension mismatch");
        dim_ = o.dim_;
    }
    for (const auto& [e, p] : o.parts_) add_part(e, p);
    return *this;
}

GaussianPoly& GaussianPoly::operator-=(const GaussianPoly& o) { return *this += o * GaussianRational(-1); }

GaussianPoly& GaussianPoly::operator*=(const GaussianRational& c) {
    if (c.is_zero()) {
        parts_.clear();
        return *this;
    }
    for (auto& [e, p] : parts_) p *= c;
    return *this;
}

GaussianPoly operator*(const GaussianPoly& a, const GaussianPoly& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("GaussianPoly: dimension mismatch");
    GaussianPoly r(a.dim_);
    for (const auto& [ea, pa] : a.parts_)
        for (const auto& [eb, pb] : b.parts_) r.add_part(ea + eb, multiply(pa, pb));
    return r;
}

GaussianPoly GaussianPoly::times(const GradedSeries& poly) const {
    check_function(poly);
    GaussianPoly r(dim_);
    for (const auto& [e, p] : parts_) r.add_part(e, multiply(p, poly));
    return r;
}

GaussianPoly GaussianPoly::diff(int i) const {
    if (i < 0 || i >= dim_) throw std::out_of_range("GaussianPoly::diff index");
    GaussianPoly r(dim_);
    for (const auto& [e, p] : parts_) {
        // d_i (p e^q) = (d_i p + (beta_i - 2 alpha_i x_i) p) e^q
        GradedSeries lin = GradedSeries::constant(dim_, e.beta[i]) - GradedSeries::x(dim_, i) * GaussianRational(2 * e.alpha[i]);
        r.add_part(e, diff_x(p, i) + multiply(lin, p));
    }
    return r;
}

GaussianPoly GaussianPoly::diff_all(const std::vector<int>& indices) const {
    GaussianPoly r = *this;
    for (int i : indices) {
        if (r.is_zero()) break;
        r = r.diff(i);
    }
    return r;
}

std::complex<double> GaussianPoly::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("GaussianPoly::eval: dimension mismatch");
    std::complex<double> total = 0;
    for (const auto& [e, p] : parts_) {
        double q = e.gamma.get_d();
        for (int i = 0; i < dim_; ++i) q += -e.alpha[i].get_d() * x[i] * x[i] + e.beta[i].get_d() * x[i];
        std::complex<double> v = 0;
        for (const auto& [m, c] : p.terms()) {
            double mono = 1;
            for (int i = 0; i < dim_; ++i) mono *= std::pow(x[i], m.x[i]);
            v += c.to_complex() * mono;
        }
        total += v * std::exp(q);
    }
    return total;
}

double gaussian_moment(int n, double a, double b, int points) {
    if (!(a > 0)) throw std::domain_error("Gaussian moment needs a positive width parameter");
    // x^n exp(-a x^2 + b x) = exp(b^2 / 4a) x^n exp(-a (x - mu)^2), mu = b / 2a; substitute x = mu + t / sqrt(a)
    const Rule& r = hermite_rule(points);
    const double mu = b / (2 * a), s = 1 / std::sqrt(a);
    double acc = 0;
    for (int k = 0; k < points; ++k) acc += r.weights[k] * std::pow(mu + s * r.nodes[k], n);
    return acc * s * std::exp(b * b / (4 * a));
}

std::complex<double> GaussianPoly::integrate(int points) const {
    if (points < 1) throw std::invalid_argument("quadrature needs at least one point");
    std::complex<double> total = 0;
    for (const auto& [e, p] : parts_) {
        if (!e.integrable()) throw std::domain_error("integrand is not Gaussian-damped along every axis");
        if (p.max_xdeg() >= 2 * points) throw std::domain_error("polynomial degree exceeds the quadrature order");
        std::vector<std::map<int, double>> moments(dim_);
        std::complex<double> part = 0;
        for (const auto& [m, c] : p.terms()) {
            double v = 1;
            for (int i = 0; i < dim_; ++i) {
                auto [it, fresh] = moments[i].try_emplace(m.x[i], 0.0);
                if (fresh) it->second = gaussian_moment(m.x[i], e.alpha[i].get_d(), e.beta[i].get_d(), points);
                v *= it->second;
            }
            part += c.to_complex() * v;
        }
        total += part * std::exp(e.gamma.get_d());
    }
    return total;
}

}  // namespace startrace
