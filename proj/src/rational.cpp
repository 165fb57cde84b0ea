#include "startrace/rational.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace startrace {

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (c != ' ') s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty rational");
    if (s.front() == '+') s.erase(0, 1);
    Rational q;
    if (q.set_str(s, 10) != 0 || s.find('/') == 0) throw std::invalid_argument("bad rational: " + text);
    if (s.find('/') != std::string::npos && q.get_den() == 0) throw std::invalid_argument("zero denominator");
    q.canonicalize();
    return q;
}

Rational frac(long n, long d) {
    if (d == 0) throw std::domain_error("zero denominator");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
    Rational n = o.re * o.re + o.im * o.im;
    if (sgn(n) == 0) throw std::domain_error("division by zero");
    Rational r = (re * o.re + im * o.im) / n;
    Rational i = (im * o.re - re * o.im) / n;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

std::string to_string(const GaussianRational& z) {
    if (z.is_real()) return z.re.get_str();
    std::string im = z.im == 1 ? "i" : z.im == -1 ? "-i" : z.im.get_str() + "*i";
    if (sgn(z.re) == 0) return im;
    return "(" + z.re.get_str() + (sgn(z.im) > 0 ? " + " : " ") + im + ")";
}

GaussianRational pow(const GaussianRational& z, int n) {
    if (n < 0) return pow(GaussianRational(1) / z, -n);
    GaussianRational result(1), base = z;
    while (n) {
        if (n & 1) result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

Rational factorial(int n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(f);
}

Rational binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(b);
}

Rational bernoulli(int n) {
    static std::mutex mu;
    static std::vector<Rational> table{Rational(1)};
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(table.size()) <= n) {
        int m = static_cast<int>(table.size());
        Rational acc = 0;
        for (int k = 0; k < m; ++k) acc += binomial(m + 1, k) * table[k];
        table.push_back(-acc / Rational(m + 1));
    }
    return table[n];
}

}  // namespace startrace
