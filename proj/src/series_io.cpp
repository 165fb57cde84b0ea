#include "startrace/series_io.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace startrace {

namespace {

class Parser {
public:
    Parser(const std::string& text, int dim, Truncation t) : s_(text), dim_(dim), t_(t) {
        // Laurent input such as h^-1 needs room below zero
        t_.min_hbar = std::min(t_.min_hbar, -8);
        t_.min_u = std::min(t_.min_u, -8);
    }

    GradedSeries run() {
        GradedSeries r = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return r;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    int dim_;
    Truncation t_;

    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("expression '" + s_ + "': " + why + " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    GradedSeries expr() {
        GradedSeries acc = term();
        for (;;) {
            if (eat('+'))
                acc += term();
            else if (eat('-'))
                acc -= term();
            else
                return acc;
        }
    }

    GradedSeries term() {
        GradedSeries acc = unary();
        for (;;) {
            if (eat('*')) {
                acc = multiply(acc, unary(), t_);
            } else if (eat('/')) {
                GradedSeries d = unary();
                if (d.size() != 1 || !(d.terms().begin()->first == Monomial{})) fail("division by a non-constant");
                acc *= GaussianRational(1) / d.terms().begin()->second;
            } else {
                return acc;
            }
        }
    }

    GradedSeries unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    int integer() {
        skip();
        bool neg = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) neg = s_[pos_++] == '-';
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected integer exponent");
        int v = std::stoi(s_.substr(start, pos_ - start));
        return neg ? -v : v;
    }

    GradedSeries power() {
        GradedSeries base = atom();
        if (!eat('^')) return base;
        int e = integer();
        if (e < 0) {
            if (base.size() != 1) fail("negative power of a sum");
            const auto& [m, c] = *base.terms().begin();
            if (m.ydeg() || m.xdeg() || m.dx) fail("negative power allowed only for h, u and constants");
            Monomial n = m;
            n.hbar = static_cast<std::int16_t>(m.hbar * e);
            n.u = static_cast<std::int16_t>(m.u * e);
            return GradedSeries::term(dim_, n, pow(c, e), t_);
        }
        GradedSeries r = GradedSeries::constant(dim_, 1, t_);
        for (int k = 0; k < e; ++k) r = multiply(r, base, t_);
        return r;
    }

    int index_after(std::size_t start) {
        std::size_t p = start;
        while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
        if (p == start) fail("variable needs an index");
        int i = std::stoi(s_.substr(start, p - start));
        if (i < 1 || i > dim_) fail("variable index out of range");
        pos_ = p;
        return i - 1;
    }

    GradedSeries atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            GradedSeries r = expr();
            if (!eat(')')) fail("missing ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return GradedSeries::constant(dim_, Rational(s_.substr(start, pos_ - start)), t_);
        }
        if (s_.compare(pos_, 2, "dx") == 0) return GradedSeries::dx(dim_, index_after(pos_ + 2), t_);
        if (s_.compare(pos_, 4, "hbar") == 0) {
            pos_ += 4;
            return GradedSeries::hbar(dim_, 1, t_);
        }
        switch (c) {
            case 'x': return GradedSeries::x(dim_, index_after(pos_ + 1), t_);
            case 'y': return GradedSeries::y(dim_, index_after(pos_ + 1), t_);
            case 'h': ++pos_; return GradedSeries::hbar(dim_, 1, t_);
            case 'u': ++pos_; return GradedSeries::u(dim_, 1, t_);
            case 'i': ++pos_; return GradedSeries::constant(dim_, GaussianRational::I(), t_);
            default: fail("unknown symbol");
        }
    }
};

std::string var_power(const char* name, int idx, int e) {
    std::string s = name + std::to_string(idx + 1);
    if (e != 1) s += "^" + std::to_string(e);
    return s;
}

}  // namespace

GradedSeries parse_series(const std::string& text, int dim, Truncation t) {
    GradedSeries r = Parser(text, dim, t).run();
    Truncation final_t = t;
    final_t.min_hbar = std::min(t.min_hbar, r.min_hbar_present() < kUnbounded ? r.min_hbar_present() : 0);
    int min_u = 0;
    for (const auto& [m, c] : r.terms()) min_u = std::min<int>(min_u, m.u);
    final_t.min_u = std::min(t.min_u, min_u);
    r.set_truncation(final_t);
    return r;
}

std::string format_series(const GradedSeries& s) {
    if (s.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : s.terms()) {
        std::vector<std::string> factors;
        for (int i = 0; i < kMaxDim; ++i)
            if (m.x[i]) factors.push_back(var_power("x", i, m.x[i]));
        for (int i = 0; i < kMaxDim; ++i)
            if (m.y[i]) factors.push_back(var_power("y", i, m.y[i]));
        if (m.hbar) factors.push_back(m.hbar == 1 ? "h" : "h^" + std::to_string(m.hbar));
        if (m.u) factors.push_back(m.u == 1 ? "u" : "u^" + std::to_string(m.u));
        for (int i : mask_indices(m.dx)) factors.push_back("dx" + std::to_string(i + 1));
        std::string coeff = to_string(c);
        bool neg = c.is_real() && sgn(c.re) < 0;
        if (neg) coeff = to_string(GaussianRational(-c.re));
        if (!first) out << (neg ? " - " : " + ");
        else if (neg) out << "-";
        first = false;
        bool unit = coeff == "1";
        if (factors.empty() || !unit) out << coeff;
        for (std::size_t k = 0; k < factors.size(); ++k) out << ((k == 0 && unit) ? "" : "*") << factors[k];
    }
    return out.str();
}

json rational_to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw std::invalid_argument("rational must be a \"p/q\" string or an integer");
}

json truncation_to_json(const Truncation& t) {
    auto enc = [](int v) -> json { return v >= kUnbounded ? json(nullptr) : json(v); };
    json j;
    j["x_max"] = enc(t.x_max);
    j["y_max"] = enc(t.y_max);
    j["hbar_max"] = enc(t.hbar_max);
    j["u_max"] = enc(t.u_max);
    j["min_hbar"] = t.min_hbar;
    j["min_u"] = t.min_u;
    j["fedosov_max"] = enc(t.fedosov_max);
    return j;
}

Truncation truncation_from_json(const json& j) {
    Truncation t;
    auto dec = [&](const char* key, int& field) {
        if (j.contains(key) && !j[key].is_null()) field = j[key].get<int>();
    };
    dec("x_max", t.x_max);
    dec("y_max", t.y_max);
    dec("hbar_max", t.hbar_max);
    dec("u_max", t.u_max);
    dec("min_hbar", t.min_hbar);
    dec("min_u", t.min_u);
    dec("fedosov_max", t.fedosov_max);
    return t;
}

json series_to_json(const GradedSeries& s) {
    json j;
    j["base_dim"] = s.dim();
    j["truncation"] = truncation_to_json(s.truncation());
    json terms = json::array();
    for (const auto& [m, c] : s.terms()) {
        json t;
        t["x_exp"] = std::vector<int>(m.x.begin(), m.x.begin() + s.dim());
        t["y_exp"] = std::vector<int>(m.y.begin(), m.y.begin() + s.dim());
        t["hbar"] = m.hbar;
        t["u"] = m.u;
        std::vector<int> dx;
        for (int i : mask_indices(m.dx)) dx.push_back(i + 1);
        t["dx"] = dx;
        t["re"] = to_string(c.re);
        t["im"] = to_string(c.im);
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

GradedSeries series_from_json(const json& j) {
    int dim = j.at("base_dim").get<int>();
    GradedSeries s(dim, truncation_from_json(j.value("truncation", json::object())));
    for (const auto& t : j.at("terms")) {
        Monomial m;
        auto xe = t.at("x_exp").get<std::vector<int>>();
        auto ye = t.at("y_exp").get<std::vector<int>>();
        if (static_cast<int>(xe.size()) != dim || static_cast<int>(ye.size()) != dim)
            throw std::invalid_argument("exponent vector length differs from base_dim");
        for (int i = 0; i < dim; ++i) {
            if (xe[i] < 0 || ye[i] < 0) throw std::invalid_argument("negative exponent");
            m.x[i] = static_cast<std::uint8_t>(xe[i]);
            m.y[i] = static_cast<std::uint8_t>(ye[i]);
        }
        m.hbar = static_cast<std::int16_t>(t.value("hbar", 0));
        m.u = static_cast<std::int16_t>(t.value("u", 0));
        std::vector<int> dx = t.value("dx", std::vector<int>{});
        std::vector<int> zero_based;
        for (int i : dx) {
            if (i < 1 || i > dim) throw std::invalid_argument("dx index out of range");
            zero_based.push_back(i - 1);
        }
        int sign = sort_sign(zero_based);
        if (sign == 0) continue;
        m.dx = index_mask(zero_based);
        GaussianRational c(rational_from_json(t.at("re")), rational_from_json(t.value("im", json("0"))));
        s.add_term(m, sign < 0 ? -c : c);
    }
    return s;
}

}  // namespace startrace
