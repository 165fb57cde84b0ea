#include "startrace/series.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace startrace {

int Monomial::xdeg() const {
    int s = 0;
    for (auto e : x) s += e;
    return s;
}

int Monomial::ydeg() const {
    int s = 0;
    for (auto e : y) s += e;
    return s;
}

int Monomial::form_degree() const { return std::popcount(dx); }

namespace {

void check_dim(int da, int db) {
    if (da != db)
        throw std::invalid_argument("base dimension mismatch: " + std::to_string(da) + " vs " + std::to_string(db));
}

}  // namespace

bool Truncation::admits(const Monomial& m) const {
    if (m.hbar > hbar_max || m.u > u_max) return false;
    if (m.xdeg() > x_max) return false;
    int yd = m.ydeg();
    if (yd > y_max) return false;
    return yd + 2 * m.hbar <= fedosov_max;
}

bool Truncation::below_floor(const Monomial& m) const { return m.hbar < min_hbar || m.u < min_u; }

Truncation Truncation::meet(const Truncation& o) const {
    Truncation t;
    t.x_max = std::min(x_max, o.x_max);
    t.y_max = std::min(y_max, o.y_max);
    t.hbar_max = std::min(hbar_max, o.hbar_max);
    t.u_max = std::min(u_max, o.u_max);
    t.min_hbar = std::min(min_hbar, o.min_hbar);
    t.min_u = std::min(min_u, o.min_u);
    t.fedosov_max = std::min(fedosov_max, o.fedosov_max);
    return t;
}

int wedge_sign(std::uint16_t a, std::uint16_t b) {
    if (a & b) return 0;
    int swaps = 0;
    for (std::uint16_t rest = b; rest; rest &= rest - 1) {
        int j = std::countr_zero(rest);
        swaps += std::popcount(static_cast<unsigned>(a) >> (j + 1));
    }
    return (swaps & 1) ? -1 : 1;
}

GradedSeries::GradedSeries(int dim, Truncation t) : dim_(dim), trunc_(t) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("base dimension out of range: " + std::to_string(dim));
}

GradedSeries GradedSeries::constant(int dim, const GaussianRational& c, Truncation t) {
    GradedSeries s(dim, t);
    s.add_term(Monomial{}, c);
    return s;
}

GradedSeries GradedSeries::term(int dim, const Monomial& m, const GaussianRational& c, Truncation t) {
    GradedSeries s(dim, t);
    s.add_term(m, c);
    return s;
}

GradedSeries GradedSeries::x(int dim, int i, Truncation t) {
    Monomial m;
    m.x.at(i) = 1;
    return term(dim, m, 1, t);
}

GradedSeries GradedSeries::y(int dim, int i, Truncation t) {
    Monomial m;
    m.y.at(i) = 1;
    return term(dim, m, 1, t);
}

GradedSeries GradedSeries::dx(int dim, int i, Truncation t) {
    if (i < 0 || i >= dim) throw std::out_of_range("dx index");
    Monomial m;
    m.dx = static_cast<std::uint16_t>(1u << i);
    return term(dim, m, 1, t);
}

GradedSeries GradedSeries::hbar(int dim, int power, Truncation t) {
    Monomial m;
    m.hbar = static_cast<std::int16_t>(power);
    if (power < t.min_hbar) t.min_hbar = power;
    return term(dim, m, 1, t);
}

GradedSeries GradedSeries::u(int dim, int power, Truncation t) {
    Monomial m;
    m.u = static_cast<std::int16_t>(power);
    if (power < t.min_u) t.min_u = power;
    return term(dim, m, 1, t);
}

void GradedSeries::add_term(const Monomial& m, const GaussianRational& c) {
    if (c.is_zero()) return;
    if (std::popcount(m.dx) > dim_ || (m.dx >> dim_) != 0) throw std::invalid_argument("dx index beyond base dimension");
    if (!trunc_.admits(m)) return;
    if (trunc_.below_floor(m))
        throw std::domain_error("term below the Laurent floor (hbar " + std::to_string(m.hbar) + ", u " +
                                std::to_string(m.u) + ")");
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

GaussianRational GradedSeries::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? GaussianRational(0) : it->second;
}

void GradedSeries::set_truncation(const Truncation& t) {
    trunc_ = t;
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (!trunc_.admits(it->first))
            it = terms_.erase(it);
        else if (trunc_.below_floor(it->first))
            throw std::domain_error("term below the Laurent floor after re-truncation");
        else
            ++it;
    }
}

GradedSeries GradedSeries::truncated(const Truncation& t) const {
    GradedSeries r = *this;
    Truncation m = trunc_.meet(t);
    m.min_hbar = trunc_.min_hbar;
    m.min_u = trunc_.min_u;
    r.set_truncation(m);
    return r;
}

GradedSeries GradedSeries::filter(const std::function<bool(const Monomial&)>& pred) const {
    GradedSeries r(dim_, trunc_);
    for (const auto& [m, c] : terms_)
        if (pred(m)) r.terms_.emplace_hint(r.terms_.end(), m, c);
    return r;
}

GradedSeries GradedSeries::shift_hbar(int k) const {
    Truncation t = trunc_;
    if (t.hbar_max < kUnbounded) t.hbar_max += k;
    if (t.fedosov_max < kUnbounded) t.fedosov_max += 2 * k;
    t.min_hbar += k;
    GradedSeries r(dim_, t);
    for (const auto& [m, c] : terms_) {
        Monomial n = m;
        n.hbar = static_cast<std::int16_t>(n.hbar + k);
        r.terms_.emplace_hint(r.terms_.end(), n, c);
    }
    return r;
}

GradedSeries GradedSeries::shift_u(int k) const {
    Truncation t = trunc_;
    if (t.u_max < kUnbounded) t.u_max += k;
    t.min_u += k;
    GradedSeries r(dim_, t);
    for (const auto& [m, c] : terms_) {
        Monomial n = m;
        n.u = static_cast<std::int16_t>(n.u + k);
        r.terms_.emplace_hint(r.terms_.end(), n, c);
    }
    return r;
}

int GradedSeries::max_ydeg() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.ydeg());
    return d;
}

int GradedSeries::max_xdeg() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.xdeg());
    return d;
}

int GradedSeries::min_hbar_present() const {
    int d = kUnbounded;
    for (const auto& [m, c] : terms_) d = std::min<int>(d, m.hbar);
    return d;
}

GradedSeries& GradedSeries::operator+=(const GradedSeries& o) {
    check_dim(dim_, o.dim_);
    Truncation t = trunc_.meet(o.trunc_);
    if (!(t == trunc_)) set_truncation(t);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

GradedSeries& GradedSeries::operator-=(const GradedSeries& o) {
    check_dim(dim_, o.dim_);
    Truncation t = trunc_.meet(o.trunc_);
    if (!(t == trunc_)) set_truncation(t);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

GradedSeries& GradedSeries::operator*=(const GaussianRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

void GradedSeries::add_admitted(const Monomial& m, const GaussianRational& c) {
    if (trunc_.below_floor(m))
        throw std::domain_error("term below the Laurent floor (hbar " + std::to_string(m.hbar) + ", u " +
                                std::to_string(m.u) + ")");
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (fresh) return;
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

void multiply_accumulate(GradedSeries& out, const GradedSeries& a, const GradedSeries& b, int sign) {
    check_dim(a.dim(), b.dim());
    check_dim(out.dim(), a.dim());
    const Truncation& t = out.truncation();
    GaussianRational c;
    for (const auto& [ma, ca] : a.terms()) {
        const int xa = ma.xdeg(), ya = ma.ydeg();
        for (const auto& [mb, cb] : b.terms()) {
            int s = wedge_sign(ma.dx, mb.dx);
            if (s == 0) continue;
            const int hb = ma.hbar + mb.hbar, yd = ya + mb.ydeg();
            if (hb > t.hbar_max || yd > t.y_max || yd + 2 * hb > t.fedosov_max || ma.u + mb.u > t.u_max) continue;
            if (xa + mb.xdeg() > t.x_max) continue;
            Monomial m;
            for (int i = 0; i < kMaxDim; ++i) {
                m.x[i] = static_cast<std::uint8_t>(ma.x[i] + mb.x[i]);
                m.y[i] = static_cast<std::uint8_t>(ma.y[i] + mb.y[i]);
            }
            m.hbar = static_cast<std::int16_t>(hb);
            m.u = static_cast<std::int16_t>(ma.u + mb.u);
            m.dx = ma.dx | mb.dx;
            c = ca;
            c *= cb;
            if (s * sign < 0) {
                c.re = -c.re;
                c.im = -c.im;
            }
            out.add_admitted(m, c);
        }
    }
}

GradedSeries multiply(const GradedSeries& a, const GradedSeries& b, const Truncation& t) {
    check_dim(a.dim(), b.dim());
    GradedSeries r(a.dim(), t);
    multiply_accumulate(r, a, b);
    return r;
}

GradedSeries multiply(const GradedSeries& a, const GradedSeries& b) {
    Truncation t = a.truncation().meet(b.truncation());
    t.min_hbar = std::min({0, a.truncation().min_hbar + b.truncation().min_hbar, t.min_hbar});
    t.min_u = std::min({0, a.truncation().min_u + b.truncation().min_u, t.min_u});
    return multiply(a, b, t);
}

GradedSeries operator*(const GradedSeries& a, const GradedSeries& b) { return multiply(a, b); }

GradedSeries diff_x(const GradedSeries& a, int i) {
    if (i < 0 || i >= a.dim()) throw std::out_of_range("x index");
    GradedSeries r(a.dim(), a.truncation());
    for (const auto& [m, c] : a.terms()) {
        if (m.x[i] == 0) continue;
        Monomial n = m;
        n.x[i]--;
        r.add_term(n, c * GaussianRational(static_cast<long>(m.x[i])));
    }
    return r;
}

GradedSeries diff_y(const GradedSeries& a, int i) {
    if (i < 0 || i >= a.dim()) throw std::out_of_range("y index");
    GradedSeries r(a.dim(), a.truncation());
    for (const auto& [m, c] : a.terms()) {
        if (m.y[i] == 0) continue;
        Monomial n = m;
        n.y[i]--;
        r.add_term(n, c * GaussianRational(static_cast<long>(m.y[i])));
    }
    return r;
}

GradedSeries compose(const GradedSeries& f, const std::vector<GradedSeries>& images, const Truncation& t) {
    const int d = f.dim();
    if (static_cast<int>(images.size()) != d) throw std::invalid_argument("compose: need one image per x variable");
    int out_dim = images.empty() ? d : images.front().dim();
    // powers[i][e] = images[i]^e, built lazily
    std::vector<std::vector<GradedSeries>> powers(d);
    auto power = [&](int i, int e) -> const GradedSeries& {
        auto& p = powers[i];
        if (p.empty()) p.push_back(GradedSeries::constant(out_dim, 1, t));
        while (static_cast<int>(p.size()) <= e) p.push_back(multiply(p.back(), images[i], t));
        return p[e];
    };
    GradedSeries r(out_dim, t);
    for (const auto& [m, c] : f.terms()) {
        Monomial rest = m;
        rest.x.fill(0);
        GradedSeries acc = GradedSeries::term(out_dim, rest, c, t);
        for (int i = 0; i < d && !acc.is_zero(); ++i)
            if (m.x[i]) acc = multiply(acc, power(i, m.x[i]), t);
        r += acc;
    }
    return r;
}

GradedSeries x_to_y(const GradedSeries& a) {
    Truncation t = a.truncation();
    std::swap(t.x_max, t.y_max);
    GradedSeries r(a.dim(), Truncation{});
    for (const auto& [m, c] : a.terms()) {
        Monomial n = m;
        std::swap(n.x, n.y);
        r.add_term(n, c);
    }
    t.fedosov_max = kUnbounded;
    r.set_truncation(t);
    return r;
}

GradedSeries y_to_x(const GradedSeries& a) { return x_to_y(a); }

GradedSeries at_y_zero(const GradedSeries& a) {
    return a.filter([](const Monomial& m) { return m.ydeg() == 0; });
}

std::uint16_t index_mask(const std::vector<int>& indices) {
    std::uint16_t m = 0;
    for (int i : indices) {
        auto bit = static_cast<std::uint16_t>(1u << i);
        if (m & bit) throw std::invalid_argument("repeated index");
        m |= bit;
    }
    return m;
}

std::vector<int> mask_indices(std::uint16_t mask) {
    std::vector<int> out;
    for (std::uint16_t rest = mask; rest; rest &= rest - 1) out.push_back(std::countr_zero(rest));
    return out;
}

int sort_sign(const std::vector<int>& ordered) {
    int inv = 0;
    for (std::size_t a = 0; a < ordered.size(); ++a)
        for (std::size_t b = a + 1; b < ordered.size(); ++b) {
            if (ordered[a] == ordered[b]) return 0;
            if (ordered[a] > ordered[b]) ++inv;
        }
    return (inv & 1) ? -1 : 1;
}

void MultiVector::add(std::uint16_t indices, const GradedSeries& coeff) {
    for (const auto& [m, c] : coeff.terms())
        if (m.dx) throw std::invalid_argument("multivector coefficient carries dx");
    auto it = comp_.find(indices);
    if (it == comp_.end()) {
        if (!coeff.is_zero()) comp_.emplace(indices, coeff);
        return;
    }
    it->second += coeff;
    if (it->second.is_zero()) comp_.erase(it);
}

GradedSeries MultiVector::component(std::uint16_t indices) const {
    auto it = comp_.find(indices);
    return it == comp_.end() ? GradedSeries(dim_) : it->second;
}

GradedSeries MultiVector::component(const std::vector<int>& ordered) const {
    int s = sort_sign(ordered);
    if (s == 0) return GradedSeries(dim_);
    GradedSeries c = component(index_mask(ordered));
    return s < 0 ? -c : c;
}

int MultiVector::max_degree() const {
    int d = -1;
    for (const auto& [k, c] : comp_) d = std::max(d, std::popcount(k));
    return d;
}

GradedSeries MultiVector::to_odd() const {
    Truncation t;
    bool first = true;
    for (const auto& [k, c] : comp_) {
        t = first ? c.truncation() : t.meet(c.truncation());
        first = false;
    }
    GradedSeries r(dim_, t);
    for (const auto& [k, c] : comp_)
        for (const auto& [m, v] : c.terms()) {
            Monomial n = m;
            n.dx = k;
            r.add_term(n, v);
        }
    return r;
}

MultiVector MultiVector::from_odd(const GradedSeries& s) {
    MultiVector mv(s.dim());
    std::map<std::uint16_t, GradedSeries> parts;
    for (const auto& [m, v] : s.terms()) {
        auto it = parts.try_emplace(m.dx, GradedSeries(s.dim(), s.truncation())).first;
        Monomial n = m;
        n.dx = 0;
        it->second.add_term(n, v);
    }
    for (auto& [k, c] : parts) mv.add(k, c);
    return mv;
}

GradedSeries contract_vector(int i, const GradedSeries& a) {
    GradedSeries r(a.dim(), a.truncation());
    const auto bit = static_cast<std::uint16_t>(1u << i);
    for (const auto& [m, c] : a.terms()) {
        if (!(m.dx & bit)) continue;
        Monomial n = m;
        n.dx = static_cast<std::uint16_t>(m.dx & ~bit);
        bool odd = std::popcount(static_cast<unsigned>(m.dx & (bit - 1))) & 1;
        r.add_term(n, odd ? -c : c);
    }
    return r;
}

GradedSeries contract(const MultiVector& xi, const GradedSeries& a) {
    if (xi.dim() != a.dim()) throw std::invalid_argument("contract: dimension mismatch");
    GradedSeries r(a.dim(), a.truncation());
    for (const auto& [k, coeff] : xi.components()) {
        auto idx = mask_indices(k);
        GradedSeries part = a;
        for (auto it = idx.rbegin(); it != idx.rend() && !part.is_zero(); ++it) part = contract_vector(*it, part);
        if (!part.is_zero()) r += multiply(coeff, part);
    }
    return r;
}

}  // namespace startrace
