#pragma once

#include "startrace/series.hpp"

#include <map>
#include <utility>
#include <vector>

namespace startrace {

// Linear combination of words [a0 | a1 | ... | am] u^l over the polynomial algebra in x,
// stored monomial by monomial. Words with a constant in a slot >= 1 are zero (normalized chains).
class ChainElement {
public:
    struct Word {
        int u = 0;
        std::vector<Monomial> slots;
        auto operator<=>(const Word&) const = default;
    };
    using Terms = std::map<Word, GaussianRational>;

    ChainElement() = default;
    explicit ChainElement(int dim) : dim_(dim) {}

    // multilinear expansion of a0 (x) ... (x) am, times c u^u_power
    static ChainElement word(const std::vector<GradedSeries>& a, int u_power = 0,
                             const GaussianRational& c = GaussianRational(1));

    int dim() const { return dim_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add(const Word& w, const GaussianRational& c);

    ChainElement& operator+=(const ChainElement& o);
    ChainElement& operator-=(const ChainElement& o);
    ChainElement& operator*=(const GaussianRational& c);
    friend ChainElement operator+(ChainElement a, const ChainElement& b) { return a += b; }
    friend ChainElement operator-(ChainElement a, const ChainElement& b) { return a -= b; }
    friend ChainElement operator*(const GaussianRational& c, ChainElement a) { return a *= c; }
    friend bool operator==(const ChainElement& a, const ChainElement& b) { return a.terms_ == b.terms_; }

private:
    int dim_ = 1;
    Terms terms_;
};

ChainElement hochschild_b(const ChainElement& c);
ChainElement connes_B(const ChainElement& c);
// b + u B
ChainElement cyclic_differential(const ChainElement& c);
// [a0 | ... | am] u^l -> u^l a0 da1 ^ ... ^ dam / m!
GradedSeries hkr(const ChainElement& c);

// Div_Omega for Omega = volume * dx^1...dx^d, in the odd model
// sum_i d/dx^i d/dtheta_i + (d_i volume / volume) d/dtheta_i.
// A non-constant volume needs a finite x truncation on xi (its inverse is a Neumann series).
MultiVector bv_divergence(const MultiVector& xi, const GradedSeries& volume);
GradedSeries divergence_odd(const GradedSeries& s, const GradedSeries& volume);
// the BV operator -Div_Omega on the odd model; with this sign
// [a,b] = (-1)^|a| D(ab) - (-1)^|a| D(a) b - a D(b) is the bracket that restricts to the Lie bracket
GradedSeries bv_laplacian(const GradedSeries& s, const GradedSeries& volume);

MultiVector schouten_bracket(const MultiVector& xi, const MultiVector& zeta);
GradedSeries schouten_odd(const GradedSeries& a, const GradedSeries& b);

// left derivative d/dtheta_i on the odd model
GradedSeries theta_derivative(const GradedSeries& s, int i);

struct PoissonData {
    int dim = 1;
    MultiVector pi;
    GradedSeries h;
    GradedSeries volume;

    static PoissonData constant(int dim, const std::vector<std::vector<Rational>>& pi_matrix);
    // [pi, pi] = 0 and Div_Omega pi - [h, pi] = 0; throws std::invalid_argument otherwise
    void validate() const;
    bool is_unimodular() const;
};

}  // namespace startrace
