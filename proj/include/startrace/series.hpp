#pragma once

#include "startrace/rational.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace startrace {

constexpr int kMaxDim = 8;
constexpr int kUnbounded = 1 << 20;

// All indices are 0-based in code; text formats use 1-based names (x1, dx2, ...).
struct Monomial {
    std::array<std::uint8_t, kMaxDim> x{};
    std::array<std::uint8_t, kMaxDim> y{};
    std::int16_t hbar = 0;
    std::int16_t u = 0;
    std::uint16_t dx = 0;

    auto operator<=>(const Monomial&) const = default;
    bool operator==(const Monomial&) const = default;

    int xdeg() const;
    int ydeg() const;
    int form_degree() const;
    int fedosov_degree() const { return ydeg() + 2 * hbar; }
};

struct Truncation {
    int x_max = kUnbounded;
    int y_max = kUnbounded;
    int hbar_max = kUnbounded;
    int u_max = kUnbounded;
    int min_hbar = 0;
    int min_u = 0;
    // bound on y-degree + 2 * hbar-degree
    int fedosov_max = kUnbounded;

    bool admits(const Monomial& m) const;
    bool below_floor(const Monomial& m) const;
    Truncation meet(const Truncation& o) const;
    bool operator==(const Truncation&) const = default;
};

// Koszul sign of dx^A wedge dx^B, 0 when A and B overlap.
int wedge_sign(std::uint16_t a, std::uint16_t b);

class GradedSeries {
public:
    using Terms = std::map<Monomial, GaussianRational>;

    GradedSeries() = default;
    explicit GradedSeries(int dim, Truncation t = {});

    static GradedSeries constant(int dim, const GaussianRational& c, Truncation t = {});
    static GradedSeries term(int dim, const Monomial& m, const GaussianRational& c, Truncation t = {});
    static GradedSeries x(int dim, int i, Truncation t = {});
    static GradedSeries y(int dim, int i, Truncation t = {});
    static GradedSeries dx(int dim, int i, Truncation t = {});
    static GradedSeries hbar(int dim, int power = 1, Truncation t = {});
    static GradedSeries u(int dim, int power = 1, Truncation t = {});

    int dim() const { return dim_; }
    const Truncation& truncation() const { return trunc_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    // adds c to the coefficient of m, dropping m if the truncation excludes it
    void add_term(const Monomial& m, const GaussianRational& c);
    GaussianRational coefficient(const Monomial& m) const;

    // restricts to the meet of the current record and t
    GradedSeries truncated(const Truncation& t) const;
    // keeps terms satisfying pred
    GradedSeries filter(const std::function<bool(const Monomial&)>& pred) const;
    // multiplies every term by hbar^k, adjusting the ħ bounds alongside
    GradedSeries shift_hbar(int k) const;
    GradedSeries shift_u(int k) const;

    int max_ydeg() const;
    int max_xdeg() const;
    int min_hbar_present() const;

    GradedSeries& operator+=(const GradedSeries& o);
    GradedSeries& operator-=(const GradedSeries& o);
    GradedSeries& operator*=(const GaussianRational& c);

    friend GradedSeries operator+(GradedSeries a, const GradedSeries& b) { return a += b; }
    friend GradedSeries operator-(GradedSeries a, const GradedSeries& b) { return a -= b; }
    friend GradedSeries operator*(GradedSeries a, const GaussianRational& c) { return a *= c; }
    friend GradedSeries operator*(const GaussianRational& c, GradedSeries a) { return a *= c; }
    friend GradedSeries operator-(GradedSeries a) { return a *= GaussianRational(-1); }
    friend GradedSeries operator*(const GradedSeries& a, const GradedSeries& b);

    // structural equality of terms; truncation records are not compared
    friend bool operator==(const GradedSeries& a, const GradedSeries& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const GradedSeries& a, const GradedSeries& b) { return !(a == b); }

    void set_truncation(const Truncation& t);
    // add_term for a monomial already known to satisfy the truncation
    void add_admitted(const Monomial& m, const GaussianRational& c);

private:
    int dim_ = 1;
    Truncation trunc_;
    Terms terms_;
};

GradedSeries multiply(const GradedSeries& a, const GradedSeries& b);
// out += sign * a * b under out's truncation
void multiply_accumulate(GradedSeries& out, const GradedSeries& a, const GradedSeries& b, int sign = 1);
GradedSeries multiply(const GradedSeries& a, const GradedSeries& b, const Truncation& t);

GradedSeries diff_x(const GradedSeries& a, int i);
GradedSeries diff_y(const GradedSeries& a, int i);

// substitute x^i -> images[i] in a series that carries only x (and scalar) dependence
GradedSeries compose(const GradedSeries& f, const std::vector<GradedSeries>& images, const Truncation& t);

// rename variables: every x^i becomes y^i
GradedSeries x_to_y(const GradedSeries& a);
GradedSeries y_to_x(const GradedSeries& a);
// set y = 0
GradedSeries at_y_zero(const GradedSeries& a);

// Multivector field: strictly increasing index tuples (bitmasks) -> coefficient series without dx.
class MultiVector {
public:
    MultiVector() = default;
    explicit MultiVector(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    const std::map<std::uint16_t, GradedSeries>& components() const { return comp_; }
    void add(std::uint16_t indices, const GradedSeries& coeff);
    GradedSeries component(std::uint16_t indices) const;
    // antisymmetric access: coefficient for an arbitrary ordered index tuple
    GradedSeries component(const std::vector<int>& ordered) const;
    bool is_zero() const { return comp_.empty(); }
    int max_degree() const;

    // odd-variable model: theta_i is stored in the dx slot of a GradedSeries
    GradedSeries to_odd() const;
    static MultiVector from_odd(const GradedSeries& s);

    friend bool operator==(const MultiVector& a, const MultiVector& b) { return a.comp_ == b.comp_; }

private:
    int dim_ = 1;
    std::map<std::uint16_t, GradedSeries> comp_;
};

std::uint16_t index_mask(const std::vector<int>& indices);
std::vector<int> mask_indices(std::uint16_t mask);
// sign of the permutation sorting `ordered`, 0 on repeats
int sort_sign(const std::vector<int>& ordered);

// interior product: iota_xi a, with iota_{xi ^ zeta} = iota_xi iota_zeta
GradedSeries contract(const MultiVector& xi, const GradedSeries& a);
GradedSeries contract_vector(int i, const GradedSeries& a);

}  // namespace startrace
