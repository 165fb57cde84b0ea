#pragma once

#include "startrace/series.hpp"

#include <map>
#include <optional>
#include <vector>

namespace startrace {

using RationalMatrix = std::vector<std::vector<Rational>>;

struct SymplecticData {
    int dim = 2;
    RationalMatrix omega;      // omega_{ij}
    RationalMatrix omega_inv;  // omega^{ij}, the matrix inverse

    // validates antisymmetry, even dimension and invertibility
    static SymplecticData from_matrix(const RationalMatrix& omega);
    // omega_{2k,2k+1} = -1, so that omega^{2k,2k+1} = +1
    static SymplecticData standard(int dim);

    // the 2-form sum_{i<j} omega_{ij} dx^i dx^j
    GradedSeries form(const Truncation& t = {}) const;
    // gamma_0 = omega_{ij} y^i dx^j
    GradedSeries gamma0(const Truncation& t = {}) const;
};

RationalMatrix invert(const RationalMatrix& m);

// Totally symmetric S_{ijk} keyed by sorted index triples; coefficients are series in x.
using SymmetricGenerator = std::map<std::array<int, 3>, GradedSeries>;

struct ConnectionData {
    int dim = 2;
    // gamma[i][j][k] = Gamma^i_{jk}, series in x
    std::vector<std::vector<std::vector<GradedSeries>>> gamma;
    std::optional<SymmetricGenerator> generator;

    static ConnectionData flat(int dim);
    // Gamma^m_{jk} = omega^{mi} S_{ijk}
    static ConnectionData from_generator(const SymplecticData& s, const SymmetricGenerator& S);
    // direct Christoffel input, checked for symmetry and compatibility with omega
    static ConnectionData from_christoffel(const SymplecticData& s,
                                           std::vector<std::vector<std::vector<GradedSeries>>> gamma);

    bool is_flat() const;
};

GradedSeries moyal(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s);
GradedSeries moyal(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s, const Truncation& t);
GradedSeries graded_commutator(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s);
// [a,b]/hbar, computed one hbar order deeper so the result keeps the input ħ-window
GradedSeries commutator_over_hbar(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s);
// -i omega^{ij} d_{y^i} a d_{y^j} b
GradedSeries poisson_bracket_y(const GradedSeries& a, const GradedSeries& b, const SymplecticData& s);

GradedSeries symbol_sigma(const GradedSeries& a);

GradedSeries delta_op(const GradedSeries& a);
GradedSeries delta_star(const GradedSeries& a);
GradedSeries delta_inverse(const GradedSeries& a);

GradedSeries nabla(const GradedSeries& a, const ConnectionData& c);
GradedSeries weyl_curvature_F(const ConnectionData& c, const SymplecticData& s, const Truncation& t = {});

struct Calibration {
    GaussianRational c;
    bool flat_identity = false;
    bool curvature_identity = false;
};

// Scans the candidate prefactors and returns the unique c for which
// (c/2ħ)[γ0,γ0] = -ω, (c/ħ)[γ0,·] = -δ and ∇² = (c/ħ)[F,·] all hold on probes.
Calibration calibrate_prefactor(const SymplecticData& s, const ConnectionData& c);

}  // namespace startrace
