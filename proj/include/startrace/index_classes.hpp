#pragma once

#include "startrace/homology.hpp"
#include "startrace/series.hpp"

#include <complex>
#include <functional>
#include <map>
#include <vector>

namespace startrace {

// r x r matrix of 2-forms on a base of dimension dim; entries may depend polynomially on x
struct CurvatureMatrix {
    int dim = 2;
    int rank = 1;
    std::vector<std::vector<GradedSeries>> entries;

    static CurvatureMatrix zero(int dim, int rank);
    GradedSeries& at(int i, int j) { return entries[i][j]; }
    const GradedSeries& at(int i, int j) const { return entries[i][j]; }
    // every nonzero term has dx-degree 2 and no y, hbar or u; throws std::invalid_argument otherwise
    void validate() const;
};

// tr(R^k) with wedge products, dropping form degrees above max_form_degree
GradedSeries trace_power(const CurvatureMatrix& Rm, int k, int max_form_degree);

// exp(-sum_j B_{2j} / ((4j)(2j)!) u^{2j} tr(R^{2j})), i.e. det^{1/2}((uR/2) / sinh(uR/2))
GradedSeries a_hat_u(const CurvatureMatrix& Rm, int max_form_degree);
// forget the u grading (u = 1)
GradedSeries at_u_one(const GradedSeries& s);

// tr exp(scale R). The Chern character uses scale = -1/(2 pi i), which is not rational;
// with the default scale -1 the degree-2k part is stored without its factor (2 pi i)^{-k}.
GradedSeries chern_character(const CurvatureMatrix& Rm, const GaussianRational& scale = GaussianRational(-1));
// numeric Chern character with the true normalization, keyed by dx mask
std::map<std::uint16_t, std::complex<double>> chern_character_numeric(const CurvatureMatrix& Rm);

// N / (1 - e^N) applied to the nilpotent part N = Ch - rank; the constant term is the limit -1
GradedSeries todd(const CurvatureMatrix& Rm, const GaussianRational& scale = GaussianRational(-1));

// exp of a series with no constant term whose powers terminate by form degree
GradedSeries exp_nilpotent(const GradedSeries& n, int max_form_degree);

// integration along the base: takes the coefficient of the top form, a polynomial in x, to a number
using BasePairing = std::function<GaussianRational(const GradedSeries&)>;
// volume times the constant coefficient; non-constant coefficients are rejected
BasePairing constant_pairing(const GaussianRational& volume);

// Laurent polynomial in hbar (and u), stored as a scalar series
// Tr(1) = int A exp(omega_hbar / hbar) on a base of dimension 2d
GradedSeries nest_tsygan_eval(const GradedSeries& a_hat, const GradedSeries& omega_hbar, int d,
                              const BasePairing& pairing);

// I(c) = int A_u Co(c_0) exp(iota_pi / u) Omega with Co = hkr on the u^0 part of c
GradedSeries tamarkin_tsygan_eval(const ChainElement& c, const PoissonData& p, const GradedSeries& a_hat_u,
                                  const BasePairing& pairing);

}  // namespace startrace
