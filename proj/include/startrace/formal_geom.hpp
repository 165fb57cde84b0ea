#pragma once

#include "startrace/series.hpp"

#include <map>
#include <vector>

namespace startrace {

// Jet of a formal exponential map: phi^i(x, y) = x^i + y^i + sum_{|a|>=2} phi^i_a(x) y^a / a!,
// the phi^i_a stored as symmetric tensors under sorted index tuples.
struct ExpJet {
    int dim = 1;
    std::vector<std::map<std::vector<int>, GradedSeries>> coeffs;

    static ExpJet identity(int dim);
    // adds c to phi^i_{indices}; indices are sorted internally and must have length >= 2
    void set(int i, std::vector<int> indices, const GradedSeries& c);
    int order() const;
    // the component series phi^i(x, y) under truncation t
    std::vector<GradedSeries> components(const Truncation& t) const;
};

GradedSeries substitute_jet(const GradedSeries& f, const ExpJet& phi, const Truncation& t);
GradedSeries pullback_Tphi(const GradedSeries& f, const ExpJet& phi, const Truncation& t);

// R^j_l(x, y), presented as the 1-form R = R^j_l dx^l d/dy^j
struct RForm {
    int dim = 1;
    std::vector<std::vector<GradedSeries>> comp;  // comp[j][l]

    // the 1-form sum_l R^j_l dx^l
    GradedSeries form(int j) const;
    int y_max() const;
};

// Inverse of a unipotent matrix I + N by the Neumann series; terminates on y-truncation.
std::vector<std::vector<GradedSeries>> unipotent_inverse(const std::vector<std::vector<GradedSeries>>& m,
                                                         const Truncation& t);

// R = -(d_y phi)^{-1} d_x phi for an arbitrary formal map given by its components
RForm r_form_from_map(const std::vector<GradedSeries>& phi, const Truncation& t);
RForm build_R(const ExpJet& phi, const Truncation& t);

// d_x sigma + R^j_l dx^l d_{y^j} sigma, exact through y-degree min(sigma.y_max - 1, R.y_max)
GradedSeries grothendieck_apply(const GradedSeries& sigma, const RForm& R);
// per component j: d_x R^j + R^i ^ d_{y^i} R^j, exact through y-degree R.y_max - 1
std::vector<GradedSeries> mc_residual(const RForm& R);

struct CotangentJet {
    ExpJet base;
    int n = 1;
    // coordinates on T*N: x = (q_1..q_n, p_1..p_n), y = (qbar_1..qbar_n, pbar_1..pbar_n)
    std::vector<GradedSeries> lifted;
    RForm R;
};

CotangentJet cotangent_lift(const ExpJet& base, const Truncation& t);
// largest total degree in the variables y^k, k in fiber, over all components of R
int fiber_degree(const RForm& R, const std::vector<int>& fiber);

}  // namespace startrace
