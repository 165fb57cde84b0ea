#pragma once

#include "startrace/formal_geom.hpp"
#include "startrace/weyl.hpp"

#include <stdexcept>

namespace startrace {

struct FedosovProblem {
    SymplecticData s;
    ConnectionData c;
    // -omega + sum_k hbar^k omega_k, a closed 2-form without y
    GradedSeries omega_hbar;
    // reporting window; y_max and hbar_max must be finite
    Truncation truncation;

    static FedosovProblem flat(const SymplecticData& s, int y_max, int hbar_max);
    // throws std::invalid_argument on violated invariants
    void validate() const;
};

struct FedosovSolution {
    FedosovProblem problem;
    GaussianRational c;
    GradedSeries F;
    GradedSeries r;
    GradedSeries gamma;
    GradedSeries residual;
    // internal cap on y-degree + 2 hbar-degree used by the recursion
    int fedosov_cap = 0;
    int iterations = 0;
};

class FedosovError : public std::runtime_error {
public:
    FedosovError(const std::string& what, int y, int hbar) : std::runtime_error(what), y_degree(y), hbar_degree(hbar) {}
    int y_degree;
    int hbar_degree;
};

FedosovSolution solve_gamma(const FedosovProblem& p);
// nabla gamma + (c/2hbar)[gamma,gamma] + F - omega_hbar on the reporting window
GradedSeries residual_check(const FedosovSolution& sol);
// flat section with symbol f, started from the Taylor pullback along phi
GradedSeries flat_section_rho(const GradedSeries& f, const FedosovSolution& sol, const ExpJet& phi);
// sigma(rho(f) * rho(g)) through the problem's hbar window
GradedSeries star_global(const GradedSeries& f, const GradedSeries& g, const FedosovSolution& sol, const ExpJet& phi);

// exterior derivative in x of a y-free form
GradedSeries exterior_dx(const GradedSeries& a);

}  // namespace startrace
