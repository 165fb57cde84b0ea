#pragma once

#include "startrace/disk.hpp"
#include "startrace/formal_geom.hpp"
#include "startrace/gaussian_poly.hpp"
#include "startrace/graph.hpp"
#include "startrace/homology.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace startrace {

struct TraceOptions {
    int order = 0;  // bulk vertices per graph, at most 2
    int quadrature_points = 64;
    std::uint64_t samples = 200000;
    std::uint64_t seed = 1;
    int threads = 0;
    const RForm* R = nullptr;  // optional; only the constant (flat) field is accepted
};

// one graph with bulk vertices labelled pi (first n_pi) or h (the rest) and f on the boundary
struct TraceContribution {
    AdmissibleGraph graph;
    int n_pi = 0;
    int n_h = 0;
    std::complex<double> weight;
    double weight_stderr = 0;
    bool exact_weight = true;
    std::complex<double> integral;  // integral of V_Gamma(f) against Omega
};

struct TraceCoefficient {
    std::complex<double> value;
    double stderr_ = 0;
    bool exact = true;  // no Monte Carlo weight entered
};

struct TraceResult {
    std::map<int, TraceCoefficient> hbar;  // coefficient of hbar^k
    std::vector<TraceContribution> contributions;
};

// V_Gamma(pi, .., pi, h, .., h | f) for a graph without white vertices whose first n_pi bulk vertices carry pi
GaussianPoly trace_graph_value(const AdmissibleGraph& g, int n_pi, const PoissonData& p, const GaussianPoly& f);

// The graph expansion of the trace at u = 1, restricted to the function part (no white vertices):
// Tr(f) = sum over graphs of hbar^{n_pi} / (n_pi! n_h!) w_Gamma int V_Gamma(pi.., h.. | f) Omega.
TraceResult trace_assemble(const PoissonData& p, const GaussianPoly& f, const TraceOptions& opt);

// the hbar^1 coefficient of f * g - g * f, -i pi^{ij} d_i f d_j g
GaussianPoly commutator_first_order(const PoissonData& p, const GaussianPoly& f, const GaussianPoly& g);

// |hbar^1 coefficient of Tr(f * g - g * f)|, which is the hbar^0 trace of the first-order commutator
double trace_commutator_check(const PoissonData& p, const GaussianPoly& f, const GaussianPoly& g, int order,
                              int quadrature_points = 64);

}  // namespace startrace
