#pragma once

#include "startrace/graph.hpp"
#include "startrace/rational.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace startrace {

using DiskPoint = std::complex<double>;

// P = c[0] dx_z + c[1] dy_z + c[2] dx_w + c[3] dy_w
struct PropagatorValue {
    std::array<double, 4> c{};
    std::complex<double> dz() const { return {c[0] / 2, -c[1] / 2}; }
    std::complex<double> dzbar() const { return {c[0] / 2, c[1] / 2}; }
    std::complex<double> dw() const { return {c[2] / 2, -c[3] / 2}; }
    std::complex<double> dwbar() const { return {c[2] / 2, c[3] / 2}; }
};

// first partials of the components: d[a][b] = d_a c[b], coordinates (x_z, y_z, x_w, y_w)
using PropagatorJet = std::array<std::array<double, 4>, 4>;

PropagatorValue propagator_eval(DiskPoint z, DiskPoint w);
PropagatorJet propagator_partials(DiskPoint z, DiskPoint w);
// the dt coefficient of P(z, e^{it}) in the boundary variable
double boundary_component(const PropagatorValue& p, DiskPoint w);

// phi(z, u) = two_form dx^dy + u * scalar
struct PhiValue {
    double two_form = 0;
    double scalar = 0;
};
PhiValue phi_eval(DiskPoint z);

// exact integral of phi^s over the disk, as coefficients of u^k
std::map<int, Rational> phi_power_exact(int s);

struct McEstimate {
    int u_min = 0;  // u-power of entry 0
    std::vector<std::complex<double>> value;
    std::vector<double> stderr_;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    bool exact = false;  // value is exact (no sampling happened)
    std::string note;

    std::complex<double> at(int u_power) const;
    double stderr_at(int u_power) const;
};

enum class BulkSampling { Uniform, Radial };

struct WeightProblem {
    AdmissibleGraph graph;
    std::vector<int> phi_power;  // r_i per bulk vertex, empty means all zero
    std::vector<bool> pinned;    // bulk vertices fixed at z = 0, empty means none
    BulkSampling sampling = BulkSampling::Uniform;
    bool symmetry_factor = true;  // divide by prod k_i!
};

// the wheel with its center pinned at the origin, sampled radially
WeightProblem wheel_problem(int j);
// one bulk vertex carrying phi^s
WeightProblem phi_power_problem(int s);

// number of threads: STARTRACE_THREADS if set, else hardware concurrency
int default_threads();

McEstimate mc_weight(const WeightProblem& p, std::uint64_t samples, std::uint64_t seed, int threads = 0);
Rational wheel_weight_closed(int j);

struct VanishingResult {
    McEstimate propagators;  // int_w P(z,w) ^ P(w,z')
    McEstimate phi_dx;       // dx_z coefficient of int_w P(z,w) ^ phi(w,u)
    McEstimate phi_dy;
};
VanishingResult vanishing_check(DiskPoint z, DiskPoint zp, std::uint64_t samples, std::uint64_t seed, int threads = 0);

struct EquivResidual {
    double max_residual = 0;  // over all components and both u-orders
    double u0_residual = 0;   // d P + (1/pi) dx_z ^ dy_z
    double u1_residual = 0;   // iota_v P - (1 - |z|^2)
};
// d P - u iota_v P + phi(z) at each pair, v = 2 pi (d_theta_z + d_theta_w)
EquivResidual equiv_d_check(const std::vector<std::pair<DiskPoint, DiskPoint>>& points);

}  // namespace startrace
