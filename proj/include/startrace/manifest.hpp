#pragma once

#include "startrace/fedosov.hpp"
#include "startrace/formal_geom.hpp"
#include "startrace/gaussian_poly.hpp"
#include "startrace/homology.hpp"
#include "startrace/index_classes.hpp"
#include "startrace/series_io.hpp"
#include "startrace/weyl.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace startrace {

class ManifestError : public std::runtime_error {
public:
    ManifestError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field(field) {}
    std::string field;
};

// polynomial times exp(-width |x - center|^2)
struct TestFunction {
    GradedSeries poly;
    Rational width = 1;
    std::vector<Rational> center;

    GaussianPoly gaussian() const;
};

struct Manifest {
    int dim = 2;
    std::optional<SymplecticData> symplectic;
    std::optional<SymmetricGenerator> connection;
    ExpJet exp_jet;
    std::optional<PoissonData> poisson;
    GradedSeries volume;
    // sum_k hbar^k omega_k for k >= 1
    GradedSeries omega_corrections;
    Truncation truncation;
    std::map<std::string, TestFunction> test_functions;
    std::optional<CurvatureMatrix> curvature;

    // -omega + corrections, under the manifest truncation
    GradedSeries omega_hbar() const;
    FedosovProblem fedosov_problem(int y_max, int hbar_max) const;
    const SymplecticData& require_symplectic() const;
    const PoissonData& require_poisson() const;
};

Manifest manifest_from_json(const json& j);
Manifest load_manifest(const std::string& path);
// polynomial in x from a string or a {"poly", "width", "center"} object
TestFunction test_function_from_json(const json& j, int dim, const std::string& field);

}  // namespace startrace
