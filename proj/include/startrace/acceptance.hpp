#pragma once

#include "startrace/manifest.hpp"
#include "startrace/series_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace startrace {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    json metrics = json::object();  // deterministic given the seed; no timings
};

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    int threads = 0;
    // supplies omega for the flat Fedosov criterion when present
    const Manifest* manifest = nullptr;
};

constexpr int kCriterionCount = 15;

std::string criterion_name(int id);
// exceptions inside a check are reported as failures
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
// in order; with fail_fast the run stops after the first failure
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, bool fail_fast);

json criterion_to_json(const CriterionResult& r);

}  // namespace startrace
