#include "startrace/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

using namespace startrace;

int main(int argc, char** argv) {
    AcceptanceOptions opt;
    if (argc > 1) opt.seed = std::strtoull(argv[1], nullptr, 10);
    int failed = 0;
    for (int id = 1; id <= kCriterionCount; ++id) {
        CriterionResult r = run_criterion(id, opt);
        std::printf("%s C%02d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
        std::fflush(stdout);
        failed += !r.pass;
    }
    std::printf("%d/%d criteria pass\n", kCriterionCount - failed, kCriterionCount);
    return failed ? 1 : 0;
}
