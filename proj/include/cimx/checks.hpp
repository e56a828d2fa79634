#pragma once

#include <string>
#include <vector>

namespace cimx::checks {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // measured value vs bound
};

std::vector<CheckResult> check_domains();
std::vector<CheckResult> check_ldmi();
std::vector<CheckResult> check_dynamics();
std::vector<CheckResult> check_datagen();
std::vector<CheckResult> check_metrics();

// suite in {all, domains, ldmi, dynamics, datagen, metrics}
std::vector<CheckResult> run_suite(const std::string& suite);

}  // namespace cimx::checks
