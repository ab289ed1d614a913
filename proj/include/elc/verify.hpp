#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace elc {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    /// 16^2 / 8^2 grids and short runs.
    bool small = false;
    /// Run only checks whose name contains this substring.
    std::string filter;
    std::uint64_t seed = 20240601;
};

/// Identity and property suite: algebraic stress identities, spectral operator
/// invariants, energy dissipation, closure of the higher-order expansion and dispersion residuals.
std::vector<CheckResult> run_verify(const VerifyOptions& opts);

std::string format_check_table(const std::vector<CheckResult>& results);

}  // namespace elc
