#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace parisi {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;       // the measured quantity (error, margin, ratio)
    double threshold = 0.0;   // what it was compared against
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass = true;
    std::uint64_t seed = 0;
};

/// Runs the property suite keyed by the structural facts it exercises:
/// matrix algebra, gradient/convexity/Lipschitz bounds of the solver,
/// martingale identities, the variational representation, and the
/// simplex-model algebra. Deterministic for a fixed seed.
VerifyReport run_verification(std::uint64_t seed);

} // namespace parisi
