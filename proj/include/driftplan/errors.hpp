#pragma once

#include <stdexcept>
#include <string>

namespace driftplan {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Field file violates the declared header/row-count contract.
struct MalformedFile : Error {
    using Error::Error;
};

/// A value that must be finite is NaN or infinite.
struct NonFiniteValue : Error {
    using Error::Error;
};

/// Position outside the survey region S.
struct OutOfBounds : Error {
    using Error::Error;
};

/// Two fields with different grids where identical grids are required.
struct GridMismatch : Error {
    using Error::Error;
};

/// GP kernel system not positive definite (noise_variance too small).
struct SingularKernel : Error {
    using Error::Error;
};

/// Value iteration failed to reach the residual tolerance in max_iter sweeps.
struct Unconverged : Error {
    using Error::Error;
};

/// Likelihood matrix all-zero after buffering; no proposals this round.
struct DegenerateMap : Error {
    using Error::Error;
};

/// Proposal point not reachable within the step budget.
struct PathInfeasible : Error {
    using Error::Error;
};

struct ConfigInvalid : Error {
    using Error::Error;
};

}  // namespace driftplan
