#pragma once

#include <stdexcept>
#include <string>

namespace rqopt {

// The problem has no answer (ill-posed, no multiplier, no price).
class IllPosedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The numerics failed to reach the requested tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rqopt
