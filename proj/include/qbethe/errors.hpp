#pragma once

#include <stdexcept>
#include <string>

namespace qbethe {

// Evaluation hit a pole of a rational kernel, a monodromy entry, or a
// determinant precondition. The message names the offending points.
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested subset cardinalities cannot be realized.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A vector expected to be an eigenvector of a diagonal monodromy entry
// turned out not to be one (broken convention).
struct EigenvectorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The z -> 0 limit of the monodromy does not have the required
// triangular structure.
struct NormalizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed configuration or input file.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qbethe
