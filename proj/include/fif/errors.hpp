#pragma once

#include <stdexcept>
#include <string>

namespace fif {

/// Input file (data or parameter array) could not be parsed.
/// `line` is the 1-based line number when known, 0 otherwise.
struct parse_error : std::runtime_error {
    int line;
    explicit parse_error(const std::string& msg, int line_number = 0)
        : std::runtime_error(line_number > 0 ? msg + " (line " + std::to_string(line_number) + ")"
                                             : msg),
          line(line_number) {}
};

/// A requested constraint admits no parameters under the sufficient conditions.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A built curve or surface violated its geometric constraint on post-check,
/// or user-supplied parameters fail the coefficient sign conditions.
struct constraint_violation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iteration failed to converge; carries the last recorded iterate distance.
struct numerical_error : std::runtime_error {
    double last_distance;
    numerical_error(const std::string& msg, double distance)
        : std::runtime_error(msg), last_distance(distance) {}
};

} // namespace fif
