#pragma once

#include <stdexcept>
#include <string>

namespace jamlink {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCode {
    Validation = 3,      // parameter invariants violated (reported as infeasible design)
    Schema = 2,          // malformed design/targets/bounds document
    Infeasible = 3,      // design admits no solution (imaginary root, empty search, ...)
    Io = 4,              // file read/write failure
    MissingModel = 5,    // operation needs stiffness model params that are absent
    KinematicDomain = 6, // commanded bend outside the pattern's reachable range
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    ErrorCode code_;
};

} // namespace jamlink
