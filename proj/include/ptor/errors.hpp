#pragma once

#include <stdexcept>
#include <string>

namespace ptor {

// Exit codes shared by the CLI and the acceptance runner.
enum class ExitCode : int {
    ok = 0,
    usage = 1,
    capacity = 2,
    integrity = 3,
    oracle_unavailable = 4,
    disagreement = 5,
};

// A requested computation exceeds a configured ceiling (discriminant bound,
// modulus exponent, period length). The caller may retry with larger limits.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A mathematical invariant failed. Never recoverable; indicates a bug or
// corrupted input.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OracleUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ptor
