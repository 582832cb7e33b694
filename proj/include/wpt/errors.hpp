#ifndef WPT_ERRORS_HPP
#define WPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wpt {

// Configuration problems: bad files, bad values, unknown keys. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical / solver problems. CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

class CoilsTooClose : public SolverError {
public:
    explicit CoilsTooClose(const std::string& msg) : SolverError(msg) {}
};

class NonConvergent : public SolverError {
public:
    explicit NonConvergent(const std::string& msg) : SolverError(msg) {}
};

class TooClose : public SolverError {
public:
    explicit TooClose(const std::string& msg) : SolverError(msg) {}
};

class SingularSystem : public SolverError {
public:
    explicit SingularSystem(const std::string& msg) : SolverError(msg) {}
};

class AllZeroInput : public SolverError {
public:
    explicit AllZeroInput(const std::string& msg) : SolverError(msg) {}
};

class NonMonotoneTime : public SolverError {
public:
    explicit NonMonotoneTime(const std::string& msg) : SolverError(msg) {}
};

class UnknownPreset : public ConfigError {
public:
    explicit UnknownPreset(const std::string& msg) : ConfigError(msg) {}
};

class InvalidParameterPath : public ConfigError {
public:
    explicit InvalidParameterPath(const std::string& msg) : ConfigError(msg) {}
};

// Scenario aborted because the SAR monitor tripped with hard_sar_stop enabled.
// CLI exit code 4.
class SarHardStop : public std::runtime_error {
public:
    explicit SarHardStop(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wpt

#endif  // WPT_ERRORS_HPP
