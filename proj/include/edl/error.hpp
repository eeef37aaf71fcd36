#pragma once

#include <stdexcept>
#include <string>

namespace edl {

// Failure categories. The CLI maps these onto process exit codes:
// config-type errors exit 1, data guards exit 2, failed numeric
// assertions exit 3.
enum class ErrorKind {
    config,          // bad arguments, malformed files, unusable inputs
    data_guard,      // size/overflow guards tripped
    assertion,       // a checked numeric statement failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    int exit_code() const {
        switch (kind_) {
            case ErrorKind::config:     return 1;
            case ErrorKind::data_guard: return 2;
            case ErrorKind::assertion:  return 3;
        }
        return 1;
    }

private:
    ErrorKind kind_;
};

inline Error config_error(const std::string& msg)    { return Error(ErrorKind::config, msg); }
inline Error guard_error(const std::string& msg)     { return Error(ErrorKind::data_guard, msg); }
inline Error assertion_error(const std::string& msg) { return Error(ErrorKind::assertion, msg); }

} // namespace edl
