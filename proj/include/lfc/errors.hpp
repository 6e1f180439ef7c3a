#pragma once

#include <stdexcept>
#include <string>

namespace lfc {

// Error categories map 1:1 onto CLI exit codes (see tools/lfcrypt.cpp):
// usage 2, config/sampling 3, I/O 4, numerical 5.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace lfc
