#pragma once

#include <stdexcept>
#include <string>

namespace csgad {

/// Base error for the library. The exit_code maps to the CLI contract:
/// 2 = configuration, 3 = input, 4 = compute.
class Error : public std::runtime_error {
public:
    Error(std::string msg, int exit_code)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}

    int exit_code() const { return exit_code_; }

private:
    int exit_code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string msg) : Error(std::move(msg), 2) {}
};

class InputError : public Error {
public:
    explicit InputError(std::string msg) : Error(std::move(msg), 3) {}
};

class ComputeError : public Error {
public:
    explicit ComputeError(std::string msg) : Error(std::move(msg), 4) {}
};

}  // namespace csgad
