#pragma once

#include <stdexcept>
#include <string>

namespace docmap {

// Errors are grouped by how the CLI reports them (see exit_code()).

// Broken precondition or out-of-range argument.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bad configuration value; message names the offending field.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input file content.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// NaN/inf during optimization, degenerate data.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Network / remote service failure.
class FetchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExitCode : int {
    ok = 0,
    failure = 1,
    validation = 2,
    io = 3,
    numeric = 4,
};

ExitCode exit_code(const std::exception& e) noexcept;

}  // namespace docmap
