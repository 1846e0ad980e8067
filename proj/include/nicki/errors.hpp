#pragma once

#include <stdexcept>
#include <string>

namespace nicki {

// Shapes of operands do not line up.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numeric argument is outside its admissible range.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A call was made in a state the callee does not accept.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

// Invalid attack or run configuration (infeasible budget, degenerate classes, bad keys).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nicki
