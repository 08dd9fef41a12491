#pragma once

#include <stdexcept>
#include <string>

namespace sw {

// Error taxonomy shared across the library. The CLI maps these to exit
// codes: argument/parse/structural/validation -> 2, numerical -> 3.

struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sw
