#pragma once

#include <stdexcept>
#include <string>

namespace corrnet {

// Base for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: a cell that does not parse, a bad date, a broken header.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Input parses but violates a data contract (gap too long, duplicate
// labels, missing attribute for an entity, window does not fit).
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Degenerate numerics: zero variance, degenerate subgroup, undefined fit.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

// A request that cannot be satisfied by construction: unknown attribute in
// a model spec, ultrametric of a non-tree, TMFG on fewer than four nodes.
class SpecError : public Error {
public:
    explicit SpecError(const std::string& msg) : Error(msg) {}
};

// An estimator failed to converge, or a downstream step was handed a
// non-converged fit.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace corrnet
