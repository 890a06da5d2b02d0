#pragma once

#include <stdexcept>
#include <string>

namespace lplab {

/// Bad input: violated preconditions, mismatched grids, inconsistent exponents.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A kernel or multiplier is not representable on the grid at the requested time.
class UnderResolvedError : public std::runtime_error {
public:
    explicit UnderResolvedError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical self-check failed (non-finite value, convention residual, bad quadrature).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lplab
