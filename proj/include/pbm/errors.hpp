#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pbm {

/// Invalid configuration: bad parameter, incompatible strategy/ordering, malformed descriptor.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Structural violation of a domain invariant (e.g. a node set that is not conjugate closed).
class StructureError : public std::runtime_error {
public:
    explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

/// An interpolation condition matrix is numerically singular (Birkhoff poisedness failure).
class SingularFitError : public std::runtime_error {
public:
    explicit SingularFitError(const std::string& what) : std::runtime_error(what) {}
};

/// Polynomial root finder failed to converge.
class RootSolverError : public std::runtime_error {
public:
    RootSolverError(const std::string& what, int iterations)
        : std::runtime_error(what), iterations(iterations) {}
    int iterations;
};

/// Newton iteration failed; carries the residual history of the failed solve.
class NewtonError : public std::runtime_error {
public:
    NewtonError(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), residual_history(std::move(residuals)) {}
    std::vector<double> residual_history;
};

/// Non-finite values appeared during time stepping.
class BlowUpError : public std::runtime_error {
public:
    explicit BlowUpError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values along a complex initialization path, or the path refinement cap was hit.
class AnalyticityError : public std::runtime_error {
public:
    explicit AnalyticityError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pbm
