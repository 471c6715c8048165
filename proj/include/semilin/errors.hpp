#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace semilin {

// Base for every library error; lets the CLI separate numerical failures
// from configuration problems.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

// vertexCorner with a ball radius that reaches non-adjacent boundary.
class CornerRadiusError : public GeometryError {
public:
    CornerRadiusError(const std::string& what, double maxRadius)
        : GeometryError(what), maxRadius_(maxRadius) {}
    double maxRadius() const { return maxRadius_; }

private:
    double maxRadius_;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

// The linearized operator could not be factorized at the discrete level.
class SingularSystemError : public SolverError {
public:
    using SolverError::SolverError;
};

class NewtonDivergenceError : public SolverError {
public:
    NewtonDivergenceError(const std::string& what, std::vector<double> history)
        : SolverError(what), history_(std::move(history)) {}
    const std::vector<double>& residualHistory() const { return history_; }

private:
    std::vector<double> history_;
};

// Boundary data outside the small-data ball U_delta.
class SmallnessError : public SolverError {
public:
    using SolverError::SolverError;
};

// CGO probe evaluated where its exponent would overflow.
class ProbeOverflowError : public Error {
public:
    using Error::Error;
};

class FlankMismatchError : public Error {
public:
    using Error::Error;
};

class RecoveryError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace semilin
