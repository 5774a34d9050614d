#pragma once

#include <stdexcept>
#include <string>

namespace socdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range values, dangling ids, dimension mismatches.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Failure while evaluating forces or advancing a simulation.
class SimulationError : public Error {
public:
    using Error::Error;
};

/// A force law hit an undefined point (coincident bodies with no softening).
class SingularityError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace socdyn
