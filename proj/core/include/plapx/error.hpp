#pragma once

#include <stdexcept>
#include <string>

namespace plapx {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A field evaluated to a non-finite value or outside its domain (log/sqrt of a negative).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// An argument is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A stated precondition of an operation does not hold for the given inputs.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

/// A point could not be located in the mesh.
class LocationError : public Error {
public:
    using Error::Error;
};

class SamplingError : public Error {
public:
    using Error::Error;
};

/// The data violate a hypothesis the analysis depends on (e.g. p1 <= 1).
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// An operator that should be symmetric positive definite produced a non-positive pivot.
class SpdError : public Error {
public:
    SpdError(const std::string& what, long pivot) : Error(what), pivot_(pivot) {}
    [[nodiscard]] long pivot() const noexcept { return pivot_; }

private:
    long pivot_;
};

class SingularityError : public Error {
public:
    SingularityError(const std::string& what, long triangle) : Error(what), triangle_(triangle) {}
    [[nodiscard]] long triangle() const noexcept { return triangle_; }

private:
    long triangle_;
};

/// Syntax error in a field expression. `offset()` is the byte offset into the source.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset) : Error(what), offset_(offset) {}
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Iterative procedure gave up. Solvers attach their own richer subclasses.
class NonconvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace plapx
