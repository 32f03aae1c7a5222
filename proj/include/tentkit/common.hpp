#pragma once

/// @file common.hpp
/// @brief Shared scalar/vector types and the exception hierarchy used by all modules.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tentkit {

/// Spatial dimension of the implemented kernels. Array extents and Eigen
/// fixed sizes are written against this constant.
inline constexpr int kSpaceDim = 2;

/// Upper bound on the number of solution components of any law (Euler in 2D).
inline constexpr int kMaxComponents = kSpaceDim + 2;

using Index = std::int32_t;
using Vec = Eigen::Matrix<double, kSpaceDim, 1>;
using Mat = Eigen::Matrix<double, kSpaceDim, kSpaceDim>;

/// Solution state u ∈ ℝ^L, stack allocated.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxComponents, 1>;
/// Flux f(u) ∈ ℝ^{L×N}; column j is the flux in direction j.
using Flux = Eigen::Matrix<double, Eigen::Dynamic, kSpaceDim, 0, kMaxComponents, kSpaceDim>;
/// L×L Jacobian.
using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComponents, kMaxComponents>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// A mesh or data-model invariant failed; the message names the invariant.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

class MeshGenerationError : public Error {
public:
    using Error::Error;
};

class EmptyReadySet : public Error {
public:
    using Error::Error;
};

/// No vertex can make progress although the slab is not finished.
class StalledFront : public Error {
public:
    using Error::Error;
};

/// The mapped state cannot be inverted: the front is too steep for the local wavespeed.
class CausalityViolation : public Error {
public:
    using Error::Error;
};

class NonPhysicalState : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    using Error::Error;
};

class SingularStageMatrix : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tentkit
