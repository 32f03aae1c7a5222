#pragma once

/// @file quadrature.hpp
/// @brief Gauss–Legendre rules on [0,1] and collapsed (Duffy) Gauss rules on the
/// reference triangle {(ξ,η): ξ,η ≥ 0, ξ+η ≤ 1}.

#include <vector>

namespace tentkit::quad {

struct Rule1D {
    std::vector<double> points;   ///< in [0,1]
    std::vector<double> weights;  ///< sum to 1
};

struct TriangleRule {
    std::vector<double> xi, eta;  ///< reference coordinates
    std::vector<double> weights;  ///< sum to 1/2 (reference area)
    int degree = 0;
    std::size_t size() const { return weights.size(); }
};

/// n-point Gauss–Legendre rule on [0,1], exact for polynomials of degree 2n-1.
const Rule1D& gauss_legendre(int n);

/// Rule on the reference triangle exact for total degree `degree`.
const TriangleRule& triangle(int degree);

/// Number of Gauss points giving exactness `degree` on an interval.
inline int points_for_degree(int degree) { return degree / 2 + 1; }

}  // namespace tentkit::quad
