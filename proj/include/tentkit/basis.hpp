#pragma once

/// @file basis.hpp
/// @brief Polynomial bases on physical triangles.

#include "tentkit/common.hpp"
#include "tentkit/mesh.hpp"

#include <span>
#include <vector>

namespace tentkit {

/// dim P_p in two variables.
constexpr int poly_dim(int p) { return (p + 1) * (p + 2) / 2; }

/// Monomials ((x-c)/s)^a ((y-c)/s)^b with a+b ≤ p, ordered by total degree and
/// then by decreasing a: 1, X, Y, X², XY, Y², ...
struct ScaledMonomials {
    Vec center = Vec::Zero();
    double scale = 1.0;
    int degree = 0;

    int size() const { return poly_dim(degree); }
    void eval(const Vec& x, std::span<double> values) const;
    void eval_with_gradient(const Vec& x, std::span<double> values, std::span<Vec> gradients) const;
};

/// Orthonormal basis of P_p(T) in L²(T) for one mesh element, obtained by
/// orthonormalising scaled monomials against the exact element mass.
class ElementBasis {
public:
    ElementBasis() = default;
    ElementBasis(const SpatialMesh& mesh, Index element, int degree);

    int size() const { return monomials_.size(); }
    int degree() const { return monomials_.degree; }

    void eval(const Vec& x, std::span<double> values) const;
    void eval_with_gradient(const Vec& x, std::span<double> values, std::span<Vec> gradients) const;

    /// Rows hold monomial coefficients of each basis function.
    const Eigen::MatrixXd& coefficients() const { return coeffs_; }
    const ScaledMonomials& monomials() const { return monomials_; }

private:
    ScaledMonomials monomials_;
    Eigen::MatrixXd coeffs_;
};

/// Physical quadrature points of an element for a reference rule.
struct ElementQuadrature {
    std::vector<Vec> points;
    std::vector<double> weights;  ///< include |det J|
};

ElementQuadrature element_quadrature(const SpatialMesh& mesh, Index element, int degree);

}  // namespace tentkit
