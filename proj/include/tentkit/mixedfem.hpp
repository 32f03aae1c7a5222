#pragma once

/// @file mixedfem.hpp
/// @brief BDM_p × broken P_p discretisation of the mapped wave system on vertex
/// patches. Basis functions are numbered once on the whole mesh; a tent works on
/// the patch slice of that numbering. The advancing front itself is stored broken:
/// one block of element_dofs-ordered coefficients per element, because the front
/// pieces left by different tents need not agree on shared edges.
///
/// Flux dofs: p+1 normal moments per edge, taken against shifted Legendre
/// polynomials along the edge from its lower to its higher vertex index with
/// normal (t₂, −t₁); then p²−1 interior dofs per element; then the P_p scalar
/// dofs per element in the orthonormal element basis.

#include "tentkit/basis.hpp"
#include "tentkit/common.hpp"
#include "tentkit/laws.hpp"
#include "tentkit/mapping.hpp"
#include "tentkit/mesh.hpp"
#include "tentkit/tents.hpp"

#include <functional>
#include <vector>

namespace tentkit {

/// Local flux shape functions of one element, as monomial coefficients.
struct ElementFluxBasis {
    ScaledMonomials monomials;
    Eigen::MatrixXd coeffs;  ///< 2n × nb: rows 0..n-1 x-component, n..2n-1 y-component
    std::vector<int> dofs;   ///< global flux dof of each column

    int size() const { return static_cast<int>(coeffs.cols()); }
    /// values: nb × 2, divergence: nb.
    void eval(const Vec& x, Eigen::Ref<Eigen::MatrixXd> values, Eigen::Ref<Eigen::VectorXd> div) const;
};

class MixedSpace {
public:
    MixedSpace(const SpatialMesh& mesh, int degree);

    const SpatialMesh& mesh() const { return *mesh_; }
    int degree() const { return p_; }
    int num_dofs() const { return num_dofs_; }
    int num_flux_dofs() const { return num_flux_; }

    int edge_dof(Index edge, int k) const { return edge * (p_ + 1) + k; }
    int interior_flux_dof(Index e, int k) const { return num_edge_dofs_ + e * interior_per_element() + k; }
    int scalar_dof(Index e, int k) const { return num_flux_ + e * scalar_per_element() + k; }
    int interior_per_element() const { return p_ * p_ - 1; }
    int scalar_per_element() const { return poly_dim(p_); }

    /// Normal moments on a boundary edge are held at zero.
    bool constrained(int dof) const;

    const ElementFluxBasis& flux_basis(Index e) const { return flux_[e]; }
    const ElementBasis& scalar_basis(Index e) const { return scalar_[e]; }
    /// Flux dofs followed by scalar dofs of one element.
    std::vector<int> element_dofs(Index e) const;

    /// Unit normal used for the moments of an edge.
    Vec edge_normal(Index edge) const;

    /// (q, μ) at x in element e for a global coefficient vector.
    State evaluate(const Eigen::VectorXd& coeffs, Index e, const Vec& x) const;

    /// Canonical interpolant of q (edge moments, then best L² interior
    /// completion) and L² projection of μ. Constrained moments are set to zero.
    Eigen::VectorXd project(const std::function<State(const Vec&)>& u) const;

    /// Coefficients per element in the broken front layout.
    int element_size() const { return flux_per_element() + scalar_per_element(); }
    int flux_per_element() const { return 3 * (p_ + 1) + interior_per_element(); }
    int broken_size() const { return mesh_->num_elements() * element_size(); }
    /// Copies a conforming coefficient vector into the broken layout.
    Eigen::VectorXd to_broken(const Eigen::VectorXd& coeffs) const;
    /// (q, μ) at x in element e for a broken coefficient vector.
    State evaluate_broken(const Eigen::VectorXd& broken, Index e, const Vec& x) const;

private:
    State evaluate_broken(const Eigen::VectorXd& c, Index offset, const Vec& x, Index e) const;

    const SpatialMesh* mesh_;
    int p_;
    int num_edge_dofs_ = 0, num_flux_ = 0, num_dofs_ = 0;
    std::vector<ElementFluxBasis> flux_;
    std::vector<ElementBasis> scalar_;
};

/// Patch-local view of the global numbering for one tent.
struct TentDofs {
    std::vector<int> global;  ///< local → global dof
    std::vector<int> free;    ///< local indices updated by the tent

    int local(int g) const;
};

/// Dofs of all patch elements. Everything is free except the moments held at zero
/// on the domain boundary, so the patch space is H(div) on the patch with no
/// condition on the outer patch edges.
TentDofs tent_dofs(const MixedSpace& space, const Tent& tent);

/// H_lm(t̂) = ∫ [α⁻¹r_m + η_m∇φ; η_m + r_m·∇φ]·[r_l; η_l].
Eigen::MatrixXd assemble_wave_H(const MixedSpace& space, const WaveLaw& law, const TentMap& map,
                                const TentDofs& dofs, double that);

/// S_lm = ∫ [−δη_m; div(δr_m) − δβη_m]·[div r_l; η_l].
Eigen::MatrixXd assemble_wave_S(const MixedSpace& space, const WaveLaw& law, const TentMap& map,
                                const TentDofs& dofs);

/// b_m = ∫ H(t̂) u·ψ_m over the patch for a broken front u (the patch part of Ĝ(u)
/// tested with the patch basis). Rows of constrained dofs are zero.
Eigen::VectorXd assemble_wave_load(const MixedSpace& space, const WaveLaw& law, const TentMap& map,
                                   const TentDofs& dofs, double that, const Eigen::VectorXd& broken);

/// The matrix of assemble_wave_load: columns are the broken coefficients of the
/// patch elements, element blocks in map order.
Eigen::MatrixXd assemble_wave_load_matrix(const MixedSpace& space, const WaveLaw& law, const TentMap& map,
                                          const TentDofs& dofs, double that);

/// Writes patch coefficients into the element blocks of a broken vector.
void scatter_broken(const MixedSpace& space, const TentMap& map, const TentDofs& dofs, const Eigen::VectorXd& local,
                    Eigen::VectorXd& broken);

/// Standing wave q = grad φ, μ = ∂_tφ for φ = cos(πx₁)cos(πx₂)sin(π√2 t)/(π√2).
State wave_exact_standing(const Vec& x, double t);

/// (Σ_T ∫ |u − u_h|²)^{1/2} with quadrature of degree 2p+4.
double wave_error_norm(const MixedSpace& space, const Eigen::VectorXd& coeffs,
                       const std::function<State(const Vec&)>& exact);
/// The same norm for a broken front.
double wave_error_norm_broken(const MixedSpace& space, const Eigen::VectorXd& broken,
                              const std::function<State(const Vec&)>& exact);

}  // namespace tentkit
