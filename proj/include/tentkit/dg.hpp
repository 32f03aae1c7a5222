#pragma once

/// @file dg.hpp
/// @brief Discontinuous Galerkin discretisation of the mapped conservation law
///   ∂_t̂ Û + div̂(δ f(Ĝ⁻¹Û)) + δ b = 0
/// on a vertex patch, with an entropy residual, entropy viscosity and a
/// δ-weighted symmetric interior penalty form.
///
/// Coefficients of an element are stored as an nb × L matrix in the orthonormal
/// element basis, so the mass matrix is the identity.

#include "tentkit/basis.hpp"
#include "tentkit/common.hpp"
#include "tentkit/laws.hpp"
#include "tentkit/mapping.hpp"
#include "tentkit/mesh.hpp"

#include <functional>
#include <vector>

namespace tentkit {

using Coeffs = Eigen::MatrixXd;         ///< nb × L
using PatchState = std::vector<Coeffs>;  ///< one block per local patch element

/// Basis and quadrature data of the broken space P_p(T)^L on the whole mesh.
class DGSpace {
public:
    DGSpace(const SpatialMesh& mesh, int degree, int components);

    const SpatialMesh& mesh() const { return *mesh_; }
    int degree() const { return p_; }
    int components() const { return L_; }
    int element_size() const { return nb_; }  ///< basis functions per component
    int num_dofs() const { return mesh_->num_elements() * nb_ * L_; }
    /// Offset of element e in a global vector; the block is nb × L column-major.
    int offset(Index e) const { return e * nb_ * L_; }

    struct ElementData {
        ElementBasis basis;
        std::vector<Vec> points;
        std::vector<double> weights;
        Eigen::MatrixXd phi;  ///< nq × nb
        Eigen::MatrixXd dx, dy;
    };
    struct EdgeData {
        std::vector<Vec> points;
        std::vector<double> weights;  ///< include the edge length
        Vec normal;                   ///< outward for edge_elements[0]
        Eigen::MatrixXd phi[2], dx[2], dy[2];
    };

    const ElementData& element(Index e) const { return elements_[e]; }
    const EdgeData& edge(Index i) const { return edges_[i]; }

    Coeffs block(const Eigen::VectorXd& v, Index e) const;
    void set_block(Eigen::VectorXd& v, Index e, const Coeffs& c) const;

    State evaluate(const Eigen::VectorXd& v, Index e, const Vec& x) const;
    /// Element mean of each component.
    State mean(const Eigen::VectorXd& v, Index e) const;
    /// Elementwise L² projection.
    Eigen::VectorXd project(const std::function<State(const Vec&)>& u) const;
    /// Σ_T ∫ u_h (componentwise).
    State integral(const Eigen::VectorXd& v) const;

private:
    const SpatialMesh* mesh_;
    int p_, L_, nb_;
    std::vector<ElementData> elements_;
    std::vector<EdgeData> edges_;
};

/// Q(u⁻,u⁺,n) = ½(f(u⁻)+f(u⁺))n − ½ s (u⁺ − u⁻), s = max of the normal wavespeeds.
State flux_rusanov(const ConservationLaw& law, const Vec& x, double t, const State& um, const State& up,
                   const Vec& n);

struct ViscosityParams {
    double kappa1 = 0.5;
    double kappa2 = 0.0;  ///< 0 selects 1/(4p)
    double penalty = 2.0;
    double substep_scale = 1.0;
    /// ν_e = c_X²‖R_h‖/|𝓔̄| instead of c_X²‖R_h‖.
    bool divide_by_mean_entropy = false;
    /// Include domain-boundary facets in the penalty form with exterior value zero.
    bool zero_exterior = false;
    /// Penalty α(p+1)²/h instead of α/h. With α = 2 the unscaled form is indefinite
    /// for every p ≥ 1 on the meshes in use; the threshold is close to (p+1)².
    bool degree_scaled_penalty = true;

    /// Resolves defaults for degree p and validates. Throws ConfigError.
    void finalize(int p);
    /// Coefficient multiplying 1/h in the penalty term for degree p.
    double penalty_weight(int p) const { return degree_scaled_penalty ? penalty * (p + 1) * (p + 1) : penalty; }
};

struct EntropyResidual {
    std::vector<Eigen::VectorXd> r;          ///< coefficients of r_h per local element
    std::vector<std::vector<double>> R;      ///< R_h = min(r_h, 0) at the sample points
    std::vector<std::vector<Vec>> samples;   ///< quadrature points and vertices
    std::vector<double> max_abs;             ///< ‖R_h‖_{L∞(T)}
    std::vector<double> mean_entropy;        ///< element mean of 𝓔̂ at the current t̂
};

struct ViscosityCoefficients {
    double nu = 0.0;
    std::vector<double> nu_e, nu_star;
};

/// DG operators for one tent (or any map whose elements form the patch).
class TentDG {
public:
    TentDG(const DGSpace& space, const ConservationLaw& law, const TentMap& map);
    /// The map is referenced, not copied.
    TentDG(const DGSpace&, const ConservationLaw&, TentMap&&) = delete;

    int size() const { return map_->size(); }
    const DGSpace& space() const { return *space_; }
    const ConservationLaw& law() const { return *law_; }
    const TentMap& map() const { return *map_; }
    Index global_element(int le) const { return map_->element(le).element; }

    PatchState gather(const Eigen::VectorXd& front) const;
    void scatter(const PatchState& U, Eigen::VectorXd& front) const;
    PatchState zero() const;

    /// Physical states w = Ĝ⁻¹(Û_h) at element quadrature points (throws with location).
    std::vector<std::vector<State>> physical_states(const PatchState& U, double that) const;

    /// R¹_l = (δ f(Ĝ⁻¹Û_h), grad ψ_l) − ⟨δ Q_f, ψ_l⟩ − (δ b, ψ_l).
    PatchState rhs(const PatchState& U, double that) const;

    /// r_h with (δ r_h, V) = (∂_t̂ 𝓔̂, V) − (𝓕̂, grad V) + ⟨δ Q_𝓕, V⟩ and R_h = min(r_h, 0).
    /// dU is ∂_t̂Û_h, usually rhs(U).
    EntropyResidual entropy_residual(const PatchState& U, const PatchState& dU, double that) const;

    ViscosityCoefficients viscosity(const EntropyResidual& res, const PatchState& U, double that,
                                    const ViscosityParams& params) const;

    /// R²_l = a_i(Ĝ⁻¹Û_h, ψ_l) per component (without the factor ν).
    PatchState viscous_form(const PatchState& U, double that, const ViscosityParams& params) const;

    /// a_i(ψ_k, ψ_l) for one scalar component over all local dofs (local element-major).
    Eigen::MatrixXd interior_penalty_matrix(const ViscosityParams& params) const;

    /// δ_* = max δ and the smallest element diameter of the patch.
    double delta_max() const;
    double min_diameter() const;

    /// ∫ over the boundary facets (on ∂Ω₀) of δ Q_f·n, the net outflow rate of ∫Û.
    State boundary_outflow(const PatchState& U, double that) const;

private:
    struct Facet {
        Index edge;
        int left;   ///< local element on the side of EdgeData::normal
        int right;  ///< local element or -1 on the domain boundary
        BoundaryTag tag = BoundaryTag::generic;
        double h;   ///< penalty length: mean diameter of the adjacent elements
    };

    State trace(const Coeffs& c, const Eigen::MatrixXd& phi, int q) const;
    State physical(int le, const Vec& x, double that, const State& U) const;

    const DGSpace* space_;
    const ConservationLaw* law_;
    const TentMap* map_;
    std::vector<Facet> facets_;
};

}  // namespace tentkit
