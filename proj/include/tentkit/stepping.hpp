#pragma once

/// @file stepping.hpp
/// @brief Time integration on the mapped cylinder t̂ ∈ (0,1): Radau IIA stages for
/// (H(t̂)u)' = S u, and explicit Runge–Kutta substeps with an entropy-viscosity
/// fractional step for DG on conservation laws.

#include "tentkit/common.hpp"
#include "tentkit/dg.hpp"

#include <functional>
#include <span>
#include <vector>

namespace tentkit {

struct ButcherTableau {
    int s = 0;
    Eigen::MatrixXd a;
    Eigen::VectorXd c;
};

/// Radau IIA collocation tableau, 1 ≤ s ≤ 5. Throws ConfigError otherwise.
ButcherTableau radau_iia(int s);

/// One Radau IIA step of y' = λy over (0,h) from y0 (scalar oracle for tests).
double radau_scalar_step(const ButcherTableau& tab, double lambda, double h, double y0);

using MatrixProvider = std::function<Eigen::MatrixXd(double)>;

/// Linear map u0 ↦ u_s[free] of the coupled stage system
///   H_l u_l = H_0 u_0 + Σ_m a_lm S u_m,  l = 1..s,
/// in which only the `free` components of u_l are unknown and the remaining
/// components keep their values from u0. Rows are the free test functions.
/// Throws SingularStageMatrix.
Eigen::MatrixXd implicit_propagator(const MatrixProvider& H, const Eigen::MatrixXd& S, std::span<const int> free,
                                    const ButcherTableau& tab);

/// Linear map b ↦ u_s[free] of the stage system
///   H_l u_l = b + Σ_m a_lm S u_m,  l = 1..s,
/// where b holds the free rows of the conserved quantity at t̂ = 0 and the fixed
/// components of every u_l are zero. Throws SingularStageMatrix.
Eigen::MatrixXd implicit_load_propagator(const MatrixProvider& H, const Eigen::MatrixXd& S,
                                         std::span<const int> free, const ButcherTableau& tab);

/// Applies the stage system to one initial vector; returns u0 with the free entries
/// replaced by the final stage. Throws SingularStageMatrix.
Eigen::VectorXd implicit_tent_advance(const MatrixProvider& H, const Eigen::MatrixXd& S, const Eigen::VectorXd& u0,
                                      std::span<const int> free, const ButcherTableau& tab);

/// m = max(1, ceil(safety·(p+1)²)).
int substep_count(int p, double safety = 2.0);

struct ExplicitParams {
    int substeps = 0;             ///< m; 0 selects substep_count(p, safety)
    double substep_safety = 2.0;
    bool ssp_rk2 = true;          ///< false: explicit Euler as in the printed algorithm
    bool viscosity = true;
    ViscosityParams visc;
};

struct ExplicitDiagnostics {
    int substeps = 0;
    int viscosity_substeps = 0;  ///< total over the outer steps
    double max_nu = 0.0;
    Index max_nu_element = -1;   ///< global element of the largest ν_e/ν_* pair
};

/// Advances Û from t̂ = 0 to 1 in m outer steps: one explicit RK step of R¹, then
/// the viscosity ν_i a_i integrated by explicit Euler substeps of size ≤ Δt_v,
/// Δt_v = Δt/(δ_*ν_i p⁴/h²)/substep_scale.
/// Throws NonFiniteState / CausalityViolation / NonPhysicalState.
PatchState explicit_tent_advance(const TentDG& dg, PatchState U, const ExplicitParams& params,
                                 ExplicitDiagnostics* diag = nullptr);

/// Number of viscosity substeps max(1, ceil(scale·δ_*ν p⁴/h²)).
int viscosity_substeps(double delta_max, double nu, int p, double h, double scale);

}  // namespace tentkit
