#pragma once

/// @file laws.hpp
/// @brief Hyperbolic systems ∂_t g(x,t,u) + div_x f(x,t,u) + b(x,t,u) = 0 and
/// their tent-mapped counterparts.
///
/// A law supplies its coefficients frozen at a spacetime point, analytic
/// Jacobians, the mapped variable Ĝ(u) = g(u) − f(u)·∇φ together with its
/// inverse, and optionally an entropy pair. Laws are immutable and shareable.

#include "tentkit/common.hpp"
#include "tentkit/mesh.hpp"

#include <functional>
#include <memory>
#include <string>

namespace tentkit {

/// ∇_u of the N entropy-flux components: row j is ∂𝓕_j/∂u.
using EntropyFluxJacobian = Eigen::Matrix<double, kSpaceDim, Eigen::Dynamic, 0, kSpaceDim, kMaxComponents>;

using BoundaryData = std::function<State(const Vec& x, double t)>;

class ConservationLaw {
public:
    virtual ~ConservationLaw() = default;

    virtual std::string name() const = 0;
    virtual int components() const = 0;

    virtual State g(const Vec& x, double t, const State& u) const;
    virtual Flux f(const Vec& x, double t, const State& u) const = 0;
    virtual State b(const Vec& x, double t, const State& u) const;

    virtual Jacobian dg(const Vec& x, double t, const State& u) const;
    /// ∂f_{·j}/∂u for direction j.
    virtual Jacobian df(const Vec& x, double t, const State& u, int j) const = 0;
    virtual Jacobian db(const Vec& x, double t, const State& u) const;

    /// Maximal characteristic speed c(x,t,u) ≥ 0.
    virtual double max_wavespeed(const Vec& x, double t, const State& u) const = 0;
    /// Largest |eigenvalue| of the normal flux Jacobian (Rusanov dissipation).
    virtual double normal_wavespeed(const Vec& x, double t, const State& u, const Vec& n) const;

    /// Ĝ(u) = g(u) − f(u)·∇φ.
    State mapped_G(const Vec& x, double t, const State& u, const Vec& grad_phi) const;
    /// D_u Ĝ = D_u g − Σ_j ∂_jφ D_u f_j.
    Jacobian mapped_dG(const Vec& x, double t, const State& u, const Vec& grad_phi) const;
    /// Solves Ĝ(u) = U. Throws CausalityViolation / NonPhysicalState.
    virtual State ginv(const Vec& x, double t, const State& U, const Vec& grad_phi) const = 0;

    /// Causality predicate c(u)·|∇φ| < 1.
    bool causal(const Vec& x, double t, const State& u, const Vec& grad_phi, double margin = 1e-8) const;

    // Entropy pair (𝓔, 𝓕).
    virtual bool has_entropy() const { return false; }
    virtual double entropy(const Vec& x, double t, const State& u) const;
    virtual Vec entropy_flux(const Vec& x, double t, const State& u) const;
    virtual State entropy_gradient(const Vec& x, double t, const State& u) const;
    virtual EntropyFluxJacobian entropy_flux_jacobian(const Vec& x, double t, const State& u) const;
    /// Normal advective velocity used to upwind the entropy flux.
    virtual double advective_normal_velocity(const Vec& x, double t, const State& u, const Vec& n) const;

    /// Speed scale of the viscosity limiter ν_* (‖D_u f‖ unless overridden).
    virtual double limiter_speed(const Vec& x, double t, const State& u) const;

    /// Throws NonPhysicalState if u is outside the admissible set.
    virtual void check_physical(const State& u) const;

    /// Exterior state for a boundary facet with outward normal n.
    State boundary_state(BoundaryTag tag, const Vec& x, double t, const State& interior, const Vec& n) const;

    /// Linear with time-independent coefficients: tent geometry can be reused across slabs.
    virtual bool linear_autonomous() const { return false; }

    void set_inflow_data(BoundaryData data) { inflow_ = std::move(data); }

protected:
    virtual State reflect(const State& u, const Vec& n) const;

private:
    BoundaryData inflow_;
};

using LawPtr = std::shared_ptr<const ConservationLaw>;

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// ∂_t u + div(βu) = 0 with a divergence-free field β (not checked).
class TransportLaw final : public ConservationLaw {
public:
    explicit TransportLaw(std::function<Vec(const Vec&)> beta);
    explicit TransportLaw(const Vec& beta);

    std::string name() const override { return "transport"; }
    int components() const override { return 1; }
    Flux f(const Vec& x, double t, const State& u) const override;
    Jacobian df(const Vec& x, double t, const State& u, int j) const override;
    double max_wavespeed(const Vec& x, double t, const State& u) const override;
    double normal_wavespeed(const Vec& x, double t, const State& u, const Vec& n) const override;
    State ginv(const Vec& x, double t, const State& U, const Vec& grad_phi) const override;

    bool has_entropy() const override { return true; }
    double entropy(const Vec& x, double t, const State& u) const override;
    Vec entropy_flux(const Vec& x, double t, const State& u) const override;
    State entropy_gradient(const Vec& x, double t, const State& u) const override;
    EntropyFluxJacobian entropy_flux_jacobian(const Vec& x, double t, const State& u) const override;
    double advective_normal_velocity(const Vec& x, double t, const State& u, const Vec& n) const override;
    bool linear_autonomous() const override { return true; }

    Vec beta(const Vec& x) const { return beta_(x); }
    bool constant_beta() const { return constant_; }

private:
    std::function<Vec(const Vec&)> beta_;
    bool constant_ = false;
    Vec beta_const_ = Vec::Zero();
};

/// ∂_t u + ½(∂_1 u² + ∂_2 u²) = 0.
class BurgersLaw final : public ConservationLaw {
public:
    std::string name() const override { return "burgers"; }
    int components() const override { return 1; }
    Flux f(const Vec& x, double t, const State& u) const override;
    Jacobian df(const Vec& x, double t, const State& u, int j) const override;
    double max_wavespeed(const Vec& x, double t, const State& u) const override;
    double normal_wavespeed(const Vec& x, double t, const State& u, const Vec& n) const override;
    State ginv(const Vec& x, double t, const State& U, const Vec& grad_phi) const override;

    bool has_entropy() const override { return true; }
    double entropy(const Vec& x, double t, const State& u) const override;
    Vec entropy_flux(const Vec& x, double t, const State& u) const override;
    State entropy_gradient(const Vec& x, double t, const State& u) const override;
    EntropyFluxJacobian entropy_flux_jacobian(const Vec& x, double t, const State& u) const override;
    double advective_normal_velocity(const Vec& x, double t, const State& u, const Vec& n) const override;
};

/// Closed-form inverse of Û = û − ½û²d, d = ∂̂_1φ + ∂̂_2φ, on the causal branch |ûd| < 1.
double burgers_ginv(double U, double d);

/// First-order acoustic system u = (q, μ) = (α grad φ, ∂_t φ):
/// α⁻¹∂_t q − grad μ = 0,  ∂_t μ − div q + βμ = 0.
class WaveLaw final : public ConservationLaw {
public:
    using MaterialField = std::function<Mat(const Vec&)>;
    using DampingField = std::function<double(const Vec&)>;

    WaveLaw();  ///< α = I, β = 0
    WaveLaw(MaterialField alpha, DampingField beta);

    std::string name() const override { return "wave"; }
    int components() const override { return kSpaceDim + 1; }
    State g(const Vec& x, double t, const State& u) const override;
    Flux f(const Vec& x, double t, const State& u) const override;
    State b(const Vec& x, double t, const State& u) const override;
    Jacobian dg(const Vec& x, double t, const State& u) const override;
    Jacobian df(const Vec& x, double t, const State& u, int j) const override;
    Jacobian db(const Vec& x, double t, const State& u) const override;
    double max_wavespeed(const Vec& x, double t, const State& u) const override;
    State ginv(const Vec& x, double t, const State& U, const Vec& grad_phi) const override;
    bool linear_autonomous() const override { return true; }

    Mat alpha(const Vec& x) const { return alpha_(x); }
    double damping(const Vec& x) const { return beta_(x); }
    /// sqrt(λ_max(α(x))).
    double speed(const Vec& x) const;

    /// H = [[α⁻¹, ∇φ], [∇φᵀ, 1]], so that Ĝ(u) = H u.
    Jacobian H(const Vec& x, const Vec& grad_phi) const;

private:
    MaterialField alpha_;
    DampingField beta_;
};

/// Perfect gas with d = 5 degrees of freedom: P = ½ρT, T = (4/d)(E/ρ − ½|m|²/ρ²).
struct EulerState {
    static constexpr double dof = 5.0;
    static constexpr double gamma = (dof + 2.0) / dof;

    double rho = 1.0;
    Vec m = Vec::Zero();
    double E = 1.0;

    double temperature() const { return (4.0 / dof) * (E / rho - 0.5 * m.squaredNorm() / (rho * rho)); }
    double pressure() const { return 0.5 * rho * temperature(); }
    Vec velocity() const { return m / rho; }
    bool physical() const { return rho > 0 && temperature() > 0; }

    State to_state() const;
    static EulerState from_state(const State& u);
    /// State with given density, velocity and pressure.
    static EulerState from_primitive(double rho, const Vec& velocity, double pressure);
};

Flux euler_flux(const EulerState& u);
/// (𝓔, 𝓕) = (ρ(ln ρ − (d/2) ln T), m𝓔/ρ).
std::pair<double, Vec> euler_entropy(const EulerState& u);
/// |m|/ρ + sqrt(γT).
double euler_wavespeed(const EulerState& u);
EulerState euler_ginv(const State& U, const Vec& grad_phi);

class EulerLaw final : public ConservationLaw {
public:
    std::string name() const override { return "euler"; }
    int components() const override { return kSpaceDim + 2; }
    Flux f(const Vec& x, double t, const State& u) const override;
    Jacobian df(const Vec& x, double t, const State& u, int j) const override;
    double max_wavespeed(const Vec& x, double t, const State& u) const override;
    double normal_wavespeed(const Vec& x, double t, const State& u, const Vec& n) const override;
    State ginv(const Vec& x, double t, const State& U, const Vec& grad_phi) const override;

    bool has_entropy() const override { return true; }
    double entropy(const Vec& x, double t, const State& u) const override;
    Vec entropy_flux(const Vec& x, double t, const State& u) const override;
    State entropy_gradient(const Vec& x, double t, const State& u) const override;
    EntropyFluxJacobian entropy_flux_jacobian(const Vec& x, double t, const State& u) const override;
    double advective_normal_velocity(const Vec& x, double t, const State& u, const Vec& n) const override;
    double limiter_speed(const Vec& x, double t, const State& u) const override;
    void check_physical(const State& u) const override;

protected:
    State reflect(const State& u, const Vec& n) const override;
};

/// Builds a law by name: transport | burgers | wave | euler (default coefficients).
std::shared_ptr<ConservationLaw> make_law(const std::string& name);

}  // namespace tentkit
