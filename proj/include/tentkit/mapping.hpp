#pragma once

/// @file mapping.hpp
/// @brief The map Φ(x̂,t̂) = (x̂, φ(x̂,t̂)) from the cylinder Ω_v × (0,1) onto a tent,
/// with φ = (1−t̂)τ_bot + t̂τ_top, and the mapped data it induces.

#include "tentkit/common.hpp"
#include "tentkit/laws.hpp"
#include "tentkit/mesh.hpp"
#include "tentkit/tents.hpp"

#include <array>
#include <span>
#include <vector>

namespace tentkit {

/// Affine data of φ on one patch element.
struct ElementMap {
    Index element = -1;
    Vec x0 = Vec::Zero();  ///< first vertex of the element
    double tau_bot0 = 0.0;
    double delta0 = 0.0;
    Vec grad_bot = Vec::Zero();
    Vec grad_top = Vec::Zero();
    Vec grad_delta = Vec::Zero();  ///< grad_top − grad_bot

    double tau_bot(const Vec& x) const { return tau_bot0 + grad_bot.dot(x - x0); }
    double delta(const Vec& x) const { return delta0 + grad_delta.dot(x - x0); }
    double phi(const Vec& x, double that) const { return tau_bot(x) + that * delta(x); }
    Vec grad_phi(double that) const { return (1.0 - that) * grad_bot + that * grad_top; }
};

class TentMap {
public:
    TentMap() = default;

    const std::vector<ElementMap>& elements() const { return elements_; }
    const ElementMap& element(int local) const { return elements_[local]; }
    int size() const { return static_cast<int>(elements_.size()); }
    /// Local index of a global element, or -1.
    int local_element(Index global) const;

    /// Global time offset of the slab containing the tent.
    double t_offset() const { return t_offset_; }
    /// Physical time t = Φ_t(x̂,t̂).
    double time(int local, const Vec& x, double that) const { return t_offset_ + elements_[local].phi(x, that); }

    /// δ at the patch vertices (patch.vertices order).
    const std::vector<double>& vertex_delta() const { return vertex_delta_; }

    friend TentMap build_tent_map(const Tent& tent, const SpatialMesh& mesh, double t_offset);
    friend TentMap flat_tent_map(const SpatialMesh& mesh, std::span<const Index> elements, double height,
                                 double t_offset);

private:
    std::vector<ElementMap> elements_;
    std::vector<double> vertex_delta_;
    double t_offset_ = 0.0;
};

/// Throws InvariantViolation if the tent invariants fail (δ < 0, no pole, degenerate element).
TentMap build_tent_map(const Tent& tent, const SpatialMesh& mesh, double t_offset = 0.0);

/// Map with constant δ = height and grad φ = 0 over the given elements: the
/// cylinder of a tensor-product time step, used as a method-of-lines reference.
TentMap flat_tent_map(const SpatialMesh& mesh, std::span<const Index> elements, double height,
                      double t_offset = 0.0);

struct MappedData {
    State g, b, G;
    Flux f;
};

/// Hatted coefficients at (x̂,t̂), frozen at Φ(x̂,t̂): ĝ, f̂, b̂ and Ĝ(w) = ĝ − f̂ grad φ.
MappedData mapped_data(const ConservationLaw& law, const TentMap& map, int local, const Vec& x, double that,
                       const State& w);

/// (𝓔̂, 𝓕̂) = (𝓔(w) − 𝓕(w)·grad φ, δ𝓕(w)).
std::pair<double, Vec> mapped_entropy_pair(const ConservationLaw& law, const TentMap& map, int local, const Vec& x,
                                           double that, const State& w);

/// Causality: every sample satisfies c(u)·|grad φ| < 1 − margin at t̂ = 0 and t̂ = 1.
struct CausalitySample {
    int element = 0;  ///< local patch element
    Vec x = Vec::Zero();
    State u;
};

bool causality_check(const TentMap& map, const ConservationLaw& law, std::span<const CausalitySample> samples,
                     double margin = 1e-8);

/// Causality for a state-independent speed field (transport, wave): checks each element vertex.
bool causality_check(const TentMap& map, const SpatialMesh& mesh, const std::function<double(const Vec&)>& speed,
                     double margin = 1e-8);

// ---------------------------------------------------------------------------
// Polynomial verification fields
// ---------------------------------------------------------------------------

/// Polynomial in (x₁, x₂, t) of total degree ≤ degree; monomials x₁^a x₂^b t^c in
/// the order produced by for(a) for(b) for(c) with a+b+c ≤ degree.
struct Poly3 {
    int degree = 0;
    std::vector<double> coeffs;

    static int size_for(int degree) { return (degree + 1) * (degree + 2) * (degree + 3) / 6; }
    explicit Poly3(int deg = 0) : degree(deg), coeffs(size_for(deg), 0.0) {}

    double eval(const Vec& x, double t) const;
    /// (∂₁, ∂₂, ∂_t)
    Eigen::Vector3d gradient(const Vec& x, double t) const;

    template <class T>
    T eval_generic(const T& x1, const T& x2, const T& t) const {
        T result(0.0);
        std::vector<T> px(degree + 1, T(1.0)), py(degree + 1, T(1.0)), pt(degree + 1, T(1.0));
        for (int i = 1; i <= degree; ++i) {
            px[i] = px[i - 1] * x1;
            py[i] = py[i - 1] * x2;
            pt[i] = pt[i - 1] * t;
        }
        int k = 0;
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b)
                for (int c = 0; a + b + c <= degree; ++c) result += T(coeffs[k++]) * px[a] * py[b] * pt[c];
        return result;
    }
};

/// max over quadrature points of |div̂ F̂ − δ (div F)∘Φ| with F̂ = det(DΦ) DΦ⁻¹ F∘Φ.
/// F = (F_x₁, F_x₂, F_t). Differentiation is forward-mode automatic.
double piola_identity_check(const std::array<Poly3, 3>& F, const TentMap& map, const SpatialMesh& mesh,
                            int quad_degree = 4);

/// For a manufactured polynomial u (one Poly3 per component; need not solve the
/// law), max over sample points of |mapped residual − δ · physical residual ∘ Φ|,
/// where the mapped residual is ∂_t̂ Ĝ(û) + div̂(δ f̂(û)) + δ b̂(û).
/// Coefficients are taken as x-independent (they are frozen at the sample point).
double mapped_system_residual_check(const ConservationLaw& law, const std::vector<Poly3>& u, const TentMap& map,
                                    const SpatialMesh& mesh, int quad_degree = 4);

/// Same comparison for the mapped entropy pair: ∂_t̂ 𝓔̂(û) + div̂ 𝓕̂(û) against δ·(∂_t 𝓔(u) + div 𝓕(u))∘Φ.
double mapped_entropy_residual_check(const ConservationLaw& law, const std::vector<Poly3>& u, const TentMap& map,
                                     const SpatialMesh& mesh, int quad_degree = 4);

}  // namespace tentkit
