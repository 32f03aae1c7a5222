#pragma once

/// @file tents.hpp
/// @brief Advancing-front tent pitching over a spatial mesh and the stacking of
/// tents into parallel layers.

#include "tentkit/common.hpp"
#include "tentkit/mesh.hpp"

#include <set>
#include <span>
#include <utility>
#include <vector>

namespace tentkit {

/// Default C_T = sin(θ_min)·kDefaultCtauFactor.
inline constexpr double kDefaultCtauFactor = 1.0 - 1e-6;

struct PitchParams {
    double gamma = 0.5;
    double ctau = 0.0;  ///< shape constant C_T; 0 selects the default
    double t_slab = 0.0;
    std::vector<double> element_speed;  ///< c_T per element
    std::vector<double> edge_speed;     ///< c_e = max of c_T over the adjacent elements

    /// Uniform speed c on every element.
    static PitchParams uniform(const SpatialMesh& mesh, double speed, double t_slab, double ctau = 0.0,
                               double gamma = 0.5);
    /// Per-element speeds; c_e is derived.
    static PitchParams from_element_speeds(const SpatialMesh& mesh, std::vector<double> speeds, double t_slab,
                                           double ctau = 0.0, double gamma = 0.5);

    /// Resolves C_T and validates all invariants. Throws ConfigError.
    void finalize(const SpatialMesh& mesh);
};

struct AdvancingFront {
    const SpatialMesh* mesh = nullptr;
    PitchParams params;
    std::vector<double> tau;
    std::vector<double> ktilde;
    std::vector<double> ref_height;
    /// Ready vertices ordered by (τ, index): begin() is the default pick.
    std::set<std::pair<double, Index>> ready;
    std::vector<char> in_ready;
    /// Layer of the last tent that covered each element, -1 if none.
    std::vector<int> element_layer;
    Index tents_pitched = 0;

    bool finished() const;
    bool is_ready(Index v) const { return in_ready[v] != 0; }
};

struct Tent {
    Index id = -1;
    Index center = -1;
    double pole_height = 0.0;
    VertexPatch patch;
    std::vector<double> tau_bot;  ///< per patch vertex (patch.vertices order), slab-local time
    std::vector<double> tau_top;
    int layer = 0;
};

struct TentSlab {
    double t_slab = 0.0;
    std::vector<Tent> tents;
    std::vector<std::vector<Index>> layers;  ///< tent ids per layer, in pitch order
    double ctau = 0.0;
};

AdvancingFront init_front(const SpatialMesh& mesh, PitchParams params);

/// Pitches one tent at the ready vertex of least τ (smallest index on ties).
/// Throws EmptyReadySet if J is empty and the slab is finished, StalledFront if
/// J is empty but some τ < t_slab.
Tent pitch_tent(AdvancingFront& front);

/// Pitches until τ ≡ t_slab.
TentSlab pitch_slab(const SpatialMesh& mesh, const PitchParams& params);

/// Exact ∫ over the patch of δ = τ_top − τ_bot (piecewise linear: area·mean of vertex values).
double tent_volume(const SpatialMesh& mesh, const Tent& tent);

/// Elementwise gradient of the piecewise-linear front τ.
Vec element_gradient(const SpatialMesh& mesh, Index element, std::span<const double> tau);

/// Largest |grad τ|·c_T over all elements, for the CFL check |grad τ| ≤ 1/c_T.
double max_scaled_front_gradient(const SpatialMesh& mesh, std::span<const double> tau,
                                 std::span<const double> element_speed);

/// Largest edge-slope ratio |τ(e₁)−τ(e₂)|·c_e/(|e|·C_T); ≤ 1 means the slope bound holds.
double max_edge_slope_ratio(const SpatialMesh& mesh, std::span<const double> tau, const PitchParams& params);

struct SlabStats {
    std::size_t tents = 0;
    std::size_t layers = 0;
    double min_pole = 0.0;
    double max_pole = 0.0;
};

SlabStats slab_stats(const TentSlab& slab);

}  // namespace tentkit
