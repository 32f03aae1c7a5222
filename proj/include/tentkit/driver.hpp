#pragma once

/// @file driver.hpp
/// @brief The slab loop: pitch a slab of tents, advance every tent layer by layer,
/// and keep one global coefficient vector on the advancing front.

#include "tentkit/cli_io.hpp"
#include "tentkit/common.hpp"
#include "tentkit/dg.hpp"
#include "tentkit/laws.hpp"
#include "tentkit/mesh.hpp"
#include "tentkit/mixedfem.hpp"
#include "tentkit/stepping.hpp"
#include "tentkit/tents.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tentkit {

enum class Scheme { implicit_wave, explicit_dg };
enum class Execution { serial, parallel, audit };

Scheme scheme_from_string(const std::string& name);
Execution execution_from_string(const std::string& name);

struct RunParams {
    Scheme scheme = Scheme::explicit_dg;
    int degree = 2;
    int stages = 0;            ///< Radau stages; 0 selects s = p
    double t_slab = 0.1;
    double t_max = 1.0;
    /// Uniform pitch speed. 0: the wave speed field for linear laws, the speed of
    /// the current solution (times speed_safety) for the explicit path.
    double pitch_speed = 0.0;
    double speed_safety = 1.1;
    int causality_retries = 4;  ///< slab restarts with speed_safety × 1.5
    double gamma = 0.5;
    double ctau = 0.0;
    ExplicitParams explicit_params;
    Execution execution = Execution::serial;
    int threads = 0;  ///< 0: hardware concurrency

    /// Throws ConfigError.
    void validate() const;
};

struct RunDiagnostics {
    int slabs = 0;
    long tents = 0;
    long substeps = 0;
    long viscosity_substeps = 0;
    int causality_retries = 0;
    /// Smallest 1 − c|grad φ| seen by the causality checks.
    double min_causality_margin = 1.0;
    int propagators_built = 0;
    int audited_layers = 0;
    /// Largest ν_i over the tents of the last slab and the element that set it.
    double max_nu = 0.0;
    Index max_nu_element = -1;
    /// Per element: largest ν_i of the tents covering it in the last slab.
    std::vector<double> element_nu;
};

struct FrontState {
    std::string law;
    Eigen::VectorXd dofs;
    int slab = 0;
    double time = 0.0;
    RunDiagnostics diag;
};

using InitialData = std::function<State(const Vec&)>;

/// Owns the discrete space and the front. Mixed BDM × P_p for the implicit wave
/// scheme, broken P_p for the explicit scheme.
class Simulation {
public:
    Simulation(const SpatialMesh& mesh, const ConservationLaw& law, RunParams params);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void set_initial(const InitialData& u0);
    /// Advances slab by slab until the front reaches t (a shorter final slab if needed).
    /// Tent errors are rethrown with tent id, layer and slab appended.
    void advance_to(double t);

    const FrontState& front() const { return front_; }
    FrontState& front() { return front_; }
    const RunParams& params() const { return params_; }
    const SpatialMesh& mesh() const { return *mesh_; }
    const ConservationLaw& law() const { return *law_; }
    /// Non-null for the explicit scheme.
    const DGSpace* dg_space() const { return dg_.get(); }
    /// Non-null for the implicit scheme.
    const MixedSpace* mixed_space() const { return mixed_.get(); }

    /// Physical state at x in element e on the current (flat) front.
    State evaluate(Index e, const Vec& x) const;
    /// Writes per tent, recorded in audit mode (global dof lists, per slab).
    const std::vector<std::vector<int>>& last_write_sets() const { return writes_; }

private:
    struct Cached;
    void run_slab(double height);
    void implicit_slab(const TentSlab& slab, bool reuse);
    void explicit_slab(const TentSlab& slab);
    PitchParams pitch_params(double height, double safety) const;
    void for_each_layer(const TentSlab& slab, const std::function<void(const Tent&, std::size_t)>& fn);

    const SpatialMesh* mesh_;
    const ConservationLaw* law_;
    RunParams params_;
    std::unique_ptr<DGSpace> dg_;
    std::unique_ptr<MixedSpace> mixed_;
    FrontState front_;
    ButcherTableau tableau_;
    std::vector<Cached> cache_;
    TentSlab cached_slab_;
    double cache_height_ = -1.0;
    std::vector<std::vector<int>> writes_;
};

FrontState run_simulation(const SpatialMesh& mesh, const ConservationLaw& law, const RunParams& params,
                          const InitialData& u0);

/// e = ‖q − q_h‖ + ‖μ − μ_h‖ in the L² sense (root of the sum of squares) at the front time.
double error_norm_wave(const Simulation& sim, const std::function<State(const Vec&, double)>& exact);

/// Least-squares slope of log e against log h.
double regression_slope(const std::vector<double>& h, const std::vector<double>& e);

struct ConvergenceParams {
    std::vector<int> degrees{1, 2, 3};
    std::vector<int> levels{2, 3, 4, 5};
    double t_max = 1.0;
    double pitch_speed = 2.0;
    double slab_factor = 0.125;  ///< t_slab = slab_factor·2^{-l}
    Execution execution = Execution::serial;
};

/// Standing-wave study with s = p stages; one row per (p, l), slope per p.
std::vector<RateRow> convergence_study(const ConvergenceParams& params);

struct WindTunnelParams {
    double h_target = 0.1;
    double h_corner = 0.05;
    int degree = 2;
    double t_end = 0.5;
    double t_slab = 0.05;
    double snapshot_interval = 0.1;
    /// m = ceil(substep_safety·(p+1)²). The graded step mesh needs more than the
    /// general default: with 2 or 4 the first slab already loses positivity at the step face.
    double substep_safety = 8.0;
    ViscosityParams visc;
    Execution execution = Execution::serial;
};

struct WindTunnelResult {
    std::vector<FieldSnapshot> snapshots;
    Index triangles = 0;
    double min_density = 0.0;
    double max_density = 0.0;
    double min_pressure = 0.0;
    Index max_nu_element = -1;
    Vec max_nu_centroid = Vec::Zero();
    double max_nu = 0.0;
    RunDiagnostics diag;
    std::shared_ptr<const SpatialMesh> mesh;
};

/// Mach 3 flow over a forward-facing step: inflow ρ = 1.4, m = (4.2, 0), P = 1.
WindTunnelResult wind_tunnel_demo(const WindTunnelParams& params);

/// The inflow and initial state of the wind tunnel.
State wind_tunnel_state();

}  // namespace tentkit
