#include "tentkit/driver.hpp"

#include "tentkit/basis.hpp"
#include "tentkit/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace tentkit {

namespace {

/// Rethrows the active exception as the same type with `context` appended.
[[noreturn]] void rethrow_with_context(const std::string& context) {
    try {
        throw;
    } catch (const CausalityViolation& e) {
        throw CausalityViolation(e.what() + context);
    } catch (const NonPhysicalState& e) {
        throw NonPhysicalState(e.what() + context);
    } catch (const NonFiniteState& e) {
        throw NonFiniteState(e.what() + context);
    } catch (const SingularStageMatrix& e) {
        throw SingularStageMatrix(e.what() + context);
    } catch (const InvariantViolation& e) {
        throw InvariantViolation(e.what() + context);
    } catch (const ConfigError& e) {
        throw ConfigError(e.what() + context);
    } catch (const Error& e) {
        throw Error(e.what() + context);
    }
}

/// Largest c·|grad φ| of a tent over t̂ ∈ {0, 1} for per-element speeds.
double steepness(const TentMap& map, const std::function<double(int)>& speed) {
    double s = 0.0;
    for (int le = 0; le < map.size(); ++le) {
        const auto& em = map.element(le);
        s = std::max(s, speed(le) * std::max(em.grad_bot.norm(), em.grad_top.norm()));
    }
    return s;
}

constexpr double kCausalityMargin = 1e-8;

}  // namespace

Scheme scheme_from_string(const std::string& name) {
    if (name == "implicit" || name == "implicit_wave") return Scheme::implicit_wave;
    if (name == "explicit" || name == "explicit_dg") return Scheme::explicit_dg;
    throw ConfigError("unknown scheme '" + name + "' (implicit | explicit)");
}

Execution execution_from_string(const std::string& name) {
    if (name == "serial") return Execution::serial;
    if (name == "parallel") return Execution::parallel;
    if (name == "audit") return Execution::audit;
    throw ConfigError("unknown execution mode '" + name + "' (serial | parallel | audit)");
}

void RunParams::validate() const {
    if (degree < 0 || degree > 8) throw ConfigError("run: degree must lie in 0..8");
    if (scheme == Scheme::implicit_wave && (degree < 1 || degree > 6))
        throw ConfigError("run: the mixed wave space needs degree 1..6");
    if (stages < 0 || stages > 5) throw ConfigError("run: stages must lie in 0..5");
    if (!(t_slab > 0.0) || !std::isfinite(t_slab)) throw ConfigError("run: t_slab must be positive");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ConfigError("run: t_max must be nonnegative");
    if (!(pitch_speed >= 0.0)) throw ConfigError("run: pitch_speed must be nonnegative");
    if (!(speed_safety >= 1.0)) throw ConfigError("run: speed_safety must be at least 1");
    if (causality_retries < 0) throw ConfigError("run: causality_retries must be nonnegative");
    if (threads < 0) throw ConfigError("run: threads must be nonnegative");
    if (explicit_params.substeps < 0 || !(explicit_params.substep_safety > 0.0))
        throw ConfigError("run: bad explicit substep settings");
    ViscosityParams v = explicit_params.visc;
    v.finalize(std::max(degree, 1));
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct Simulation::Cached {
    TentDofs dofs;
    std::vector<Index> elements;  ///< patch elements in map order
    Eigen::MatrixXd P;            ///< broken patch coefficients ↦ free patch coefficients at t̂ = 1
    double steepness = 0.0;
};

Simulation::Simulation(const SpatialMesh& mesh, const ConservationLaw& law, RunParams params)
    : mesh_(&mesh), law_(&law), params_(std::move(params)) {
    params_.validate();
    const bool wave = dynamic_cast<const WaveLaw*>(&law) != nullptr;
    if (params_.scheme == Scheme::implicit_wave) {
        if (!wave) throw ConfigError("run: the implicit scheme is implemented for the wave law only");
        mixed_ = std::make_unique<MixedSpace>(mesh, params_.degree);
        tableau_ = radau_iia(params_.stages > 0 ? params_.stages : params_.degree);
        front_.dofs = Eigen::VectorXd::Zero(mixed_->broken_size());
    } else {
        if (wave) throw ConfigError("run: use the implicit scheme for the wave law");
        if (params_.explicit_params.viscosity && !law.has_entropy())
            throw ConfigError("run: viscosity needs an entropy pair for law " + law.name());
        dg_ = std::make_unique<DGSpace>(mesh, params_.degree, law.components());
        front_.dofs = Eigen::VectorXd::Zero(dg_->num_dofs());
    }
    front_.law = law.name();
    front_.diag.element_nu.assign(mesh.num_elements(), 0.0);
}

Simulation::~Simulation() = default;

void Simulation::set_initial(const InitialData& u0) {
    const double t = front_.time;
    if (mixed_) {
        front_.dofs = mixed_->to_broken(mixed_->project(u0));
    } else {
        front_.dofs = dg_->project([&](const Vec& x) { return law_->mapped_G(x, t, u0(x), Vec::Zero()); });
    }
    if (!front_.dofs.allFinite()) throw NonFiniteState("initial data is not finite");
}

State Simulation::evaluate(Index e, const Vec& x) const {
    if (mixed_) return mixed_->evaluate_broken(front_.dofs, e, x);
    return law_->ginv(x, front_.time, dg_->evaluate(front_.dofs, e, x), Vec::Zero());
}

PitchParams Simulation::pitch_params(double height, double safety) const {
    const auto& mesh = *mesh_;
    if (params_.pitch_speed > 0.0)
        return PitchParams::uniform(mesh, params_.pitch_speed, height, params_.ctau, params_.gamma);
    std::vector<double> speed(mesh.num_elements(), 0.0);
    if (mixed_) {
        const auto& wave = static_cast<const WaveLaw&>(*law_);
        for (Index e = 0; e < mesh.num_elements(); ++e)
            for (Index v : mesh.element(e)) speed[e] = std::max(speed[e], wave.speed(mesh.vertex(v)));
    } else {
        for (Index e = 0; e < mesh.num_elements(); ++e) {
            std::vector<Vec> pts = dg_->element(e).points;
            for (Index v : mesh.element(e)) pts.push_back(mesh.vertex(v));
            for (const Vec& x : pts)
                speed[e] = std::max(speed[e], law_->max_wavespeed(x, front_.time, evaluate(e, x)));
            speed[e] *= safety;
        }
        const double cmax = *std::max_element(speed.begin(), speed.end());
        const double floor = cmax > 0.0 ? 1e-3 * cmax : 1.0;
        for (double& c : speed) c = std::max(c, floor);
    }
    return PitchParams::from_element_speeds(mesh, std::move(speed), height, params_.ctau, params_.gamma);
}

void Simulation::for_each_layer(const TentSlab& slab, const std::function<void(const Tent&, std::size_t)>& fn) {
    const bool audit = params_.execution == Execution::audit;
    if (audit) writes_.assign(slab.tents.size(), {});
    int threads = params_.threads > 0 ? params_.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(threads, 1);
    std::vector<int> owner_layer, owner_tent;
    if (audit) {
        owner_layer.assign(front_.dofs.size(), -1);
        owner_tent.assign(front_.dofs.size(), -1);
    }

    for (std::size_t layer = 0; layer < slab.layers.size(); ++layer) {
        const auto& ids = slab.layers[layer];
        auto run = [&](std::size_t k) {
            const Tent& tent = slab.tents[ids[k]];
            try {
                fn(tent, static_cast<std::size_t>(tent.id));
            } catch (const Error&) {
                rethrow_with_context(" [tent " + std::to_string(tent.id) + ", layer " + std::to_string(layer) +
                                     ", slab " + std::to_string(front_.slab) + "]");
            }
        };
        if (params_.execution == Execution::parallel && threads > 1 && ids.size() > 1) {
            const int nt = std::min<int>(threads, static_cast<int>(ids.size()));
            std::vector<std::exception_ptr> errors(ids.size());
            std::vector<std::thread> pool;
            for (int w = 0; w < nt; ++w)
                pool.emplace_back([&, w] {
                    for (std::size_t k = w; k < ids.size(); k += nt) {
                        try {
                            run(k);
                        } catch (...) {
                            errors[k] = std::current_exception();
                        }
                    }
                });
            for (auto& t : pool) t.join();
            for (const auto& e : errors)
                if (e) std::rethrow_exception(e);
        } else {
            for (std::size_t k = 0; k < ids.size(); ++k) run(k);
        }
        if (audit) {
            // Write sets of one layer must be disjoint.
            const int L = static_cast<int>(layer);
            for (Index id : ids)
                for (int g : writes_[id]) {
                    if (owner_layer[g] == L && owner_tent[g] != id)
                        throw InvariantViolation("audit: tents " + std::to_string(owner_tent[g]) + " and " +
                                                 std::to_string(id) + " of layer " + std::to_string(layer) +
                                                 " both write dof " + std::to_string(g));
                    owner_layer[g] = L;
                    owner_tent[g] = id;
                }
            ++front_.diag.audited_layers;
        }
    }
}

void Simulation::implicit_slab(const TentSlab& slab, bool reuse) {
    const auto& wave = static_cast<const WaveLaw&>(*law_);
    if (!reuse) cache_.assign(slab.tents.size(), Cached{});
    const double t0 = front_.time;
    Eigen::VectorXd& u = front_.dofs;
    for_each_layer(slab, [&](const Tent& tent, std::size_t id) {
        Cached& c = cache_[id];
        if (!reuse) {
            const TentMap map = build_tent_map(tent, *mesh_, t0);
            c.steepness = steepness(map, [&](int le) {
                double s = 0.0;
                for (Index v : mesh_->element(map.element(le).element)) s = std::max(s, wave.speed(mesh_->vertex(v)));
                return s;
            });
            if (!(c.steepness < 1.0 - kCausalityMargin))
                throw CausalityViolation("wave tent is not causal: c|grad phi| = " + std::to_string(c.steepness));
            c.dofs = tent_dofs(*mixed_, tent);
            const Eigen::MatrixXd S = assemble_wave_S(*mixed_, wave, map, c.dofs);
            // The bottom data enters only through Ĝ tested with the patch basis, so one
            // matrix maps the broken patch coefficients to the patch solution at t̂ = 1.
            const Eigen::MatrixXd L = assemble_wave_load_matrix(*mixed_, wave, map, c.dofs, 0.0);
            Eigen::MatrixXd Lf(static_cast<Eigen::Index>(c.dofs.free.size()), L.cols());
            for (std::size_t i = 0; i < c.dofs.free.size(); ++i) Lf.row(static_cast<Eigen::Index>(i)) = L.row(c.dofs.free[i]);
            c.P = implicit_load_propagator(
                      [&](double that) { return assemble_wave_H(*mixed_, wave, map, c.dofs, that); }, S, c.dofs.free,
                      tableau_) *
                  Lf;
            c.elements.clear();
            for (int le = 0; le < map.size(); ++le) c.elements.push_back(map.element(le).element);
        }
        const int size = mixed_->element_size();
        const int n = static_cast<int>(c.dofs.global.size());
        Eigen::VectorXd bottom(static_cast<Eigen::Index>(c.elements.size()) * size);
        for (std::size_t k = 0; k < c.elements.size(); ++k)
            bottom.segment(static_cast<Eigen::Index>(k) * size, size) = u.segment(c.elements[k] * size, size);
        const Eigen::VectorXd next = c.P * bottom;
        if (!next.allFinite()) throw NonFiniteState("wave tent produced non-finite coefficients");
        Eigen::VectorXd local = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < c.dofs.free.size(); ++i) local[c.dofs.free[i]] = next[static_cast<Eigen::Index>(i)];
        for (Index e : c.elements) {
            const auto ed = mixed_->element_dofs(e);
            for (int k = 0; k < size; ++k) u[e * size + k] = local[c.dofs.local(ed[k])];
            if (params_.execution == Execution::audit)
                for (int k = 0; k < size; ++k) writes_[id].push_back(static_cast<int>(e * size + k));
        }
    });
    auto& d = front_.diag;
    if (!reuse) d.propagators_built += static_cast<int>(slab.tents.size());
    for (const auto& c : cache_) d.min_causality_margin = std::min(d.min_causality_margin, 1.0 - c.steepness);
}

void Simulation::explicit_slab(const TentSlab& slab) {
    const double t0 = front_.time;
    std::vector<ExplicitDiagnostics> tent_diag(slab.tents.size());
    std::vector<double> tent_steep(slab.tents.size(), 0.0);
    Eigen::VectorXd& u = front_.dofs;
    for_each_layer(slab, [&](const Tent& tent, std::size_t id) {
        const TentMap map = build_tent_map(tent, *mesh_, t0);
        const TentDG dg(*dg_, *law_, map);
        PatchState U = dg.gather(u);
        const auto w = dg.physical_states(U, 0.0);
        const double steep = steepness(map, [&](int le) {
            double s = 0.0;
            const auto& pts = dg_->element(map.element(le).element).points;
            for (std::size_t q = 0; q < pts.size(); ++q)
                s = std::max(s, law_->max_wavespeed(pts[q], map.time(le, pts[q], 0.0), w[le][q]));
            return s;
        });
        if (!(steep < 1.0 - kCausalityMargin))
            throw CausalityViolation("tent is steeper than the local wavespeed allows: c|grad phi| = " +
                                     std::to_string(steep));
        tent_steep[id] = steep;
        U = explicit_tent_advance(dg, std::move(U), params_.explicit_params, &tent_diag[id]);
        dg.scatter(U, u);
        if (params_.execution == Execution::audit)
            for (Index e : tent.patch.elements)
                for (int k = 0; k < dg_->element_size() * dg_->components(); ++k)
                    writes_[id].push_back(dg_->offset(e) + k);
    });
    // Reductions in tent order.
    auto& d = front_.diag;
    d.max_nu = 0.0;
    d.max_nu_element = -1;
    std::fill(d.element_nu.begin(), d.element_nu.end(), 0.0);
    for (std::size_t id = 0; id < slab.tents.size(); ++id) {
        const auto& td = tent_diag[id];
        d.substeps += td.substeps;
        d.viscosity_substeps += td.viscosity_substeps;
        d.min_causality_margin = std::min(d.min_causality_margin, 1.0 - tent_steep[id]);
        if (td.max_nu > d.max_nu) {
            d.max_nu = td.max_nu;
            d.max_nu_element = td.max_nu_element;
        }
        for (Index e : slab.tents[id].patch.elements) d.element_nu[e] = std::max(d.element_nu[e], td.max_nu);
    }
}

void Simulation::run_slab(double height) {
    if (mixed_) {
        const bool reuse = law_->linear_autonomous() && height == cache_height_;
        if (!reuse) {
            cached_slab_ = pitch_slab(*mesh_, pitch_params(height, 1.0));
            cache_height_ = height;
        }
        implicit_slab(cached_slab_, reuse);
        front_.diag.tents += static_cast<long>(cached_slab_.tents.size());
    } else {
        const Eigen::VectorXd saved = front_.dofs;
        double safety = params_.speed_safety;
        for (int attempt = 0;; ++attempt) {
            try {
                const TentSlab slab = pitch_slab(*mesh_, pitch_params(height, safety));
                explicit_slab(slab);
                front_.diag.tents += static_cast<long>(slab.tents.size());
                break;
            } catch (const CausalityViolation&) {
                if (params_.pitch_speed > 0.0 || attempt >= params_.causality_retries) throw;
                front_.dofs = saved;
                safety *= 1.5;
                ++front_.diag.causality_retries;
            }
        }
    }
    front_.time += height;
    ++front_.slab;
    ++front_.diag.slabs;
}

void Simulation::advance_to(double t) {
    if (!(t >= front_.time)) throw ConfigError("run: cannot advance backwards in time");
    const double tol = 1e-12 * std::max(1.0, t);
    while (t - front_.time > tol) {
        const double rest = t - front_.time;
        // a remainder within rounding of t_slab keeps the nominal height (and the cached propagators)
        const double h = rest < params_.t_slab - tol ? rest : params_.t_slab;
        run_slab(h);
        if (t - front_.time <= tol) front_.time = t;
    }
}

FrontState run_simulation(const SpatialMesh& mesh, const ConservationLaw& law, const RunParams& params,
                          const InitialData& u0) {
    Simulation sim(mesh, law, params);
    sim.set_initial(u0);
    sim.advance_to(params.t_max);
    return sim.front();
}

double error_norm_wave(const Simulation& sim, const std::function<State(const Vec&, double)>& exact) {
    if (!sim.mixed_space()) throw ConfigError("error_norm_wave: not a wave simulation");
    const double t = sim.front().time;
    return wave_error_norm_broken(*sim.mixed_space(), sim.front().dofs, [&](const Vec& x) { return exact(x, t); });
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

double regression_slope(const std::vector<double>& h, const std::vector<double>& e) {
    if (h.size() != e.size() || h.size() < 2) throw ConfigError("regression: need at least two (h, e) pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !(e[i] > 0.0)) throw ConfigError("regression: h and e must be positive");
        const double x = std::log(h[i]), y = std::log(e[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<RateRow> convergence_study(const ConvergenceParams& params) {
    if (params.levels.size() < 3) throw ConfigError("convergence: need at least three levels");
    std::vector<RateRow> rows;
    const WaveLaw law;
    for (int p : params.degrees) {
        std::vector<double> hs, es;
        const std::size_t first = rows.size();
        for (int l : params.levels) {
            const SpatialMesh mesh = generate_structured_square(l);
            RunParams rp;
            rp.scheme = Scheme::implicit_wave;
            rp.degree = p;
            rp.stages = p;
            rp.t_slab = params.slab_factor * std::ldexp(1.0, -l);
            rp.t_max = params.t_max;
            rp.pitch_speed = params.pitch_speed;
            rp.execution = params.execution;
            Simulation sim(mesh, law, rp);
            sim.set_initial([](const Vec& x) { return wave_exact_standing(x, 0.0); });
            sim.advance_to(params.t_max);
            RateRow r;
            r.p = p;
            r.level = l;
            r.h = std::ldexp(1.0, -l);
            r.e = error_norm_wave(sim, wave_exact_standing);
            rows.push_back(r);
            hs.push_back(r.h);
            es.push_back(r.e);
        }
        const double slope = regression_slope(hs, es);
        for (std::size_t i = first; i < rows.size(); ++i) rows[i].slope = slope;
    }
    return rows;
}

State wind_tunnel_state() { return EulerState::from_primitive(1.4, Vec(3.0, 0.0), 1.0).to_state(); }

WindTunnelResult wind_tunnel_demo(const WindTunnelParams& params) {
    if (!(params.t_end >= 0.0) || !(params.snapshot_interval > 0.0))
        throw ConfigError("windtunnel: t_end must be nonnegative and the snapshot interval positive");
    WindTunnelResult res;
    auto mesh = std::make_shared<SpatialMesh>(generate_step_channel(params.h_target, params.h_corner));
    res.mesh = mesh;
    res.triangles = mesh->num_elements();
    EulerLaw law;
    const State inflow = wind_tunnel_state();
    law.set_inflow_data([inflow](const Vec&, double) { return inflow; });

    RunParams rp;
    rp.scheme = Scheme::explicit_dg;
    rp.degree = params.degree;
    rp.t_slab = params.t_slab;
    rp.t_max = params.t_end;
    rp.explicit_params.visc = params.visc;
    rp.explicit_params.substep_safety = params.substep_safety;
    rp.execution = params.execution;
    Simulation sim(*mesh, law, rp);
    sim.set_initial([&](const Vec&) { return inflow; });

    res.min_density = std::numeric_limits<double>::infinity();
    res.max_density = -std::numeric_limits<double>::infinity();
    res.min_pressure = std::numeric_limits<double>::infinity();
    const DGSpace& space = *sim.dg_space();
    auto snapshot = [&] {
        const double t = sim.front().time;
        for (Index e = 0; e < mesh->num_elements(); ++e) {
            std::vector<Vec> pts = space.element(e).points;
            for (Index v : mesh->element(e)) pts.push_back(mesh->vertex(v));
            for (const Vec& x : pts) {
                const EulerState s = EulerState::from_state(space.evaluate(sim.front().dofs, e, x));
                res.min_density = std::min(res.min_density, s.rho);
                res.max_density = std::max(res.max_density, s.rho);
                res.min_pressure = std::min(res.min_pressure, s.pressure());
            }
        }
        FieldSnapshot snap = dg_snapshot(space, sim.front().dofs, t, {"rho", "m1", "m2", "E"});
        std::vector<double> pressure(mesh->num_elements());
        for (Index e = 0; e < mesh->num_elements(); ++e)
            pressure[e] = EulerState::from_state(space.mean(sim.front().dofs, e)).pressure();
        snap.cell_data.emplace_back("pressure", std::move(pressure));
        snap.cell_data.emplace_back("nu", sim.front().diag.element_nu);
        res.snapshots.push_back(std::move(snap));
    };
    snapshot();
    for (int k = 1; sim.front().time < params.t_end; ++k) {
        sim.advance_to(std::min(params.t_end, k * params.snapshot_interval));
        snapshot();
    }
    res.diag = sim.front().diag;
    res.max_nu = res.diag.max_nu;
    res.max_nu_element = res.diag.max_nu_element;
    if (res.max_nu_element >= 0) res.max_nu_centroid = mesh->element_centroid(res.max_nu_element);
    return res;
}

}  // namespace tentkit
