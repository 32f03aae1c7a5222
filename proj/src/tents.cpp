#include "tentkit/tents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tentkit {

namespace {

void derive_edge_speeds(const SpatialMesh& mesh, PitchParams& p) {
    p.edge_speed.assign(mesh.num_edges(), 0.0);
    for (Index i = 0; i < mesh.num_edges(); ++i)
        for (Index e : mesh.edge_elements(i))
            if (e >= 0) p.edge_speed[i] = std::max(p.edge_speed[i], p.element_speed[e]);
}

double potential_advance(const AdvancingFront& f, Index v) {
    const auto& mesh = *f.mesh;
    double k = f.params.t_slab - f.tau[v];
    for (Index i : mesh.vertex_edges(v)) {
        const auto& e = mesh.edge(i);
        const Index other = e[0] == v ? e[1] : e[0];
        k = std::min(k, f.tau[other] - f.tau[v] + mesh.edge_length(i) * f.params.ctau / f.params.edge_speed[i]);
    }
    return std::max(k, 0.0);
}

bool ready_rule(const AdvancingFront& f, Index v) {
    const double remaining = f.params.t_slab - f.tau[v];
    if (!(remaining > 0.0) || !(f.ktilde[v] > 0.0)) return false;
    // A vertex that can finish the slab in one pole is always ready; otherwise
    // the γ-rule stalls once the remaining height drops below γ·r_l.
    return f.ktilde[v] >= f.params.gamma * f.ref_height[v] || f.ktilde[v] == remaining;
}

void set_ready(AdvancingFront& f, Index v, bool ready) {
    if (ready == static_cast<bool>(f.in_ready[v])) return;
    if (ready)
        f.ready.emplace(f.tau[v], v);
    else
        f.ready.erase({f.tau[v], v});
    f.in_ready[v] = ready;
}

}  // namespace

PitchParams PitchParams::uniform(const SpatialMesh& mesh, double speed, double t_slab, double ctau, double gamma) {
    return from_element_speeds(mesh, std::vector<double>(mesh.num_elements(), speed), t_slab, ctau, gamma);
}

PitchParams PitchParams::from_element_speeds(const SpatialMesh& mesh, std::vector<double> speeds, double t_slab,
                                             double ctau, double gamma) {
    PitchParams p;
    p.gamma = gamma;
    p.ctau = ctau;
    p.t_slab = t_slab;
    p.element_speed = std::move(speeds);
    p.finalize(mesh);
    return p;
}

void PitchParams::finalize(const SpatialMesh& mesh) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("pitch: gamma must lie in (0,1)");
    if (!(t_slab > 0.0) || !std::isfinite(t_slab)) throw ConfigError("pitch: t_slab must be positive");
    // The bound |grad τ| ≤ 1/c_T is attained on right isosceles triangles; the
    // factor keeps the front strictly causal so H stays nonsingular.
    if (ctau == 0.0) ctau = std::sin(mesh_quality(mesh).theta_min) * kDefaultCtauFactor;
    if (!(ctau > 0.0)) throw ConfigError("pitch: C_T must be positive");
    if (static_cast<Index>(element_speed.size()) != mesh.num_elements())
        throw ConfigError("pitch: need one wavespeed per element");
    for (double c : element_speed)
        if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("pitch: wavespeeds must be positive and finite");
    if (static_cast<Index>(edge_speed.size()) != mesh.num_edges()) derive_edge_speeds(mesh, *this);
}

bool AdvancingFront::finished() const {
    return std::all_of(tau.begin(), tau.end(), [&](double t) { return t >= params.t_slab; });
}

AdvancingFront init_front(const SpatialMesh& mesh, PitchParams params) {
    params.finalize(mesh);
    AdvancingFront f;
    f.mesh = &mesh;
    f.params = std::move(params);
    const Index n = mesh.num_vertices();
    f.tau.assign(n, 0.0);
    f.ref_height.assign(n, std::numeric_limits<double>::infinity());
    for (Index v = 0; v < n; ++v)
        for (Index i : mesh.vertex_edges(v))
            f.ref_height[v] =
                std::min(f.ref_height[v], mesh.edge_length(i) * f.params.ctau / f.params.edge_speed[i]);
    f.ktilde.resize(n);
    for (Index v = 0; v < n; ++v) f.ktilde[v] = std::min(f.params.t_slab, f.ref_height[v]);
    f.in_ready.assign(n, 0);
    for (Index v = 0; v < n; ++v) set_ready(f, v, ready_rule(f, v));
    f.element_layer.assign(mesh.num_elements(), -1);
    return f;
}

Tent pitch_tent(AdvancingFront& f) {
    const auto& mesh = *f.mesh;
    if (f.ready.empty()) {
        if (f.finished()) throw EmptyReadySet("pitch_tent: the slab is complete");
        throw StalledFront("pitch_tent: no vertex can advance although the slab is not complete");
    }
    const Index v = f.ready.begin()->second;
    const double k = f.ktilde[v];

    Tent tent;
    tent.id = f.tents_pitched++;
    tent.center = v;
    tent.pole_height = k;
    tent.patch = vertex_patch(mesh, v);
    tent.tau_bot.reserve(tent.patch.vertices.size());
    for (Index w : tent.patch.vertices) tent.tau_bot.push_back(f.tau[w]);
    tent.tau_top = tent.tau_bot;

    set_ready(f, v, false);
    const double remaining = f.params.t_slab - f.tau[v];
    f.tau[v] = (k == remaining) ? f.params.t_slab : f.tau[v] + k;
    tent.tau_top[0] = f.tau[v];

    // Step 4: refresh k̃ at the centre and its neighbours.
    auto refresh = [&](Index w) {
        set_ready(f, w, false);
        f.ktilde[w] = potential_advance(f, w);
        set_ready(f, w, ready_rule(f, w));
    };
    refresh(v);
    for (Index i : mesh.vertex_edges(v)) {
        const auto& e = mesh.edge(i);
        refresh(e[0] == v ? e[1] : e[0]);
    }

    int layer = 0;
    for (Index e : tent.patch.elements) layer = std::max(layer, f.element_layer[e] + 1);
    for (Index e : tent.patch.elements) f.element_layer[e] = layer;
    tent.layer = layer;
    return tent;
}

TentSlab pitch_slab(const SpatialMesh& mesh, const PitchParams& params) {
    AdvancingFront f = init_front(mesh, params);
    TentSlab slab;
    slab.t_slab = f.params.t_slab;
    slab.ctau = f.params.ctau;
    while (!f.finished()) {
        Tent t = pitch_tent(f);
        if (static_cast<std::size_t>(t.layer) >= slab.layers.size()) slab.layers.resize(t.layer + 1);
        slab.layers[t.layer].push_back(t.id);
        slab.tents.push_back(std::move(t));
    }
    return slab;
}

double tent_volume(const SpatialMesh& mesh, const Tent& tent) {
    double vol = 0.0;
    for (Index e : tent.patch.elements) {
        double sum = 0.0;
        for (Index w : mesh.element(e)) {
            const int lv = tent.patch.local_vertex(w);
            sum += tent.tau_top[lv] - tent.tau_bot[lv];
        }
        vol += mesh.element_area(e) * sum / 3.0;
    }
    return vol;
}

Vec element_gradient(const SpatialMesh& mesh, Index element, std::span<const double> tau) {
    const auto& el = mesh.element(element);
    const Mat J = mesh.element_jacobian(element);
    const Vec d(tau[el[1]] - tau[el[0]], tau[el[2]] - tau[el[0]]);
    // τ(x0 + Jξ) = τ0 + dᵀξ  ⇒  grad τ = J⁻ᵀ d
    return J.transpose().inverse() * d;
}

double max_scaled_front_gradient(const SpatialMesh& mesh, std::span<const double> tau,
                                 std::span<const double> element_speed) {
    double worst = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e)
        worst = std::max(worst, element_gradient(mesh, e, tau).norm() * element_speed[e]);
    return worst;
}

double max_edge_slope_ratio(const SpatialMesh& mesh, std::span<const double> tau, const PitchParams& params) {
    double worst = 0.0;
    for (Index i = 0; i < mesh.num_edges(); ++i) {
        const auto& e = mesh.edge(i);
        const double slope = std::abs(tau[e[0]] - tau[e[1]]) / mesh.edge_length(i);
        worst = std::max(worst, slope * params.edge_speed[i] / params.ctau);
    }
    return worst;
}

SlabStats slab_stats(const TentSlab& slab) {
    SlabStats s;
    s.tents = slab.tents.size();
    s.layers = slab.layers.size();
    if (!slab.tents.empty()) {
        s.min_pole = std::numeric_limits<double>::infinity();
        for (const auto& t : slab.tents) {
            s.min_pole = std::min(s.min_pole, t.pole_height);
            s.max_pole = std::max(s.max_pole, t.pole_height);
        }
    }
    return s;
}

}  // namespace tentkit
