#include "doctest.h"

#include "tentkit/mapping.hpp"
#include "tentkit/tents.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace tentkit;

namespace {

/// Independent scripted run of the pitching loop on a small mesh: the same
/// rules written out directly against vertex neighbour lists.
struct ScriptedFront {
    std::vector<double> tau, k, r;
    std::vector<std::vector<std::pair<Index, double>>> nbr;  // (neighbour, |e| C_T / c)
    double t_slab, gamma;

    ScriptedFront(const SpatialMesh& m, double c, double ctau, double slab, double g) : t_slab(slab), gamma(g) {
        const Index n = m.num_vertices();
        tau.assign(n, 0);
        nbr.resize(n);
        for (Index i = 0; i < m.num_edges(); ++i) {
            const auto& e = m.edge(i);
            const double len = (m.vertex(e[0]) - m.vertex(e[1])).norm();
            nbr[e[0]].push_back({e[1], len * ctau / c});
            nbr[e[1]].push_back({e[0], len * ctau / c});
        }
        for (Index v = 0; v < n; ++v) {
            double rv = 1e300;
            for (auto [w, s] : nbr[v]) rv = std::min(rv, s);
            r.push_back(rv);
            k.push_back(std::min(slab, rv));
        }
    }
    bool ready(Index v) const {
        return tau[v] < t_slab && k[v] > 0 && (k[v] >= gamma * r[v] || k[v] == t_slab - tau[v]);
    }
    Index pick() const {
        Index best = -1;
        for (Index v = 0; v < static_cast<Index>(tau.size()); ++v)
            if (ready(v) && (best < 0 || tau[v] < tau[best])) best = v;
        return best;
    }
    void update(Index v) {
        double kv = t_slab - tau[v];
        for (auto [w, s] : nbr[v]) kv = std::min(kv, tau[w] - tau[v] + s);
        k[v] = std::max(kv, 0.0);
    }
    void pitch(Index v) {
        tau[v] = (k[v] == t_slab - tau[v]) ? t_slab : tau[v] + k[v];
        update(v);
        for (auto [w, s] : nbr[v]) update(w);
    }
};

double gradient_bound_excess(const SpatialMesh& m, const std::vector<double>& tau, double c) {
    // brute force: gradient from solving the 2×2 system of edge differences
    double worst = 0;
    for (Index e = 0; e < m.num_elements(); ++e) {
        const auto& el = m.element(e);
        Eigen::Matrix2d A;
        A.row(0) = (m.vertex(el[1]) - m.vertex(el[0])).transpose();
        A.row(1) = (m.vertex(el[2]) - m.vertex(el[0])).transpose();
        const Eigen::Vector2d g = A.fullPivLu().solve(Eigen::Vector2d(tau[el[1]] - tau[el[0]], tau[el[2]] - tau[el[0]]));
        worst = std::max(worst, g.norm() * c - 1.0);
    }
    return worst;
}

}  // namespace

TEST_CASE("init_front reference heights") {
    const auto m = generate_structured_square(1);
    const auto f = init_front(m, PitchParams::uniform(m, 1.0, 10.0, 0.5));
    for (Index v = 0; v < m.num_vertices(); ++v) {
        double shortest = 1e300;
        for (Index i = 0; i < m.num_edges(); ++i)
            if (m.edge(i)[0] == v || m.edge(i)[1] == v) shortest = std::min(shortest, m.edge_length(i));
        CHECK(f.ref_height[v] == doctest::Approx(0.5 * shortest));
        CHECK(f.ktilde[v] == f.ref_height[v]);
        CHECK(f.is_ready(v));
        CHECK(f.tau[v] == 0.0);
    }
    for (Index v = 0; v < m.num_vertices(); ++v)
        if (m.vertex(v) == Vec(0.5, 0.5)) CHECK(f.ref_height[v] == doctest::Approx(0.25));
    const auto clamped = init_front(m, PitchParams::uniform(m, 1.0, 0.1, 0.5));
    for (double k : clamped.ktilde) CHECK(k == 0.1);
}

TEST_CASE("pitch params validation and default C_T") {
    const auto m = generate_structured_square(1);
    CHECK_THROWS_AS(PitchParams::uniform(m, 1.0, 0.1, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(PitchParams::uniform(m, -1.0, 0.1), ConfigError);
    CHECK_THROWS_AS(PitchParams::uniform(m, 1.0, 0.0), ConfigError);
    const auto p = PitchParams::uniform(m, 1.0, 0.1);
    CHECK(p.ctau == std::sin(M_PI / 4) * kDefaultCtauFactor);
}

TEST_CASE("pitching agrees with a scripted run of the algorithm") {
    for (int l = 0; l <= 2; ++l) {
        const auto m = generate_structured_square(l);
        const double c = 1.3, ctau = 0.5, slab = 0.37;
        auto f = init_front(m, PitchParams::uniform(m, c, slab, ctau));
        ScriptedFront s(m, c, ctau, slab, 0.5);
        int steps = 0;
        while (!f.finished()) {
            const Index expected = s.pick();
            REQUIRE(expected >= 0);
            const double k_expected = s.k[expected];
            const Tent t = pitch_tent(f);
            CHECK(t.center == expected);
            CHECK(t.pole_height == k_expected);
            s.pitch(expected);
            for (Index v = 0; v < m.num_vertices(); ++v) {
                CHECK(f.tau[v] == s.tau[v]);
                CHECK(f.ktilde[v] == doctest::Approx(s.k[v]).epsilon(1e-15));
            }
            ++steps;
        }
        CHECK(s.pick() < 0);
        CHECK_THROWS_AS(pitch_tent(f), EmptyReadySet);
        MESSAGE("l=" << l << ": " << steps << " tents");
    }
}

TEST_CASE("front invariants hold after every pitch") {
    for (int l = 1; l <= 4; ++l) {
        const auto m = generate_structured_square(l);
        const double c = 2.0;
        auto f = init_front(m, PitchParams::uniform(m, c, 0.1));
        std::vector<double> prev = f.tau;
        while (!f.finished()) {
            const Tent t = pitch_tent(f);
            CHECK(t.pole_height > 0);
            for (Index v = 0; v < m.num_vertices(); ++v) {
                CHECK(f.tau[v] >= prev[v]);
                CHECK(f.tau[v] <= 0.1);
                CHECK(f.ktilde[v] >= 0);
            }
            CHECK(max_edge_slope_ratio(m, f.tau, f.params) <= 1.0 + 1e-12);
            CHECK(gradient_bound_excess(m, f.tau, c) <= 1e-12);
            // J is exactly the rule set
            for (Index v = 0; v < m.num_vertices(); ++v) {
                const bool rule = f.tau[v] < 0.1 && f.ktilde[v] > 0 &&
                                  (f.ktilde[v] >= 0.5 * f.ref_height[v] || f.ktilde[v] == 0.1 - f.tau[v]);
                CHECK(f.is_ready(v) == rule);
            }
            prev = f.tau;
        }
    }
}

TEST_CASE("pitch_slab volume, layers and determinism") {
    std::vector<SpatialMesh> meshes;
    for (int l = 1; l <= 4; ++l) meshes.push_back(generate_structured_square(l));
    meshes.push_back(generate_step_channel(0.2, 0.05));
    for (const auto& m : meshes) {
        double area = 0;
        for (Index e = 0; e < m.num_elements(); ++e) area += m.element_area(e);
        const double slab_height = 0.05;
        const auto params = PitchParams::uniform(m, 2.0, slab_height);
        const auto slab = pitch_slab(m, params);
        double vol = 0;
        for (const auto& t : slab.tents) vol += tent_volume(m, t);
        CHECK(std::abs(vol - area * slab_height) < 1e-12);
        // layers: disjoint patches inside a layer, dependency order across layers
        for (const auto& layer : slab.layers) {
            std::set<Index> seen;
            for (Index id : layer)
                for (Index e : slab.tents[id].patch.elements) CHECK(seen.insert(e).second);
        }
        std::vector<int> last_layer(m.num_elements(), -1);
        for (const auto& t : slab.tents)
            for (Index e : t.patch.elements) {
                CHECK(t.layer > last_layer[e]);
                last_layer[e] = t.layer;
            }
        const auto again = pitch_slab(m, params);
        REQUIRE(again.tents.size() == slab.tents.size());
        for (std::size_t i = 0; i < slab.tents.size(); ++i) {
            CHECK(again.tents[i].center == slab.tents[i].center);
            CHECK(again.tents[i].tau_top == slab.tents[i].tau_top);
            CHECK(again.tents[i].tau_bot == slab.tents[i].tau_bot);
            CHECK(again.tents[i].layer == slab.tents[i].layer);
        }
        const auto st = slab_stats(slab);
        CHECK(st.tents == slab.tents.size());
        CHECK(st.min_pole > 0);
        CHECK(st.max_pole <= slab_height);
    }
}

TEST_CASE("pitching terminates on structured meshes with gamma 1/2 and large gamma") {
    for (int l = 1; l <= 4; ++l) {
        const auto m = generate_structured_square(l);
        CHECK_NOTHROW(pitch_slab(m, PitchParams::uniform(m, 1.0, 0.3)));
        CHECK_NOTHROW(pitch_slab(m, PitchParams::uniform(m, 1.0, 0.3, 0.0, 0.99)));
    }
    // nonuniform speeds on the graded channel
    const auto m = generate_step_channel(0.2, 0.05);
    std::vector<double> c(m.num_elements());
    for (Index e = 0; e < m.num_elements(); ++e) c[e] = 1.0 + 3.0 * m.element_centroid(e).x();
    CHECK_NOTHROW(pitch_slab(m, PitchParams::from_element_speeds(m, c, 0.2, 0.0, 0.99)));
}

TEST_CASE("pitched tents pass the causality check for transport") {
    const Vec beta(1.5, -0.5);
    TransportLaw law(beta);
    for (int l = 1; l <= 3; ++l) {
        const auto m = generate_structured_square(l);
        const auto slab = pitch_slab(m, PitchParams::uniform(m, beta.norm(), 0.2));
        for (const auto& t : slab.tents) {
            const auto map = build_tent_map(t, m);
            CHECK(causality_check(map, m, [&](const Vec&) { return beta.norm(); }));
            for (int le = 0; le < map.size(); ++le) {
                CausalitySample s{le, m.element_centroid(map.element(le).element), State::Constant(1, 1.0)};
                CHECK(causality_check(map, law, std::span<const CausalitySample>(&s, 1)));
            }
        }
    }
}
