/// tentkit command line: pitch, solve, converge, windtunnel.

#include "cli_config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace tentkit;
namespace fs = std::filesystem;

namespace {

/// The library law; Euler gets the wind-tunnel inflow state.
std::shared_ptr<ConservationLaw> solve_law(const std::string& name) {
    auto law = make_law(name);
    if (auto* euler = dynamic_cast<EulerLaw*>(law.get())) {
        const State inflow = wind_tunnel_state();
        euler->set_inflow_data([inflow](const Vec&, double) { return inflow; });
    }
    return law;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path);
    f << j.dump(2) << "\n";
    if (!f) throw Error("write failed for " + path);
}

std::string numbered(const fs::path& dir, const std::string& stem, int k) {
    std::ostringstream os;
    os << stem << '_' << std::setw(4) << std::setfill('0') << k << ".vtk";
    return (dir / os.str()).string();
}

FieldSnapshot front_snapshot(const Simulation& sim) {
    if (sim.mixed_space()) return mixed_snapshot(*sim.mixed_space(), sim.front().dofs, sim.front().time);
    std::vector<std::string> names;
    if (sim.law().name() == "euler") names = {"rho", "m1", "m2", "E"};
    return dg_snapshot(*sim.dg_space(), sim.front().dofs, sim.front().time, names);
}

struct PitchArgs {
    std::string mesh;
    double c = 1.0, ctau = 0.0, gamma = 0.5, slab = 0.1;
    std::string out;
    bool stats = false;
};

int run_pitch(const PitchArgs& a) {
    const SpatialMesh mesh = cli::make_mesh(a.mesh);
    const TentSlab slab = pitch_slab(mesh, PitchParams::uniform(mesh, a.c, a.slab, a.ctau, a.gamma));
    if (!a.out.empty()) write_json(cli::tents_to_json(mesh, slab), a.out);
    if (a.stats) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const Tent& t : slab.tents) {
            lo = std::min(lo, t.pole_height);
            hi = std::max(hi, t.pole_height);
        }
        std::cout << "tents " << slab.tents.size() << "\nlayers " << slab.layers.size() << "\nmin_pole_height "
                  << lo << "\nmax_pole_height " << hi << "\n";
    }
    return 0;
}

struct SolveArgs {
    std::string law, scheme, mesh = "square:3", config, out, execution;
    int p = -1, stages = -1;
    double slab = -1.0, tmax = -1.0;
};

int run_solve(const SolveArgs& a) {
    const auto law = solve_law(a.law);
    RunParams rp;
    rp.scheme = a.law == "wave" ? Scheme::implicit_wave : Scheme::explicit_dg;
    if (a.law == "wave") rp.pitch_speed = 2.0;
    if (!a.config.empty()) cli::apply_config(cli::load_config(a.config), rp);
    if (!a.scheme.empty()) rp.scheme = scheme_from_string(a.scheme);
    if (!a.execution.empty()) rp.execution = execution_from_string(a.execution);
    if (a.p >= 0) rp.degree = a.p;
    if (a.stages >= 0) rp.stages = a.stages;
    if (a.slab > 0.0) rp.t_slab = a.slab;
    if (a.tmax >= 0.0) rp.t_max = a.tmax;

    const SpatialMesh mesh = cli::make_mesh(a.mesh);
    Simulation sim(mesh, *law, rp);
    sim.set_initial(cli::default_initial_data(a.law));
    const fs::path dir = a.out.empty() ? fs::path() : fs::path(a.out);
    if (!a.out.empty()) {
        fs::create_directories(dir);
        write_vtk(front_snapshot(sim), numbered(dir, "front", 0));
    }
    sim.advance_to(rp.t_max);
    nlohmann::json summary{{"law", a.law},
                           {"elements", mesh.num_elements()},
                           {"time", sim.front().time},
                           {"diagnostics", cli::diagnostics_to_json(sim.front().diag)}};
    if (a.law == "wave") summary["error_standing_wave"] = error_norm_wave(sim, wave_exact_standing);
    if (!a.out.empty()) {
        write_vtk(front_snapshot(sim), numbered(dir, "front", sim.front().slab));
        write_json(summary, (dir / "summary.json").string());
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

struct ConvergeArgs {
    std::string law = "wave", degrees = "1,2,3", levels = "2:5", out, config, execution;
};

int run_converge(const ConvergeArgs& a) {
    if (a.law != "wave") throw ConfigError("converge: only the wave law has a convergence study");
    ConvergenceParams cp;
    if (!a.config.empty()) cli::apply_config(cli::load_config(a.config), cp);
    cp.degrees = cli::parse_int_list(a.degrees);
    cp.levels = cli::parse_range(a.levels);
    if (!a.execution.empty()) cp.execution = execution_from_string(a.execution);
    const auto rows = convergence_study(cp);
    if (!a.out.empty()) write_rates_csv(rows, a.out);
    write_rates_csv(rows, std::cout);
    return 0;
}

struct WindTunnelArgs {
    int p = -1;
    double tend = -1.0;
    std::string out, config, execution;
};

int run_windtunnel(const WindTunnelArgs& a) {
    WindTunnelParams wp;
    if (!a.config.empty()) cli::apply_config(cli::load_config(a.config), wp);
    if (a.p >= 0) wp.degree = a.p;
    if (a.tend >= 0.0) wp.t_end = a.tend;
    if (!a.execution.empty()) wp.execution = execution_from_string(a.execution);
    const WindTunnelResult r = wind_tunnel_demo(wp);
    nlohmann::json summary{{"triangles", r.triangles},
                           {"snapshots", r.snapshots.size()},
                           {"min_density", r.min_density},
                           {"max_density", r.max_density},
                           {"min_pressure", r.min_pressure},
                           {"max_nu", r.max_nu},
                           {"max_nu_element", r.max_nu_element},
                           {"max_nu_centroid", {r.max_nu_centroid.x(), r.max_nu_centroid.y()}},
                           {"diagnostics", cli::diagnostics_to_json(r.diag)}};
    if (!a.out.empty()) {
        const fs::path dir(a.out);
        fs::create_directories(dir);
        for (std::size_t k = 0; k < r.snapshots.size(); ++k)
            write_vtk(r.snapshots[k], numbered(dir, "windtunnel", static_cast<int>(k)));
        write_json(summary, (dir / "summary.json").string());
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mapped tent pitching solvers"};
    app.require_subcommand(1);

    PitchArgs pa;
    auto* pitch = app.add_subcommand("pitch", "Pitch one slab of tents");
    pitch->add_option("--mesh", pa.mesh, "square:L, step, step:H:HC or a mesh file")->required();
    pitch->add_option("--c", pa.c, "Uniform wave speed");
    pitch->add_option("--ctau", pa.ctau, "Shape constant (0: default)");
    pitch->add_option("--gamma", pa.gamma, "Fraction of the admissible pole height");
    pitch->add_option("--slab", pa.slab, "Slab height");
    pitch->add_option("--out", pa.out, "Write the tents as JSON");
    pitch->add_flag("--stats", pa.stats, "Print tent and layer counts and pole heights");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Advance a front to t_max");
    solve->add_option("--law", sa.law, "transport | burgers | wave | euler")->required();
    solve->add_option("--scheme", sa.scheme, "implicit | explicit");
    solve->add_option("--mesh", sa.mesh, "square:L, step, step:H:HC or a mesh file");
    solve->add_option("--p", sa.p, "Polynomial degree");
    solve->add_option("--stages", sa.stages, "Radau IIA stages (0: s = p)");
    solve->add_option("--slab", sa.slab, "Slab height");
    solve->add_option("--tmax", sa.tmax, "Final time");
    solve->add_option("--config", sa.config, "JSON configuration");
    solve->add_option("--execution", sa.execution, "serial | parallel | audit");
    solve->add_option("--out", sa.out, "Output directory");

    ConvergeArgs ca;
    auto* converge = app.add_subcommand("converge", "Standing-wave convergence study");
    converge->add_option("--law", ca.law, "wave");
    converge->add_option("--p", ca.degrees, "Degrees, e.g. 1,2,3");
    converge->add_option("--levels", ca.levels, "Mesh levels, e.g. 2:5");
    converge->add_option("--config", ca.config, "JSON configuration");
    converge->add_option("--execution", ca.execution, "serial | parallel | audit");
    converge->add_option("--out", ca.out, "CSV file");

    WindTunnelArgs wa;
    auto* wind = app.add_subcommand("windtunnel", "Mach 3 forward-facing step");
    wind->add_option("--p", wa.p, "Polynomial degree");
    wind->add_option("--tend", wa.tend, "Final time");
    wind->add_option("--config", wa.config, "JSON configuration");
    wind->add_option("--execution", wa.execution, "serial | parallel | audit");
    wind->add_option("--out", wa.out, "Output directory");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*pitch) return run_pitch(pa);
        if (*solve) return run_solve(sa);
        if (*converge) return run_converge(ca);
        if (*wind) return run_windtunnel(wa);
    } catch (const std::exception& e) {
        std::cerr << "tentkit: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
