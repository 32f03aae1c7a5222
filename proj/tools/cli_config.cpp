#include "cli_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tentkit::cli {

namespace {

using Setter = std::function<void(const nlohmann::json&)>;

template <class T>
Setter set(T& field) {
    return [&field](const nlohmann::json& v) { field = v.get<T>(); };
}

Setter set_execution(Execution& field) {
    return [&field](const nlohmann::json& v) { field = execution_from_string(v.get<std::string>()); };
}

void add_visc(std::map<std::string, Setter>& keys, ViscosityParams& visc) {
    keys["kappa1"] = set(visc.kappa1);
    keys["kappa2"] = set(visc.kappa2);
    keys["penalty"] = set(visc.penalty);
    keys["substep_scale"] = set(visc.substep_scale);
    keys["divide_by_mean_entropy"] = set(visc.divide_by_mean_entropy);
    keys["zero_exterior"] = set(visc.zero_exterior);
    keys["degree_scaled_penalty"] = set(visc.degree_scaled_penalty);
}

void apply_keys(const nlohmann::json& config, const std::map<std::string, Setter>& keys) {
    if (!config.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [key, value] : config.items()) {
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError("config: unknown key '" + key + "'");
        try {
            it->second(value);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config: bad value for '" + key + "': " + e.what());
        }
    }
}

int parse_int(const std::string& s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("expected an integer, got '" + s + "'");
    return v;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("expected a number, got '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

}  // namespace

SpatialMesh make_mesh(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (!parts.empty() && parts[0] == "square") {
        if (parts.size() != 2) throw ConfigError("mesh: expected square:LEVEL");
        return generate_structured_square(parse_int(parts[1]));
    }
    if (!parts.empty() && parts[0] == "step") {
        const WindTunnelParams d;
        if (parts.size() == 1) return generate_step_channel(d.h_target, d.h_corner);
        if (parts.size() != 3) throw ConfigError("mesh: expected step or step:H:HCORNER");
        return generate_step_channel(parse_double(parts[1]), parse_double(parts[2]));
    }
    return load_mesh(spec);
}

void apply_config(const nlohmann::json& config, RunParams& p) {
    std::map<std::string, Setter> keys{
        {"scheme", [&p](const nlohmann::json& v) { p.scheme = scheme_from_string(v.get<std::string>()); }},
        {"degree", set(p.degree)},
        {"stages", set(p.stages)},
        {"t_slab", set(p.t_slab)},
        {"t_max", set(p.t_max)},
        {"pitch_speed", set(p.pitch_speed)},
        {"speed_safety", set(p.speed_safety)},
        {"causality_retries", set(p.causality_retries)},
        {"gamma", set(p.gamma)},
        {"ctau", set(p.ctau)},
        {"execution", set_execution(p.execution)},
        {"threads", set(p.threads)},
        {"substeps", set(p.explicit_params.substeps)},
        {"substep_safety", set(p.explicit_params.substep_safety)},
        {"ssp_rk2", set(p.explicit_params.ssp_rk2)},
        {"viscosity", set(p.explicit_params.viscosity)},
    };
    add_visc(keys, p.explicit_params.visc);
    apply_keys(config, keys);
}

void apply_config(const nlohmann::json& config, WindTunnelParams& p) {
    std::map<std::string, Setter> keys{
        {"h_target", set(p.h_target)},   {"h_corner", set(p.h_corner)},
        {"degree", set(p.degree)},       {"t_end", set(p.t_end)},
        {"t_slab", set(p.t_slab)},       {"snapshot_interval", set(p.snapshot_interval)},
        {"substep_safety", set(p.substep_safety)},
        {"execution", set_execution(p.execution)},
    };
    add_visc(keys, p.visc);
    apply_keys(config, keys);
}

void apply_config(const nlohmann::json& config, ConvergenceParams& p) {
    const std::map<std::string, Setter> keys{
        {"degrees", set(p.degrees)},       {"levels", set(p.levels)},
        {"t_max", set(p.t_max)},           {"pitch_speed", set(p.pitch_speed)},
        {"slab_factor", set(p.slab_factor)}, {"execution", set_execution(p.execution)},
    };
    apply_keys(config, keys);
}

nlohmann::json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& s : split(text, ',')) out.push_back(parse_int(s));
    if (out.empty()) throw ConfigError("expected a comma-separated list of integers");
    return out;
}

std::vector<int> parse_range(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) return {parse_int(parts[0])};
    if (parts.size() != 2) throw ConfigError("expected FIRST:LAST, got '" + text + "'");
    const int a = parse_int(parts[0]), b = parse_int(parts[1]);
    if (b < a) throw ConfigError("empty range '" + text + "'");
    std::vector<int> out;
    for (int l = a; l <= b; ++l) out.push_back(l);
    return out;
}

nlohmann::json tents_to_json(const SpatialMesh& mesh, const TentSlab& slab) {
    nlohmann::json tents = nlohmann::json::array();
    for (const Tent& t : slab.tents) {
        nlohmann::json verts = nlohmann::json::array();
        for (std::size_t k = 0; k < t.patch.vertices.size(); ++k)
            verts.push_back({{"vertex", t.patch.vertices[k]}, {"tau_bot", t.tau_bot[k]}, {"tau_top", t.tau_top[k]}});
        tents.push_back({{"id", t.id},
                         {"center", t.center},
                         {"position", {mesh.vertex(t.center).x(), mesh.vertex(t.center).y()}},
                         {"pole_height", t.pole_height},
                         {"layer", t.layer},
                         {"vertices", std::move(verts)}});
    }
    return {{"t_slab", slab.t_slab}, {"ctau", slab.ctau}, {"layers", slab.layers.size()}, {"tents", std::move(tents)}};
}

nlohmann::json diagnostics_to_json(const RunDiagnostics& d) {
    return {{"slabs", d.slabs},
            {"tents", d.tents},
            {"substeps", d.substeps},
            {"viscosity_substeps", d.viscosity_substeps},
            {"causality_retries", d.causality_retries},
            {"min_causality_margin", d.min_causality_margin},
            {"propagators_built", d.propagators_built},
            {"audited_layers", d.audited_layers},
            {"max_nu", d.max_nu},
            {"max_nu_element", d.max_nu_element}};
}

InitialData default_initial_data(const std::string& law) {
    if (law == "wave") return [](const Vec& x) { return wave_exact_standing(x, 0.0); };
    if (law == "euler") return [](const Vec&) { return wind_tunnel_state(); };
    if (law == "transport" || law == "burgers")
        return [](const Vec& x) {
            const double r2 = (x - Vec(0.5, 0.5)).squaredNorm() / 0.04;
            State s(1);
            s[0] = r2 < 1.0 ? 0.5 * (1.0 - r2) * (1.0 - r2) * (1.0 - r2) : 0.0;
            return s;
        };
    throw ConfigError("unknown law '" + law + "' (transport | burgers | wave | euler)");
}

}  // namespace tentkit::cli
