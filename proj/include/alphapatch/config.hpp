#pragma once
// JSON run configuration: strict parsing (unknown keys are rejected with
// their full path), defaults, cross-field validation, and construction of
// the initial simulation state.

#include <cmath>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "alphapatch/integrator.hpp"
#include "alphapatch/io.hpp"

namespace alphapatch {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeSpec {
    enum class Kind { circle, ellipse, fourier_perturbed_circle, csv_file };
    struct Mode {
        int mode = 1;
        double amplitude = 0.0;
        double phase = 0.0;
    };
    Kind kind = Kind::circle;
    double radius = 1.0;           // circle, fourier_perturbed_circle
    double a = 1.0, b = 1.0;       // ellipse semi-axes
    std::vector<Mode> modes;       // fourier_perturbed_circle
    std::string path;              // csv_file
};

struct PatchSpec {
    ShapeSpec shape;
    Vec2 center{0.0, 0.0};
    double orientation = 0.0;      // rigid rotation angle applied to the shape
    double theta_in = 1.0;
    double theta_out = 0.0;
};

struct RunConfig {
    double alpha = 1.0;
    Scheme scheme = Scheme::qg_with_lambda;
    int n = 256;                   // grid size for analytically sampled shapes
    bool reparametrize_initial = false;  // resample each patch to uniform speed at t = 0
    std::vector<PatchSpec> patches;
    RegularizationSpec reg{};
    StepControl ctrl{};
    std::string output_dir = "out";
};

namespace config_detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& j, const std::string& path,
                                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("unknown key \"" + (path.empty() ? "" : path + ".") +
                              item.key() + "\"");
    }
}

inline const json* find(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline std::string join(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

inline double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("\"" + path + "\" must be a number");
    return v.get<double>();
}

inline double number_or(const json& j, const char* key, const std::string& path, double dflt) {
    const json* v = find(j, key);
    return v ? as_number(*v, join(path, key)) : dflt;
}

inline double require_number(const json& j, const char* key, const std::string& path) {
    const json* v = find(j, key);
    if (!v) throw ConfigError("missing required key \"" + join(path, key) + "\"");
    return as_number(*v, join(path, key));
}

inline int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError("\"" + path + "\" must be an integer");
    return v.get<int>();
}

inline bool bool_or(const json& j, const char* key, const std::string& path, bool dflt) {
    const json* v = find(j, key);
    if (!v) return dflt;
    if (!v->is_boolean()) throw ConfigError("\"" + join(path, key) + "\" must be a boolean");
    return v->get<bool>();
}

inline std::string require_string(const json& j, const char* key, const std::string& path) {
    const json* v = find(j, key);
    if (!v || !v->is_string())
        throw ConfigError("missing or non-string key \"" + join(path, key) + "\"");
    return v->get<std::string>();
}

inline ShapeSpec parse_shape(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError("\"" + path + "\" must be an object");
    const std::string type = require_string(j, "type", path);
    ShapeSpec s;
    if (type == "circle") {
        reject_unknown_keys(j, path, {"type", "radius"});
        s.kind = ShapeSpec::Kind::circle;
        s.radius = number_or(j, "radius", path, 1.0);
        if (!(s.radius > 0.0)) throw ConfigError("\"" + path + ".radius\" must be positive");
    } else if (type == "ellipse") {
        reject_unknown_keys(j, path, {"type", "a", "b"});
        s.kind = ShapeSpec::Kind::ellipse;
        s.a = require_number(j, "a", path);
        s.b = require_number(j, "b", path);
        if (!(s.a > 0.0) || !(s.b > 0.0))
            throw ConfigError("\"" + path + "\": semi-axes must be positive");
    } else if (type == "fourier_perturbed_circle") {
        reject_unknown_keys(j, path, {"type", "radius", "modes"});
        s.kind = ShapeSpec::Kind::fourier_perturbed_circle;
        s.radius = number_or(j, "radius", path, 1.0);
        if (!(s.radius > 0.0)) throw ConfigError("\"" + path + ".radius\" must be positive");
        const json* modes = find(j, "modes");
        if (!modes || !modes->is_array() || modes->empty())
            throw ConfigError("\"" + path + ".modes\" must be a non-empty array");
        for (std::size_t k = 0; k < modes->size(); ++k) {
            const std::string mpath = path + ".modes[" + std::to_string(k) + "]";
            const json& m = (*modes)[k];
            if (!m.is_object()) throw ConfigError("\"" + mpath + "\" must be an object");
            reject_unknown_keys(m, mpath, {"mode", "amplitude", "phase"});
            ShapeSpec::Mode mode;
            const json* mv = find(m, "mode");
            if (!mv) throw ConfigError("missing required key \"" + mpath + ".mode\"");
            mode.mode = as_int(*mv, mpath + ".mode");
            if (mode.mode < 1) throw ConfigError("\"" + mpath + ".mode\" must be >= 1");
            mode.amplitude = require_number(m, "amplitude", mpath);
            mode.phase = number_or(m, "phase", mpath, 0.0);
            s.modes.push_back(mode);
        }
    } else if (type == "csv_file") {
        reject_unknown_keys(j, path, {"type", "path"});
        s.kind = ShapeSpec::Kind::csv_file;
        s.path = require_string(j, "path", path);
    } else {
        throw ConfigError("\"" + path + ".type\": unknown shape \"" + type +
                          "\" (expected circle, ellipse, fourier_perturbed_circle, csv_file)");
    }
    return s;
}

inline PatchSpec parse_patch(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError("\"" + path + "\" must be an object");
    reject_unknown_keys(j, path, {"shape", "center", "orientation", "theta_in", "theta_out"});
    const json* shape = find(j, "shape");
    if (!shape) throw ConfigError("missing required key \"" + path + ".shape\"");
    PatchSpec p;
    p.shape = parse_shape(*shape, path + ".shape");
    if (const json* c = find(j, "center")) {
        if (!c->is_array() || c->size() != 2)
            throw ConfigError("\"" + path + ".center\" must be a two-element array");
        p.center = {as_number((*c)[0], path + ".center[0]"),
                    as_number((*c)[1], path + ".center[1]")};
    }
    p.orientation = number_or(j, "orientation", path, 0.0);
    p.theta_in = number_or(j, "theta_in", path, 1.0);
    p.theta_out = number_or(j, "theta_out", path, 0.0);
    if (p.theta_in == p.theta_out)
        throw ConfigError("\"" + path + "\": theta_in and theta_out must differ");
    return p;
}

}  // namespace config_detail

inline Scheme parse_scheme(const std::string& s) {
    if (s == "alpha_lt1") return Scheme::alpha_lt1;
    if (s == "qg_with_lambda") return Scheme::qg_with_lambda;
    throw ConfigError("unknown scheme \"" + s +
                      "\" (expected alpha_lt1 or qg_with_lambda)");
}

inline Mollifier parse_mollifier(const std::string& s) {
    if (s == "fourier_cutoff") return Mollifier::fourier_cutoff;
    if (s == "periodic_gaussian") return Mollifier::periodic_gaussian;
    throw ConfigError("unknown mollifier \"" + s +
                      "\" (expected fourier_cutoff or periodic_gaussian)");
}

inline const char* to_string(Mollifier m) {
    return m == Mollifier::fourier_cutoff ? "fourier_cutoff" : "periodic_gaussian";
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
    using namespace config_detail;
    if (!j.is_object()) throw ConfigError("configuration root must be an object");
    reject_unknown_keys(j, "",
                        {"alpha", "scheme", "n", "reparametrize_initial", "patches",
                         "regularization", "control", "output_dir"});

    RunConfig cfg;
    cfg.alpha = require_number(j, "alpha", "");
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
        throw ConfigError("\"alpha\" must lie in (0, 1]");

    if (const json* v = find(j, "n")) {
        cfg.n = as_int(*v, "n");
    } else {
        throw ConfigError("missing required key \"n\"");
    }
    if (cfg.n < 8 || cfg.n % 2 != 0) throw ConfigError("\"n\" must be even and >= 8");

    if (const json* v = find(j, "scheme")) {
        if (!v->is_string()) throw ConfigError("\"scheme\" must be a string");
        cfg.scheme = parse_scheme(v->get<std::string>());
    } else {
        cfg.scheme = cfg.alpha == 1.0 ? Scheme::qg_with_lambda : Scheme::alpha_lt1;
    }
    if (cfg.scheme == Scheme::qg_with_lambda && cfg.alpha != 1.0)
        throw ConfigError("scheme qg_with_lambda requires alpha = 1");
    cfg.reparametrize_initial = bool_or(j, "reparametrize_initial", "", false);

    const json* patches = find(j, "patches");
    if (!patches || !patches->is_array() || patches->empty())
        throw ConfigError("\"patches\" must be a non-empty array");
    for (std::size_t i = 0; i < patches->size(); ++i)
        cfg.patches.push_back(
            parse_patch((*patches)[i], "patches[" + std::to_string(i) + "]"));

    if (const json* r = find(j, "regularization")) {
        if (!r->is_object()) throw ConfigError("\"regularization\" must be an object");
        reject_unknown_keys(*r, "regularization", {"epsilon", "delta", "mollifier"});
        cfg.reg.epsilon = number_or(*r, "epsilon", "regularization", 0.0);
        cfg.reg.delta = number_or(*r, "delta", "regularization", 0.0);
        if (cfg.reg.epsilon < 0.0 || cfg.reg.delta < 0.0)
            throw ConfigError("\"regularization\": epsilon and delta must be >= 0");
        if (const json* m = find(*r, "mollifier")) {
            if (!m->is_string()) throw ConfigError("\"regularization.mollifier\" must be a string");
            cfg.reg.mollifier = parse_mollifier(m->get<std::string>());
        }
    }

    if (const json* c = find(j, "control")) {
        if (!c->is_object()) throw ConfigError("\"control\" must be an object");
        reject_unknown_keys(*c, "control",
                            {"dt_init", "cfl", "dt_min", "t_end", "arc_chord_max",
                             "record_every", "reuniformize", "reuniformize_threshold",
                             "collapse_threshold"});
        StepControl d{};
        cfg.ctrl.dt_init = number_or(*c, "dt_init", "control", d.dt_init);
        cfg.ctrl.cfl = number_or(*c, "cfl", "control", d.cfl);
        cfg.ctrl.dt_min = number_or(*c, "dt_min", "control", d.dt_min);
        cfg.ctrl.t_end = number_or(*c, "t_end", "control", d.t_end);
        cfg.ctrl.arc_chord_max = number_or(*c, "arc_chord_max", "control", d.arc_chord_max);
        if (const json* v = find(*c, "record_every"))
            cfg.ctrl.record_every = as_int(*v, "control.record_every");
        cfg.ctrl.reuniformize = bool_or(*c, "reuniformize", "control", d.reuniformize);
        cfg.ctrl.reuniformize_threshold =
            number_or(*c, "reuniformize_threshold", "control", d.reuniformize_threshold);
        if (const json* v = find(*c, "collapse_threshold"))
            cfg.ctrl.collapse_threshold = as_number(*v, "control.collapse_threshold");
        if (!(cfg.ctrl.cfl > 0.0 && cfg.ctrl.cfl <= 1.0))
            throw ConfigError("\"control.cfl\" must lie in (0, 1]");
        if (!(cfg.ctrl.dt_init > 0.0)) throw ConfigError("\"control.dt_init\" must be positive");
        if (!(cfg.ctrl.dt_min > 0.0)) throw ConfigError("\"control.dt_min\" must be positive");
        if (cfg.ctrl.record_every < 1)
            throw ConfigError("\"control.record_every\" must be >= 1");
        if (cfg.ctrl.collapse_threshold && !(*cfg.ctrl.collapse_threshold > 0.0))
            throw ConfigError("\"control.collapse_threshold\" must be positive");
    }

    if (const json* v = find(j, "output_dir")) {
        if (!v->is_string()) throw ConfigError("\"output_dir\" must be a string");
        cfg.output_dir = v->get<std::string>();
    }
    return cfg;
}

// Resolved-configuration echo: every field explicit, defaults filled in.
inline nlohmann::ordered_json to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["alpha"] = cfg.alpha;
    j["scheme"] = to_string(cfg.scheme);
    j["n"] = cfg.n;
    j["reparametrize_initial"] = cfg.reparametrize_initial;
    j["patches"] = nlohmann::ordered_json::array();
    for (const PatchSpec& p : cfg.patches) {
        nlohmann::ordered_json jp;
        nlohmann::ordered_json js;
        switch (p.shape.kind) {
            case ShapeSpec::Kind::circle:
                js["type"] = "circle";
                js["radius"] = p.shape.radius;
                break;
            case ShapeSpec::Kind::ellipse:
                js["type"] = "ellipse";
                js["a"] = p.shape.a;
                js["b"] = p.shape.b;
                break;
            case ShapeSpec::Kind::fourier_perturbed_circle: {
                js["type"] = "fourier_perturbed_circle";
                js["radius"] = p.shape.radius;
                js["modes"] = nlohmann::ordered_json::array();
                for (const ShapeSpec::Mode& m : p.shape.modes)
                    js["modes"].push_back(
                        {{"mode", m.mode}, {"amplitude", m.amplitude}, {"phase", m.phase}});
                break;
            }
            case ShapeSpec::Kind::csv_file:
                js["type"] = "csv_file";
                js["path"] = p.shape.path;
                break;
        }
        jp["shape"] = js;
        jp["center"] = {p.center.x, p.center.y};
        jp["orientation"] = p.orientation;
        jp["theta_in"] = p.theta_in;
        jp["theta_out"] = p.theta_out;
        j["patches"].push_back(jp);
    }
    j["regularization"] = {{"epsilon", cfg.reg.epsilon},
                           {"delta", cfg.reg.delta},
                           {"mollifier", to_string(cfg.reg.mollifier)}};
    nlohmann::ordered_json jc;
    jc["dt_init"] = cfg.ctrl.dt_init;
    jc["cfl"] = cfg.ctrl.cfl;
    jc["dt_min"] = cfg.ctrl.dt_min;
    jc["t_end"] = cfg.ctrl.t_end;
    jc["arc_chord_max"] = cfg.ctrl.arc_chord_max;
    jc["record_every"] = cfg.ctrl.record_every;
    jc["reuniformize"] = cfg.ctrl.reuniformize;
    jc["reuniformize_threshold"] = cfg.ctrl.reuniformize_threshold;
    if (cfg.ctrl.collapse_threshold)
        jc["collapse_threshold"] = *cfg.ctrl.collapse_threshold;
    else
        jc["collapse_threshold"] = nullptr;
    j["control"] = jc;
    j["output_dir"] = cfg.output_dir;
    return j;
}

// Sampled curve for a patch: the shape in its own frame, rotated by
// `orientation` and shifted to `center`.  Analytic shapes use the grid size
// n; a CSV shape keeps the resolution of the file.
inline ClosedCurve build_curve(const PatchSpec& p, int n,
                               const std::filesystem::path& base_dir) {
    const double co = std::cos(p.orientation);
    const double si = std::sin(p.orientation);
    const auto place = [&](Vec2 q) {
        return Vec2{p.center.x + co * q.x - si * q.y, p.center.y + si * q.x + co * q.y};
    };
    switch (p.shape.kind) {
        case ShapeSpec::Kind::circle:
            return ClosedCurve::sample(
                [&](double g) {
                    return place({p.shape.radius * std::cos(g), p.shape.radius * std::sin(g)});
                },
                n);
        case ShapeSpec::Kind::ellipse:
            return ClosedCurve::sample(
                [&](double g) { return place({p.shape.a * std::cos(g), p.shape.b * std::sin(g)}); },
                n);
        case ShapeSpec::Kind::fourier_perturbed_circle:
            return ClosedCurve::sample(
                [&](double g) {
                    double r = 1.0;
                    for (const ShapeSpec::Mode& m : p.shape.modes)
                        r += m.amplitude * std::cos(m.mode * g + m.phase);
                    r *= p.shape.radius;
                    return place({r * std::cos(g), r * std::sin(g)});
                },
                n);
        case ShapeSpec::Kind::csv_file: {
            std::filesystem::path path(p.shape.path);
            if (path.is_relative()) path = base_dir / path;
            const ClosedCurve raw = io::read_curve_csv(path);
            std::vector<Vec2> nodes;
            nodes.reserve(static_cast<std::size_t>(raw.size()));
            for (int jnode = 0; jnode < raw.size(); ++jnode) nodes.push_back(place(raw[jnode]));
            return ClosedCurve(std::move(nodes));
        }
    }
    throw ConfigError("unreachable shape kind");
}

// Initial state at t = 0.  Relative csv_file paths resolve against base_dir
// (normally the directory containing the configuration file).
inline SimState build_state(const RunConfig& cfg,
                            const std::filesystem::path& base_dir = ".") {
    SimState s;
    s.scheme = cfg.scheme;
    s.reg = cfg.reg;
    for (const PatchSpec& p : cfg.patches) {
        ClosedCurve c = build_curve(p, cfg.n, base_dir);
        if (cfg.reparametrize_initial) c = reparametrize_uniform(c);
        s.patches.push_back({std::move(c), PatchConfig(cfg.alpha, p.theta_in, p.theta_out)});
    }
    return s;
}

}  // namespace alphapatch
