#pragma once
// Batch entry points behind the command-line interface: single runs with a
// series/verdict/snapshot output layout, parameter sweeps over copies of a
// base configuration, and post-hoc analysis that calibrates the growth
// envelope against a recorded series.
//
// Exit codes: 0 a run reached t_end, 2 a run was stopped by a detector
// (blow-up, intersection, collapse, step underflow), 1 usage or input error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphapatch/config.hpp"
#include "alphapatch/diagnostics.hpp"
#include "alphapatch/integrator.hpp"
#include "alphapatch/io.hpp"

namespace alphapatch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitStopped = 2;

struct RunOutcome {
    StopReason reason = StopReason::none;
    std::string detail;
    double t_final = 0.0;
    int steps = 0;
    int stage_halvings = 0;

    int exit_code() const { return reason == StopReason::reached_t_end ? kExitOk : kExitStopped; }
};

// Execute one configured run into out_dir: resolved_config.json, series.ndjson
// (one diagnostics line per recorded step), snapshots/curve_<patch>_<step>.csv,
// and verdict.json.  Throws on I/O or configuration errors.
inline RunOutcome execute_run(const RunConfig& cfg, const std::filesystem::path& out_dir,
                              const std::filesystem::path& base_dir = ".") {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "snapshots");
    io::write_json_file(out_dir / "resolved_config.json", to_json(cfg));

    SimState state = build_state(cfg, base_dir);
    io::NdjsonWriter series(out_dir / "series.ndjson");
    const auto recorder = [&](const SimState& s, double dt_used, int step) {
        series.line(io::record_to_json(measure_state(s, dt_used), step));
        for (std::size_t i = 0; i < s.patches.size(); ++i)
            io::write_curve_csv(out_dir / "snapshots" /
                                    ("curve_" + std::to_string(i) + "_" + std::to_string(step) +
                                     ".csv"),
                                s.patches[i].curve);
    };
    const RunResult res = run(state, cfg.ctrl, recorder);
    series.flush();

    RunOutcome outcome;
    outcome.reason = res.reason;
    outcome.detail = res.detail;
    outcome.t_final = res.t_final;
    outcome.steps = res.steps;
    outcome.stage_halvings = res.stage_halvings;

    nlohmann::ordered_json v;
    v["reason"] = to_string(res.reason);
    v["detail"] = res.detail;
    v["t_final"] = res.t_final;
    v["steps"] = res.steps;
    v["stage_halvings"] = res.stage_halvings;
    v["exit_code"] = outcome.exit_code();
    io::write_json_file(out_dir / "verdict.json", v);
    return outcome;
}

inline int cmd_run(const std::string& config_file, const std::string& output_dir_override) {
    try {
        const nlohmann::json j = io::read_json_file(config_file);
        RunConfig cfg = parse_run_config(j);
        if (!output_dir_override.empty()) cfg.output_dir = output_dir_override;
        const std::filesystem::path base_dir =
            std::filesystem::path(config_file).parent_path();
        const RunOutcome out = execute_run(cfg, cfg.output_dir, base_dir);
        std::cout << "verdict: " << to_string(out.reason) << " t_final=" << out.t_final
                  << " steps=" << out.steps << " -> " << cfg.output_dir << "\n";
        return out.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}

namespace runner_detail {

// Set a value inside a JSON document addressed as e.g. "control.dt_init" or
// "patches[1].theta_in".  Arrays must already be long enough; objects gain
// the key (an unknown key is then rejected by configuration parsing, which
// reports the full path).
inline void set_json_path(nlohmann::json& root, const std::string& path,
                          const nlohmann::json& value) {
    if (path.empty()) throw ConfigError("empty parameter path");
    nlohmann::json* cur = &root;
    std::size_t pos = 0;
    while (pos < path.size()) {
        std::size_t dot = path.find('.', pos);
        if (dot == std::string::npos) dot = path.size();
        std::string token = path.substr(pos, dot - pos);
        if (token.empty()) throw ConfigError("bad parameter path \"" + path + "\"");
        std::vector<std::size_t> indices;
        std::size_t br = token.find('[');
        std::string key = token.substr(0, br);
        while (br != std::string::npos) {
            const std::size_t close = token.find(']', br);
            if (close == std::string::npos || close == br + 1)
                throw ConfigError("bad parameter path \"" + path + "\"");
            const std::string num = token.substr(br + 1, close - br - 1);
            std::size_t used = 0;
            unsigned long idx = 0;
            try {
                idx = std::stoul(num, &used);
            } catch (const std::exception&) {
                throw ConfigError("bad index in parameter path \"" + path + "\"");
            }
            if (used != num.size())
                throw ConfigError("bad index in parameter path \"" + path + "\"");
            indices.push_back(idx);
            br = token.find('[', close);
        }
        if (key.empty()) throw ConfigError("bad parameter path \"" + path + "\"");
        if (!cur->is_object()) throw ConfigError("\"" + path + "\" descends into a non-object");
        cur = &(*cur)[key];
        const bool last = (dot == path.size());
        // A section the config omits (or sets to null) means "defaults"; descending
        // into it materializes the object so the parameter can be placed.
        if (!last && indices.empty() && cur->is_null()) *cur = nlohmann::json::object();
        for (std::size_t idx : indices) {
            if (!cur->is_array() || idx >= cur->size())
                throw ConfigError("index out of range in parameter path \"" + path + "\"");
            cur = &(*cur)[idx];
        }
        pos = dot + 1;
        if (last) break;
    }
    *cur = value;
}

inline nlohmann::json parse_value_literal(const std::string& raw) {
    try {
        return nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        return nlohmann::json(raw);  // bare strings are taken verbatim
    }
}

}  // namespace runner_detail

// One run per value of the swept parameter, each in its own entry_<k>
// sub-directory, with a one-line summary per entry in summary.ndjson.
// Failing entries are captured in the summary instead of aborting the sweep.
inline int cmd_sweep(const std::string& config_file, const std::string& param_path,
                     const std::vector<std::string>& raw_values,
                     const std::string& output_dir_override) {
    namespace fs = std::filesystem;
    try {
        if (raw_values.empty()) throw ConfigError("sweep needs at least one value");
        const nlohmann::json base = io::read_json_file(config_file);
        const fs::path base_dir = fs::path(config_file).parent_path();

        std::string sweep_dir = output_dir_override;
        if (sweep_dir.empty()) {
            RunConfig probe = parse_run_config(base);
            sweep_dir = probe.output_dir;
        }
        fs::create_directories(sweep_dir);
        io::NdjsonWriter summary(fs::path(sweep_dir) / "summary.ndjson");

        bool any_error = false;
        for (std::size_t k = 0; k < raw_values.size(); ++k) {
            const nlohmann::json value = runner_detail::parse_value_literal(raw_values[k]);
            const std::string entry_dir = "entry_" + std::to_string(k);
            nlohmann::ordered_json line;
            line["entry"] = k;
            line["param"] = param_path;
            line["value"] = value;
            line["dir"] = entry_dir;
            try {
                nlohmann::json doc = base;
                runner_detail::set_json_path(doc, param_path, value);
                RunConfig cfg = parse_run_config(doc);
                const RunOutcome out =
                    execute_run(cfg, fs::path(sweep_dir) / entry_dir, base_dir);
                line["reason"] = to_string(out.reason);
                line["t_final"] = out.t_final;
                line["steps"] = out.steps;
                line["exit_code"] = out.exit_code();
            } catch (const std::exception& e) {
                line["error"] = e.what();
                line["exit_code"] = kExitError;
                any_error = true;
            }
            summary.line(line);
            std::cout << "sweep entry " << k << " (" << param_path << " = " << value.dump()
                      << "): "
                      << (line.contains("error") ? std::string("error")
                                                 : line["reason"].get<std::string>())
                      << "\n";
        }
        return any_error ? kExitError : kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}

namespace runner_detail {

inline double field_or_nan(const nlohmann::json& j, const std::string& key) {
    const auto it = j.find(key);
    return it != j.end() && it->is_number() ? it->get<double>()
                                            : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace runner_detail

// Calibrate the growth envelope against each run's recorded series and emit
// plain two-column t-vs-observable files for plotting.  Results go into each
// run directory (analysis.ndjson, plots/).
inline int cmd_analyze(const std::vector<std::string>& run_dirs) {
    namespace fs = std::filesystem;
    if (run_dirs.empty()) {
        std::cerr << "error: analyze needs at least one run directory\n";
        return kExitError;
    }
    bool any_error = false;
    for (const std::string& dir : run_dirs) {
        try {
            const nlohmann::json cfg_json = io::read_json_file(fs::path(dir) / "resolved_config.json");
            const RunConfig cfg = parse_run_config(cfg_json);
            const double exponent = bound_exponent(cfg.alpha);
            const std::vector<nlohmann::json> series =
                io::read_ndjson(fs::path(dir) / "series.ndjson");
            if (series.empty()) throw io::IoError(dir + ": empty series");

            fs::create_directories(fs::path(dir) / "plots");
            io::NdjsonWriter analysis(fs::path(dir) / "analysis.ndjson");

            static constexpr const char* kPatchObservables[] = {
                "area",          "l2",        "h3",
                "c2",            "c2half",    "sup_arc_chord",
                "speed_sq",      "uniformity_defect", "tangency_defect"};

            const std::size_t np = cfg.patches.size();
            for (std::size_t i = 0; i < np; ++i) {
                const std::string prefix = "patch[" + std::to_string(i) + "].";
                for (const char* obs : kPatchObservables) {
                    std::ofstream plot(fs::path(dir) / "plots" /
                                       ("patch" + std::to_string(i) + "_" + obs + ".dat"));
                    for (const nlohmann::json& rec : series)
                        plot << io::format_g17(runner_detail::field_or_nan(rec, "t")) << ' '
                             << io::format_g17(
                                    runner_detail::field_or_nan(rec, prefix + obs))
                             << '\n';
                }
                // Envelope calibration on the Hoelder-type norm the growth
                // estimate controls.
                std::vector<Observation> obs;
                for (const nlohmann::json& rec : series) {
                    const double t = runner_detail::field_or_nan(rec, "t");
                    const double y = runner_detail::field_or_nan(rec, prefix + "c2half");
                    if (std::isfinite(t) && std::isfinite(y)) obs.push_back({t, y});
                }
                if (obs.size() < 2) throw io::IoError(dir + ": series too short to calibrate");
                const double c = calibrate_constant(obs, exponent);
                const BoundCurve fitted{obs.front().value, c, exponent};
                nlohmann::ordered_json line;
                line["patch"] = i;
                line["observable"] = "c2half";
                line["exponent"] = exponent;
                line["initial_value"] = obs.front().value;
                line["constant"] = c;
                line["expiry_time"] = fitted.expiry_time();
                line["t_last"] = obs.back().t;
                analysis.line(line);

                std::ofstream bound_plot(fs::path(dir) / "plots" /
                                         ("patch" + std::to_string(i) + "_c2half_bound.dat"));
                for (const Observation& o : obs) {
                    const auto b = fitted.value(o.t - obs.front().t);
                    if (!b) break;
                    bound_plot << io::format_g17(o.t) << ' ' << io::format_g17(*b) << '\n';
                }
            }
            {
                std::ofstream plot(fs::path(dir) / "plots" / "max_speed.dat");
                for (const nlohmann::json& rec : series)
                    plot << io::format_g17(runner_detail::field_or_nan(rec, "t")) << ' '
                         << io::format_g17(runner_detail::field_or_nan(rec, "max_speed"))
                         << '\n';
            }
            if (np >= 2) {
                std::ofstream plot(fs::path(dir) / "plots" / "min_interpatch.dat");
                for (const nlohmann::json& rec : series)
                    plot << io::format_g17(runner_detail::field_or_nan(rec, "t")) << ' '
                         << io::format_g17(runner_detail::field_or_nan(rec, "min_interpatch"))
                         << '\n';
            }
            std::cout << "analyzed " << dir << "\n";
        } catch (const std::exception& e) {
            std::cerr << "error: " << dir << ": " << e.what() << "\n";
            any_error = true;
        }
    }
    return any_error ? kExitError : kExitOk;
}

}  // namespace alphapatch
