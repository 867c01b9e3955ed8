#pragma once
// File formats: curve CSV snapshots (gamma,x1,x2 rows) and newline-delimited
// JSON series.  Numeric output uses %.17g so every double round-trips.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alphapatch/curve.hpp"
#include "alphapatch/diagnostics.hpp"

namespace alphapatch::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_curve_csv(const std::filesystem::path& path, const ClosedCurve& c) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "gamma,x1,x2\n";
    for (int j = 0; j < c.size(); ++j)
        out << format_g17(c.gamma(j)) << ',' << format_g17(c[j].x) << ','
            << format_g17(c[j].y) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

inline ClosedCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty curve file: " + path.string());
    if (line == "gamma,x1,x2\r") line.pop_back();
    if (line != "gamma,x1,x2")
        throw IoError("expected header \"gamma,x1,x2\" in " + path.string() + ", got \"" +
                      line + "\"");
    std::vector<double> gammas;
    std::vector<Vec2> nodes;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        double vals[3];
        for (int f = 0; f < 3; ++f) {
            if (!std::getline(ss, field, ','))
                throw IoError(path.string() + ":" + std::to_string(row) +
                              ": expected three comma-separated fields");
            try {
                std::size_t used = 0;
                vals[f] = std::stod(field, &used);
                if (used != field.size()) throw std::invalid_argument(field);
            } catch (const std::exception&) {
                throw IoError(path.string() + ":" + std::to_string(row) +
                              ": cannot parse number \"" + field + "\"");
            }
        }
        if (std::getline(ss, field, ','))
            throw IoError(path.string() + ":" + std::to_string(row) + ": extra fields");
        gammas.push_back(vals[0]);
        nodes.push_back({vals[1], vals[2]});
    }
    if (nodes.size() < 8 || nodes.size() % 2 != 0)
        throw IoError(path.string() + ": node count must be even and >= 8, got " +
                      std::to_string(nodes.size()));
    const int n = static_cast<int>(nodes.size());
    for (int j = 0; j < n; ++j) {
        const double expected = -spectral::pi + two_pi * j / n;
        if (std::abs(gammas[static_cast<std::size_t>(j)] - expected) > 1e-9)
            throw IoError(path.string() + ":" + std::to_string(j + 2) +
                          ": parameter column is not the uniform grid on [-pi, pi)");
    }
    try {
        return ClosedCurve(std::move(nodes));
    } catch (const CurveError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

// One series line with flat keys; doubles carry full precision and the key
// order is fixed so reruns are byte-identical.
inline nlohmann::ordered_json record_to_json(const DiagnosticsRecord& r, int step) {
    nlohmann::ordered_json j;
    j["step"] = step;
    j["t"] = r.t;
    j["dt_used"] = r.dt_used;
    j["max_speed"] = r.max_speed;
    if (r.min_interpatch) j["min_interpatch"] = *r.min_interpatch;
    for (std::size_t i = 0; i < r.patches.size(); ++i) {
        const PatchDiagnostics& p = r.patches[i];
        const std::string k = "patch[" + std::to_string(i) + "].";
        j[k + "area"] = p.area;
        j[k + "l2"] = p.l2;
        j[k + "h3"] = p.h3;
        j[k + "c2"] = p.c2;
        j[k + "c2half"] = p.c2half;
        j[k + "sup_arc_chord"] = p.sup_arc_chord;
        j[k + "speed_sq"] = p.speed_sq;
        j[k + "uniformity_defect"] = p.uniformity_defect;
        j[k + "tangency_defect"] = p.tangency_defect;
    }
    return j;
}

class NdjsonWriter {
public:
    explicit NdjsonWriter(const std::filesystem::path& path) : path_(path), out_(path) {
        if (!out_) throw IoError("cannot open for writing: " + path.string());
    }
    template <typename Json>
    void line(const Json& j) {
        out_ << j.dump() << '\n';
        if (!out_) throw IoError("write failed: " + path_.string());
    }
    void flush() { out_.flush(); }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

inline std::vector<nlohmann::json> read_ndjson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::vector<nlohmann::json> lines;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        try {
            lines.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path.string() + ":" + std::to_string(row) + ": " + e.what());
        }
    }
    return lines;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

template <typename Json>
inline void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace alphapatch::io
