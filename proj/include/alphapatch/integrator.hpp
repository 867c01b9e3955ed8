#pragma once
// Time integration of the patch-boundary evolution: classic fourth-order
// Runge-Kutta with a CFL-style step cap, persistent step halving on stage
// failure, and per-step termination checks (arc-chord blow-up, boundary
// self-intersection, collapse of distinct patches, step underflow).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alphapatch/curve.hpp"
#include "alphapatch/geometry.hpp"
#include "alphapatch/tangential.hpp"
#include "alphapatch/velocity.hpp"

namespace alphapatch {

// alpha_lt1 advances nodes with the velocity field alone; qg_with_lambda adds
// the tangential reparametrization term lambda * d_gamma x that keeps the
// parametrization close to uniform speed.
enum class Scheme { alpha_lt1, qg_with_lambda };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::alpha_lt1: return "alpha_lt1";
        case Scheme::qg_with_lambda: return "qg_with_lambda";
    }
    return "unknown";
}

struct Patch {
    ClosedCurve curve;
    PatchConfig cfg;
};

struct SimState {
    double t = 0.0;
    Scheme scheme = Scheme::alpha_lt1;
    RegularizationSpec reg{};
    std::vector<Patch> patches;
};

enum class StopReason {
    none,
    reached_t_end,
    arc_chord_blowup,
    self_intersection,
    patch_collapse,
    dt_underflow,
    nonfinite_state,
};

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::none: return "none";
        case StopReason::reached_t_end: return "reached_t_end";
        case StopReason::arc_chord_blowup: return "arc_chord_blowup";
        case StopReason::self_intersection: return "self_intersection";
        case StopReason::patch_collapse: return "patch_collapse";
        case StopReason::dt_underflow: return "dt_underflow";
        case StopReason::nonfinite_state: return "nonfinite_state";
    }
    return "unknown";
}

struct StepControl {
    double dt_init = 1e-3;
    double cfl = 0.5;        // fraction of a grid spacing travelled per step, in (0, 1]
    double dt_min = 1e-12;   // halving below this terminates the run
    double t_end = 1.0;
    double arc_chord_max = 1e6;
    int record_every = 10;   // recorder cadence in accepted steps (initial and
                             // final states are always recorded)
    bool reuniformize = false;               // resample to uniform speed when the
    double reuniformize_threshold = 1e-3;    // defect exceeds this
    // Distinct patches closer than this stop the run.  Unset means ten grid
    // spacings of the coarser patch in each pair.
    std::optional<double> collapse_threshold;
};

// Combined velocity of every patch at its own nodes: the self-interaction
// term plus the field induced by every other patch, with the tangential
// reparametrization term added under the qg_with_lambda scheme.
inline std::vector<NodeField> evolution_rhs(const SimState& s) {
    const std::size_t np = s.patches.size();
    std::vector<NodeField> rhs(np);
    for (std::size_t i = 0; i < np; ++i) {
        const Patch& p = s.patches[i];
        NodeField v = regularized_self_velocity(p.curve, p.cfg, s.reg);
        for (std::size_t j = 0; j < np; ++j) {
            if (j == i) continue;
            const NodeField ext =
                external_velocity(p.curve.nodes(), s.patches[j].curve, s.patches[j].cfg);
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += ext[k];
        }
        if (s.scheme == Scheme::qg_with_lambda) {
            const TangentialField tf = lambda_from_velocity(p.curve, v);
            const std::vector<Vec2> d1 = derivative(p.curve, 1);
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += tf.lambda[k] * d1[k];
        }
        rhs[i] = std::move(v);
    }
    return rhs;
}

inline double max_node_speed(const std::vector<NodeField>& rhs) {
    double m = 0.0;
    for (const NodeField& f : rhs)
        for (const Vec2& v : f) m = std::max(m, norm(v));
    return m;
}

namespace integrator_detail {

// Copy of `base` with nodes advanced by scale * k and time by t_offset.  The
// ClosedCurve constructor rejects non-finite nodes, so a diverging stage
// surfaces as CurveError.
inline SimState displaced(const SimState& base, const std::vector<NodeField>& k, double scale,
                          double t_offset) {
    SimState out = base;
    out.t = base.t + t_offset;
    for (std::size_t i = 0; i < base.patches.size(); ++i) {
        std::vector<Vec2> nodes = base.patches[i].curve.nodes();
        for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] += scale * k[i][j];
        out.patches[i].curve = ClosedCurve(std::move(nodes));
    }
    return out;
}

}  // namespace integrator_detail

// One classic RK4 step of size dt for every patch simultaneously.  On stage
// failure (non-finite node or a kernel singularity inside rhs_fn) the state
// is left untouched and false is returned so the caller can halve dt.  A
// precomputed rhs at the current state may be passed as k1 to avoid
// recomputing it across halving retries.
template <typename RhsFn>
bool try_rk4_step(SimState& s, double dt, RhsFn&& rhs_fn,
                  const std::vector<NodeField>* k1 = nullptr) {
    using integrator_detail::displaced;
    try {
        const std::vector<NodeField> k1v = k1 ? *k1 : rhs_fn(s);
        const std::vector<NodeField> k2 = rhs_fn(displaced(s, k1v, dt / 2, dt / 2));
        const std::vector<NodeField> k3 = rhs_fn(displaced(s, k2, dt / 2, dt / 2));
        const std::vector<NodeField> k4 = rhs_fn(displaced(s, k3, dt, dt));
        SimState out = s;
        out.t = s.t + dt;
        for (std::size_t i = 0; i < s.patches.size(); ++i) {
            std::vector<Vec2> nodes = s.patches[i].curve.nodes();
            for (std::size_t j = 0; j < nodes.size(); ++j)
                nodes[j] += (dt / 6.0) * (k1v[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            out.patches[i].curve = ClosedCurve(std::move(nodes));
        }
        s = std::move(out);
        return true;
    } catch (const CurveError&) {
        return false;
    } catch (const VelocityError&) {
        return false;
    }
}

// Closest approach between nodes of distinct patches; +inf for fewer than two
// patches.  `which` receives the patch index pair realizing the minimum.
inline double min_interpatch_distance(const SimState& s,
                                      std::pair<std::size_t, std::size_t>* which = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a + 1 < s.patches.size(); ++a)
        for (std::size_t b = a + 1; b < s.patches.size(); ++b) {
            for (const Vec2& pa : s.patches[a].curve.nodes())
                for (const Vec2& pb : s.patches[b].curve.nodes()) {
                    const double d = norm(pa - pb);
                    if (d < best) {
                        best = d;
                        if (which) *which = {a, b};
                    }
                }
        }
    return best;
}

// True when any pair of non-adjacent boundary segments of the patch cross.
inline bool curve_self_intersects(const ClosedCurve& c, std::pair<int, int>* which = nullptr) {
    const int n = c.size();
    for (int j = 0; j < n; ++j) {
        const Vec2& a0 = c[j];
        const Vec2& a1 = c[(j + 1) % n];
        for (int k = j + 2; k < n; ++k) {
            if (j == 0 && k == n - 1) continue;  // adjacent across the seam
            const Vec2& b0 = c[k];
            const Vec2& b1 = c[(k + 1) % n];
            if (segments_intersect(a0, a1, b0, b1)) {
                if (which) *which = {j, k};
                return true;
            }
        }
    }
    return false;
}

struct StopCheck {
    StopReason reason = StopReason::none;
    std::string detail;
};

// Termination checks in fixed priority order.  current_dt lets the run loop
// funnel step underflow through the same reporting path; callers probing a
// state in isolation can leave it at the default.
inline StopCheck detect_stop(const SimState& s, const StepControl& ctrl,
                             double current_dt = std::numeric_limits<double>::infinity()) {
    for (std::size_t i = 0; i < s.patches.size(); ++i) {
        const std::vector<Vec2>& nodes = s.patches[i].curve.nodes();
        for (std::size_t j = 0; j < nodes.size(); ++j)
            if (!finite(nodes[j]))
                return {StopReason::nonfinite_state, "patch " + std::to_string(i) + " node " +
                                                         std::to_string(j) + " is non-finite"};
    }
    for (std::size_t i = 0; i < s.patches.size(); ++i) {
        const ArcChordReport rep = arc_chord(s.patches[i].curve);
        if (!(rep.sup_f <= ctrl.arc_chord_max))
            return {StopReason::arc_chord_blowup,
                    "patch " + std::to_string(i) + " sup F = " + std::to_string(rep.sup_f) +
                        " at node pair (" + std::to_string(rep.argmax_pair.first) + ", " +
                        std::to_string(rep.argmax_pair.second) + ")"};
    }
    for (std::size_t i = 0; i < s.patches.size(); ++i) {
        std::pair<int, int> seg;
        if (curve_self_intersects(s.patches[i].curve, &seg))
            return {StopReason::self_intersection,
                    "patch " + std::to_string(i) + " segments " + std::to_string(seg.first) +
                        " and " + std::to_string(seg.second) + " cross"};
    }
    for (std::size_t a = 0; a + 1 < s.patches.size(); ++a)
        for (std::size_t b = a + 1; b < s.patches.size(); ++b) {
            const int n_coarse =
                std::min(s.patches[a].curve.size(), s.patches[b].curve.size());
            const double threshold =
                ctrl.collapse_threshold.value_or(10.0 * two_pi / n_coarse);
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& pa : s.patches[a].curve.nodes())
                for (const Vec2& pb : s.patches[b].curve.nodes())
                    best = std::min(best, norm(pa - pb));
            if (best < threshold)
                return {StopReason::patch_collapse,
                        "patches " + std::to_string(a) + " and " + std::to_string(b) +
                            " are " + std::to_string(best) + " apart (threshold " +
                            std::to_string(threshold) + ")"};
        }
    if (current_dt < ctrl.dt_min)
        return {StopReason::dt_underflow, "step size " + std::to_string(current_dt) +
                                              " fell below dt_min = " +
                                              std::to_string(ctrl.dt_min)};
    return {};
}

struct RunResult {
    StopReason reason = StopReason::none;
    std::string detail;
    double t_final = 0.0;
    int steps = 0;
    int stage_halvings = 0;
};

// Advance the state to ctrl.t_end or the first termination condition.  The
// recorder is called as record(state, dt_used, step) for the initial state,
// every record_every-th accepted step, and the final state.  rhs_fn makes the
// loop testable against manufactured fields; run() below wires the actual
// evolution.
template <typename RhsFn, typename Recorder>
RunResult run_with(SimState& s, const StepControl& ctrl, RhsFn&& rhs_fn, Recorder&& record) {
    if (s.patches.empty()) throw std::invalid_argument("run: no patches");
    if (!(ctrl.cfl > 0.0 && ctrl.cfl <= 1.0))
        throw std::invalid_argument("run: cfl must lie in (0, 1]");
    if (!(ctrl.dt_init > 0.0) || !(ctrl.dt_min > 0.0))
        throw std::invalid_argument("run: dt_init and dt_min must be positive");
    if (!(ctrl.t_end >= s.t)) throw std::invalid_argument("run: t_end precedes current time");
    if (ctrl.record_every < 1) throw std::invalid_argument("run: record_every must be >= 1");
    if (ctrl.collapse_threshold && !(*ctrl.collapse_threshold > 0.0))
        throw std::invalid_argument("run: collapse_threshold must be positive");

    double h_min = std::numeric_limits<double>::infinity();
    for (const Patch& p : s.patches) h_min = std::min(h_min, p.curve.spacing());

    RunResult res;
    record(std::as_const(s), 0.0, 0);
    int last_recorded = 0;
    double dt_last = 0.0;

    StopCheck chk = detect_stop(s, ctrl);
    double dt_nominal = ctrl.dt_init;
    const double t_tol = 1e-14 * std::max(1.0, std::abs(ctrl.t_end));
    while (chk.reason == StopReason::none) {
        const double t_rem = ctrl.t_end - s.t;
        if (t_rem <= t_tol) {
            chk = {StopReason::reached_t_end, ""};
            break;
        }
        std::vector<NodeField> k1;
        try {
            k1 = rhs_fn(std::as_const(s));
        } catch (const std::runtime_error& e) {
            // The state passed every detect_stop check yet the field cannot
            // be evaluated; halving dt cannot help, so stop.
            chk = {StopReason::dt_underflow,
                   std::string("velocity evaluation failed at an accepted state: ") + e.what()};
            break;
        }
        const double speed = max_node_speed(k1);
        double dt = std::min(dt_nominal, t_rem);
        if (speed > 0.0) dt = std::min(dt, ctrl.cfl * h_min / speed);
        bool underflow = false;
        while (!try_rk4_step(s, dt, rhs_fn, &k1)) {
            dt /= 2.0;
            ++res.stage_halvings;
            dt_nominal = std::min(dt_nominal, dt);
            if (dt < ctrl.dt_min) {
                chk = detect_stop(s, ctrl, dt);  // reports dt_underflow
                underflow = true;
                break;
            }
        }
        if (underflow) break;
        ++res.steps;
        dt_last = dt;
        if (ctrl.reuniformize)
            for (Patch& p : s.patches)
                if (speed_report(p.curve).uniformity_defect > ctrl.reuniformize_threshold)
                    p.curve = reparametrize_uniform(p.curve);
        if (res.steps % ctrl.record_every == 0) {
            record(std::as_const(s), dt, res.steps);
            last_recorded = res.steps;
        }
        chk = detect_stop(s, ctrl, dt);
    }
    res.reason = chk.reason;
    res.detail = chk.detail;
    res.t_final = s.t;
    if (last_recorded != res.steps) record(std::as_const(s), dt_last, res.steps);
    return res;
}

template <typename Recorder>
RunResult run(SimState& s, const StepControl& ctrl, Recorder&& record) {
    return run_with(
        s, ctrl, [](const SimState& st) { return evolution_rhs(st); },
        std::forward<Recorder>(record));
}

}  // namespace alphapatch
