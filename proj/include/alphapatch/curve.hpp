#pragma once

// Closed patch boundaries sampled at the uniform grid gamma_j = -pi + 2*pi*j/N
// and the geometric functionals on them: spectral derivatives, the arc-chord
// functional, signed enclosed area, Sobolev/Hoelder norms, and reparametrization
// to uniform (constant-speed) nodes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alphapatch/geometry.hpp"
#include "alphapatch/spectral.hpp"

namespace alphapatch {

using spectral::pi;
using spectral::two_pi;

struct CurveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ClosedCurve {
public:
    explicit ClosedCurve(std::vector<Vec2> nodes) : nodes_(std::move(nodes)) {
        const std::size_t n = nodes_.size();
        if (n < 8 || n % 2 != 0)
            throw CurveError("ClosedCurve: node count must be even and >= 8, got " +
                             std::to_string(n));
        for (std::size_t j = 0; j < n; ++j)
            if (!finite(nodes_[j]))
                throw CurveError("ClosedCurve: non-finite node at index " + std::to_string(j));
    }

    // Sample a parametric map on the uniform grid; a non-finite sample is
    // rejected with the offending node index.
    template <typename MapFn>
    static ClosedCurve sample(MapFn&& map, int n) {
        if (n < 8 || n % 2 != 0)
            throw CurveError("sample_curve: node count must be even and >= 8, got " +
                             std::to_string(n));
        std::vector<Vec2> nodes(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const double gamma = -pi + two_pi * j / n;
            nodes[static_cast<std::size_t>(j)] = map(gamma);
            if (!finite(nodes[static_cast<std::size_t>(j)]))
                throw CurveError("sample_curve: non-finite sample at node index " +
                                 std::to_string(j));
        }
        return ClosedCurve(std::move(nodes));
    }

    int size() const { return static_cast<int>(nodes_.size()); }
    double spacing() const { return two_pi / size(); }
    double gamma(int j) const { return -pi + two_pi * j / size(); }
    const std::vector<Vec2>& nodes() const { return nodes_; }
    const Vec2& operator[](int j) const { return nodes_[static_cast<std::size_t>(j)]; }

    std::vector<spectral::cd> packed() const {
        std::vector<spectral::cd> p(nodes_.size());
        for (std::size_t j = 0; j < nodes_.size(); ++j)
            p[j] = spectral::cd(nodes_[j].x, nodes_[j].y);
        return p;
    }

    static std::vector<Vec2> unpack(const std::vector<spectral::cd>& p) {
        std::vector<Vec2> nodes(p.size());
        for (std::size_t j = 0; j < p.size(); ++j) nodes[j] = {p[j].real(), p[j].imag()};
        return nodes;
    }

private:
    std::vector<Vec2> nodes_;
};

// Spectral derivative of order 1..4 evaluated at the nodes.
inline std::vector<Vec2> derivative(const ClosedCurve& c, int order) {
    if (order < 1 || order > 4)
        throw CurveError("derivative: order must be in 1..4, got " + std::to_string(order));
    return ClosedCurve::unpack(spectral::derivative(c.packed(), order));
}

// Periodic parameter distance between grid indices j and k.
inline double periodic_distance(int j, int k, int n) {
    const int d = std::abs(j - k) % n;
    return two_pi * std::min(d, n - d) / n;
}

struct ArcChordReport {
    double sup_f{0.0};                 // +inf flags coincident distinct nodes
    std::pair<int, int> argmax_pair{0, 0};
    double min_chord_ratio{0.0};       // 1 / sup_f (0 when sup_f is +inf)
};

// Discrete arc-chord functional: off-diagonal F = |eta| / |x(j)-x(k)| over all
// node pairs with the periodic parameter distance, plus the diagonal limit
// 1 / |d_gamma x| at each node.
inline ArcChordReport arc_chord(const ClosedCurve& c) {
    const int n = c.size();
    ArcChordReport rep;
    rep.sup_f = 0.0;
    const std::vector<Vec2> d1 = derivative(c, 1);
    for (int j = 0; j < n; ++j) {
        const double speed = norm(d1[static_cast<std::size_t>(j)]);
        if (speed == 0.0) {
            rep.sup_f = std::numeric_limits<double>::infinity();
            rep.argmax_pair = {j, j};
            rep.min_chord_ratio = 0.0;
            return rep;
        }
        const double f = 1.0 / speed;
        if (f > rep.sup_f) {
            rep.sup_f = f;
            rep.argmax_pair = {j, j};
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            const double chord = norm(c[j] - c[k]);
            if (chord == 0.0) {
                rep.sup_f = std::numeric_limits<double>::infinity();
                rep.argmax_pair = {j, k};
                rep.min_chord_ratio = 0.0;
                return rep;
            }
            const double f = periodic_distance(j, k, n) / chord;
            if (f > rep.sup_f) {
                rep.sup_f = f;
                rep.argmax_pair = {j, k};
            }
        }
    }
    rep.min_chord_ratio = 1.0 / rep.sup_f;
    return rep;
}

// Signed enclosed area by the spectral Green formula: positive for
// counter-clockwise orientation.
inline double enclosed_area(const ClosedCurve& c) {
    const std::vector<Vec2> d1 = derivative(c, 1);
    const int n = c.size();
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
        acc += cross(c[j], d1[static_cast<std::size_t>(j)]);
    return 0.5 * c.spacing() * acc;
}

struct NormReport {
    double l2{0.0};
    std::map<int, double> hk;  // k -> (||x||_L2^2 + ||d^k x||_L2^2)^(1/2)
    double c2{0.0};
    double c2half{0.0};
};

// L2 / H^k norms by the rectangle rule, C^2 as a node max over derivative
// orders 0..2, and the C^{2,1/2} value as C^2 plus the discrete Hoelder
// seminorm of the second derivative over node pairs.
inline NormReport norms(const ClosedCurve& c, int kmax) {
    if (kmax < 1 || kmax > 4)
        throw CurveError("norms: kmax must be in 1..4, got " + std::to_string(kmax));
    const int n = c.size();
    const double h = c.spacing();
    NormReport rep;

    double l2sq = 0.0;
    for (int j = 0; j < n; ++j) l2sq += norm2(c[j]);
    l2sq *= h;
    rep.l2 = std::sqrt(l2sq);

    std::vector<std::vector<Vec2>> derivs;
    derivs.reserve(4);
    const int dmax = std::max(kmax, 2);
    for (int k = 1; k <= dmax; ++k) derivs.push_back(derivative(c, k));

    for (int k = 1; k <= kmax; ++k) {
        double dsq = 0.0;
        const auto& dk = derivs[static_cast<std::size_t>(k - 1)];
        for (int j = 0; j < n; ++j) dsq += norm2(dk[static_cast<std::size_t>(j)]);
        rep.hk[k] = std::sqrt(l2sq + h * dsq);
    }

    double c2 = 0.0;
    for (int j = 0; j < n; ++j) c2 = std::max(c2, norm(c[j]));
    for (int k = 1; k <= 2; ++k) {
        const auto& dk = derivs[static_cast<std::size_t>(k - 1)];
        for (int j = 0; j < n; ++j) c2 = std::max(c2, norm(dk[static_cast<std::size_t>(j)]));
    }
    rep.c2 = c2;

    const auto& d2 = derivs[1];
    double hoelder = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const double dist = periodic_distance(j, k, n);
            hoelder = std::max(hoelder, norm(d2[static_cast<std::size_t>(j)] -
                                             d2[static_cast<std::size_t>(k)]) /
                                            std::sqrt(dist));
        }
    rep.c2half = c2 + hoelder;
    return rep;
}

// Resample the trigonometric interpolant at nodes of equal arclength.  Total
// length is preserved, so the resulting discrete speed is L/(2*pi); node 0
// (gamma = -pi) is an anchor, making uniform curves exact fixed points.
inline ClosedCurve reparametrize_uniform(const ClosedCurve& c) {
    const int n = c.size();
    constexpr int refine_factor = 8;
    const std::vector<spectral::cd> packed = c.packed();
    const std::vector<spectral::cd> dpacked = spectral::derivative(packed, 1);
    const std::vector<spectral::cd> dref = spectral::refine(dpacked, refine_factor);

    const std::size_t m = dref.size();
    std::vector<spectral::cd> speed(m);
    double min_speed = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        const double s = std::abs(dref[i]);
        speed[i] = s;
        min_speed = std::min(min_speed, s);
    }
    if (!(min_speed > 0.0))
        throw CurveError("reparametrize_uniform: vanishing speed on refined grid");

    double mean_speed = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean_speed += speed[i].real();
    mean_speed /= static_cast<double>(m);
    const double total_length = two_pi * mean_speed;

    // Cumulative arclength ell(g) = mean*(g+pi) + (W(g) - W(-pi)) with W the
    // zero-mean spectral antiderivative of the speed fluctuation.
    const std::vector<spectral::cd> anti = spectral::antiderivative_zero_mean(speed);
    const spectral::TrigInterp w_interp(anti);
    const spectral::TrigInterp s_interp(speed);
    const double w_base = w_interp(-pi).real();
    auto ell = [&](double g) {
        return mean_speed * (g + pi) + (w_interp(g).real() - w_base);
    };

    const spectral::TrigInterp x_interp(packed);
    std::vector<spectral::cd> out(static_cast<std::size_t>(n));
    const double tol = 1e-13 * std::max(total_length, 1.0);
    double g = -pi;
    for (int j = 0; j < n; ++j) {
        const double target = total_length * j / n;
        double lo = g, hi = pi;
        if (j > 0) g += (total_length / n) / s_interp(g).real();
        g = std::clamp(g, lo, hi);
        double resid = ell(g) - target;
        bool converged = std::abs(resid) <= tol;
        for (int it = 0; it < 80 && !converged; ++it) {
            if (resid > 0)
                hi = g;
            else
                lo = g;
            const double slope = s_interp(g).real();
            double next = g - resid / slope;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            g = next;
            resid = ell(g) - target;
            converged = std::abs(resid) <= tol;
        }
        if (!converged)
            throw CurveError("reparametrize_uniform: arclength inversion stalled, residual " +
                             std::to_string(resid));
        out[static_cast<std::size_t>(j)] = x_interp(g);
    }
    return ClosedCurve(ClosedCurve::unpack(out));
}

}  // namespace alphapatch
