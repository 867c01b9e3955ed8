#pragma once

// Tangential reparametrization machinery for the alpha = 1 (QG) scheme.
//
// The shape motion is fixed by the normal component of the velocity integral
// V; adding lambda * d_gamma x with
//
//   lambda(gamma) = (gamma + pi)/(2 pi) * \int_T w  -  \int_{-pi}^{gamma} w,
//   w = d_gamma x . d_gamma V / |d_gamma x|^2,
//
// keeps |d_gamma x|^2 independent of gamma (value A(t)), which in turn keeps
// d_gamma x . d_gamma^2 x = 0.  For uniform-speed curves w reduces to
// g / A with g = d_gamma x . d_gamma V, and the drift of A obeys
// A'/(2A) = (1/(2 pi A)) \int_T g.  Construction is spectral: lambda is the
// (anchored) antiderivative of mean(w) - w, so lambda(-pi) = lambda(pi) = 0
// exactly and the reconstruction d_gamma lambda + w - mean(w) = 0 holds to
// round-off.

#include <cmath>
#include <cstddef>
#include <vector>

#include "alphapatch/curve.hpp"
#include "alphapatch/spectral.hpp"
#include "alphapatch/velocity.hpp"

namespace alphapatch {

struct SpeedReport {
    double A{0.0};                 // mean of |d_gamma x|^2 over nodes
    double uniformity_defect{0.0}; // max | |d_gamma x|^2 - A | / A
    double tangency_defect{0.0};   // max | d_gamma x . d_gamma^2 x | / A
};

inline SpeedReport speed_report(const ClosedCurve& c) {
    const int n = c.size();
    const std::vector<Vec2> d1 = derivative(c, 1);
    const std::vector<Vec2> d2 = derivative(c, 2);
    SpeedReport rep;
    for (int j = 0; j < n; ++j) rep.A += norm2(d1[static_cast<std::size_t>(j)]);
    rep.A /= n;
    for (int j = 0; j < n; ++j) {
        rep.uniformity_defect =
            std::max(rep.uniformity_defect,
                     std::abs(norm2(d1[static_cast<std::size_t>(j)]) - rep.A) / rep.A);
        rep.tangency_defect =
            std::max(rep.tangency_defect, std::abs(dot(d1[static_cast<std::size_t>(j)],
                                                       d2[static_cast<std::size_t>(j)])) /
                                              rep.A);
    }
    return rep;
}

struct TangentialField {
    std::vector<double> lambda;  // nodal values; lambda[0] (gamma = -pi) is 0
    double mu{0.0};              // (1/pi) \int w d gamma
    double mean_drift{0.0};      // A'/(2A) = mean(g)/A
};

// Default uniformity threshold below which the constant-A form of w is used.
inline constexpr double kUniformityFallbackThreshold = 1e-3;

// Lambda for a given (already prefactor-scaled) velocity field V on the curve.
inline TangentialField lambda_from_velocity(const ClosedCurve& c, const NodeField& v,
                                            double uniformity_threshold =
                                                kUniformityFallbackThreshold) {
    const int n = c.size();
    const std::vector<Vec2> d1 = derivative(c, 1);

    std::vector<spectral::cd> packed(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        packed[static_cast<std::size_t>(j)] =
            spectral::cd(v[static_cast<std::size_t>(j)].x, v[static_cast<std::size_t>(j)].y);
    const std::vector<Vec2> vd = ClosedCurve::unpack(spectral::derivative(packed, 1));

    const SpeedReport sr = speed_report(c);
    const bool uniform = sr.uniformity_defect <= uniformity_threshold;

    std::vector<spectral::cd> w(static_cast<std::size_t>(n));
    double mean_w = 0.0, mean_g = 0.0;
    for (int j = 0; j < n; ++j) {
        const double g = dot(d1[static_cast<std::size_t>(j)], vd[static_cast<std::size_t>(j)]);
        const double denom = uniform ? sr.A : norm2(d1[static_cast<std::size_t>(j)]);
        w[static_cast<std::size_t>(j)] = g / denom;
        mean_w += g / denom;
        mean_g += g;
    }
    mean_w /= n;
    mean_g /= n;

    for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(j)] -= mean_w;
    const std::vector<spectral::cd> anti = spectral::antiderivative_zero_mean(w);

    TangentialField out;
    out.lambda.resize(static_cast<std::size_t>(n));
    const double base = anti[0].real();
    for (int j = 0; j < n; ++j)
        out.lambda[static_cast<std::size_t>(j)] = base - anti[static_cast<std::size_t>(j)].real();
    out.mu = 2.0 * mean_w;
    out.mean_drift = mean_g / sr.A;
    return out;
}

// g(gamma) = d_gamma x . d_gamma(V) for the alpha = 1 velocity integral at
// unit prefactor.
inline std::vector<double> tangential_derivative_integrand(const ClosedCurve& c) {
    const int n = c.size();
    const PatchConfig unit_cfg(1.0, 1.0, 0.0);
    const NodeField v = self_velocity(c, unit_cfg, 1.0);
    const std::vector<Vec2> d1 = derivative(c, 1);

    std::vector<spectral::cd> packed(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        packed[static_cast<std::size_t>(j)] =
            spectral::cd(v[static_cast<std::size_t>(j)].x, v[static_cast<std::size_t>(j)].y);
    const std::vector<Vec2> vd = ClosedCurve::unpack(spectral::derivative(packed, 1));

    std::vector<double> g(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        g[static_cast<std::size_t>(j)] =
            dot(d1[static_cast<std::size_t>(j)], vd[static_cast<std::size_t>(j)]);
    return g;
}

// Lambda for the self-induced alpha = 1 integral at unit prefactor; other
// prefactor values scale lambda linearly and are applied by the integrator.
inline TangentialField lambda_qg(const ClosedCurve& c,
                                 double uniformity_threshold = kUniformityFallbackThreshold) {
    const PatchConfig unit_cfg(1.0, 1.0, 0.0);
    return lambda_from_velocity(c, self_velocity(c, unit_cfg, 1.0), uniformity_threshold);
}

}  // namespace alphapatch
