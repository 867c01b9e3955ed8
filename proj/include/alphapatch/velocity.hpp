#pragma once

// Contour velocities for the alpha-patch family.  The boundary moves with
//
//   x_t(gamma) = pref * \int_T (d_gamma x(gamma) - d_gamma x(gamma-eta))
//                         / |x(gamma) - x(gamma-eta)|^alpha  d eta,
//
// pref = Theta_alpha / (2 pi) by default, where Theta_alpha collects the
// temperature jump and the Gamma-function factors of the model family.
//
// Quadrature.  The subtracted integrand vanishes like |eta|^{1-alpha} at the
// diagonal for alpha < 1, so the periodic trapezoid sum with the eta = 0 term
// set to zero converges at order 3 - alpha there.  At alpha = 1 the integrand
// only has a corner (one-sided limits +/- d2x/|dx|), which would cap the
// trapezoid rule at O(h^2); instead the integrand is written as
// g(eta) / |2 sin(eta/2)| with g smooth and g(0) = 0, and the trigonometric
// interpolant of g is integrated exactly against the weight.  The resulting
// rule is nodal with even circulant weights
//     rho_k = (1/N) sum_m W_m e^{-i m eta_k},
//     W_m   = \int_T (e^{i m eta} - 1)/|2 sin(eta/2)| d eta
//           = -4 * (1 + 1/3 + ... + 1/(2|m|-1)),
// exact for band-limited g (hence exact on circles) and spectrally accurate
// in general.  Both rules keep the pair symmetry that makes the discrete
// area and L2 balances exact.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alphapatch/curve.hpp"
#include "alphapatch/geometry.hpp"
#include "alphapatch/spectral.hpp"

namespace alphapatch {

using NodeField = std::vector<Vec2>;

struct VelocityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Coincident interaction pair makes the kernel singular.
struct SingularKernel : VelocityError {
    SingularKernel(int j, int k)
        : VelocityError("singular kernel: coincident nodes " + std::to_string(j) + " and " +
                        std::to_string(k)),
          pair{j, k} {}
    std::pair<int, int> pair;
};

struct NearSingularTarget : VelocityError {
    explicit NearSingularTarget(std::size_t target_index)
        : VelocityError("external velocity target " + std::to_string(target_index) +
                        " coincides with a source node") {}
};

// Theta_alpha = (theta_in - theta_out) * Gamma(alpha/2) / (2^{1-alpha} * Gamma(2 - alpha/2)).
inline double coupling_constant(double theta_in, double theta_out, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw VelocityError("coupling_constant: alpha must lie in (0,1], got " +
                            std::to_string(alpha));
    return (theta_in - theta_out) * std::tgamma(0.5 * alpha) /
           (std::pow(2.0, 1.0 - alpha) * std::tgamma(2.0 - 0.5 * alpha));
}

struct PatchConfig {
    PatchConfig(double alpha_, double theta_in_, double theta_out_)
        : alpha(alpha_),
          theta_in(theta_in_),
          theta_out(theta_out_),
          coupling_(coupling_constant(theta_in_, theta_out_, alpha_)) {}

    double alpha;
    double theta_in;
    double theta_out;

    // Stored at construction; recomputation on access guards against a
    // corrupted or inconsistently mutated struct.
    double coupling() const {
        const double fresh = coupling_constant(theta_in, theta_out, alpha);
        if (std::abs(fresh - coupling_) > 1e-14 * std::max(std::abs(fresh), 1e-300))
            throw std::logic_error("PatchConfig: stored coupling is stale");
        return coupling_;
    }

    double prefactor() const { return coupling() / two_pi; }

private:
    double coupling_;
};

enum class Mollifier { fourier_cutoff, periodic_gaussian };

struct RegularizationSpec {
    double epsilon{0.0};  // mollifier width; 0 disables
    double delta{0.0};    // chord desingularization; 0 disables
    Mollifier mollifier{Mollifier::fourier_cutoff};
};

namespace velocity_detail {

// Circulant weights of the alpha = 1 product rule, indexed by node offset.
inline std::vector<double> alpha1_weights(int n) {
    std::vector<spectral::cd> bins(static_cast<std::size_t>(n), spectral::cd(0.0));
    double harmonic_odd = 0.0;
    for (int m = 1; m <= n / 2; ++m) {
        harmonic_odd += 1.0 / (2.0 * m - 1.0);
        const double w = -4.0 * harmonic_odd;
        bins[static_cast<std::size_t>(m)] = w;
        if (m < n / 2) bins[static_cast<std::size_t>(n - m)] = w;
    }
    const std::vector<spectral::cd> rho = spectral::ifft(std::move(bins));
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = rho[static_cast<std::size_t>(k)].real();
    return out;
}

inline std::vector<spectral::cd> mollify(const std::vector<spectral::cd>& f,
                                         const RegularizationSpec& reg) {
    if (reg.epsilon <= 0.0) return f;
    if (reg.mollifier == Mollifier::fourier_cutoff) {
        const double cutoff = 1.0 / reg.epsilon;
        return spectral::filter(f, [cutoff](int abs_k) {
            return static_cast<double>(abs_k) > cutoff ? 0.0 : 1.0;
        });
    }
    const double eps = reg.epsilon;
    return spectral::filter(f, [eps](int abs_k) {
        const double ke = static_cast<double>(abs_k) * eps;
        return std::exp(-0.5 * ke * ke);
    });
}

// One row of the interaction sum: accumulates
//   sum_{k != 0} coef_k * numer(j, j-k) / denom(j, j-k)
// where numer is supplied per pair by `Numer num(int m)` and the quadrature
// coefficients/denominators are chosen by (alpha, delta).
struct KernelTable {
    KernelTable(const ClosedCurve& curve, double alpha_, double delta_)
        : x(curve.nodes()), n(curve.size()), alpha(alpha_), delta(delta_) {
        const double h = curve.spacing();
        if (alpha == 1.0 && delta == 0.0) {
            product_rule = true;
            coef = alpha1_weights(n);
            sin_half.resize(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k)
                sin_half[static_cast<std::size_t>(k)] =
                    std::abs(2.0 * std::sin(pi * static_cast<double>(k) / n));
        } else {
            product_rule = false;
            coef.assign(static_cast<std::size_t>(n), h);
        }
    }

    // Kernel factor coef_k / (chord term) for the pair (j, m), m = j - k mod n.
    double pair_weight(int j, int m, int k) const {
        const Vec2 diff = x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(m)];
        const double d2 = norm2(diff);
        if (product_rule) {
            if (d2 == 0.0) throw SingularKernel(j, m);
            return coef[static_cast<std::size_t>(k)] * sin_half[static_cast<std::size_t>(k)] /
                   std::sqrt(d2);
        }
        if (delta == 0.0) {
            if (d2 == 0.0) throw SingularKernel(j, m);
            return coef[static_cast<std::size_t>(k)] * std::pow(d2, -0.5 * alpha);
        }
        const double d = std::sqrt(d2) + delta;
        return coef[static_cast<std::size_t>(k)] *
               (alpha == 1.0 ? 1.0 / d : std::pow(d, -alpha));
    }

    const std::vector<Vec2>& x;
    int n;
    double alpha;
    double delta;
    bool product_rule{false};
    std::vector<double> coef;
    std::vector<double> sin_half;  // |2 sin(pi k / n)| per offset, product rule only
};

}  // namespace velocity_detail

// Self-induced velocity with both regularizations.  The mollifier acts on the
// curve inside the derivative and once more on the assembled field; delta is
// added to the chord length in the denominator.  With epsilon = delta = 0 this
// is the unregularized subtracted kernel.
inline NodeField regularized_self_velocity(const ClosedCurve& curve, const PatchConfig& cfg,
                                           const RegularizationSpec& reg,
                                           std::optional<double> prefactor_override = {}) {
    if (reg.epsilon < 0.0 || reg.delta < 0.0)
        throw VelocityError("regularized_self_velocity: epsilon and delta must be >= 0");
    const int n = curve.size();
    const double pref = prefactor_override ? *prefactor_override : cfg.prefactor();

    const std::vector<spectral::cd> smooth = velocity_detail::mollify(curve.packed(), reg);
    const std::vector<Vec2> nd = ClosedCurve::unpack(spectral::derivative(smooth, 1));
    const velocity_detail::KernelTable tab(curve, cfg.alpha, reg.delta);

    std::vector<spectral::cd> field(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        Vec2 acc{0.0, 0.0};
        const Vec2 ndj = nd[static_cast<std::size_t>(j)];
        for (int k = 1; k < n; ++k) {
            const int m = j - k >= 0 ? j - k : j - k + n;
            const double w = tab.pair_weight(j, m, k);
            acc += w * (ndj - nd[static_cast<std::size_t>(m)]);
        }
        field[static_cast<std::size_t>(j)] = spectral::cd(acc.x, acc.y);
    }
    const std::vector<spectral::cd> out = velocity_detail::mollify(field, reg);

    NodeField v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        v[static_cast<std::size_t>(j)] = pref * Vec2{out[static_cast<std::size_t>(j)].real(),
                                                     out[static_cast<std::size_t>(j)].imag()};
    return v;
}

inline NodeField self_velocity(const ClosedCurve& curve, const PatchConfig& cfg,
                               std::optional<double> prefactor_override = {}) {
    return regularized_self_velocity(curve, cfg, RegularizationSpec{}, prefactor_override);
}

// Normal flux u . perp(d_gamma x) from the unsubtracted representation
//   -pref * \int d_gamma x(gamma - eta) . perp(d_gamma x(gamma)) / chord^alpha.
// Computed independently of self_velocity; the two agree because the
// subtraction term is orthogonal to the normal.
inline std::vector<double> normal_velocity(const ClosedCurve& curve, const PatchConfig& cfg) {
    const int n = curve.size();
    const double pref = cfg.prefactor();
    const std::vector<Vec2> d1 = derivative(curve, 1);
    const velocity_detail::KernelTable tab(curve, cfg.alpha, 0.0);

    std::vector<double> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const Vec2 nrm = perp(d1[static_cast<std::size_t>(j)]);
        double acc = 0.0;
        for (int k = 1; k < n; ++k) {
            const int m = j - k >= 0 ? j - k : j - k + n;
            const double w = tab.pair_weight(j, m, k);
            acc -= w * dot(d1[static_cast<std::size_t>(m)], nrm);
        }
        out[static_cast<std::size_t>(j)] = pref * acc;
    }
    return out;
}

// Velocity induced at off-curve targets:
//   u(p) = -pref * (2 pi / N) sum_m d_gamma x(gamma_m) / |p - x(gamma_m)|^alpha.
inline NodeField external_velocity(std::span<const Vec2> targets, const ClosedCurve& source,
                                   const PatchConfig& cfg) {
    const int n = source.size();
    const double h = source.spacing();
    const double pref = cfg.prefactor();
    const std::vector<Vec2> d1 = derivative(source, 1);
    const double near2 = 100.0 * std::numeric_limits<double>::epsilon() *
                         std::numeric_limits<double>::epsilon();

    NodeField out(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        Vec2 acc{0.0, 0.0};
        for (int m = 0; m < n; ++m) {
            const double d2 = norm2(targets[t] - source[m]);
            if (d2 <= near2) throw NearSingularTarget(t);
            acc += std::pow(d2, -0.5 * cfg.alpha) * d1[static_cast<std::size_t>(m)];
        }
        out[t] = (-pref * h) * acc;
    }
    return out;
}

}  // namespace alphapatch
