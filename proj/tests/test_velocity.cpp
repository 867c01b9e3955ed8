#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "alphapatch/velocity.hpp"

using namespace alphapatch;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ClosedCurve unit_circle(int n) {
    return ClosedCurve::sample([](double g) { return Vec2{std::cos(g), std::sin(g)}; }, n);
}

ClosedCurve ellipse(double a, double b, int n) {
    return ClosedCurve::sample([=](double g) { return Vec2{a * std::cos(g), b * std::sin(g)}; }, n);
}

double max_norm(const NodeField& f) {
    double m = 0.0;
    for (const Vec2& v : f) m = std::max(m, norm(v));
    return m;
}

double max_diff(const NodeField& a, const NodeField& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, norm(a[j] - b[j]));
    return m;
}

}  // namespace

TEST_CASE("coupling constant matches Gamma-function oracle values", "[velocity]") {
    // Unit temperature jump; reference values from 30-digit arithmetic.
    CHECK(coupling_constant(1.0, 0.0, 1.0) == Approx(2.0).epsilon(1e-14));
    CHECK(coupling_constant(1.0, 0.0, 0.5) == Approx(2.78946565347493773).epsilon(1e-14));
    CHECK(coupling_constant(1.0, 0.0, 0.3) == Approx(4.04926167828934876).epsilon(1e-14));
    CHECK(coupling_constant(1.0, 0.0, 0.7) == Approx(2.29760620646708736).epsilon(1e-14));
    CHECK(coupling_constant(1.0, 0.0, 0.01) > 100.0);

    // Linear in the temperature jump.
    CHECK(coupling_constant(5.0, 2.0, 0.4) ==
          Approx(3.0 * coupling_constant(1.0, 0.0, 0.4)).epsilon(1e-14));
    CHECK(coupling_constant(0.0, 1.0, 0.5) ==
          Approx(-coupling_constant(1.0, 0.0, 0.5)).epsilon(1e-14));

    CHECK_THROWS_AS(coupling_constant(1.0, 0.0, 0.0), VelocityError);
    CHECK_THROWS_AS(coupling_constant(1.0, 0.0, 1.2), VelocityError);
    CHECK_THROWS_AS(coupling_constant(1.0, 0.0, -0.3), VelocityError);
}

TEST_CASE("patch config stores a consistent coupling", "[velocity]") {
    const PatchConfig cfg(0.5, 2.0, 0.0);
    CHECK(cfg.coupling() == Approx(2.0 * 2.78946565347493773).epsilon(1e-14));
    CHECK(cfg.prefactor() == Approx(cfg.coupling() / (2 * kPi)).epsilon(1e-15));
}

TEST_CASE("alpha=1 product-rule weights reproduce the moment integrals", "[velocity]") {
    // sum_k rho_k e^{i m eta_k} must recover W_m = -4 sum_{j<=m} 1/(2j-1),
    // independently verified against direct quadrature of
    // int (cos(m eta) - 1)/|2 sin(eta/2)| d eta.
    const int n = 64;
    const std::vector<double> rho = velocity_detail::alpha1_weights(n);
    for (int m = 1; m <= 5; ++m) {
        double closed = 0.0;
        for (int j = 1; j <= m; ++j) closed += 1.0 / (2.0 * j - 1.0);
        closed *= -4.0;

        double from_weights = 0.0;
        for (int k = 0; k < n; ++k)
            from_weights += rho[k] * std::cos(2 * kPi * m * k / n);

        // Simpson oracle for the moment integral on (0, pi), doubled.
        const int steps = 200000;
        const double hh = kPi / steps;
        double simpson = 0.0;
        auto f = [m](double e) {
            return e == 0.0 ? 0.0 : (std::cos(m * e) - 1.0) / std::sin(0.5 * e);
        };
        for (int i = 0; i < steps; ++i) {
            const double a = i * hh;
            simpson += hh / 6.0 * (f(a) + 4.0 * f(a + 0.5 * hh) + f(a + hh));
        }

        CHECK(from_weights == Approx(closed).margin(1e-10));
        CHECK(simpson == Approx(closed).margin(1e-8));
    }
}

TEST_CASE("circle velocity is purely tangential with closed-form speed", "[velocity]") {
    // Reference tangential speeds at prefactor 1 from 30-digit quadrature of
    // int (1 - cos eta) / (2 sin(|eta|/2))^alpha d eta.
    struct Case {
        double alpha;
        double speed;
        double tol;  // trapezoid is O(h^{3-alpha}) for alpha<1; product rule is exact
    };
    const Case cases[] = {
        {0.3, 5.42706279326353975, 2e-4},
        {0.5, 4.94419913947032512, 1e-4},
        {0.7, 4.52392869734667929, 5e-4},
        {1.0, 4.0, 1e-10},
    };
    for (const Case& c : cases) {
        for (int n : {64, 256}) {
            const ClosedCurve circ = unit_circle(n);
            const PatchConfig cfg(c.alpha, 1.0, 0.0);
            const NodeField v = self_velocity(circ, cfg, 1.0);
            for (int j = 0; j < n; ++j) {
                const double g = circ.gamma(j);
                const Vec2 tang{-std::sin(g), std::cos(g)};
                const Vec2 nrm{std::cos(g), std::sin(g)};
                const double tol = (n == 64 ? 16.0 : 1.0) * c.tol;
                CHECK(dot(v[j], tang) == Approx(c.speed).margin(tol));
                CHECK(std::abs(dot(v[j], nrm)) < 1e-12);
            }
        }
    }
}

TEST_CASE("normal velocity vanishes on circles for all alpha", "[velocity]") {
    for (double alpha : {0.3, 0.7, 1.0}) {
        for (int n : {64, 256}) {
            const PatchConfig cfg(alpha, 1.0, 0.0);
            const std::vector<double> nv = normal_velocity(unit_circle(n), cfg);
            for (double w : nv) CHECK(std::abs(w) < 1e-12);
        }
    }
}

TEST_CASE("normal velocity agrees with the projected self velocity", "[velocity]") {
    const ClosedCurve c = ellipse(1.5, 0.8, 128);
    for (double alpha : {0.5, 1.0}) {
        const PatchConfig cfg(alpha, 2.0, -1.0);
        const NodeField v = self_velocity(c, cfg);
        const std::vector<double> nv = normal_velocity(c, cfg);
        const std::vector<Vec2> d1 = derivative(c, 1);
        for (int j = 0; j < 128; ++j)
            CHECK(nv[j] == Approx(dot(v[j], perp(d1[j]))).margin(1e-10));
    }
}

TEST_CASE("self velocity is equivariant under rigid motions", "[velocity]") {
    const int n = 96;
    auto base = [](double g) {
        const double r = 1.0 + 0.15 * std::cos(2 * g) + 0.05 * std::sin(3 * g);
        return Vec2{r * std::cos(g), r * std::sin(g)};
    };
    const double th = 1.1;
    auto rot = [&](Vec2 p) {
        return Vec2{std::cos(th) * p.x - std::sin(th) * p.y,
                    std::sin(th) * p.x + std::cos(th) * p.y};
    };
    const Vec2 shift{3.0, -2.0};

    for (double alpha : {0.5, 1.0}) {
        const PatchConfig cfg(alpha, 1.0, 0.0);
        const NodeField v = self_velocity(ClosedCurve::sample(base, n), cfg);
        const NodeField vm = self_velocity(
            ClosedCurve::sample([&](double g) { return rot(base(g)) + shift; }, n), cfg);
        for (int j = 0; j < n; ++j)
            CHECK(norm(vm[j] - rot(v[j])) < 1e-11);
    }
}

TEST_CASE("self velocity obeys the dilation scaling s^(1-alpha)", "[velocity]") {
    const int n = 96;
    const double s = 2.0;
    for (double alpha : {0.5, 1.0}) {
        const PatchConfig cfg(alpha, 1.0, 0.0);
        const NodeField v1 = self_velocity(ellipse(1.2, 0.7, n), cfg);
        const NodeField v2 = self_velocity(ellipse(s * 1.2, s * 0.7, n), cfg);
        const double factor = std::pow(s, 1.0 - alpha);
        for (int j = 0; j < n; ++j)
            CHECK(norm(v2[j] - factor * v1[j]) < 1e-11 * std::max(1.0, max_norm(v1)));
    }
}

TEST_CASE("quadrature self-convergence meets the advertised orders", "[velocity]") {
    auto run = [](double alpha, int n) {
        const PatchConfig cfg(alpha, 1.0, 0.0);
        return self_velocity(ellipse(1.5, 0.9, n), cfg);
    };
    auto common_diff = [](const NodeField& coarse, const NodeField& fine) {
        double m = 0.0;
        for (std::size_t j = 0; j < coarse.size(); ++j)
            m = std::max(m, norm(coarse[j] - fine[2 * j]));
        return m;
    };
    for (double alpha : {0.5, 0.9}) {
        const NodeField v64 = run(alpha, 64);
        const NodeField v128 = run(alpha, 128);
        const NodeField v256 = run(alpha, 256);
        const double d1 = common_diff(v64, v128);
        const double d2 = common_diff(v128, v256);
        const double order = std::log2(d1 / d2);
        INFO("alpha " << alpha << " observed order " << order);
        CHECK(order >= 2.0 - alpha);
    }
    // alpha = 1: the product rule is spectrally accurate, so successive
    // resolutions agree to near round-off rather than a finite order.
    const NodeField w64 = run(1.0, 64);
    const NodeField w256 = run(1.0, 256);
    double d = 0.0;
    for (int j = 0; j < 64; ++j) d = std::max(d, norm(w64[j] - w256[4 * j]));
    CHECK(d < 1e-9);
}

TEST_CASE("coincident nodes raise a singular-kernel error with the pair", "[velocity]") {
    std::vector<Vec2> nodes;
    const int n = 32;
    for (int j = 0; j < n; ++j) {
        const double g = -kPi + 2 * kPi * j / n;
        nodes.push_back({std::cos(g), std::sin(g)});
    }
    nodes[20] = nodes[5];
    const ClosedCurve bad(nodes);
    const PatchConfig cfg(0.5, 1.0, 0.0);
    try {
        self_velocity(bad, cfg);
        FAIL("expected SingularKernel");
    } catch (const SingularKernel& e) {
        const auto [j, k] = e.pair;
        CHECK(((j == 20 && k == 5) || (j == 5 && k == 20)));
    }
}

TEST_CASE("external velocity vanishes at the circle center and decays", "[velocity]") {
    const ClosedCurve circ = unit_circle(128);
    const PatchConfig cfg(0.5, 1.0, 0.0);
    const std::vector<Vec2> targets{{0.0, 0.0}, {10.0, 0.0}, {100.0, 0.0}};
    const NodeField v = external_velocity(targets, circ, cfg);
    CHECK(norm(v[0]) < 1e-13);
    CHECK(norm(v[2]) < norm(v[1]));
    CHECK(norm(v[1]) < 1.0);
}

TEST_CASE("external velocity is mirror symmetric", "[velocity]") {
    const ClosedCurve circ = unit_circle(64);
    const PatchConfig cfg(1.0, 1.0, 0.0);
    const std::vector<Vec2> targets{{2.0, 0.5}, {2.0, -0.5}};
    const NodeField v = external_velocity(targets, circ, cfg);
    // The circle is symmetric about the x-axis, so the induced field at
    // mirrored targets satisfies (u1,u2)(x, -y) = (-u1, u2)(x, y) for the
    // perpendicular-gradient kernel.
    CHECK(v[1].x == Approx(-v[0].x).margin(1e-12));
    CHECK(v[1].y == Approx(v[0].y).margin(1e-12));
}

TEST_CASE("external velocity approaches the boundary normal flux", "[velocity]") {
    // Near-curve evaluation needs the quadrature to resolve the kernel peak,
    // so use a dense source grid and distances well above its spacing.
    const int n = 1 << 16;
    const ClosedCurve c = ellipse(1.3, 0.9, n);
    const double alpha = 0.5;
    const PatchConfig cfg(alpha, 1.0, 0.0);
    const std::vector<double> nv = normal_velocity(c, cfg);
    const std::vector<Vec2> d1 = derivative(c, 1);

    for (int j : {0, n / 3, 2 * n / 5}) {
        const Vec2 nrm = perp(d1[j]) / norm(d1[j]);
        const double boundary = nv[j] / norm(d1[j]);
        auto probe = [&](double d) {
            const std::vector<Vec2> t{c[j] + d * nrm};
            return dot(external_velocity(t, c, cfg)[0], nrm);
        };
        // u_n(d) = u_n(0) + c d^{1-alpha} + O(d): eliminate the d^{1/2} term.
        const double ua = probe(4e-3), ub = probe(2e-3);
        const double extrap = (std::sqrt(2.0) * ub - ua) / (std::sqrt(2.0) - 1.0);
        CHECK(extrap == Approx(boundary).margin(5e-3 * std::max(1.0, std::abs(boundary))));
    }
}

TEST_CASE("external tangential component grows logarithmically at alpha=1", "[velocity]") {
    const int n = 1 << 16;
    const ClosedCurve c = unit_circle(n);
    const PatchConfig cfg(1.0, 1.0, 0.0);
    const std::vector<Vec2> d1 = derivative(c, 1);
    const int j = n / 4;
    const Vec2 nrm = perp(d1[j]) / norm(d1[j]);
    const Vec2 tang = d1[j] / norm(d1[j]);
    auto probe = [&](double d) {
        const std::vector<Vec2> t{c[j] + d * nrm};
        return dot(external_velocity(t, c, cfg)[0], tang);
    };
    // Equal increments per decade of distance characterize log growth.
    const double t1 = probe(1e-1), t2 = probe(1e-2), t3 = probe(1e-3);
    const double inc1 = t2 - t1, inc2 = t3 - t2;
    CHECK(std::abs(inc1) > 0.1);  // genuinely growing
    CHECK(inc2 / inc1 == Approx(1.0).margin(0.15));
}

TEST_CASE("near-singular external targets are rejected", "[velocity]") {
    const ClosedCurve circ = unit_circle(32);
    const PatchConfig cfg(0.5, 1.0, 0.0);
    const std::vector<Vec2> targets{Vec2{5.0, 5.0}, circ[3]};
    CHECK_THROWS_AS(external_velocity(targets, circ, cfg), NearSingularTarget);
}

TEST_CASE("regularized velocity reduces to the unregularized kernel", "[velocity]") {
    const ClosedCurve c = ellipse(1.4, 0.8, 64);
    for (double alpha : {0.5, 1.0}) {
        const PatchConfig cfg(alpha, 1.0, 0.0);
        const NodeField plain = self_velocity(c, cfg);
        const NodeField reg0 = regularized_self_velocity(c, cfg, RegularizationSpec{});
        CHECK(max_diff(plain, reg0) < 1e-14);
    }
}

TEST_CASE("fourier cutoff above the band leaves velocities unchanged", "[velocity]") {
    // On a circle both the curve and the induced field are band-limited to
    // |k| = 1, so a cutoff at 20 touches nothing but round-off bins.  (On an
    // eccentric curve the outer mollification truncates the field's genuine
    // spectral tail, so exact agreement is not expected there.)
    const ClosedCurve c = unit_circle(64);
    const PatchConfig cfg(0.5, 1.0, 0.0);
    RegularizationSpec reg;
    reg.epsilon = 1.0 / 20.0;
    reg.mollifier = Mollifier::fourier_cutoff;
    CHECK(max_diff(self_velocity(c, cfg), regularized_self_velocity(c, cfg, reg)) < 1e-12);

    // A cutoff at or above the Nyquist wavenumber is a no-op for any curve.
    const ClosedCurve e = ellipse(1.4, 0.8, 64);
    reg.epsilon = 1.0 / 40.0;
    CHECK(max_diff(self_velocity(e, cfg), regularized_self_velocity(e, cfg, reg)) < 1e-12);
}

TEST_CASE("mollified and desingularized velocities converge as knobs shrink", "[velocity]") {
    const ClosedCurve c = ellipse(1.4, 0.8, 96);
    const PatchConfig cfg(0.5, 1.0, 0.0);
    const NodeField ref = self_velocity(c, cfg);

    double prev = 1e300;
    for (double eps : {1e-1, 3e-2, 1e-2}) {
        RegularizationSpec reg;
        reg.epsilon = eps;
        reg.mollifier = Mollifier::periodic_gaussian;
        const double d = max_diff(ref, regularized_self_velocity(c, cfg, reg));
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-2);

    prev = 1e300;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
        RegularizationSpec reg;
        reg.delta = delta;
        const double d = max_diff(ref, regularized_self_velocity(c, cfg, reg));
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-2);

    // delta > 0 suppresses the singular-kernel error for coincident nodes.
    std::vector<Vec2> nodes;
    for (int j = 0; j < 32; ++j) {
        const double g = -kPi + 2 * kPi * j / 32;
        nodes.push_back({std::cos(g), std::sin(g)});
    }
    nodes[20] = nodes[5];
    RegularizationSpec reg;
    reg.delta = 1e-2;
    CHECK_NOTHROW(regularized_self_velocity(ClosedCurve(nodes), PatchConfig(1.0, 1.0, 0.0), reg));
}
