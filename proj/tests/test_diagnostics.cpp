// State measurements and the algebraic growth envelope: circle values against
// closed forms, envelope evaluation against independently computed numbers,
// and calibration recovering a manufactured constant.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "alphapatch/diagnostics.hpp"

using namespace alphapatch;
using Catch::Approx;

namespace {

ClosedCurve circle(double radius, Vec2 center, int n) {
    return ClosedCurve::sample(
        [&](double g) {
            return Vec2{center.x + radius * std::cos(g), center.y + radius * std::sin(g)};
        },
        n);
}

}  // namespace

TEST_CASE("measure_state reports circle closed forms", "[diagnostics]") {
    SimState s;
    s.t = 0.25;
    s.patches.push_back({circle(1.0, {0.0, 0.0}, 64), PatchConfig(1.0, 1.0, 0.0)});

    const DiagnosticsRecord r = measure_state(s, 1.5e-3);
    REQUIRE(r.patches.size() == 1);
    CHECK(r.t == 0.25);
    CHECK(r.dt_used == 1.5e-3);
    CHECK_FALSE(r.min_interpatch.has_value());

    const PatchDiagnostics& pd = r.patches[0];
    CHECK(pd.area == Approx(spectral::pi).margin(1e-13));
    CHECK(pd.l2 == Approx(std::sqrt(two_pi)).margin(1e-13));
    CHECK(pd.h3 == Approx(std::sqrt(4.0 * spectral::pi)).margin(1e-12));
    CHECK(pd.sup_arc_chord == Approx(spectral::pi / 2.0).margin(1e-12));
    CHECK(pd.speed_sq == Approx(1.0).margin(1e-13));
    CHECK(pd.uniformity_defect < 1e-13);
    CHECK(pd.tangency_defect < 1e-12);

    // On the unit circle with a unit jump at alpha = 1 the field is purely
    // tangential with speed 4 * coupling / (2 pi) = 4 / pi.
    CHECK(r.max_speed == Approx(4.0 / spectral::pi).margin(1e-12));

    // Aggregation matches the primitive reports bit for bit.
    const NormReport nr = norms(s.patches[0].curve, 3);
    CHECK(pd.c2 == nr.c2);
    CHECK(pd.c2half == nr.c2half);
    const DiagnosticsRecord again = measure_state(s, 1.5e-3);
    CHECK(again.patches[0].h3 == pd.h3);
    CHECK(again.max_speed == r.max_speed);
}

TEST_CASE("measure_state reports the gap between two patches", "[diagnostics]") {
    SimState s;
    s.patches.push_back({circle(1.0, {-2.0, 0.0}, 32), PatchConfig(0.5, 1.0, 0.0)});
    s.patches.push_back({circle(1.0, {2.0, 0.0}, 32), PatchConfig(0.5, -1.0, 0.0)});
    const DiagnosticsRecord r = measure_state(s, 0.0);
    REQUIRE(r.patches.size() == 2);
    REQUIRE(r.min_interpatch.has_value());
    CHECK(*r.min_interpatch == Approx(2.0).margin(1e-12));
    CHECK(r.patches[0].area == Approx(r.patches[1].area).margin(1e-13));
}

TEST_CASE("bound exponent switches at the endpoint", "[diagnostics]") {
    CHECK(bound_exponent(0.5) == 6.5);
    CHECK(bound_exponent(0.3) == Approx(6.3));
    CHECK(bound_exponent(0.999) == Approx(6.999));
    CHECK(bound_exponent(1.0) == 9.0);
    CHECK_THROWS_AS(bound_exponent(0.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_exponent(1.5), std::invalid_argument);
}

TEST_CASE("bound curve matches independently computed values", "[diagnostics]") {
    // Reference numbers computed with 30-digit arithmetic.
    const BoundCurve b{1.2, 0.5, 6.5};
    CHECK(b.value(0.0).value() == Approx(1.2).margin(1e-15));
    CHECK(b.value(0.1).value() == Approx(1.23342708925704245).epsilon(1e-14));
    CHECK(b.value(0.3).value() == Approx(1.33123674784585821).epsilon(1e-14));
    CHECK(b.expiry_time() == Approx(0.611437254302284845).epsilon(1e-14));
    CHECK(b.value(0.999 * b.expiry_time()).value() ==
          Approx(3.47311934966010106).epsilon(1e-12));
    CHECK_FALSE(b.value(b.expiry_time() * 1.001).has_value());
    CHECK_FALSE(b.value(b.expiry_time()).has_value());

    const BoundCurve b9{0.9, 2.0, 9.0};
    CHECK(b9.value(0.2).value() == Approx(0.916996600340949559).epsilon(1e-14));
    CHECK(b9.expiry_time() == Approx(1.29058739585659859).epsilon(1e-14));

    // Zero constant: the envelope is flat and never expires.
    const BoundCurve flat{2.0, 0.0, 9.0};
    CHECK(std::isinf(flat.expiry_time()));
    CHECK(flat.value(1e9).value() == 2.0);

    CHECK_THROWS_AS(b.value(-0.1), std::invalid_argument);
}

TEST_CASE("calibration recovers a manufactured constant", "[diagnostics]") {
    for (double e : {6.5, 9.0}) {
        const double iv = 1.1;
        const BoundCurve truth{iv, 1.0, e};
        std::vector<Observation> obs;
        const double tmax = 0.8 * truth.expiry_time();
        for (int k = 0; k <= 40; ++k) {
            const double t = tmax * k / 40.0;
            obs.push_back({t, truth.value(t).value()});
        }
        const double c = calibrate_constant(obs, e);
        CHECK(c == Approx(1.0).epsilon(2e-6));

        // The calibrated envelope really dominates the series.
        const BoundCurve fitted{iv, c, e};
        for (const Observation& o : obs)
            CHECK(fitted.value(o.t).value() >= o.value * (1.0 - 1e-9));
    }
}

TEST_CASE("calibration reports the sentinel for non-growing data", "[diagnostics]") {
    std::vector<Observation> obs;
    for (int k = 0; k <= 10; ++k) obs.push_back({0.05 * k, 2.0 - 0.01 * k});
    CHECK(calibrate_constant(obs, 6.5) == kNoGrowthConstant);

    // A single bumped point forces a strictly positive constant.
    obs[5].value = 2.2;
    const double c = calibrate_constant(obs, 6.5);
    CHECK(c > kNoGrowthConstant);
    const BoundCurve fitted{2.0, c, 6.5};
    CHECK(fitted.value(obs[5].t).value() >= 2.2 * (1.0 - 1e-6));
}

TEST_CASE("calibration anchors at the earliest observation", "[diagnostics]") {
    // The same series shifted in time must give the same constant.
    const double e = 6.5;
    const BoundCurve truth{1.3, 0.7, e};
    std::vector<Observation> obs, shifted;
    for (int k = 0; k <= 25; ++k) {
        const double t = 0.5 * truth.expiry_time() * k / 25.0;
        obs.push_back({t, truth.value(t).value()});
        shifted.push_back({t + 3.0, truth.value(t).value()});
    }
    // Scrambled order: the anchor is found by minimum time, not position.
    std::swap(shifted.front(), shifted.back());
    const double c0 = calibrate_constant(obs, e);
    const double c1 = calibrate_constant(shifted, e);
    CHECK(c0 == Approx(0.7).epsilon(2e-6));
    CHECK(c1 == Approx(c0).epsilon(1e-9));
}

TEST_CASE("calibration rejects degenerate input", "[diagnostics]") {
    CHECK_THROWS_AS(calibrate_constant({}, 6.5), std::invalid_argument);
    std::vector<Observation> bad{{0.0, -1.0}, {0.1, 2.0}};
    CHECK_THROWS_AS(calibrate_constant(bad, 6.5), std::invalid_argument);
    std::vector<Observation> ok{{0.0, 1.0}, {0.1, 2.0}};
    CHECK_THROWS_AS(calibrate_constant(ok, -1.0), std::invalid_argument);
    std::vector<Observation> nf{{0.0, 1.0}, {0.1, std::nan("")}};
    CHECK_THROWS_AS(calibrate_constant(nf, 6.5), std::invalid_argument);
}
