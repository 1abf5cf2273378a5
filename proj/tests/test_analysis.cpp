#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "geomgate/analysis.hpp"

using namespace geomgate;

namespace {

FidelityCurve synthetic_curve(std::vector<std::pair<double, double>> pts) {
    FidelityCurve c;
    c.points = std::move(pts);
    c.gate_name = "sigma_x";
    c.label = "synthetic";
    c.envelope_kind = "cosine";
    return c;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("sweep grid validation") {
    const SimConfig cfg;
    CHECK_THROWS_AS(sweep_detuning(GateParams::sigma_x(), presets::op1(), 4.0, 8.0, 600.0, 4, cfg),
                    std::invalid_argument);  // even
    CHECK_THROWS_AS(sweep_detuning(GateParams::sigma_x(), presets::op1(), 4.0, 8.0, 600.0, 1, cfg),
                    std::invalid_argument);  // too few
    CHECK_THROWS_AS(sweep_detuning(GateParams::sigma_x(), presets::op1(), 4.0, 8.0, -5.0, 5, cfg),
                    std::invalid_argument);  // negative range
}

TEST_CASE("detuning sweep of the first preset") {
    SimConfig cfg;
    const FidelityCurve curve =
        sweep_detuning(GateParams::sigma_x(), presets::op1(), 4.0, 8.0, 600.0, 121, cfg, "Op1");

    REQUIRE(curve.points.size() == 121);
    CHECK(curve.gate_name == "sigma_x");
    CHECK(curve.label == "Op1");
    CHECK(curve.envelope_kind == "cosine");

    // Ascending, uniform 10 kHz grid from -600 to 600.
    CHECK(curve.points.front().first == doctest::Approx(-600.0));
    CHECK(curve.points.back().first == doctest::Approx(600.0));
    for (size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].first - curve.points[i - 1].first == doctest::Approx(10.0).epsilon(1e-12));
    }

    CHECK(curve.value_at_exact(0.0) >= 1.0 - 1e-9);
    CHECK(curve.value_at_exact(410.0) == doctest::Approx(0.988366587).epsilon(1e-7));
    CHECK(curve.value_at_exact(150.0) == doctest::Approx(0.991206086).epsilon(1e-7));
    CHECK_THROWS_AS((void)curve.value_at_exact(5.0), std::invalid_argument);  // not on grid

    // Frozen plateau boundary and band metrics.
    const auto bw = bandwidth_at(curve, 0.99);
    CHECK(bw.first == doctest::Approx(-162.6007728).epsilon(1e-6));
    CHECK(bw.second == doctest::Approx(162.6007728).epsilon(1e-6));
    CHECK(band_average(curve, 600.0) == doctest::Approx(0.9828413830).epsilon(1e-7));
    CHECK(band_average(curve, 410.0) == doctest::Approx(0.992376268).epsilon(1e-7));
    CHECK(curve_asymmetry(curve) < 1e-9);
}

TEST_CASE("detuning sweep of the second preset stays flat out to 600 kHz") {
    SimConfig cfg;
    const FidelityCurve curve =
        sweep_detuning(GateParams::sigma_x(), presets::op2(), 4.0, 8.0, 600.0, 121, cfg, "Op2");
    CHECK(curve.value_at_exact(0.0) >= 1.0 - 1e-9);
    CHECK(band_average(curve, 600.0) == doctest::Approx(0.9988664).epsilon(1e-5));
    // Every sampled point inside +-410 kHz stays above 0.999.
    double min_inner = 1.0;
    for (const auto& [d, f] : curve.points) {
        if (std::abs(d) <= 410.0) min_inner = std::min(min_inner, f);
    }
    CHECK(min_inner > 0.999);
}

TEST_CASE("bandwidth interpolation on synthetic curves") {
    const FidelityCurve c = synthetic_curve(
        {{-2.0, 0.98}, {-1.0, 1.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, 0.98}});
    const auto bw = bandwidth_at(c, 0.99);
    CHECK(bw.first == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(bw.second == doctest::Approx(1.5).epsilon(1e-12));

    // Plateau running to the grid edge reports the edge.
    const FidelityCurve open_ended =
        synthetic_curve({{-1.0, 0.995}, {0.0, 1.0}, {1.0, 0.995}});
    const auto bw2 = bandwidth_at(open_ended, 0.99);
    CHECK(bw2.first == doctest::Approx(-1.0));
    CHECK(bw2.second == doctest::Approx(1.0));

    // No plateau at all: the resonant point itself is below threshold.
    const FidelityCurve bad = synthetic_curve({{-1.0, 0.5}, {0.0, 0.5}, {1.0, 0.5}});
    CHECK_THROWS_AS((void)bandwidth_at(bad, 0.99), std::runtime_error);
}

TEST_CASE("band average and asymmetry on synthetic curves") {
    const FidelityCurve c = synthetic_curve(
        {{-2.0, 0.90}, {-1.0, 0.96}, {0.0, 1.0}, {1.0, 0.98}, {2.0, 0.94}});
    CHECK(band_average(c, 1.0) == doctest::Approx((0.96 + 1.0 + 0.98) / 3.0).epsilon(1e-15));
    CHECK(band_average(c, 2.0) == doctest::Approx((0.90 + 0.96 + 1.0 + 0.98 + 0.94) / 5.0).epsilon(1e-15));
    CHECK(curve_asymmetry(c) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("baseline comparison reproduces the frozen orderings") {
    SimConfig cfg;
    const BaselineComparison cmp =
        compare_baselines(GateParams::sigma_x(), presets::op1(), 4.0, 8.0, 410.0, 83, cfg);

    CHECK(cmp.t_fwhm_us == doctest::Approx(0.7859155).epsilon(1e-5));
    CHECK(cmp.optimized.label == "optimized");
    CHECK(cmp.gaussian.label == "gaussian");
    CHECK(cmp.square.label == "square");
    CHECK(cmp.gaussian.envelope_kind == "gaussian");
    CHECK(cmp.square.envelope_kind == "square");

    // Identical grids.
    REQUIRE(cmp.optimized.points.size() == 83);
    REQUIRE(cmp.gaussian.points.size() == 83);
    REQUIRE(cmp.square.points.size() == 83);
    for (size_t i = 0; i < 83; i += 7) {
        CHECK(cmp.gaussian.points[i].first == cmp.optimized.points[i].first);
        CHECK(cmp.square.points[i].first == cmp.optimized.points[i].first);
    }

    // All three are exact on resonance.
    CHECK(cmp.optimized.value_at_exact(0.0) >= 1.0 - 1e-9);
    CHECK(cmp.gaussian.value_at_exact(0.0) >= 1.0 - 1e-9);
    CHECK(cmp.square.value_at_exact(0.0) >= 1.0 - 1e-9);

    // Frozen band-edge values.
    CHECK(cmp.gaussian.value_at_exact(410.0) == doctest::Approx(0.952733088).epsilon(1e-6));
    CHECK(cmp.square.value_at_exact(410.0) == doctest::Approx(0.563909136).epsilon(1e-6));

    // Frozen band averages over +-410 kHz.
    CHECK(band_average(cmp.optimized, 410.0) == doctest::Approx(0.992376268).epsilon(1e-6));
    CHECK(band_average(cmp.gaussian, 410.0) == doctest::Approx(0.989681505).epsilon(1e-6));
    CHECK(band_average(cmp.square, 410.0) == doctest::Approx(0.696280651).epsilon(1e-6));

    // The square baseline is far narrower than either shaped pulse.
    const auto bw_sq = bandwidth_at(cmp.square, 0.99);
    CHECK(bw_sq.second == doctest::Approx(82.10023).epsilon(1e-4));
    const auto bw_gauss = bandwidth_at(cmp.gaussian, 0.99);
    CHECK(bw_gauss.second == doctest::Approx(287.28747).epsilon(1e-4));
}

TEST_CASE("a2 robustness map validation") {
    const SimConfig cfg;
    CHECK_THROWS_AS(a2_robustness_map(GateParams::sigma_x(), presets::op1(), 4.0, 8.0, 0.5, 4,
                                      120.0, 5, cfg),
                    std::invalid_argument);  // even eta axis
    CHECK_THROWS_AS(a2_robustness_map(GateParams::sigma_x(), presets::op1(), 4.0, 8.0, 0.5, 5,
                                      120.0, 2, cfg),
                    std::invalid_argument);  // too few detunings
    std::vector<double> no_a2 = presets::op1();
    no_a2[1] = 0.0;
    CHECK_THROWS_AS(a2_robustness_map(GateParams::sigma_x(), no_a2, 4.0, 8.0, 0.5, 5, 120.0, 5,
                                      cfg),
                    std::invalid_argument);  // nothing to perturb
}

TEST_CASE("a2 robustness map: axes, resonant column, frozen corners") {
    SimConfig cfg;
    const RobustnessMap map = a2_robustness_map(GateParams::sigma_x(), presets::op1(), 4.0, 8.0,
                                                0.5, 21, 120.0, 41, cfg);

    REQUIRE(map.eta_axis.size() == 21);
    REQUIRE(map.delta_axis_khz.size() == 41);
    REQUIRE(map.grid.size() == 21 * 41);
    CHECK(map.eta_axis.front() == doctest::Approx(-0.5));
    CHECK(map.eta_axis.back() == doctest::Approx(0.5));
    CHECK(map.delta_axis_khz.front() == doctest::Approx(-120.0));
    CHECK(map.delta_axis_khz.back() == doctest::Approx(120.0));

    // The pulse area is eta-invariant, so the resonant column is exact.
    for (size_t ie = 0; ie < map.eta_axis.size(); ++ie) {
        CHECK(map.at(ie, 20) >= 1.0 - 1e-9);
    }

    // Frozen spot values: eta = -0.3 is row 4, eta = 0.3 is row 16;
    // delta = -60 kHz is column 10, delta = +60 kHz is column 30.
    CHECK(map.eta_axis[4] == doctest::Approx(-0.3));
    CHECK(map.delta_axis_khz[30] == doctest::Approx(60.0));
    CHECK(map.at(4, 30) == doctest::Approx(0.989784638).epsilon(1e-6));
    CHECK(map.at(4, 10) == doctest::Approx(0.989784638).epsilon(1e-4));
    CHECK(map.at(16, 30) == doctest::Approx(0.992885936).epsilon(1e-6));

    // Contour segments exist, come in pairs, and lie inside the domain.
    REQUIRE(!map.contour_099.empty());
    CHECK(map.contour_099.size() % 2 == 0);
    for (const auto& [eta, dkhz] : map.contour_099) {
        CHECK(eta >= -0.5);
        CHECK(eta <= 0.5);
        CHECK(std::abs(dkhz) <= 120.0);
    }
}

}  // TEST_SUITE
