#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "geomgate/dynamics.hpp"
#include "geomgate/pulse_model.hpp"

using namespace geomgate;

namespace {

PulseSequence op1_sequence(const GateParams& g) {
    return build_sequence(g, presets::op1(), 4.0, 8.0);
}

double detuned_fidelity(const GateParams& g, const std::vector<double>& coeffs, double delta_khz,
                        int steps = 4000, bool auto_steps = true) {
    const PulseSequence seq = build_sequence(g, coeffs, 4.0, 8.0);
    SimConfig cfg;
    cfg.detuning = khz_to_rad_us(delta_khz);
    cfg.steps_per_pair = steps;
    cfg.auto_steps = auto_steps;
    const PropagationResult res = propagate(seq, QubitState::ket1(), cfg);
    return fidelity(res.final, target_state(QubitState::ket1(), g));
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("unit conversions") {
    CHECK(khz_to_rad_us(100.0) == doctest::Approx(0.6283185307179586).epsilon(1e-15));
    CHECK(rad_us_to_khz(khz_to_rad_us(417.3)) == doctest::Approx(417.3).epsilon(1e-14));
    CHECK(khz_to_rad_us(0.0) == 0.0);
}

TEST_CASE("three-level state embedding") {
    const ThreeLevelState s = ThreeLevelState::from_qubit(QubitState::ket1());
    CHECK(std::abs(s.c1 - cplx{1.0, 0.0}) == 0.0);
    CHECK(std::abs(s.c0) == 0.0);
    CHECK(std::abs(s.ce) == 0.0);
    CHECK(s.norm2() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("resonant propagation realizes every gate exactly") {
    for (const char* name : {"sigma_x", "sigma_y", "sigma_z", "hadamard"}) {
        const GateParams g = GateParams::from_name(name);
        const double f = detuned_fidelity(g, presets::op1(), 0.0);
        CAPTURE(name);
        CHECK(f >= 1.0 - 1e-9);
    }
}

TEST_CASE("resonant propagation leaves no excited-state population") {
    const PropagationResult res =
        propagate(op1_sequence(GateParams::hadamard()), QubitState::ket1(), SimConfig{});
    CHECK(std::norm(res.final.ce) < 1e-12);
    CHECK(res.norm_drift < 1e-8);
    // hadamard on |1> gives equal populations.
    CHECK(std::norm(res.final.c0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::norm(res.final.c1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("detuned fidelities match frozen reference values") {
    // sigma_x with the first preset.
    CHECK(detuned_fidelity(GateParams::sigma_x(), presets::op1(), 150.0) ==
          doctest::Approx(0.991206086).epsilon(1e-7));
    CHECK(detuned_fidelity(GateParams::sigma_x(), presets::op1(), 300.0) ==
          doctest::Approx(0.989734450).epsilon(1e-7));
    CHECK(detuned_fidelity(GateParams::sigma_x(), presets::op1(), 410.0) ==
          doctest::Approx(0.988366587).epsilon(1e-7));
    // Other gates at the band edge.
    CHECK(detuned_fidelity(GateParams::sigma_z(), presets::op1(), 410.0) ==
          doctest::Approx(0.991477773451).epsilon(1e-7));
    CHECK(detuned_fidelity(GateParams::hadamard(), presets::op1(), 410.0) ==
          doctest::Approx(0.990231926501).epsilon(1e-7));
}

TEST_CASE("step halving changes the answer below the tolerance budget") {
    const double f1 = detuned_fidelity(GateParams::sigma_x(), presets::op1(), 410.0, 4000, false);
    const double f2 = detuned_fidelity(GateParams::sigma_x(), presets::op1(), 410.0, 8000, false);
    CHECK(std::abs(f1 - f2) < 1e-8);
}

TEST_CASE("norm ceiling aborts under-resolved propagation") {
    const PulseSequence seq = build_sequence(GateParams::sigma_x(), presets::op2(), 4.0, 8.0);
    SimConfig cfg;
    cfg.steps_per_pair = 40;
    cfg.auto_steps = false;
    CHECK_THROWS_AS((void)propagate(seq, QubitState::ket1(), cfg), std::runtime_error);
}

TEST_CASE("automatic step selection resolves the strong preset") {
    const PulseSequence seq = build_sequence(GateParams::sigma_x(), presets::op2(), 4.0, 8.0);
    // Pair 2 doubles the already-large peak amplitude.
    CHECK(recommended_steps(seq.pair2, khz_to_rad_us(600.0), 4000) > 16000);
    CHECK(recommended_steps(seq.pair1, 0.0, 4000) >= 4000);

    SimConfig cfg;
    cfg.detuning = khz_to_rad_us(600.0);
    cfg.steps_per_pair = 40;  // raised automatically
    const PropagationResult res = propagate(seq, QubitState::ket1(), cfg);
    CHECK(res.norm_drift <= 1e-8);
}

TEST_CASE("trace recording covers the full sequence") {
    SimConfig cfg;
    cfg.record_trace = true;
    cfg.detuning = khz_to_rad_us(200.0);
    const PropagationResult res =
        propagate(op1_sequence(GateParams::sigma_x()), QubitState::ket1(), cfg);
    REQUIRE(res.trace.size() > 100);
    CHECK(res.trace.front().t == 0.0);
    CHECK(res.trace.front().p1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(res.trace.front().p0 == 0.0);
    CHECK(res.trace.back().t == doctest::Approx(8.0).epsilon(1e-12));
    for (size_t i = 0; i < res.trace.size(); i += 97) {
        const TracePoint& p = res.trace[i];
        CHECK(p.p1 + p.p0 + p.pe == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(p.p1 >= 0.0);
        CHECK(p.p0 >= 0.0);
        CHECK(p.pe >= 0.0);
    }
    // Times are strictly increasing.
    for (size_t i = 1; i < res.trace.size(); i += 53) {
        CHECK(res.trace[i].t > res.trace[i - 1].t);
    }

    // No trace by default.
    const PropagationResult quiet =
        propagate(op1_sequence(GateParams::sigma_x()), QubitState::ket1(), SimConfig{});
    CHECK(quiet.trace.empty());
}

TEST_CASE("fidelity ignores global phase and excited amplitude") {
    ThreeLevelState s;
    s.c1 = cplx{0.0, 1.0};  // i|1>
    const double f = fidelity(s, QubitState::ket1());
    CHECK(f == doctest::Approx(1.0).epsilon(1e-15));

    // Excited-state amplitude only removes weight from the qubit subspace.
    ThreeLevelState leaky;
    leaky.c1 = cplx{std::sqrt(0.5), 0.0};
    leaky.ce = cplx{std::sqrt(0.5), 0.0};
    CHECK(fidelity(leaky, QubitState::ket1()) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("dark and bright states are resonant invariants for all gates") {
    for (const char* name : {"sigma_x", "sigma_y", "sigma_z", "hadamard"}) {
        const GateParams g = GateParams::from_name(name);
        const DarkBrightCheck chk = dark_state_invariance_check(op1_sequence(g), SimConfig{});
        CAPTURE(name);
        CHECK(chk.worst_deviation() <= 1e-9);
        CHECK(chk.dark_overlap == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(chk.bright_overlap == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(chk.superposition_fidelity == doctest::Approx(1.0).epsilon(1e-9));
    }
}

}  // TEST_SUITE
