#include <doctest.h>

#include <cmath>
#include <random>

#include "geomgate/gate_algebra.hpp"

using namespace geomgate;

namespace {

double mat_deviation(const Mat2& a, const Mat2& b) {
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
        }
    }
    return worst;
}

Mat2 dagger(const Mat2& m) {
    Mat2 d;
    d(0, 0) = std::conj(m(0, 0));
    d(0, 1) = std::conj(m(1, 0));
    d(1, 0) = std::conj(m(0, 1));
    d(1, 1) = std::conj(m(1, 1));
    return d;
}

}  // namespace

TEST_SUITE("gate_algebra") {

TEST_CASE("named gate parameters and field prefactors") {
    const GateParams sx = GateParams::sigma_x();
    CHECK(sx.theta == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(sx.phi == 0.0);
    CHECK(sx.a() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(sx.b() == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-15));

    const GateParams sy = GateParams::sigma_y();
    CHECK(sy.theta == doctest::Approx(kPi / 2));
    CHECK(sy.phi == doctest::Approx(kPi / 2));

    const GateParams sz = GateParams::sigma_z();
    CHECK(sz.theta == 0.0);
    CHECK(sz.a() == 0.0);  // tone 0 vanishes
    CHECK(sz.b() == -1.0);

    const GateParams h = GateParams::hadamard();
    CHECK(h.theta == doctest::Approx(kPi / 4));

    // A^2 + B^2 = 1 for any theta.
    for (double theta : {0.0, 0.3, kPi / 4, kPi / 2, 2.0, kPi}) {
        const GateParams g{theta, 0.0};
        CHECK(g.a() * g.a() + g.b() * g.b() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("gate name lookup") {
    CHECK(GateParams::from_name("sigma_x").theta == doctest::Approx(kPi / 2));
    CHECK(GateParams::from_name("sigma_y").phi == doctest::Approx(kPi / 2));
    CHECK(GateParams::from_name("sigma_z").theta == 0.0);
    CHECK(GateParams::from_name("hadamard").theta == doctest::Approx(kPi / 4));
    CHECK_THROWS_AS((void)GateParams::from_name("sigma_q"), std::invalid_argument);
    CHECK_THROWS_AS((void)GateParams::from_name(""), std::invalid_argument);
}

TEST_CASE("theta domain and phi normalization") {
    CHECK_THROWS_AS(GateParams(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GateParams(kPi + 0.1, 0.0), std::invalid_argument);

    // phi wraps into [0, 2 pi).
    const GateParams g{kPi / 2, -kPi / 2};
    CHECK(g.phi == doctest::Approx(3.0 * kPi / 2).epsilon(1e-15));
    const GateParams g2{kPi / 2, 2.0 * kPi + 0.25};
    CHECK(g2.phi == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("qubit state construction and normalization guard") {
    const QubitState one = QubitState::ket1();
    CHECK(std::abs(one.c1 - cplx{1.0, 0.0}) == 0.0);
    CHECK(std::abs(one.c0) == 0.0);

    // from_angles(pi/2, 0) is |1>.
    const QubitState s = QubitState::from_angles(kPi / 2, 0.0);
    CHECK(overlap2(s, one) == doctest::Approx(1.0).epsilon(1e-14));

    // from_angles(0, anything) is |0>.
    CHECK(overlap2(QubitState::from_angles(0.0, 1.3), QubitState::ket0()) ==
          doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(QubitState(cplx{1.0, 0.0}, cplx{1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(QubitState(cplx{0.0, 0.0}, cplx{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("inner product and phase-insensitive overlap") {
    const QubitState a = QubitState::ket0();
    const QubitState b{cplx{0.0, 1.0}, cplx{0.0, 0.0}};  // i|0>
    CHECK(std::abs(inner(a, b) - cplx{0.0, 1.0}) < 1e-15);
    CHECK(overlap2(a, b) == doctest::Approx(1.0).epsilon(1e-15));  // global phase ignored
    CHECK(overlap2(QubitState::ket0(), QubitState::ket1()) == 0.0);
}

TEST_CASE("ideal gate matrices in the (|0>, |1>) basis") {
    const Mat2 x = ideal_gate(GateParams::sigma_x());
    CHECK(std::abs(x(0, 0)) < 1e-15);
    CHECK(std::abs(x(0, 1) - cplx{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(x(1, 0) - cplx{1.0, 0.0}) < 1e-15);

    const Mat2 y = ideal_gate(GateParams::sigma_y());
    CHECK(std::abs(y(0, 1) - cplx{0.0, -1.0}) < 1e-15);
    CHECK(std::abs(y(1, 0) - cplx{0.0, 1.0}) < 1e-15);

    const Mat2 z = ideal_gate(GateParams::sigma_z());
    CHECK(std::abs(z(0, 0) - cplx{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(z(1, 1) + cplx{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(z(0, 1)) < 1e-15);

    const Mat2 h = ideal_gate(GateParams::hadamard());
    const double r = std::sqrt(0.5);
    CHECK(std::abs(h(0, 0) - cplx{r, 0.0}) < 1e-15);
    CHECK(std::abs(h(0, 1) - cplx{r, 0.0}) < 1e-15);
    CHECK(std::abs(h(1, 1) + cplx{r, 0.0}) < 1e-15);
}

TEST_CASE("ideal gate is Hermitian, unitary, and involutory") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 25; ++i) {
        const GateParams g{u01(rng) * kPi, u01(rng) * 2.0 * kPi};
        const Mat2 m = ideal_gate(g);
        CHECK(mat_deviation(m, dagger(m)) < 1e-12);              // Hermitian
        CHECK(mat_deviation(m * dagger(m), Mat2::identity()) < 1e-12);  // unitary
        CHECK(mat_deviation(m * m, Mat2::identity()) < 1e-12);   // squares to 1
        const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        CHECK(std::abs(det + cplx{1.0, 0.0}) < 1e-12);           // det = -1
    }
}

TEST_CASE("dark and bright states are orthonormal and rebuild the gate") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 25; ++i) {
        const GateParams g{u01(rng) * kPi, u01(rng) * 2.0 * kPi};
        const DarkBrightBasis basis = dark_bright(g);
        CHECK(basis.dark.norm2() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(basis.bright.norm2() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(inner(basis.dark, basis.bright)) < 1e-14);

        // |d><d| - |b><b| equals the ideal gate.
        Mat2 rebuilt;
        const QubitState& d = basis.dark;
        const QubitState& b = basis.bright;
        rebuilt(0, 0) = d.c0 * std::conj(d.c0) - b.c0 * std::conj(b.c0);
        rebuilt(0, 1) = d.c0 * std::conj(d.c1) - b.c0 * std::conj(b.c1);
        rebuilt(1, 0) = d.c1 * std::conj(d.c0) - b.c1 * std::conj(b.c0);
        rebuilt(1, 1) = d.c1 * std::conj(d.c1) - b.c1 * std::conj(b.c1);
        CHECK(mat_deviation(rebuilt, ideal_gate(g)) < 1e-12);
    }
}

TEST_CASE("sigma_x dark state is the even superposition") {
    const DarkBrightBasis basis = dark_bright(GateParams::sigma_x());
    const double r = std::sqrt(0.5);
    CHECK(std::abs(basis.dark.c0 - cplx{r, 0.0}) < 1e-15);
    CHECK(std::abs(basis.dark.c1 - cplx{r, 0.0}) < 1e-15);
}

TEST_CASE("compensation parameters mirror theta and shift phi by pi") {
    const GateParams g{kPi / 4, 0.5};
    const GateParams c = compensation_params(g);
    CHECK(c.theta == doctest::Approx(kPi - kPi / 4).epsilon(1e-15));
    CHECK(c.phi == doctest::Approx(0.5 + kPi).epsilon(1e-15));

    // Applying the map twice restores the original parameters (mod 2 pi).
    const GateParams cc = compensation_params(c);
    CHECK(cc.theta == doctest::Approx(g.theta).epsilon(1e-15));
    CHECK(cc.phi == doctest::Approx(g.phi).epsilon(1e-12));

    // sigma_z's compensation drives only the |0> tone: A' = 1, B' = 0.
    const GateParams zc = compensation_params(GateParams::sigma_z());
    CHECK(zc.a() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(zc.b()) < 1e-15);
}

TEST_CASE("target states for |1> input") {
    const QubitState one = QubitState::ket1();
    CHECK(overlap2(target_state(one, GateParams::sigma_x()), QubitState::ket0()) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(overlap2(target_state(one, GateParams::sigma_y()), QubitState::ket0()) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // sigma_z only flips the phase of |1>.
    CHECK(overlap2(target_state(one, GateParams::sigma_z()), one) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // hadamard |1> = (|0> - |1>)/sqrt(2).
    const QubitState expected{cplx{std::sqrt(0.5), 0.0}, cplx{-std::sqrt(0.5), 0.0}};
    CHECK(overlap2(target_state(one, GateParams::hadamard()), expected) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

}  // TEST_SUITE
