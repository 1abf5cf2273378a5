#include "geomgate/gate_algebra.hpp"

#include <cmath>

namespace geomgate {

namespace {

double normalize_phase(double phi) {
    const double two_pi = 2.0 * kPi;
    double p = std::fmod(phi, two_pi);
    if (p < 0.0) p += two_pi;
    // fmod can land exactly on 2*pi after the correction when phi is a tiny
    // negative number; fold that back to zero.
    if (p >= two_pi) p = 0.0;
    return p;
}

}  // namespace

GateParams::GateParams(double theta_, double phi_) : theta(theta_), phi(normalize_phase(phi_)) {
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw std::invalid_argument("GateParams: theta must lie in [0, pi], got " +
                                    std::to_string(theta_));
    }
}

GateParams GateParams::from_name(const std::string& name) {
    if (name == "sigma_x") return sigma_x();
    if (name == "sigma_y") return sigma_y();
    if (name == "sigma_z") return sigma_z();
    if (name == "hadamard") return hadamard();
    throw std::invalid_argument("unknown gate name: " + name +
                                " (expected sigma_x|sigma_y|sigma_z|hadamard)");
}

QubitState::QubitState(cplx c0_, cplx c1_) : c0(c0_), c1(c1_) {
    if (std::abs(norm2() - 1.0) > 1e-12) {
        throw std::invalid_argument("QubitState: amplitudes must be normalized (|c0|^2+|c1|^2=1)");
    }
}

QubitState QubitState::from_angles(double theta0, double phi0) {
    return QubitState{cplx{std::cos(theta0), 0.0},
                      std::sin(theta0) * cplx{std::cos(phi0), std::sin(phi0)}};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

Mat2 ideal_gate(const GateParams& params) {
    const double nx = std::sin(params.theta) * std::cos(params.phi);
    const double ny = std::sin(params.theta) * std::sin(params.phi);
    const double nz = std::cos(params.theta);
    Mat2 u;
    u(0, 0) = cplx{nz, 0.0};
    u(0, 1) = cplx{nx, -ny};
    u(1, 0) = cplx{nx, ny};
    u(1, 1) = cplx{-nz, 0.0};
    return u;
}

DarkBrightBasis dark_bright(const GateParams& params) {
    const double a = params.a();
    const double b = params.b();
    const cplx eip{std::cos(params.phi), std::sin(params.phi)};
    DarkBrightBasis basis;
    basis.dark = QubitState{cplx{-b, 0.0}, a * eip};
    basis.bright = QubitState{a * std::conj(eip), cplx{b, 0.0}};
    return basis;
}

GateParams compensation_params(const GateParams& params) {
    return GateParams{kPi - params.theta, params.phi + kPi};
}

QubitState target_state(const QubitState& initial, const GateParams& params) {
    return ideal_gate(params).apply(initial);
}

}  // namespace geomgate
