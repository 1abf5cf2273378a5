#pragma once

// Ideal qubit-subspace operators, dark/bright basis construction, and target
// states for the two-pair geometric gate scheme.
//
// Conventions fixed by this module:
//   * All 2x2 matrices and qubit states use basis order (|0>, |1>).
//   * sigma_z's free phase parameter is fixed to phi = 0.
//   * State comparisons are via |<a|b>|^2, never componentwise (global phase
//     carries no physics here).

#include <array>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geomgate {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Rotation-axis parameters (theta, phi): the gate acts as n.sigma with
// n = (sin(theta)cos(phi), sin(theta)sin(phi), cos(theta)).
struct GateParams {
    double theta = 0.0;  // radians, [0, pi]
    double phi = 0.0;    // radians, normalized to [0, 2*pi)

    GateParams() = default;
    GateParams(double theta_, double phi_);

    // Two-color field prefactors shared by the whole pulse pair.
    double a() const { return std::sin(theta / 2.0); }   // A = sin(theta/2)
    double b() const { return -std::cos(theta / 2.0); }  // B = -cos(theta/2)

    static GateParams sigma_x() { return {kPi / 2.0, 0.0}; }
    static GateParams sigma_y() { return {kPi / 2.0, kPi / 2.0}; }
    static GateParams sigma_z() { return {0.0, 0.0}; }
    static GateParams hadamard() { return {kPi / 4.0, 0.0}; }

    // Named lookup used by the CLI ("sigma_x", "sigma_y", "sigma_z", "hadamard").
    static GateParams from_name(const std::string& name);
};

// Normalized qubit state c0|0> + c1|1>.
struct QubitState {
    cplx c0{0.0, 0.0};
    cplx c1{0.0, 0.0};

    QubitState() = default;
    QubitState(cplx c0_, cplx c1_);

    // cos(theta0)|0> + sin(theta0) e^{i phi0} |1>
    static QubitState from_angles(double theta0, double phi0);
    static QubitState ket0() { return {cplx{1.0, 0.0}, cplx{0.0, 0.0}}; }
    static QubitState ket1() { return {cplx{0.0, 0.0}, cplx{1.0, 0.0}}; }

    double norm2() const { return std::norm(c0) + std::norm(c1); }
};

inline cplx inner(const QubitState& a, const QubitState& b) {
    return std::conj(a.c0) * b.c0 + std::conj(a.c1) * b.c1;
}

// |<a|b>|^2, the phase-insensitive overlap used for every state comparison.
inline double overlap2(const QubitState& a, const QubitState& b) {
    return std::norm(inner(a, b));
}

// Dark and bright superpositions of a pulse pair:
//   |d> = -B|0> + A e^{+i phi} |1>,   |b> = A e^{-i phi} |0> + B|1>.
struct DarkBrightBasis {
    QubitState dark;
    QubitState bright;
};

// Row-major 2x2 complex matrix in basis (|0>, |1>).
struct Mat2 {
    std::array<cplx, 4> m{};  // [ m00 m01 ; m10 m11 ]

    cplx& operator()(int r, int c) { return m[static_cast<size_t>(2 * r + c)]; }
    const cplx& operator()(int r, int c) const { return m[static_cast<size_t>(2 * r + c)]; }

    QubitState apply(const QubitState& s) const {
        return QubitState{(*this)(0, 0) * s.c0 + (*this)(0, 1) * s.c1,
                          (*this)(1, 0) * s.c0 + (*this)(1, 1) * s.c1};
    }
    static Mat2 identity() {
        Mat2 r;
        r(0, 0) = 1.0;
        r(1, 1) = 1.0;
        return r;
    }
};

Mat2 operator*(const Mat2& a, const Mat2& b);

// n.sigma in basis (|0>,|1>): [[cos t, sin t e^{-i p}], [sin t e^{+i p}, -cos t]].
// Hermitian, unitary, determinant -1, squares to the identity.
Mat2 ideal_gate(const GateParams& params);

// Dark/bright basis of a pulse pair; orthonormal by construction.
DarkBrightBasis dark_bright(const GateParams& params);

// Compensation-pair parameters (theta', phi') = (pi - theta, pi + phi mod 2pi).
GateParams compensation_params(const GateParams& params);

// Ideal end-to-end target: the compensation pair is the identity on the qubit
// subspace (its dressed pulse area is 2*pi), so the target is just
// ideal_gate(params) applied to the initial state.
QubitState target_state(const QubitState& initial, const GateParams& params);

}  // namespace geomgate
