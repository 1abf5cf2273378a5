#pragma once

// Envelope construction (cosine series, Gaussian, square), the linear
// coefficient constraints with their free-parameter elimination, and assembly
// of the full two-pair pulse sequence.
//
// Units: envelopes are angular frequencies in rad/us; times in us; any
// displayed "MHz" value is (rad/us)/(2*pi).

#include <optional>
#include <string>
#include <vector>

#include "geomgate/gate_algebra.hpp"

namespace geomgate {

enum class EnvelopeKind { cosine, gaussian, square };

// Real-valued Rabi envelope Omega(t) on [0, duration].
//
// cosine:   Omega(t) = area/duration + sum_n a_n (n*pi/duration) cos(n*pi*t/duration)
// gaussian: truncated Gaussian centered at duration/2, amplitude scaled so the
//           truncated integral equals `area` exactly
// square:   constant area/duration
//
// The integral over [0, duration] equals `area` for every kind and every
// coefficient vector (each cosine term integrates to zero).
struct CosineEnvelope {
    EnvelopeKind kind = EnvelopeKind::cosine;
    double duration = 0.0;            // us
    double area = 0.0;                // radians (pi for pair 1, 2*pi for pair 2)
    std::vector<double> coeffs;       // a_1..a_2k, dimensionless (cosine kind)
    double fwhm = 0.0;                // requested FWHM in us (gaussian kind)

    // Gaussian-kind cached shape parameters (set by gaussian_envelope).
    double gauss_beta = 0.0;          // 4 ln2 / fwhm^2
    double gauss_amp = 0.0;           // peak amplitude after area rescale
};

// Linear equality constraints on the cosine coefficients:
//   sum_j (2j-1) a_{2j-1} = odd_target     (odd harmonics)
//   sum_j j a_{2j}        = even_target    (even harmonics)
// Pair 1 uses (0, -1/2); pair 2 uses (0, -1). Together they force
// Omega(0) = Omega(duration) = 0.
struct ConstraintSet {
    double odd_target = 0.0;
    double even_target = 0.0;
    int k = 4;  // harmonic cap: coefficients a_1..a_2k

    static ConstraintSet pair1(int k = 4) { return {0.0, -0.5, k}; }
    static ConstraintSet pair2(int k = 4) { return {0.0, -1.0, k}; }
};

enum class PairRole { gate, compensation };

// One two-color pulse pair: a shared envelope plus the (theta, phi) parameters
// that fix the tone prefactors Omega_1 = 2B*Omega(t), Omega_0 = 2A*Omega(t)e^{-i phi}.
struct PulsePair {
    CosineEnvelope envelope;
    GateParams params;
    PairRole role = PairRole::gate;
};

// Gate pair (area pi, params (theta, phi)) followed by the compensation pair
// (area 2*pi, params (pi-theta, pi+phi)); pair 2 spans [t1, t2].
struct PulseSequence {
    PulsePair pair1;
    PulsePair pair2;
    double t1 = 0.0;  // us, end of pair 1
    double t2 = 0.0;  // us, end of pair 2
};

// Evaluate Omega(t) in rad/us. Throws std::domain_error outside [0, duration].
double envelope_value(const CosineEnvelope& env, double t);

// Peak |Omega(t)| over [0, duration] (dense scan + local refinement).
double envelope_peak_abs(const CosineEnvelope& env);

// Numerical integral of the envelope over [0, duration] (composite Simpson).
double envelope_integral(const CosineEnvelope& env, int intervals = 4096);

// Constraint residuals (odd, even): each sum minus its target.
// Throws std::invalid_argument when coeffs.size() != 2k.
std::pair<double, double> constraint_residuals(const std::vector<double>& coeffs,
                                               const ConstraintSet& set);

// Affine section of the constraint solution space for k = 4: the six free
// values map to (a1..a6) and the two pivots are solved as
//   a7 = (odd_target  - (a1 + 3 a3 + 5 a5)) / 7
//   a8 = (even_target - (a2 + 2 a4 + 3 a6)) / 4.
// The result satisfies both constraints to machine precision.
std::vector<double> lift_free_dofs(const std::vector<double>& free6, const ConstraintSet& set);

// Right inverse of lift_free_dofs: extracts (a1..a6). project then lift
// reproduces any constraint-satisfying vector exactly.
std::vector<double> project_free_dofs(const std::vector<double>& coeffs8);

// Full two-pair sequence from one pair-1 coefficient vector. Pair 2 reuses the
// same coefficients with the envelope doubled: with t2 - t1 = t1 (the default)
// this realizes Omega'(t) = 2*Omega(t) exactly and pair-2 area 2*pi.
// Rejects coefficient vectors whose pair-1 constraint residuals exceed 1e-3
// (absolute), the documented tolerance for accepting rounded preset values.
PulseSequence build_sequence(const GateParams& params, const std::vector<double>& coeffs,
                             double t1, double t2);

// Same assembly without the residual gate, for perturbation studies that
// intentionally violate the endpoint constraints (e.g. scanning a2). The pulse
// area is still exact for any coefficients.
PulseSequence build_sequence_unchecked(const GateParams& params, const std::vector<double>& coeffs,
                                       double t1, double t2);

// Baseline sequences on the same timing/area/angles as build_sequence:
// Gaussian pair envelopes share t_fwhm; square pairs are constant.
PulseSequence build_gaussian_sequence(const GateParams& params, double t_fwhm, double t1,
                                      double t2);
PulseSequence build_square_sequence(const GateParams& params, double t1, double t2);

// Truncated Gaussian with exact area (see CosineEnvelope docs). Non-positive
// duration/fwhm/area or fwhm >= duration throw std::invalid_argument.
CosineEnvelope gaussian_envelope(double duration, double t_fwhm, double area);

// Constant envelope area/duration.
CosineEnvelope square_envelope(double duration, double area);

struct FwhmResult {
    double width = 0.0;       // outermost half-maximum crossing distance, us
    bool multimodal = false;  // more than two half-maximum crossings found
};

// Full width at half maximum of the (positive-lobe) envelope, located on a
// dense grid and refined by bisection.
FwhmResult measure_fwhm(const CosineEnvelope& env, int grid_points = 20001);

// Signed two-color fields of a pair at local time t in [0, envelope.duration]:
// omega1 = 2B*Omega(t) (real), omega0 = 2A*Omega(t)e^{-i phi}.
struct ToneValues {
    double omega1 = 0.0;
    cplx omega0{0.0, 0.0};
};
ToneValues tone_values(const PulsePair& pair, double t_local);

// Bundled coefficient presets (dimensionless a_1..a_8, pair-1 constraints).
namespace presets {
const std::vector<double>& op1();
const std::vector<double>& op2();
// "Op1" or "Op2" (case-insensitive); throws std::invalid_argument otherwise.
const std::vector<double>& by_name(const std::string& name);
}  // namespace presets

}  // namespace geomgate
