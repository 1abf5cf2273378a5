#pragma once

// Sweeps and plot-ready data generation: fidelity vs detuning, baseline
// comparison, the a2-perturbation robustness map with its 0.99 contour, and
// bandwidth extraction.
//
// Detunings at this interface are in kHz (the display unit); conversion to
// rad/us happens internally via khz_to_rad_us.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "geomgate/dynamics.hpp"
#include "geomgate/pulse_model.hpp"

namespace geomgate {

struct FidelityCurve {
    std::vector<std::pair<double, double>> points;  // (delta_khz, F), delta ascending
    std::string gate_name;
    std::string label;           // coefficient / preset label, e.g. "Op1"
    std::string envelope_kind;   // "cosine" | "gaussian" | "square"

    double value_at_exact(double delta_khz) const;  // throws if not a grid point
};

struct RobustnessMap {
    std::vector<double> eta_axis;        // ascending fractional a2 variations
    std::vector<double> delta_axis_khz;  // ascending detunings
    std::vector<double> grid;            // row-major: grid[ie * n_delta + id]
    // 0.99 level set as marching-squares segments: consecutive point pairs
    // (2i, 2i+1) are the endpoints of one segment in (eta, delta_khz) space.
    std::vector<std::pair<double, double>> contour_099;

    double at(size_t ie, size_t id) const { return grid[ie * delta_axis_khz.size() + id]; }
};

// Fidelity-vs-detuning sweep of the two-pair sequence built from `coeffs`,
// starting from |psi(0)> = |1>. n_points must be >= 3 and odd so Delta = 0 is
// sampled. Throws on invalid grid parameters; propagation failures carry the
// offending detuning in the message.
FidelityCurve sweep_detuning(const GateParams& gate, const std::vector<double>& coeffs,
                             double t1, double t2, double delta_max_khz, int n_points,
                             const SimConfig& base_cfg, const std::string& label = "optimized");

// Same sweep for an arbitrary prebuilt sequence (used for baseline envelopes
// and perturbed coefficient studies).
FidelityCurve sweep_sequence(const PulseSequence& seq, double delta_max_khz, int n_points,
                             const SimConfig& base_cfg, const std::string& label);

// Widest contiguous interval around Delta = 0 with F >= threshold, endpoints
// linearly interpolated between samples. Requires F(0) >= threshold (throws
// std::runtime_error otherwise: no plateau).
std::pair<double, double> bandwidth_at(const FidelityCurve& curve, double threshold);

// Arithmetic mean of F over grid points with |delta_khz| <= band_khz.
double band_average(const FidelityCurve& curve, double band_khz);

// Largest |F(delta) - F(-delta)| over matched grid pairs (diagnostic; the
// equations do not guarantee symmetry).
double curve_asymmetry(const FidelityCurve& curve);

struct BaselineComparison {
    FidelityCurve optimized;
    FidelityCurve gaussian;
    FidelityCurve square;
    double t_fwhm_us = 0.0;  // measured on the optimized pair-1 envelope
};

// Three curves on an identical detuning grid: the optimized cosine sequence,
// a Gaussian baseline matched in duration and t_fwhm, and a square baseline
// matched in duration.
BaselineComparison compare_baselines(const GateParams& gate, const std::vector<double>& coeffs,
                                     double t1, double t2, double delta_max_khz, int n_points,
                                     const SimConfig& base_cfg);

// Fidelity over the (eta, delta) grid where eta rescales the second cosine
// coefficient only: a2 -> (1+eta) a2, all other coefficients fixed. The
// endpoint constraints are intentionally violated (that is the point of the
// probe) while the pulse area is unaffected, which is why the Delta = 0
// column stays at F = 1. Requires coeffs[1] != 0.
RobustnessMap a2_robustness_map(const GateParams& gate, const std::vector<double>& coeffs,
                                double t1, double t2, double eta_max, int n_eta,
                                double delta_max_khz, int n_delta, const SimConfig& base_cfg);

}  // namespace geomgate
