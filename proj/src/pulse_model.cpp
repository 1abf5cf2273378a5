#include "geomgate/pulse_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace geomgate {

namespace {

double cosine_series_value(const CosineEnvelope& env, double t) {
    const double base = env.area / env.duration;
    const double x = kPi * t / env.duration;
    // cos(n*x) by the Chebyshev recurrence: one cos() call per evaluation.
    const double c1 = std::cos(x);
    double cn_m2 = 1.0;  // cos(0)
    double cn_m1 = c1;   // cos(x)
    double sum = 0.0;
    const double scale = kPi / env.duration;
    for (size_t n = 1; n <= env.coeffs.size(); ++n) {
        const double cn = (n == 1) ? c1 : 2.0 * c1 * cn_m1 - cn_m2;
        if (n > 1) {
            cn_m2 = cn_m1;
            cn_m1 = cn;
        }
        sum += env.coeffs[n - 1] * static_cast<double>(n) * cn;
    }
    return base + scale * sum;
}

}  // namespace

double envelope_value(const CosineEnvelope& env, double t) {
    if (env.duration <= 0.0) throw std::domain_error("envelope_value: non-positive duration");
    // Tolerate one ulp-scale excursion from integrator arithmetic.
    const double slack = 1e-12 * env.duration;
    if (t < -slack || t > env.duration + slack) {
        throw std::domain_error("envelope_value: t outside [0, duration]");
    }
    t = std::clamp(t, 0.0, env.duration);
    switch (env.kind) {
        case EnvelopeKind::cosine:
            return cosine_series_value(env, t);
        case EnvelopeKind::gaussian: {
            const double dt = t - env.duration / 2.0;
            return env.gauss_amp * std::exp(-env.gauss_beta * dt * dt);
        }
        case EnvelopeKind::square:
            return env.area / env.duration;
    }
    throw std::logic_error("envelope_value: unknown envelope kind");
}

double envelope_peak_abs(const CosineEnvelope& env) {
    const int n = 4096;
    double best = 0.0;
    double best_t = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = env.duration * static_cast<double>(i) / n;
        const double v = std::abs(envelope_value(env, t));
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    // Ternary-search refinement of |Omega| inside the bracketing cells.
    double lo = std::max(0.0, best_t - env.duration / n);
    double hi = std::min(env.duration, best_t + env.duration / n);
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (std::abs(envelope_value(env, m1)) < std::abs(envelope_value(env, m2)))
            lo = m1;
        else
            hi = m2;
    }
    return std::max(best, std::abs(envelope_value(env, 0.5 * (lo + hi))));
}

double envelope_integral(const CosineEnvelope& env, int intervals) {
    if (intervals < 2) throw std::invalid_argument("envelope_integral: need >= 2 intervals");
    if (intervals % 2 != 0) ++intervals;
    const double h = env.duration / intervals;
    double sum = envelope_value(env, 0.0) + envelope_value(env, env.duration);
    for (int i = 1; i < intervals; ++i) {
        sum += envelope_value(env, i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

std::pair<double, double> constraint_residuals(const std::vector<double>& coeffs,
                                               const ConstraintSet& set) {
    if (coeffs.size() != static_cast<size_t>(2 * set.k)) {
        throw std::invalid_argument("constraint_residuals: expected " + std::to_string(2 * set.k) +
                                    " coefficients, got " + std::to_string(coeffs.size()));
    }
    double odd = 0.0;
    double even = 0.0;
    for (int j = 1; j <= set.k; ++j) {
        odd += (2.0 * j - 1.0) * coeffs[static_cast<size_t>(2 * j - 2)];
        even += static_cast<double>(j) * coeffs[static_cast<size_t>(2 * j - 1)];
    }
    return {odd - set.odd_target, even - set.even_target};
}

std::vector<double> lift_free_dofs(const std::vector<double>& free6, const ConstraintSet& set) {
    if (set.k != 4) throw std::invalid_argument("lift_free_dofs: implemented for k = 4 only");
    if (free6.size() != 6) {
        throw std::invalid_argument("lift_free_dofs: expected 6 free values, got " +
                                    std::to_string(free6.size()));
    }
    std::vector<double> c(8, 0.0);
    for (int i = 0; i < 6; ++i) c[static_cast<size_t>(i)] = free6[static_cast<size_t>(i)];
    c[6] = (set.odd_target - (c[0] + 3.0 * c[2] + 5.0 * c[4])) / 7.0;
    c[7] = (set.even_target - (c[1] + 2.0 * c[3] + 3.0 * c[5])) / 4.0;
    return c;
}

std::vector<double> project_free_dofs(const std::vector<double>& coeffs8) {
    if (coeffs8.size() != 8) {
        throw std::invalid_argument("project_free_dofs: expected 8 coefficients, got " +
                                    std::to_string(coeffs8.size()));
    }
    return std::vector<double>(coeffs8.begin(), coeffs8.begin() + 6);
}

PulseSequence build_sequence(const GateParams& params, const std::vector<double>& coeffs,
                             double t1, double t2) {
    const auto [odd_res, even_res] =
        constraint_residuals(coeffs, ConstraintSet::pair1(static_cast<int>(coeffs.size()) / 2));
    const double tol = 1e-3;
    if (std::abs(odd_res) > tol || std::abs(even_res) > tol) {
        throw std::invalid_argument(
            "build_sequence: pair-1 constraint residuals exceed 1e-3 (odd " +
            std::to_string(odd_res) + ", even " + std::to_string(even_res) + ")");
    }
    return build_sequence_unchecked(params, coeffs, t1, t2);
}

PulseSequence build_sequence_unchecked(const GateParams& params, const std::vector<double>& coeffs,
                                       double t1, double t2) {
    if (!(t1 > 0.0 && t2 > t1)) {
        throw std::invalid_argument("build_sequence: require t2 > t1 > 0");
    }

    PulseSequence seq;
    seq.t1 = t1;
    seq.t2 = t2;

    seq.pair1.role = PairRole::gate;
    seq.pair1.params = params;
    seq.pair1.envelope.kind = EnvelopeKind::cosine;
    seq.pair1.envelope.duration = t1;
    seq.pair1.envelope.area = kPi;
    seq.pair1.envelope.coeffs = coeffs;

    // Pair 2: coefficients a'_n = 2 a_n with area 2*pi. The n*pi/duration
    // factors in the series absorb any duration change, so this is the
    // area-preserving time rescale of 2*Omega for every t2 - t1; with the
    // default t2 - t1 = t1 it is Omega'(t) = 2*Omega(t) literally, and the
    // doubled coefficients meet the pair-2 endpoint constraints (even target -1).
    seq.pair2.role = PairRole::compensation;
    seq.pair2.params = compensation_params(params);
    seq.pair2.envelope.kind = EnvelopeKind::cosine;
    seq.pair2.envelope.duration = t2 - t1;
    seq.pair2.envelope.area = 2.0 * kPi;
    seq.pair2.envelope.coeffs.resize(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) {
        seq.pair2.envelope.coeffs[i] = 2.0 * coeffs[i];
    }
    return seq;
}

PulseSequence build_gaussian_sequence(const GateParams& params, double t_fwhm, double t1,
                                      double t2) {
    if (!(t1 > 0.0 && t2 > t1)) {
        throw std::invalid_argument("build_gaussian_sequence: require t2 > t1 > 0");
    }
    PulseSequence seq;
    seq.t1 = t1;
    seq.t2 = t2;
    seq.pair1 = PulsePair{gaussian_envelope(t1, t_fwhm, kPi), params, PairRole::gate};
    seq.pair2 = PulsePair{gaussian_envelope(t2 - t1, t_fwhm, 2.0 * kPi),
                          compensation_params(params), PairRole::compensation};
    return seq;
}

PulseSequence build_square_sequence(const GateParams& params, double t1, double t2) {
    if (!(t1 > 0.0 && t2 > t1)) {
        throw std::invalid_argument("build_square_sequence: require t2 > t1 > 0");
    }
    PulseSequence seq;
    seq.t1 = t1;
    seq.t2 = t2;
    seq.pair1 = PulsePair{square_envelope(t1, kPi), params, PairRole::gate};
    seq.pair2 = PulsePair{square_envelope(t2 - t1, 2.0 * kPi), compensation_params(params),
                          PairRole::compensation};
    return seq;
}

CosineEnvelope gaussian_envelope(double duration, double t_fwhm, double area) {
    if (!(duration > 0.0 && t_fwhm > 0.0 && area > 0.0)) {
        throw std::invalid_argument("gaussian_envelope: duration, fwhm and area must be positive");
    }
    if (t_fwhm >= duration) {
        throw std::invalid_argument("gaussian_envelope: fwhm must be smaller than duration");
    }
    CosineEnvelope env;
    env.kind = EnvelopeKind::gaussian;
    env.duration = duration;
    env.area = area;
    env.fwhm = t_fwhm;
    env.gauss_beta = 4.0 * std::log(2.0) / (t_fwhm * t_fwhm);
    // Exact truncated integral: amp * sqrt(pi/beta) * erf(sqrt(beta) d/2).
    const double integral_unit =
        std::sqrt(kPi / env.gauss_beta) * std::erf(std::sqrt(env.gauss_beta) * duration / 2.0);
    env.gauss_amp = area / integral_unit;
    return env;
}

CosineEnvelope square_envelope(double duration, double area) {
    if (!(duration > 0.0 && area > 0.0)) {
        throw std::invalid_argument("square_envelope: duration and area must be positive");
    }
    CosineEnvelope env;
    env.kind = EnvelopeKind::square;
    env.duration = duration;
    env.area = area;
    return env;
}

FwhmResult measure_fwhm(const CosineEnvelope& env, int grid_points) {
    if (grid_points < 3) throw std::invalid_argument("measure_fwhm: need >= 3 grid points");
    if (env.kind == EnvelopeKind::square) {
        return FwhmResult{env.duration, false};  // everywhere at its maximum
    }
    std::vector<double> v(static_cast<size_t>(grid_points));
    double peak = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double t = env.duration * static_cast<double>(i) / (grid_points - 1);
        v[static_cast<size_t>(i)] = envelope_value(env, t);
        peak = std::max(peak, v[static_cast<size_t>(i)]);
    }
    const double half = peak / 2.0;
    const double h = env.duration / (grid_points - 1);

    auto bisect = [&](double lo, double hi) {
        double flo = envelope_value(env, lo) - half;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = envelope_value(env, mid) - half;
            if ((flo < 0.0) == (fm < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    std::vector<double> crossings;
    for (int i = 0; i + 1 < grid_points; ++i) {
        const bool below = v[static_cast<size_t>(i)] < half;
        const bool next_below = v[static_cast<size_t>(i + 1)] < half;
        if (below != next_below) {
            crossings.push_back(bisect(i * h, (i + 1) * h));
        }
    }
    if (crossings.size() < 2) {
        throw std::runtime_error("measure_fwhm: fewer than two half-maximum crossings");
    }
    return FwhmResult{crossings.back() - crossings.front(), crossings.size() > 2};
}

ToneValues tone_values(const PulsePair& pair, double t_local) {
    const double w = envelope_value(pair.envelope, t_local);
    const double a = pair.params.a();
    const double b = pair.params.b();
    const cplx e_minus_iphi{std::cos(pair.params.phi), -std::sin(pair.params.phi)};
    return ToneValues{2.0 * b * w, 2.0 * a * w * e_minus_iphi};
}

namespace presets {

const std::vector<double>& op1() {
    static const std::vector<double> v{0.0246, -0.8980, 0.0066,  0.3668,
                                       -0.0021, -0.1358, -0.0048, 0.0179};
    return v;
}

const std::vector<double>& op2() {
    static const std::vector<double> v{-0.5400, -0.1582, 5.7637,  3.9338,
                                       -0.6641, -0.6328, -1.9186, -1.5777};
    return v;
}

const std::vector<double>& by_name(const std::string& name) {
    std::string lower;
    lower.reserve(name.size());
    for (char ch : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (lower == "op1") return op1();
    if (lower == "op2") return op2();
    throw std::invalid_argument("unknown preset: " + name + " (expected Op1 or Op2)");
}

}  // namespace presets

}  // namespace geomgate
