#include "geomgate/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>

#include "parallel.hpp"

namespace geomgate {

namespace {

// Fidelities over the detuning grid for an already-built sequence.
std::vector<double> grid_fidelities(const PulseSequence& seq, const ObjectiveSpec& spec) {
    const QubitState target = target_state(spec.initial, spec.gate);
    std::vector<double> fids(spec.detuning_grid.size(), 0.0);
    std::string failure;
    std::mutex failure_mutex;
    detail::parallel_for(spec.detuning_grid.size(), [&](std::size_t i) {
        SimConfig cfg = spec.sim;
        cfg.detuning = spec.detuning_grid[i];
        cfg.record_trace = false;
        try {
            const PropagationResult res = propagate(seq, spec.initial, cfg);
            fids[i] = fidelity(res.final, target);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (failure.empty()) {
                failure = "objective evaluation failed at detuning " +
                          std::to_string(rad_us_to_khz(spec.detuning_grid[i])) +
                          " kHz: " + e.what();
            }
        }
    });
    if (!failure.empty()) throw std::runtime_error(failure);
    return fids;
}

struct Simplex {
    std::vector<std::vector<double>> x;  // n+1 vertices
    std::vector<double> f;               // objective at each vertex

    void sort() {
        std::vector<std::size_t> order(x.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::vector<std::vector<double>> xs(x.size());
        std::vector<double> fs(f.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            xs[i] = x[order[i]];
            fs[i] = f[order[i]];
        }
        x = std::move(xs);
        f = std::move(fs);
    }

    double f_spread() const { return f.back() - f.front(); }

    double x_spread() const {
        double s = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i)
            for (std::size_t j = 0; j < x[i].size(); ++j)
                s = std::max(s, std::abs(x[i][j] - x[0][j]));
        return s;
    }
};

struct NmResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5) minimizing `fn`, starting from x0 with per-coordinate simplex
// edge step*(1+|x0_i|).
template <typename F>
NmResult nelder_mead(F&& fn, const std::vector<double>& x0, double step, int max_iter,
                     double tol) {
    const std::size_t n = x0.size();
    NmResult out;
    Simplex s;
    s.x.reserve(n + 1);
    s.x.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v = x0;
        v[i] += step * (1.0 + std::abs(x0[i]));
        s.x.push_back(std::move(v));
    }
    s.f.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        s.f[i] = fn(s.x[i]);
        ++out.evaluations;
    }
    s.sort();

    auto centroid_excluding_worst = [&]() {
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)  // all but the last (worst) vertex
            for (std::size_t j = 0; j < n; ++j) c[j] += s.x[i][j];
        for (double& v : c) v /= static_cast<double>(n);
        return c;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        if (s.f_spread() < tol && s.x_spread() < tol) break;
        ++out.iterations;

        const std::vector<double> c = centroid_excluding_worst();
        auto blend = [&](double coef) {
            std::vector<double> v(n);
            for (std::size_t j = 0; j < n; ++j) v[j] = c[j] + coef * (c[j] - s.x[n][j]);
            return v;
        };

        const std::vector<double> xr = blend(1.0);  // reflection
        const double fr = fn(xr);
        ++out.evaluations;
        if (fr < s.f[0]) {
            const std::vector<double> xe = blend(2.0);  // expansion
            const double fe = fn(xe);
            ++out.evaluations;
            if (fe < fr) {
                s.x[n] = xe;
                s.f[n] = fe;
            } else {
                s.x[n] = xr;
                s.f[n] = fr;
            }
        } else if (fr < s.f[n - 1]) {
            s.x[n] = xr;
            s.f[n] = fr;
        } else {
            // Contraction toward the better of (worst, reflected).
            const bool outside = fr < s.f[n];
            std::vector<double> xc(n);
            if (outside) {
                for (std::size_t j = 0; j < n; ++j) xc[j] = c[j] + 0.5 * (xr[j] - c[j]);
            } else {
                for (std::size_t j = 0; j < n; ++j) xc[j] = c[j] + 0.5 * (s.x[n][j] - c[j]);
            }
            const double fc = fn(xc);
            ++out.evaluations;
            if (fc < (outside ? fr : s.f[n])) {
                s.x[n] = xc;
                s.f[n] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        s.x[i][j] = s.x[0][j] + 0.5 * (s.x[i][j] - s.x[0][j]);
                    s.f[i] = fn(s.x[i]);
                    ++out.evaluations;
                }
            }
        }
        s.sort();
    }

    out.x = s.x[0];
    out.f = s.f[0];
    return out;
}

}  // namespace

ObjectiveValue evaluate_objective(const std::vector<double>& free6, const ObjectiveSpec& spec) {
    if (spec.detuning_grid.empty())
        throw std::invalid_argument("objective requires a non-empty detuning grid");
    if (!(spec.t1 > 0.0) || !(spec.t2 > spec.t1))
        throw std::invalid_argument("objective requires 0 < t1 < t2");

    const std::vector<double> coeffs = lift_free_dofs(free6, ConstraintSet::pair1());
    const PulseSequence seq = build_sequence(spec.gate, coeffs, spec.t1, spec.t2);

    ObjectiveValue value;
    value.per_point = grid_fidelities(seq, spec);
    for (double f : value.per_point)
        value.worst_infidelity = std::max(value.worst_infidelity, 1.0 - f);

    if (spec.rabi_cap) {
        const double peak = 2.0 * envelope_peak_abs(seq.pair1.envelope);
        const double excess = peak - *spec.rabi_cap;
        if (excess > 0.0) value.penalty = excess * excess;
    }
    return value;
}

OptimizationReport optimize(const ObjectiveSpec& spec, const std::vector<double>& init_free6,
                            const OptimizerSettings& settings) {
    if (init_free6.size() != 6)
        throw std::invalid_argument("optimize expects 6 free coefficients");
    if (settings.restarts < 1) throw std::invalid_argument("restarts must be >= 1");

    OptimizationReport report;
    report.seed = settings.seed;

    int evaluations = 0;
    auto objective = [&](const std::vector<double>& x) {
        ++evaluations;
        return evaluate_objective(x, spec).total();
    };

    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<double> best_x;
    double best_f = std::numeric_limits<double>::infinity();
    int total_iterations = 0;

    for (int r = 0; r < settings.restarts; ++r) {
        // Restart 0 is the unperturbed warm start; later restarts run only
        // while the goal is unmet, from randomized perturbations of the
        // caller's initial point.
        std::vector<double> x0 = init_free6;
        if (r > 0) {
            if (best_f <= settings.goal_infidelity) break;
            for (double& v : x0) v += 0.2 * (1.0 + std::abs(v)) * unit(rng);
        }
        report.restarts_used = r + 1;

        // NmResult::evaluations is folded into `evaluations` by the lambda.
        const NmResult nm = nelder_mead(objective, x0, settings.initial_step,
                                        settings.max_iterations, settings.tolerance);
        total_iterations += nm.iterations;
        if (nm.f < best_f) {
            best_f = nm.f;
            best_x = nm.x;
        }
    }

    const ObjectiveValue best = evaluate_objective(best_x, spec);
    report.coeffs = lift_free_dofs(best_x, ConstraintSet::pair1());
    report.worst_infidelity = best.worst_infidelity;
    report.penalty = best.penalty;
    report.per_point_fidelity = best.per_point;
    report.iterations = total_iterations;
    report.evaluations = evaluations;
    report.converged = best.worst_infidelity <= settings.goal_infidelity;

    // Diagnostics: +-detuning balance on the grid and the pair-1 peak.
    double asym = 0.0;
    for (std::size_t i = 0; i < spec.detuning_grid.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.detuning_grid.size(); ++j) {
            if (std::abs(spec.detuning_grid[i] + spec.detuning_grid[j]) < 1e-12) {
                asym = std::max(asym, std::abs(report.per_point_fidelity[i] -
                                               report.per_point_fidelity[j]));
            }
        }
    }
    report.asymmetry = asym;

    const PulseSequence seq = build_sequence(spec.gate, report.coeffs, spec.t1, spec.t2);
    report.peak_two_color_rabi = 2.0 * envelope_peak_abs(seq.pair1.envelope);
    return report;
}

PresetVerification verify_preset(const std::vector<double>& coeffs8, const std::string& label,
                                 const GateParams& gate, double t1, double delta_max_khz,
                                 int n_points) {
    PresetVerification out;
    out.label = label;

    const PulseSequence seq = build_sequence(gate, coeffs8, t1, 2.0 * t1);
    SimConfig cfg;
    cfg.auto_steps = true;
    out.curve = sweep_sequence(seq, delta_max_khz, n_points, cfg, label);

    try {
        const auto bw = bandwidth_at(out.curve, 0.99);
        out.bandwidth_lo_khz = bw.first;
        out.bandwidth_hi_khz = bw.second;
        out.has_bandwidth = true;
    } catch (const std::exception&) {
        out.has_bandwidth = false;
    }
    out.band_average = band_average(out.curve, delta_max_khz);

    // Two-color magnitude sqrt(|Omega_1|^2 + |Omega_0|^2) = 2|Omega| since
    // A^2 + B^2 = 1; tone 1 alone carries the factor 2|B|.
    const double peak_env = envelope_peak_abs(seq.pair1.envelope);  // max|Omega|, rad/us
    out.peak_two_color_rabi_mhz = 2.0 * peak_env / (2.0 * kPi);
    out.peak_tone1_mhz = 2.0 * std::abs(gate.b()) * peak_env / (2.0 * kPi);
    return out;
}

}  // namespace geomgate
