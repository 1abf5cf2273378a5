#include "geomgate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace geomgate {

namespace {

// Fused right-hand side with the pair constants precomputed:
// omega1 = 2*b*w, omega0 = 2*a*w*e^{-i phi} with w the shared envelope value.
struct PairContext {
    double two_b = 0.0;      // 2B (omega1 prefactor, real)
    cplx two_a_e{0.0, 0.0};  // 2A e^{-i phi} (omega0 prefactor)
    double delta = 0.0;      // rad/us
    const CosineEnvelope* env = nullptr;

    ThreeLevelState rhs(const ThreeLevelState& s, double w) const {
        const double o1 = two_b * w;
        const cplx o0 = two_a_e * w;
        const cplx half_i{0.0, 0.5};
        ThreeLevelState d;
        d.c1 = -half_i * (o1 * s.ce);
        d.c0 = -half_i * (o0 * s.ce);
        d.ce = -half_i * (o1 * s.c1 + std::conj(o0) * s.c0) - cplx{0.0, delta} * s.ce;
        return d;
    }
};

PairContext make_context(const PulsePair& pair, double delta) {
    PairContext ctx;
    ctx.two_b = 2.0 * pair.params.b();
    const double a = pair.params.a();
    ctx.two_a_e = 2.0 * a * cplx{std::cos(pair.params.phi), -std::sin(pair.params.phi)};
    ctx.delta = delta;
    ctx.env = &pair.envelope;
    return ctx;
}

ThreeLevelState axpy(const ThreeLevelState& s, double h, const ThreeLevelState& d) {
    return ThreeLevelState{s.c1 + h * d.c1, s.c0 + h * d.c0, s.ce + h * d.ce};
}

}  // namespace

ThreeLevelState derivative(const ThreeLevelState& state, double omega1, cplx omega0,
                           double delta) {
    const cplx half_i{0.0, 0.5};
    ThreeLevelState d;
    d.c1 = -half_i * (omega1 * state.ce);
    d.c0 = -half_i * (omega0 * state.ce);
    d.ce = -half_i * (omega1 * state.c1 + std::conj(omega0) * state.c0) -
           cplx{0.0, delta} * state.ce;
    return d;
}

int recommended_steps(const PulsePair& pair, double delta, int base) {
    // Fastest local angular scale: two-color coupling magnitude 2|Omega| at its
    // peak plus the detuning. Keep h below ~0.04 rad of that scale so the
    // global 4th-order norm error stays well under 1e-8 for all presets.
    const double peak_coupling = 2.0 * envelope_peak_abs(pair.envelope) + std::abs(delta);
    const double max_phase_per_step = 0.04;
    const int needed =
        static_cast<int>(std::ceil(pair.envelope.duration * peak_coupling / max_phase_per_step));
    return std::max(base, needed);
}

PropagationResult propagate(const PulseSequence& seq, const QubitState& initial,
                            const SimConfig& cfg) {
    if (cfg.steps_per_pair < 1) throw std::invalid_argument("propagate: steps_per_pair >= 1");

    PropagationResult result;
    ThreeLevelState state = ThreeLevelState::from_qubit(initial);
    double max_drift = 0.0;

    const PulsePair* pairs[2] = {&seq.pair1, &seq.pair2};
    double t_offset = 0.0;
    if (cfg.record_trace) {
        result.trace.reserve(static_cast<size_t>(2 * cfg.steps_per_pair) + 2);
        result.trace.push_back(
            TracePoint{0.0, std::norm(state.c1), std::norm(state.c0), std::norm(state.ce)});
    }

    for (const PulsePair* pair : pairs) {
        const PairContext ctx = make_context(*pair, cfg.detuning);
        const double duration = pair->envelope.duration;
        const int steps = cfg.auto_steps
                              ? recommended_steps(*pair, cfg.detuning, cfg.steps_per_pair)
                              : cfg.steps_per_pair;
        const double h = duration / steps;

        // Envelope values at step boundaries are shared between consecutive
        // steps; midpoints are evaluated once per step.
        double w_begin = envelope_value(*ctx.env, 0.0);
        for (int i = 0; i < steps; ++i) {
            const double t0 = i * h;
            const double w_mid = envelope_value(*ctx.env, t0 + 0.5 * h);
            const double w_end =
                (i + 1 == steps) ? envelope_value(*ctx.env, duration) : envelope_value(*ctx.env, t0 + h);

            const ThreeLevelState k1 = ctx.rhs(state, w_begin);
            const ThreeLevelState k2 = ctx.rhs(axpy(state, 0.5 * h, k1), w_mid);
            const ThreeLevelState k3 = ctx.rhs(axpy(state, 0.5 * h, k2), w_mid);
            const ThreeLevelState k4 = ctx.rhs(axpy(state, h, k3), w_end);

            state.c1 += (h / 6.0) * (k1.c1 + 2.0 * k2.c1 + 2.0 * k3.c1 + k4.c1);
            state.c0 += (h / 6.0) * (k1.c0 + 2.0 * k2.c0 + 2.0 * k3.c0 + k4.c0);
            state.ce += (h / 6.0) * (k1.ce + 2.0 * k2.ce + 2.0 * k3.ce + k4.ce);
            w_begin = w_end;

            const double drift = std::abs(state.norm2() - 1.0);
            if (drift > max_drift) max_drift = drift;
            if (cfg.record_trace) {
                result.trace.push_back(TracePoint{t_offset + t0 + h, std::norm(state.c1),
                                                  std::norm(state.c0), std::norm(state.ce)});
            }
        }
        t_offset += duration;
    }

    if (max_drift > cfg.norm_ceiling) {
        throw std::runtime_error(
            "propagate: norm drift " + std::to_string(max_drift) + " exceeds ceiling " +
            std::to_string(cfg.norm_ceiling) +
            "; increase steps_per_pair by at least x" +
            std::to_string(std::ceil(std::pow(max_drift / cfg.norm_ceiling, 0.25))) +
            " or enable auto_steps");
    }

    result.final = state;
    result.norm_drift = max_drift;
    return result;
}

double fidelity(const ThreeLevelState& final_state, const QubitState& target) {
    const cplx overlap = std::conj(target.c1) * final_state.c1 + std::conj(target.c0) * final_state.c0;
    return std::norm(overlap);
}

DarkBrightCheck dark_state_invariance_check(const PulseSequence& seq, const SimConfig& cfg) {
    SimConfig resonant = cfg;
    resonant.detuning = 0.0;
    resonant.record_trace = false;

    // Pair 1 alone: replace pair 2 with a zero-amplitude placeholder.
    PulseSequence pair1_only = seq;
    pair1_only.pair2.envelope = CosineEnvelope{};
    pair1_only.pair2.envelope.kind = EnvelopeKind::square;
    pair1_only.pair2.envelope.duration = seq.t2 - seq.t1;
    pair1_only.pair2.envelope.area = 0.0;

    const DarkBrightBasis basis = dark_bright(seq.pair1.params);

    const auto run = [&](const QubitState& in) {
        return propagate(pair1_only, in, resonant).final;
    };

    DarkBrightCheck check;
    {
        const ThreeLevelState out = run(basis.dark);
        check.dark_overlap =
            fidelity(out, basis.dark);
    }
    {
        const ThreeLevelState out = run(basis.bright);
        check.bright_overlap = fidelity(out, basis.bright);
    }
    {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        const QubitState plus{inv_sqrt2 * (basis.dark.c0 + basis.bright.c0),
                              inv_sqrt2 * (basis.dark.c1 + basis.bright.c1)};
        const QubitState minus{inv_sqrt2 * (basis.dark.c0 - basis.bright.c0),
                               inv_sqrt2 * (basis.dark.c1 - basis.bright.c1)};
        const ThreeLevelState out = run(plus);
        check.superposition_fidelity = fidelity(out, minus);
    }
    return check;
}

}  // namespace geomgate
