#include "geomgate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace geomgate {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    if (n == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    for (int i = 0; i < n; ++i) {
        v[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
    return v;
}

// Bound check + clamp for one fidelity sample; excursions beyond numerical
// noise are treated as hard failures, not silently clipped.
double checked_fidelity(double f, double delta_khz) {
    if (f < -1e-9 || f > 1.0 + 1e-9) {
        throw std::runtime_error("fidelity " + std::to_string(f) + " out of [0,1] at delta " +
                                 std::to_string(delta_khz) + " kHz");
    }
    return std::clamp(f, 0.0, 1.0);
}

void validate_grid(double delta_max_khz, int n_points) {
    if (n_points < 3) throw std::invalid_argument("sweep: n_points must be >= 3");
    if (n_points % 2 == 0) {
        throw std::invalid_argument("sweep: n_points must be odd so Delta = 0 is sampled");
    }
    if (delta_max_khz < 0.0) throw std::invalid_argument("sweep: delta_max_khz must be >= 0");
}

// Canonical name of the pair-1 rotation parameters, for curve labeling.
std::string gate_name_of(const GateParams& p) {
    const std::pair<const char*, GateParams> known[] = {
        {"sigma_x", GateParams::sigma_x()},
        {"sigma_y", GateParams::sigma_y()},
        {"sigma_z", GateParams::sigma_z()},
        {"hadamard", GateParams::hadamard()},
    };
    for (const auto& [name, params] : known) {
        if (std::abs(p.theta - params.theta) < 1e-12 && std::abs(p.phi - params.phi) < 1e-12) {
            return name;
        }
    }
    return "theta=" + std::to_string(p.theta) + ",phi=" + std::to_string(p.phi);
}

}  // namespace

double FidelityCurve::value_at_exact(double delta_khz) const {
    for (const auto& [d, f] : points) {
        if (std::abs(d - delta_khz) < 1e-9) return f;
    }
    throw std::invalid_argument("curve has no grid point at delta = " + std::to_string(delta_khz));
}

FidelityCurve sweep_sequence(const PulseSequence& seq, double delta_max_khz, int n_points,
                             const SimConfig& base_cfg, const std::string& label) {
    validate_grid(delta_max_khz, n_points);
    const std::vector<double> deltas = linspace(-delta_max_khz, delta_max_khz, n_points);
    const QubitState initial = QubitState::ket1();
    const QubitState target = target_state(initial, seq.pair1.params);

    std::vector<double> fid(deltas.size());
    std::string failure;
    std::mutex failure_mutex;
    detail::parallel_for(deltas.size(), [&](size_t i) {
        SimConfig cfg = base_cfg;
        cfg.detuning = khz_to_rad_us(deltas[i]);
        cfg.record_trace = false;
        try {
            fid[i] = fidelity(propagate(seq, initial, cfg).final, target);
        } catch (const std::exception& e) {
            // First failure wins; parallel_for has no cancellation.
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (failure.empty()) {
                failure = "sweep failed at delta " + std::to_string(deltas[i]) +
                          " kHz: " + e.what();
            }
        }
    });
    if (!failure.empty()) throw std::runtime_error(failure);

    FidelityCurve curve;
    curve.label = label;
    curve.gate_name = gate_name_of(seq.pair1.params);
    switch (seq.pair1.envelope.kind) {
        case EnvelopeKind::cosine: curve.envelope_kind = "cosine"; break;
        case EnvelopeKind::gaussian: curve.envelope_kind = "gaussian"; break;
        case EnvelopeKind::square: curve.envelope_kind = "square"; break;
    }
    curve.points.reserve(deltas.size());
    for (size_t i = 0; i < deltas.size(); ++i) {
        curve.points.emplace_back(deltas[i], checked_fidelity(fid[i], deltas[i]));
    }
    return curve;
}

FidelityCurve sweep_detuning(const GateParams& gate, const std::vector<double>& coeffs,
                             double t1, double t2, double delta_max_khz, int n_points,
                             const SimConfig& base_cfg, const std::string& label) {
    const PulseSequence seq = build_sequence(gate, coeffs, t1, t2);
    FidelityCurve curve = sweep_sequence(seq, delta_max_khz, n_points, base_cfg, label);
    return curve;
}

std::pair<double, double> bandwidth_at(const FidelityCurve& curve, double threshold) {
    const auto& pts = curve.points;
    if (pts.empty()) throw std::invalid_argument("bandwidth_at: empty curve");

    // Locate the sample closest to Delta = 0.
    size_t i0 = 0;
    for (size_t i = 1; i < pts.size(); ++i) {
        if (std::abs(pts[i].first) < std::abs(pts[i0].first)) i0 = i;
    }
    if (pts[i0].second < threshold) {
        throw std::runtime_error("bandwidth_at: F(0) = " + std::to_string(pts[i0].second) +
                                 " is below threshold " + std::to_string(threshold) +
                                 " (no plateau)");
    }

    auto interp = [&](size_t inside, size_t outside) {
        const double d1 = pts[inside].first, f1 = pts[inside].second;
        const double d2 = pts[outside].first, f2 = pts[outside].second;
        return d1 + (threshold - f1) * (d2 - d1) / (f2 - f1);
    };

    double hi = pts.back().first;
    for (size_t i = i0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1].second < threshold) {
            hi = interp(i, i + 1);
            break;
        }
    }
    double lo = pts.front().first;
    for (size_t i = i0; i > 0; --i) {
        if (pts[i - 1].second < threshold) {
            lo = interp(i, i - 1);
            break;
        }
    }
    return {lo, hi};
}

double band_average(const FidelityCurve& curve, double band_khz) {
    double sum = 0.0;
    size_t count = 0;
    for (const auto& [d, f] : curve.points) {
        if (std::abs(d) <= band_khz + 1e-9) {
            sum += f;
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("band_average: no grid points within band");
    return sum / static_cast<double>(count);
}

double curve_asymmetry(const FidelityCurve& curve) {
    double worst = 0.0;
    for (const auto& [d, f] : curve.points) {
        if (d <= 0.0) continue;
        for (const auto& [dm, fm] : curve.points) {
            if (std::abs(dm + d) < 1e-9) {
                worst = std::max(worst, std::abs(f - fm));
                break;
            }
        }
    }
    return worst;
}

BaselineComparison compare_baselines(const GateParams& gate, const std::vector<double>& coeffs,
                                     double t1, double t2, double delta_max_khz, int n_points,
                                     const SimConfig& base_cfg) {
    BaselineComparison cmp;

    const PulseSequence opt_seq = build_sequence(gate, coeffs, t1, t2);
    cmp.t_fwhm_us = measure_fwhm(opt_seq.pair1.envelope).width;

    cmp.optimized = sweep_sequence(opt_seq, delta_max_khz, n_points, base_cfg, "optimized");
    cmp.gaussian = sweep_sequence(build_gaussian_sequence(gate, cmp.t_fwhm_us, t1, t2),
                                  delta_max_khz, n_points, base_cfg, "gaussian");
    cmp.square = sweep_sequence(build_square_sequence(gate, t1, t2), delta_max_khz, n_points,
                                base_cfg, "square");
    return cmp;
}

namespace {

// Marching squares at a fixed level: appends the level-set segments of one
// grid cell. Corner order: v00 = (e0,d0), v01 = (e0,d1), v10 = (e1,d0),
// v11 = (e1,d1).
void cell_contour(double level, double e0, double e1, double d0, double d1, double v00,
                  double v01, double v10, double v11,
                  std::vector<std::pair<double, double>>& out) {
    struct Pt {
        double e, d;
    };
    auto lerp = [level](double a, double b, double va, double vb) {
        return a + (level - va) * (b - a) / (vb - va);
    };
    std::vector<Pt> hits;
    const bool s00 = v00 >= level, s01 = v01 >= level, s10 = v10 >= level, s11 = v11 >= level;
    if (s00 != s01) hits.push_back({e0, lerp(d0, d1, v00, v01)});            // left edge
    if (s10 != s11) hits.push_back({e1, lerp(d0, d1, v10, v11)});            // right edge
    if (s00 != s10) hits.push_back({lerp(e0, e1, v00, v10), d0});            // bottom edge
    if (s01 != s11) hits.push_back({lerp(e0, e1, v01, v11), d1});            // top edge

    if (hits.size() == 2) {
        out.emplace_back(hits[0].e, hits[0].d);
        out.emplace_back(hits[1].e, hits[1].d);
    } else if (hits.size() == 4) {
        // Saddle cell: disambiguate with the center value.
        const double center = 0.25 * (v00 + v01 + v10 + v11);
        // hits order: left, right, bottom, top.
        if ((center >= level) == s00) {
            out.emplace_back(hits[0].e, hits[0].d);  // left-top pairing
            out.emplace_back(hits[3].e, hits[3].d);
            out.emplace_back(hits[2].e, hits[2].d);  // bottom-right pairing
            out.emplace_back(hits[1].e, hits[1].d);
        } else {
            out.emplace_back(hits[0].e, hits[0].d);  // left-bottom pairing
            out.emplace_back(hits[2].e, hits[2].d);
            out.emplace_back(hits[3].e, hits[3].d);  // top-right pairing
            out.emplace_back(hits[1].e, hits[1].d);
        }
    }
}

}  // namespace

RobustnessMap a2_robustness_map(const GateParams& gate, const std::vector<double>& coeffs,
                                double t1, double t2, double eta_max, int n_eta,
                                double delta_max_khz, int n_delta, const SimConfig& base_cfg) {
    if (coeffs.size() < 2 || coeffs[1] == 0.0) {
        throw std::invalid_argument("a2_robustness_map: a2 must be nonzero");
    }
    if (n_eta < 3 || n_delta < 3) {
        throw std::invalid_argument("a2_robustness_map: need at least 3 points per axis");
    }
    if (n_delta % 2 == 0 || n_eta % 2 == 0) {
        throw std::invalid_argument(
            "a2_robustness_map: axis resolutions must be odd so eta = 0 and Delta = 0 are sampled");
    }

    RobustnessMap map;
    map.eta_axis = linspace(-eta_max, eta_max, n_eta);
    map.delta_axis_khz = linspace(-delta_max_khz, delta_max_khz, n_delta);
    map.grid.assign(map.eta_axis.size() * map.delta_axis_khz.size(), 0.0);

    const QubitState initial = QubitState::ket1();
    const QubitState target = target_state(initial, gate);

    std::string failure;
    std::mutex failure_mutex;
    detail::parallel_for(map.eta_axis.size(), [&](size_t ie) {
        std::vector<double> perturbed = coeffs;
        perturbed[1] = coeffs[1] * (1.0 + map.eta_axis[ie]);
        const PulseSequence seq = build_sequence_unchecked(gate, perturbed, t1, t2);
        for (size_t id = 0; id < map.delta_axis_khz.size(); ++id) {
            SimConfig cfg = base_cfg;
            cfg.detuning = khz_to_rad_us(map.delta_axis_khz[id]);
            cfg.record_trace = false;
            try {
                const double f = fidelity(propagate(seq, initial, cfg).final, target);
                map.grid[ie * map.delta_axis_khz.size() + id] =
                    checked_fidelity(f, map.delta_axis_khz[id]);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure.empty()) {
                    failure = "robustness map failed at eta " + std::to_string(map.eta_axis[ie]) +
                              ", delta " + std::to_string(map.delta_axis_khz[id]) +
                              " kHz: " + e.what();
                }
            }
        }
    });
    if (!failure.empty()) throw std::runtime_error(failure);

    // Area invariance guarantees the Delta = 0 column equals 1; enforce the
    // documented invariant rather than trusting it silently.
    for (size_t ie = 0; ie < map.eta_axis.size(); ++ie) {
        for (size_t id = 0; id < map.delta_axis_khz.size(); ++id) {
            if (std::abs(map.delta_axis_khz[id]) < 1e-12 &&
                std::abs(map.at(ie, id) - 1.0) > 1e-6) {
                throw std::logic_error("robustness map: Delta = 0 column deviates from 1 at eta " +
                                       std::to_string(map.eta_axis[ie]));
            }
        }
    }

    const double level = 0.99;
    for (size_t ie = 0; ie + 1 < map.eta_axis.size(); ++ie) {
        for (size_t id = 0; id + 1 < map.delta_axis_khz.size(); ++id) {
            cell_contour(level, map.eta_axis[ie], map.eta_axis[ie + 1], map.delta_axis_khz[id],
                         map.delta_axis_khz[id + 1], map.at(ie, id), map.at(ie, id + 1),
                         map.at(ie + 1, id), map.at(ie + 1, id + 1), map.contour_099);
        }
    }
    return map;
}

}  // namespace geomgate
