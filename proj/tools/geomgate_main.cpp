// Command-line front end: reproducible simulation, sweep, comparison,
// robustness-map, optimization, and AWG-export runs driven by a JSON config
// plus flag overrides. Exit codes: 0 success, 1 runtime failure (including
// verification check failures), 2 malformed configuration.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomgate/analysis.hpp"
#include "geomgate/awg_export.hpp"
#include "geomgate/dynamics.hpp"
#include "geomgate/gate_algebra.hpp"
#include "geomgate/io.hpp"
#include "geomgate/optimizer.hpp"
#include "geomgate/pulse_model.hpp"

namespace gg = geomgate;
using nlohmann::json;

namespace {

struct FlagOverrides {
    std::string config_path;
    std::string gate;
    std::string preset;
    double t1_us = 0.0;
    bool t1_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int points = 0;
    bool points_set = false;
    double delta_khz = 0.0;
    bool delta_set = false;
};

// Loads the config file (or defaults) and applies flag overrides; throws
// gg::ConfigError for anything malformed.
gg::RunConfig effective_config(const FlagOverrides& flags, const std::string& subcommand) {
    gg::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = gg::load_config_file(flags.config_path);

    if (!flags.gate.empty()) {
        try {
            gg::GateParams::from_name(flags.gate);
        } catch (const std::exception& e) {
            throw gg::ConfigError(e.what());
        }
        cfg.gate = flags.gate;
    }
    if (!flags.preset.empty()) {
        try {
            gg::presets::by_name(flags.preset);
        } catch (const std::exception& e) {
            throw gg::ConfigError(e.what());
        }
        cfg.coeff_source = "preset";
        cfg.preset = flags.preset;
    }
    if (flags.t1_set) {
        if (!(flags.t1_us > 0.0)) throw gg::ConfigError("--t1-us must be > 0");
        cfg.t1_us = flags.t1_us;
    }
    if (flags.seed_set) cfg.seed = flags.seed;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.points_set) {
        if (subcommand == "simulate") {
            if (flags.points < 2) throw gg::ConfigError("--points must be >= 2 for simulate");
            cfg.simulate.trace_points = flags.points;
        } else {
            if (flags.points < 3 || flags.points % 2 == 0) {
                throw gg::ConfigError("--points must be odd and >= 3");
            }
            cfg.sweep.points = flags.points;
        }
    }
    if (flags.delta_set) cfg.simulate.delta_khz = flags.delta_khz;

    if (!(cfg.t2() > cfg.t1_us)) {
        throw gg::ConfigError("t2_us must exceed t1_us after overrides");
    }
    return cfg;
}

gg::SimConfig sim_config(const gg::RunConfig& cfg) {
    gg::SimConfig sim;
    sim.steps_per_pair = cfg.sim.steps_per_pair;
    sim.auto_steps = cfg.sim.auto_steps;
    sim.norm_ceiling = cfg.sim.norm_ceiling;
    return sim;
}

std::string coeff_label(const gg::RunConfig& cfg) {
    if (cfg.coeff_source == "preset") return cfg.preset;
    if (cfg.coeff_source == "file") return "file";
    return "inline";
}

void prepare_out_dir(const gg::RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + cfg.out_dir + ": " +
                                 ec.message());
    }
}

json bandwidth_json(const gg::FidelityCurve& curve, double threshold) {
    try {
        const auto [lo, hi] = gg::bandwidth_at(curve, threshold);
        return json{{"lo_khz", lo}, {"hi_khz", hi}};
    } catch (const std::exception&) {
        return json(nullptr);  // no plateau at this threshold
    }
}

// ---------------------------------------------------------------------------

int cmd_simulate(const gg::RunConfig& cfg) {
    prepare_out_dir(cfg);
    const gg::GateParams gate = gg::GateParams::from_name(cfg.gate);
    const std::vector<double> coeffs = cfg.resolve_coeffs();
    const gg::PulseSequence seq = gg::build_sequence(gate, coeffs, cfg.t1_us, cfg.t2());
    const gg::QubitState initial = gg::QubitState::from_angles(cfg.theta0, cfg.phi0);
    const gg::QubitState target = gg::target_state(initial, gate);

    gg::SimConfig sim = sim_config(cfg);
    sim.detuning = gg::khz_to_rad_us(cfg.simulate.delta_khz);
    sim.record_trace = true;

    const gg::PropagationResult res = gg::propagate(seq, initial, sim);
    const double fid = gg::fidelity(res.final, target);

    gg::write_trace_csv(cfg.out_dir + "/trace.csv", res.trace);
    gg::write_envelope_csv(cfg.out_dir + "/envelope.csv", seq, cfg.simulate.trace_points);
    gg::atomic_write_text(cfg.out_dir + "/sequence.json",
                          gg::sequence_to_json(seq).dump(2) + "\n");

    json summary;
    summary["gate"] = cfg.gate;
    summary["coefficients"] = coeff_label(cfg);
    summary["delta_khz"] = cfg.simulate.delta_khz;
    summary["fidelity"] = fid;
    summary["final_populations"] = {{"p1", std::norm(res.final.c1)},
                                    {"p0", std::norm(res.final.c0)},
                                    {"pe", std::norm(res.final.ce)}};
    summary["norm_drift"] = res.norm_drift;
    gg::atomic_write_text(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
    gg::write_manifest(cfg.out_dir, cfg, "simulate");

    std::printf("simulate: gate=%s coeffs=%s delta=%g kHz fidelity=%.9f\n", cfg.gate.c_str(),
                coeff_label(cfg).c_str(), cfg.simulate.delta_khz, fid);
    return 0;
}

int cmd_sweep(const gg::RunConfig& cfg) {
    prepare_out_dir(cfg);
    const gg::GateParams gate = gg::GateParams::from_name(cfg.gate);
    const std::vector<double> coeffs = cfg.resolve_coeffs();

    const gg::FidelityCurve curve =
        gg::sweep_detuning(gate, coeffs, cfg.t1_us, cfg.t2(), cfg.sweep.delta_max_khz,
                           cfg.sweep.points, sim_config(cfg), coeff_label(cfg));
    gg::write_curves_csv(cfg.out_dir + "/curve.csv", {curve});

    json summary;
    summary["gate"] = cfg.gate;
    summary["coefficients"] = coeff_label(cfg);
    summary["delta_max_khz"] = cfg.sweep.delta_max_khz;
    summary["points"] = cfg.sweep.points;
    summary["bandwidth_099"] = bandwidth_json(curve, 0.99);
    summary["band_average"] = gg::band_average(curve, cfg.sweep.delta_max_khz);
    summary["asymmetry"] = gg::curve_asymmetry(curve);
    summary["resonant_fidelity"] = curve.value_at_exact(0.0);
    gg::atomic_write_text(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
    gg::write_manifest(cfg.out_dir, cfg, "sweep");

    const json& bw = summary["bandwidth_099"];
    if (bw.is_null()) {
        std::printf("sweep: gate=%s no 0.99 plateau at Delta = 0\n", cfg.gate.c_str());
    } else {
        std::printf("sweep: gate=%s 0.99-bandwidth = [%.1f, %.1f] kHz, avg = %.6f\n",
                    cfg.gate.c_str(), bw["lo_khz"].get<double>(), bw["hi_khz"].get<double>(),
                    summary["band_average"].get<double>());
    }
    return 0;
}

int cmd_compare(const gg::RunConfig& cfg) {
    prepare_out_dir(cfg);
    const gg::GateParams gate = gg::GateParams::from_name(cfg.gate);
    const std::vector<double> coeffs = cfg.resolve_coeffs();

    const gg::BaselineComparison cmp =
        gg::compare_baselines(gate, coeffs, cfg.t1_us, cfg.t2(), cfg.sweep.delta_max_khz,
                              cfg.sweep.points, sim_config(cfg));
    gg::write_curves_csv(cfg.out_dir + "/curve.csv", {cmp.optimized, cmp.gaussian, cmp.square});

    json summary;
    summary["gate"] = cfg.gate;
    summary["t_fwhm_us"] = cmp.t_fwhm_us;
    for (const auto* curve : {&cmp.optimized, &cmp.gaussian, &cmp.square}) {
        json entry;
        entry["bandwidth_099"] = bandwidth_json(*curve, 0.99);
        entry["band_average"] = gg::band_average(*curve, cfg.sweep.delta_max_khz);
        entry["resonant_fidelity"] = curve->value_at_exact(0.0);
        summary[curve->label] = entry;
    }
    gg::atomic_write_text(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
    gg::write_manifest(cfg.out_dir, cfg, "compare");

    std::printf("compare: gate=%s t_fwhm=%.4f us; band averages opt=%.6f gauss=%.6f square=%.6f\n",
                cfg.gate.c_str(), cmp.t_fwhm_us,
                summary["optimized"]["band_average"].get<double>(),
                summary["gaussian"]["band_average"].get<double>(),
                summary["square"]["band_average"].get<double>());
    return 0;
}

int cmd_heatmap(const gg::RunConfig& cfg) {
    prepare_out_dir(cfg);
    const gg::GateParams gate = gg::GateParams::from_name(cfg.gate);
    const std::vector<double> coeffs = cfg.resolve_coeffs();

    const gg::RobustnessMap map = gg::a2_robustness_map(
        gate, coeffs, cfg.t1_us, cfg.t2(), cfg.heatmap.eta_max, cfg.heatmap.eta_points,
        cfg.heatmap.delta_max_khz, cfg.heatmap.delta_points, sim_config(cfg));
    gg::write_map_csv(cfg.out_dir + "/map.csv", map);
    gg::write_contour_csv(cfg.out_dir + "/contour.csv", map);

    double min_f = 1.0, max_f = 0.0;
    for (double f : map.grid) {
        min_f = std::min(min_f, f);
        max_f = std::max(max_f, f);
    }
    json summary;
    summary["gate"] = cfg.gate;
    summary["coefficients"] = coeff_label(cfg);
    summary["eta_max"] = cfg.heatmap.eta_max;
    summary["delta_max_khz"] = cfg.heatmap.delta_max_khz;
    summary["grid"] = {{"eta_points", cfg.heatmap.eta_points},
                       {"delta_points", cfg.heatmap.delta_points}};
    summary["min_fidelity"] = min_f;
    summary["max_fidelity"] = max_f;
    summary["contour_segments"] = map.contour_099.size() / 2;
    gg::atomic_write_text(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
    gg::write_manifest(cfg.out_dir, cfg, "heatmap");

    std::printf("heatmap: gate=%s %dx%d grid, fidelity range [%.6f, 1], %zu contour segments\n",
                cfg.gate.c_str(), cfg.heatmap.eta_points, cfg.heatmap.delta_points, min_f,
                map.contour_099.size() / 2);
    return 0;
}

int cmd_optimize(const gg::RunConfig& cfg) {
    prepare_out_dir(cfg);
    const gg::GateParams gate = gg::GateParams::from_name(cfg.gate);
    const std::vector<double> warm = cfg.resolve_coeffs();

    gg::ObjectiveSpec spec;
    spec.gate = gate;
    spec.initial = gg::QubitState::from_angles(cfg.theta0, cfg.phi0);
    spec.t1 = cfg.t1_us;
    spec.t2 = cfg.t2();
    spec.sim = sim_config(cfg);
    const int n = cfg.optimize.grid_points;
    for (int i = 0; i < n; ++i) {
        const double khz = (n == 1) ? 0.0
                                    : -cfg.optimize.band_khz +
                                          2.0 * cfg.optimize.band_khz * i / (n - 1);
        spec.detuning_grid.push_back(gg::khz_to_rad_us(khz));
    }
    if (cfg.optimize.rabi_cap_mhz) {
        spec.rabi_cap = *cfg.optimize.rabi_cap_mhz * 2.0 * gg::kPi;
    }

    gg::OptimizerSettings settings;
    settings.max_iterations = cfg.optimize.max_iterations;
    settings.tolerance = cfg.optimize.tolerance;
    settings.restarts = cfg.optimize.restarts;
    settings.seed = cfg.seed;
    settings.goal_infidelity = cfg.optimize.goal_infidelity;
    settings.initial_step = cfg.optimize.initial_step;

    const gg::OptimizationReport report =
        gg::optimize(spec, gg::project_free_dofs(warm), settings);

    json rep;
    rep["gate"] = cfg.gate;
    rep["warm_start"] = coeff_label(cfg);
    rep["band_khz"] = cfg.optimize.band_khz;
    json grid_khz = json::array();
    for (double d : spec.detuning_grid) grid_khz.push_back(gg::rad_us_to_khz(d));
    rep["detuning_grid_khz"] = grid_khz;
    rep["coefficients"] = report.coeffs;
    rep["worst_infidelity"] = report.worst_infidelity;
    rep["penalty"] = report.penalty;
    rep["per_point_fidelity"] = report.per_point_fidelity;
    rep["iterations"] = report.iterations;
    rep["evaluations"] = report.evaluations;
    rep["restarts_used"] = report.restarts_used;
    rep["converged"] = report.converged;
    rep["asymmetry"] = report.asymmetry;
    rep["peak_two_color_rabi_mhz"] = report.peak_two_color_rabi / (2.0 * gg::kPi);
    rep["seed"] = report.seed;
    gg::atomic_write_text(cfg.out_dir + "/report.json", rep.dump(2) + "\n");

    json coeffs_out;
    coeffs_out["coefficients"] = report.coeffs;
    coeffs_out["label"] = "optimized";
    gg::atomic_write_text(cfg.out_dir + "/coefficients.json", coeffs_out.dump(2) + "\n");
    gg::write_manifest(cfg.out_dir, cfg, "optimize");

    std::printf(
        "optimize: gate=%s band=+-%g kHz worst_infidelity=%.6f converged=%s "
        "(%d iterations, %d evaluations, %d restarts)\n",
        cfg.gate.c_str(), cfg.optimize.band_khz, report.worst_infidelity,
        report.converged ? "true" : "false", report.iterations, report.evaluations,
        report.restarts_used);
    return 0;  // a non-converged report is a valid result, not a failure
}

int cmd_export_awg(const gg::RunConfig& cfg) {
    if (!cfg.awg) {
        throw gg::ConfigError(
            "export-awg requires an \"awg\" config block (f1_mhz, f0_mhz, f10_mhz, "
            "conversion_c, sample_rate_per_us)");
    }
    prepare_out_dir(cfg);
    const gg::GateParams gate = gg::GateParams::from_name(cfg.gate);
    const std::vector<double> coeffs = cfg.resolve_coeffs();
    const gg::PulseSequence seq = gg::build_sequence(gate, coeffs, cfg.t1_us, cfg.t2());

    gg::RfSpec spec;
    spec.f1_mhz = cfg.awg->f1_mhz;
    spec.f0_mhz = cfg.awg->f0_mhz;
    spec.f10_mhz = cfg.awg->f10_mhz;
    spec.conversion_c = cfg.awg->conversion_c;
    spec.sample_rate = cfg.awg->sample_rate_per_us;

    const gg::Waveform wave = gg::synthesize(seq, spec);
    gg::export_waveform(wave, cfg.out_dir + "/waveform", cfg.awg->format);

    const gg::WaveformInfo info = gg::waveform_info(seq, spec);
    const double ideal = 0.5 * spec.conversion_c * spec.conversion_c * gg::two_color_energy(seq);
    json j;
    j["gate"] = cfg.gate;
    j["samples"] = wave.samples.size();
    j["rate_per_us"] = wave.rate;
    j["duration_us"] = wave.duration_us();
    j["energy"] = info.energy;
    j["energy_expected"] = ideal;
    j["energy_ratio"] = info.energy / ideal;
    j["max_envelope_slew_per_us2"] = info.max_envelope_slew;
    j["envelope_bw99_mhz"] = info.envelope_bw99_mhz;
    gg::atomic_write_text(cfg.out_dir + "/info.json", j.dump(2) + "\n");
    gg::write_manifest(cfg.out_dir, cfg, "export-awg");

    std::printf("export-awg: gate=%s %zu samples at %g/us, energy ratio %.6f, bw99 %.3f MHz\n",
                cfg.gate.c_str(), wave.samples.size(), wave.rate, info.energy / ideal,
                info.envelope_bw99_mhz);
    return 0;
}

// Preset verification battery: per gate, resonant fidelity, dark-state
// invariance, 0.99 bandwidth against the preset's claimed band, and band
// average. Prints one [PASS]/[FAIL] line per check; exit 1 on any FAIL.
int cmd_verify(const gg::RunConfig& cfg) {
    prepare_out_dir(cfg);
    if (cfg.coeff_source != "preset") {
        throw gg::ConfigError("verify runs on a preset; pass --preset Op1 or Op2");
    }
    const std::vector<double> coeffs = cfg.resolve_coeffs();
    const double claimed_band_khz = (cfg.preset == "Op2" || cfg.preset == "op2") ? 600.0 : 410.0;
    const double avg_threshold = (claimed_band_khz == 600.0) ? 0.999 : 0.99;

    const char* gate_names[] = {"sigma_x", "sigma_y", "sigma_z", "hadamard"};
    json checks = json::array();
    int failures = 0;

    auto record = [&](const std::string& gate, const std::string& name, bool pass, double value,
                      const std::string& detail) {
        std::printf("[%s] %s %s = %s\n", pass ? "PASS" : "FAIL", gate.c_str(), name.c_str(),
                    detail.c_str());
        checks.push_back(json{{"gate", gate},
                              {"check", name},
                              {"pass", pass},
                              {"value", value},
                              {"detail", detail}});
        if (!pass) ++failures;
    };

    for (const char* gate_name : gate_names) {
        const gg::GateParams gate = gg::GateParams::from_name(gate_name);
        const gg::PresetVerification v =
            gg::verify_preset(coeffs, cfg.preset, gate, cfg.t1_us, cfg.sweep.delta_max_khz,
                              cfg.sweep.points);

        const double f0 = v.curve.value_at_exact(0.0);
        record(gate_name, "resonant_fidelity", f0 >= 1.0 - 1e-6, f0,
               gg::format_g9(f0) + " (threshold 0.999999)");

        const gg::PulseSequence seq =
            gg::build_sequence(gate, coeffs, cfg.t1_us, cfg.t2());
        const gg::DarkBrightCheck db = gg::dark_state_invariance_check(seq, sim_config(cfg));
        record(gate_name, "dark_state_invariance", db.worst_deviation() <= 1e-9,
               db.worst_deviation(),
               gg::format_g9(db.worst_deviation()) + " max deviation (threshold 1e-9)");

        const bool bw_ok = v.has_bandwidth && v.bandwidth_lo_khz <= -claimed_band_khz &&
                           v.bandwidth_hi_khz >= claimed_band_khz;
        const std::string bw_detail =
            v.has_bandwidth
                ? "[" + gg::format_g9(v.bandwidth_lo_khz) + ", " +
                      gg::format_g9(v.bandwidth_hi_khz) + "] kHz (target contains +-" +
                      gg::format_g9(claimed_band_khz) + ")"
                : "no 0.99 plateau";
        record(gate_name, "bandwidth_099", bw_ok,
               v.has_bandwidth ? v.bandwidth_hi_khz : 0.0, bw_detail);

        gg::FidelityCurve curve = v.curve;
        const double avg = gg::band_average(curve, claimed_band_khz);
        record(gate_name, "band_average", avg >= avg_threshold, avg,
               gg::format_g9(avg) + " over +-" + gg::format_g9(claimed_band_khz) +
                   " kHz (threshold " + gg::format_g9(avg_threshold) + ")");
    }

    json out;
    out["preset"] = cfg.preset;
    out["claimed_band_khz"] = claimed_band_khz;
    out["checks"] = checks;
    out["failures"] = failures;
    gg::atomic_write_text(cfg.out_dir + "/verify.json", out.dump(2) + "\n");
    gg::write_manifest(cfg.out_dir, cfg, "verify");

    std::printf("verify: %s - %d of %zu checks failed\n", cfg.preset.c_str(), failures,
                checks.size());
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-pair robust pulse synthesis for three-level lambda-system qubit gates"};
    app.require_subcommand(1);

    FlagOverrides flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "JSON configuration file");
        sub->add_option("--gate", flags.gate, "gate name: sigma_x | sigma_y | sigma_z | hadamard");
        sub->add_option("--preset", flags.preset, "coefficient preset: Op1 | Op2");
        sub->add_option("--t1-us", flags.t1_us, "first pulse-pair duration in us")
            ->each([&](const std::string&) { flags.t1_set = true; });
        sub->add_option("--seed", flags.seed, "optimizer RNG seed")
            ->each([&](const std::string&) { flags.seed_set = true; });
        sub->add_option("--out-dir", flags.out_dir, "output directory");
        sub->add_option("--points", flags.points, "grid points (sweep/compare) or trace points")
            ->each([&](const std::string&) { flags.points_set = true; });
    };

    CLI::App* sim = app.add_subcommand("simulate", "propagate one run and write the trace");
    add_common(sim);
    sim->add_option("--delta-khz", flags.delta_khz, "detuning for the run (kHz)")
        ->each([&](const std::string&) { flags.delta_set = true; });

    add_common(app.add_subcommand("sweep", "fidelity vs detuning curve"));
    add_common(app.add_subcommand("compare", "optimized vs gaussian vs square baselines"));
    add_common(app.add_subcommand("heatmap", "a2-variation robustness map and 0.99 contour"));
    add_common(app.add_subcommand("optimize", "minimax coefficient search"));
    add_common(app.add_subcommand("export-awg", "synthesize and export the two-tone RF waveform"));
    add_common(app.add_subcommand("verify", "run the verification battery for a preset"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion") {
            return app.exit(e);
        }
        app.exit(e);
        return 2;  // bad invocation is a configuration problem
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        const gg::RunConfig cfg = effective_config(flags, sub);
        if (sub == "simulate") return cmd_simulate(cfg);
        if (sub == "sweep") return cmd_sweep(cfg);
        if (sub == "compare") return cmd_compare(cfg);
        if (sub == "heatmap") return cmd_heatmap(cfg);
        if (sub == "optimize") return cmd_optimize(cfg);
        if (sub == "export-awg") return cmd_export_awg(cfg);
        if (sub == "verify") return cmd_verify(cfg);
        std::fprintf(stderr, "error: unknown subcommand %s\n", sub.c_str());
        return 2;
    } catch (const gg::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
