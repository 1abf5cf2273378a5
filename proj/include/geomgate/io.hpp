#pragma once

// Artifact plumbing shared by the CLI and tests: atomic file writes, the CSV
// schemas (9 significant digits, stable column names), run-configuration
// parsing with strict schema validation, and the per-run manifest.
//
// CSV schemas:
//   curve.csv    delta_khz,fidelity,label
//   map.csv      eta,delta_khz,fidelity
//   contour.csv  eta,delta_khz
//   trace.csv    t_us,p1,p0,pe
//   envelope.csv t_us,omega,omega1,omega0_re,omega0_im

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomgate/analysis.hpp"
#include "geomgate/dynamics.hpp"
#include "geomgate/pulse_model.hpp"

namespace geomgate {

inline constexpr const char* kToolVersion = "1.0.0";

// Schema or syntax problem in a run configuration; the CLI maps this to
// exit code 2. The message carries the offending field or parse location.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Low-level file helpers

// %.9g formatting used by every CSV value.
std::string format_g9(double v);

// Write-to-temp + rename so readers never observe a partial file. Throws
// std::runtime_error with the OS error message on failure.
void atomic_write_text(const std::string& path, const std::string& content);
void atomic_write_bytes(const std::string& path, const std::string& bytes);

std::string read_file_text(const std::string& path);  // throws on failure

// ---------------------------------------------------------------------------
// CSV writers (all atomic)

void write_curves_csv(const std::string& path, const std::vector<FidelityCurve>& curves);
void write_map_csv(const std::string& path, const RobustnessMap& map);
void write_contour_csv(const std::string& path, const RobustnessMap& map);
void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace);
// Envelope and signed tone components sampled on [0, t2] (n_points >= 2).
void write_envelope_csv(const std::string& path, const PulseSequence& seq, int n_points);

// ---------------------------------------------------------------------------
// Sequence serialization (JSON: gate params, durations, coefficients, areas)

nlohmann::json sequence_to_json(const PulseSequence& seq);

// ---------------------------------------------------------------------------
// Run configuration

struct SimulateBlock {
    double delta_khz = 0.0;  // detuning for the single simulated run
    int trace_points = 1001;
};

struct SweepBlock {
    double delta_max_khz = 600.0;
    int points = 121;  // odd, >= 3
};

struct HeatmapBlock {
    double eta_max = 0.5;
    int eta_points = 21;          // odd, >= 3
    double delta_max_khz = 120.0;
    int delta_points = 41;        // odd, >= 3
};

struct OptimizeBlock {
    double band_khz = 410.0;   // objective grid spans [-band, band]
    int grid_points = 5;       // odd, >= 1
    int max_iterations = 2000;
    double tolerance = 1e-6;
    int restarts = 8;
    double goal_infidelity = 0.01;
    double initial_step = 0.1;
    std::optional<double> rabi_cap_mhz;  // peak two-color cap, MHz
};

// RF export parameters; the tone frequencies, splitting, conversion constant
// and sample rate describe hardware, so they have no defaults and must be
// supplied explicitly.
struct AwgBlock {
    double f1_mhz = 0.0;
    double f0_mhz = 0.0;
    double f10_mhz = 0.0;
    double conversion_c = 1.0;
    double sample_rate_per_us = 0.0;
    std::string format = "csv";  // "csv" | "f32"
};

struct SimBlock {
    int steps_per_pair = 4000;
    bool auto_steps = true;
    double norm_ceiling = 1e-8;
};

struct RunConfig {
    std::string gate = "sigma_x";  // sigma_x | sigma_y | sigma_z | hadamard

    // Coefficient source: exactly one of preset / file / inline.
    std::string coeff_source = "preset";  // "preset" | "file" | "inline"
    std::string preset = "Op1";           // Op1 | Op2
    std::string coeff_file;
    std::vector<double> inline_coeffs;

    double t1_us = 4.0;
    std::optional<double> t2_us;  // defaults to 2 * t1

    // Initial state cos(theta0)|0> + sin(theta0) e^{i phi0}|1>; the default
    // (pi/2, 0) is |1>.
    double theta0 = kPi / 2.0;
    double phi0 = 0.0;

    SimulateBlock simulate;
    SweepBlock sweep;
    HeatmapBlock heatmap;
    OptimizeBlock optimize;
    std::optional<AwgBlock> awg;  // required by export-awg only
    SimBlock sim;

    std::uint64_t seed = 1234;
    std::string out_dir = "out";

    double t2() const { return t2_us ? *t2_us : 2.0 * t1_us; }
    // Materializes the coefficient vector from the configured source (reads
    // coeff_file when source == "file"). Throws ConfigError on bad sources.
    std::vector<double> resolve_coeffs() const;
};

// Strict parser: unknown keys anywhere, wrong types, or invalid values raise
// ConfigError naming the field (or the parse position for syntax errors).
RunConfig parse_config_json(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical JSON image of the effective configuration (defaults materialized,
// keys sorted by the JSON library) - the hashing and reproducibility anchor.
nlohmann::json config_to_json(const RunConfig& cfg);

// FNV-1a 64-bit hash of the canonical dump, as a 16-hex-digit string.
std::string config_hash(const RunConfig& cfg);

// Writes <out_dir>/manifest.json: config hash, seed, tool version, the
// invoked subcommand, and a UTC timestamp (the only non-reproducible field).
void write_manifest(const std::string& out_dir, const RunConfig& cfg,
                    const std::string& command);

}  // namespace geomgate
