#include "geomgate/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace geomgate {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Low-level file helpers

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

void write_stream_or_throw(const std::string& tmp, const std::string& final_path,
                           const std::string& payload) {
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp + " for writing: " +
                                     std::strerror(errno));
        }
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp + ": " + std::strerror(errno));
    }
    if (std::rename(tmp.c_str(), final_path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("rename " + tmp + " -> " + final_path + " failed: " +
                                 std::strerror(errno));
    }
}

}  // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
    write_stream_or_throw(path + ".tmp", path, content);
}

void atomic_write_bytes(const std::string& path, const std::string& bytes) {
    write_stream_or_throw(path + ".tmp", path, bytes);
}

std::string read_file_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw std::runtime_error("read failed for " + path);
    return ss.str();
}

// ---------------------------------------------------------------------------
// CSV writers

void write_curves_csv(const std::string& path, const std::vector<FidelityCurve>& curves) {
    std::string out = "delta_khz,fidelity,label\n";
    for (const auto& curve : curves) {
        for (const auto& [d, f] : curve.points) {
            out += format_g9(d);
            out += ',';
            out += format_g9(f);
            out += ',';
            out += curve.label;
            out += '\n';
        }
    }
    atomic_write_text(path, out);
}

void write_map_csv(const std::string& path, const RobustnessMap& map) {
    std::string out = "eta,delta_khz,fidelity\n";
    for (size_t ie = 0; ie < map.eta_axis.size(); ++ie) {
        for (size_t id = 0; id < map.delta_axis_khz.size(); ++id) {
            out += format_g9(map.eta_axis[ie]);
            out += ',';
            out += format_g9(map.delta_axis_khz[id]);
            out += ',';
            out += format_g9(map.at(ie, id));
            out += '\n';
        }
    }
    atomic_write_text(path, out);
}

void write_contour_csv(const std::string& path, const RobustnessMap& map) {
    std::string out = "eta,delta_khz\n";
    for (const auto& [eta, delta] : map.contour_099) {
        out += format_g9(eta);
        out += ',';
        out += format_g9(delta);
        out += '\n';
    }
    atomic_write_text(path, out);
}

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
    std::string out = "t_us,p1,p0,pe\n";
    for (const auto& pt : trace) {
        out += format_g9(pt.t);
        out += ',';
        out += format_g9(pt.p1);
        out += ',';
        out += format_g9(pt.p0);
        out += ',';
        out += format_g9(pt.pe);
        out += '\n';
    }
    atomic_write_text(path, out);
}

void write_envelope_csv(const std::string& path, const PulseSequence& seq, int n_points) {
    if (n_points < 2) throw std::invalid_argument("envelope CSV needs at least 2 points");
    std::string out = "t_us,omega,omega1,omega0_re,omega0_im\n";
    for (int i = 0; i < n_points; ++i) {
        const double t = seq.t2 * static_cast<double>(i) / (n_points - 1);
        // The boundary sample t = t1 belongs to pair 2 (its local t = 0).
        const PulsePair& pair = (t < seq.t1) ? seq.pair1 : seq.pair2;
        const double t_local = (t < seq.t1) ? t : t - seq.t1;
        const double omega = envelope_value(pair.envelope, t_local);
        const ToneValues tones = tone_values(pair, t_local);
        out += format_g9(t);
        out += ',';
        out += format_g9(omega);
        out += ',';
        out += format_g9(tones.omega1);
        out += ',';
        out += format_g9(tones.omega0.real());
        out += ',';
        out += format_g9(tones.omega0.imag());
        out += '\n';
    }
    atomic_write_text(path, out);
}

// ---------------------------------------------------------------------------
// Sequence serialization

namespace {

json pair_to_json(const PulsePair& pair) {
    json j;
    j["theta"] = pair.params.theta;
    j["phi"] = pair.params.phi;
    j["role"] = pair.role == PairRole::gate ? "gate" : "compensation";
    switch (pair.envelope.kind) {
        case EnvelopeKind::cosine: j["kind"] = "cosine"; break;
        case EnvelopeKind::gaussian: j["kind"] = "gaussian"; break;
        case EnvelopeKind::square: j["kind"] = "square"; break;
    }
    j["duration_us"] = pair.envelope.duration;
    j["area"] = pair.envelope.area;
    if (!pair.envelope.coeffs.empty()) j["coefficients"] = pair.envelope.coeffs;
    return j;
}

}  // namespace

json sequence_to_json(const PulseSequence& seq) {
    json j;
    j["t1_us"] = seq.t1;
    j["t2_us"] = seq.t2;
    j["pair1"] = pair_to_json(seq.pair1);
    j["pair2"] = pair_to_json(seq.pair2);
    return j;
}

// ---------------------------------------------------------------------------
// Run configuration

namespace {

void expect_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + " must be a JSON object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError("unknown key \"" + key + "\" in " + ctx);
    }
}

double get_num(const json& j, const char* key, double fallback, const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(ctx + "." + key + " must be a number");
    return j[key].get<double>();
}

double require_num(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + "." + key + " is required");
    if (!j[key].is_number()) throw ConfigError(ctx + "." + key + " must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback, const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError(ctx + "." + key + " must be an integer");
    return j[key].get<int>();
}

bool get_bool(const json& j, const char* key, bool fallback, const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) throw ConfigError(ctx + "." + key + " must be a boolean");
    return j[key].get<bool>();
}

std::string get_str(const json& j, const char* key, const std::string& fallback,
                    const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) throw ConfigError(ctx + "." + key + " must be a string");
    return j[key].get<std::string>();
}

void require_odd_min(int value, int min_value, const std::string& field) {
    if (value < min_value) {
        throw ConfigError(field + " must be >= " + std::to_string(min_value));
    }
    if (value % 2 == 0) throw ConfigError(field + " must be odd (so 0 is a grid point)");
}

void parse_coefficients(const json& j, RunConfig& cfg) {
    const json& c = j["coefficients"];
    expect_object(c, "coefficients");
    check_keys(c, {"preset", "file", "inline"}, "coefficients");
    const int sources = static_cast<int>(c.contains("preset")) +
                        static_cast<int>(c.contains("file")) +
                        static_cast<int>(c.contains("inline"));
    if (sources != 1) {
        throw ConfigError("coefficients must contain exactly one of preset | file | inline");
    }
    if (c.contains("preset")) {
        cfg.coeff_source = "preset";
        cfg.preset = get_str(c, "preset", "", "coefficients");
        try {
            presets::by_name(cfg.preset);
        } catch (const std::exception&) {
            throw ConfigError("coefficients.preset must be Op1 or Op2, got \"" + cfg.preset +
                              "\"");
        }
    } else if (c.contains("file")) {
        cfg.coeff_source = "file";
        cfg.coeff_file = get_str(c, "file", "", "coefficients");
        if (cfg.coeff_file.empty()) throw ConfigError("coefficients.file must be a path");
    } else {
        cfg.coeff_source = "inline";
        if (!c["inline"].is_array()) throw ConfigError("coefficients.inline must be an array");
        cfg.inline_coeffs.clear();
        for (const auto& v : c["inline"]) {
            if (!v.is_number()) throw ConfigError("coefficients.inline entries must be numbers");
            cfg.inline_coeffs.push_back(v.get<double>());
        }
        if (cfg.inline_coeffs.size() != 8) {
            throw ConfigError("coefficients.inline must hold exactly 8 values, got " +
                              std::to_string(cfg.inline_coeffs.size()));
        }
    }
}

}  // namespace

std::vector<double> RunConfig::resolve_coeffs() const {
    if (coeff_source == "preset") return presets::by_name(preset);
    if (coeff_source == "inline") return inline_coeffs;
    if (coeff_source == "file") {
        json j;
        try {
            j = json::parse(read_file_text(coeff_file));
        } catch (const json::parse_error& e) {
            throw ConfigError("coefficient file " + coeff_file + ": " + e.what());
        }
        const json* arr = nullptr;
        if (j.is_array()) {
            arr = &j;
        } else if (j.is_object() && j.contains("coefficients") && j["coefficients"].is_array()) {
            arr = &j["coefficients"];
        } else {
            throw ConfigError("coefficient file " + coeff_file +
                              " must be an array or an object with a \"coefficients\" array");
        }
        std::vector<double> coeffs;
        for (const auto& v : *arr) {
            if (!v.is_number()) {
                throw ConfigError("coefficient file " + coeff_file + ": entries must be numbers");
            }
            coeffs.push_back(v.get<double>());
        }
        if (coeffs.size() != 8) {
            throw ConfigError("coefficient file " + coeff_file + " must hold exactly 8 values");
        }
        return coeffs;
    }
    throw ConfigError("unknown coefficient source \"" + coeff_source + "\"");
}

RunConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    expect_object(j, "config");
    check_keys(j,
               {"gate", "coefficients", "t1_us", "t2_us", "initial_state", "simulate", "sweep",
                "heatmap", "optimize", "awg", "sim", "seed", "out_dir"},
               "config");

    RunConfig cfg;

    cfg.gate = get_str(j, "gate", cfg.gate, "config");
    try {
        GateParams::from_name(cfg.gate);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    if (j.contains("coefficients")) parse_coefficients(j, cfg);

    cfg.t1_us = get_num(j, "t1_us", cfg.t1_us, "config");
    if (!(cfg.t1_us > 0.0)) throw ConfigError("t1_us must be > 0");
    if (j.contains("t2_us")) {
        cfg.t2_us = get_num(j, "t2_us", 0.0, "config");
        if (!(*cfg.t2_us > cfg.t1_us)) throw ConfigError("t2_us must be > t1_us");
    }

    if (j.contains("initial_state")) {
        const json& s = j["initial_state"];
        expect_object(s, "initial_state");
        check_keys(s, {"theta0", "phi0"}, "initial_state");
        cfg.theta0 = get_num(s, "theta0", cfg.theta0, "initial_state");
        cfg.phi0 = get_num(s, "phi0", cfg.phi0, "initial_state");
    }

    if (j.contains("simulate")) {
        const json& s = j["simulate"];
        expect_object(s, "simulate");
        check_keys(s, {"delta_khz", "trace_points"}, "simulate");
        cfg.simulate.delta_khz = get_num(s, "delta_khz", cfg.simulate.delta_khz, "simulate");
        cfg.simulate.trace_points =
            get_int(s, "trace_points", cfg.simulate.trace_points, "simulate");
        if (cfg.simulate.trace_points < 2) {
            throw ConfigError("simulate.trace_points must be >= 2");
        }
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        expect_object(s, "sweep");
        check_keys(s, {"delta_max_khz", "points"}, "sweep");
        cfg.sweep.delta_max_khz = get_num(s, "delta_max_khz", cfg.sweep.delta_max_khz, "sweep");
        if (cfg.sweep.delta_max_khz < 0.0) throw ConfigError("sweep.delta_max_khz must be >= 0");
        cfg.sweep.points = get_int(s, "points", cfg.sweep.points, "sweep");
        require_odd_min(cfg.sweep.points, 3, "sweep.points");
    }

    if (j.contains("heatmap")) {
        const json& h = j["heatmap"];
        expect_object(h, "heatmap");
        check_keys(h, {"eta_max", "eta_points", "delta_max_khz", "delta_points"}, "heatmap");
        cfg.heatmap.eta_max = get_num(h, "eta_max", cfg.heatmap.eta_max, "heatmap");
        if (!(cfg.heatmap.eta_max > 0.0)) throw ConfigError("heatmap.eta_max must be > 0");
        cfg.heatmap.eta_points = get_int(h, "eta_points", cfg.heatmap.eta_points, "heatmap");
        require_odd_min(cfg.heatmap.eta_points, 3, "heatmap.eta_points");
        cfg.heatmap.delta_max_khz =
            get_num(h, "delta_max_khz", cfg.heatmap.delta_max_khz, "heatmap");
        if (cfg.heatmap.delta_max_khz < 0.0) {
            throw ConfigError("heatmap.delta_max_khz must be >= 0");
        }
        cfg.heatmap.delta_points = get_int(h, "delta_points", cfg.heatmap.delta_points, "heatmap");
        require_odd_min(cfg.heatmap.delta_points, 3, "heatmap.delta_points");
    }

    if (j.contains("optimize")) {
        const json& o = j["optimize"];
        expect_object(o, "optimize");
        check_keys(o,
                   {"band_khz", "grid_points", "max_iterations", "tolerance", "restarts",
                    "goal_infidelity", "initial_step", "rabi_cap_mhz"},
                   "optimize");
        cfg.optimize.band_khz = get_num(o, "band_khz", cfg.optimize.band_khz, "optimize");
        if (cfg.optimize.band_khz < 0.0) throw ConfigError("optimize.band_khz must be >= 0");
        cfg.optimize.grid_points = get_int(o, "grid_points", cfg.optimize.grid_points, "optimize");
        if (cfg.optimize.grid_points < 1) throw ConfigError("optimize.grid_points must be >= 1");
        if (cfg.optimize.grid_points % 2 == 0) {
            throw ConfigError("optimize.grid_points must be odd (so 0 is a grid point)");
        }
        cfg.optimize.max_iterations =
            get_int(o, "max_iterations", cfg.optimize.max_iterations, "optimize");
        if (cfg.optimize.max_iterations < 1) {
            throw ConfigError("optimize.max_iterations must be >= 1");
        }
        cfg.optimize.tolerance = get_num(o, "tolerance", cfg.optimize.tolerance, "optimize");
        if (!(cfg.optimize.tolerance > 0.0)) throw ConfigError("optimize.tolerance must be > 0");
        cfg.optimize.restarts = get_int(o, "restarts", cfg.optimize.restarts, "optimize");
        if (cfg.optimize.restarts < 1) throw ConfigError("optimize.restarts must be >= 1");
        cfg.optimize.goal_infidelity =
            get_num(o, "goal_infidelity", cfg.optimize.goal_infidelity, "optimize");
        if (!(cfg.optimize.goal_infidelity > 0.0)) {
            throw ConfigError("optimize.goal_infidelity must be > 0");
        }
        cfg.optimize.initial_step =
            get_num(o, "initial_step", cfg.optimize.initial_step, "optimize");
        if (!(cfg.optimize.initial_step > 0.0)) {
            throw ConfigError("optimize.initial_step must be > 0");
        }
        if (o.contains("rabi_cap_mhz")) {
            if (o["rabi_cap_mhz"].is_null()) {
                cfg.optimize.rabi_cap_mhz.reset();
            } else {
                cfg.optimize.rabi_cap_mhz = require_num(o, "rabi_cap_mhz", "optimize");
                if (!(*cfg.optimize.rabi_cap_mhz > 0.0)) {
                    throw ConfigError("optimize.rabi_cap_mhz must be > 0");
                }
            }
        }
    }

    if (j.contains("awg")) {
        const json& a = j["awg"];
        expect_object(a, "awg");
        check_keys(a, {"f1_mhz", "f0_mhz", "f10_mhz", "conversion_c", "sample_rate_per_us",
                       "format"},
                   "awg");
        AwgBlock awg;
        awg.f1_mhz = require_num(a, "f1_mhz", "awg");
        awg.f0_mhz = require_num(a, "f0_mhz", "awg");
        awg.f10_mhz = require_num(a, "f10_mhz", "awg");
        awg.conversion_c = get_num(a, "conversion_c", awg.conversion_c, "awg");
        awg.sample_rate_per_us = require_num(a, "sample_rate_per_us", "awg");
        awg.format = get_str(a, "format", awg.format, "awg");
        if (awg.format != "csv" && awg.format != "f32") {
            throw ConfigError("awg.format must be \"csv\" or \"f32\"");
        }
        if (!(awg.conversion_c > 0.0)) throw ConfigError("awg.conversion_c must be > 0");
        if (!(awg.f1_mhz > 0.0) || !(awg.f0_mhz > 0.0)) {
            throw ConfigError("awg tone frequencies must be > 0");
        }
        if (std::abs(awg.f1_mhz - awg.f0_mhz - awg.f10_mhz) > 1e-9) {
            throw ConfigError("awg: f1_mhz - f0_mhz must equal f10_mhz (the qubit splitting)");
        }
        if (!(awg.sample_rate_per_us > 2.0 * std::max(awg.f1_mhz, awg.f0_mhz))) {
            throw ConfigError("awg.sample_rate_per_us must exceed twice the highest tone");
        }
        cfg.awg = awg;
    }

    if (j.contains("sim")) {
        const json& s = j["sim"];
        expect_object(s, "sim");
        check_keys(s, {"steps_per_pair", "auto_steps", "norm_ceiling"}, "sim");
        cfg.sim.steps_per_pair = get_int(s, "steps_per_pair", cfg.sim.steps_per_pair, "sim");
        if (cfg.sim.steps_per_pair < 16) throw ConfigError("sim.steps_per_pair must be >= 16");
        cfg.sim.auto_steps = get_bool(s, "auto_steps", cfg.sim.auto_steps, "sim");
        cfg.sim.norm_ceiling = get_num(s, "norm_ceiling", cfg.sim.norm_ceiling, "sim");
        if (!(cfg.sim.norm_ceiling > 0.0)) throw ConfigError("sim.norm_ceiling must be > 0");
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
            throw ConfigError("seed must be a non-negative integer");
        }
        const auto seed = j["seed"].get<std::int64_t>();
        if (seed < 0) throw ConfigError("seed must be a non-negative integer");
        cfg.seed = static_cast<std::uint64_t>(seed);
    }

    cfg.out_dir = get_str(j, "out_dir", cfg.out_dir, "config");
    if (cfg.out_dir.empty()) throw ConfigError("out_dir must be a non-empty path");

    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::string text;
    try {
        text = read_file_text(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return parse_config_json(text);
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["gate"] = cfg.gate;
    json coeff;
    if (cfg.coeff_source == "preset") {
        coeff["preset"] = cfg.preset;
    } else if (cfg.coeff_source == "file") {
        coeff["file"] = cfg.coeff_file;
    } else {
        coeff["inline"] = cfg.inline_coeffs;
    }
    j["coefficients"] = coeff;
    j["t1_us"] = cfg.t1_us;
    j["t2_us"] = cfg.t2();
    j["initial_state"] = {{"theta0", cfg.theta0}, {"phi0", cfg.phi0}};
    j["simulate"] = {{"delta_khz", cfg.simulate.delta_khz},
                     {"trace_points", cfg.simulate.trace_points}};
    j["sweep"] = {{"delta_max_khz", cfg.sweep.delta_max_khz}, {"points", cfg.sweep.points}};
    j["heatmap"] = {{"eta_max", cfg.heatmap.eta_max},
                    {"eta_points", cfg.heatmap.eta_points},
                    {"delta_max_khz", cfg.heatmap.delta_max_khz},
                    {"delta_points", cfg.heatmap.delta_points}};
    j["optimize"] = {{"band_khz", cfg.optimize.band_khz},
                     {"grid_points", cfg.optimize.grid_points},
                     {"max_iterations", cfg.optimize.max_iterations},
                     {"tolerance", cfg.optimize.tolerance},
                     {"restarts", cfg.optimize.restarts},
                     {"goal_infidelity", cfg.optimize.goal_infidelity},
                     {"initial_step", cfg.optimize.initial_step}};
    if (cfg.optimize.rabi_cap_mhz) {
        j["optimize"]["rabi_cap_mhz"] = *cfg.optimize.rabi_cap_mhz;
    } else {
        j["optimize"]["rabi_cap_mhz"] = nullptr;
    }
    if (cfg.awg) {
        j["awg"] = {{"f1_mhz", cfg.awg->f1_mhz},
                    {"f0_mhz", cfg.awg->f0_mhz},
                    {"f10_mhz", cfg.awg->f10_mhz},
                    {"conversion_c", cfg.awg->conversion_c},
                    {"sample_rate_per_us", cfg.awg->sample_rate_per_us},
                    {"format", cfg.awg->format}};
    } else {
        j["awg"] = nullptr;
    }
    j["sim"] = {{"steps_per_pair", cfg.sim.steps_per_pair},
                {"auto_steps", cfg.sim.auto_steps},
                {"norm_ceiling", cfg.sim.norm_ceiling}};
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    return j;
}

std::string config_hash(const RunConfig& cfg) {
    // The output directory is plumbing, not part of the experiment: two runs
    // that differ only in where they write must hash identically.
    json canonical = config_to_json(cfg);
    canonical.erase("out_dir");
    const std::string dump = canonical.dump();
    std::uint64_t hash = 14695981039346656037ULL;  // FNV-1a 64 offset basis
    for (unsigned char c : dump) {
        hash ^= c;
        hash *= 1099511628211ULL;  // FNV prime
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_manifest(const std::string& out_dir, const RunConfig& cfg,
                    const std::string& command) {
    json j;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    j["version"] = kToolVersion;
    j["command"] = command;
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    j["generated_at"] = stamp;
    atomic_write_text(out_dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace geomgate
