#include "geomgate/awg_export.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "geomgate/io.hpp"

namespace geomgate {

void RfSpec::validate() const {
    if (!(f1_mhz > 0.0) || !(f0_mhz > 0.0)) {
        throw std::invalid_argument("RfSpec: tone frequencies must be > 0");
    }
    if (!(f10_mhz > 0.0)) throw std::invalid_argument("RfSpec: f10_mhz must be > 0");
    if (std::abs(f1_mhz - f0_mhz - f10_mhz) > 1e-9) {
        throw std::invalid_argument("RfSpec: f1_mhz - f0_mhz must equal f10_mhz");
    }
    if (!(conversion_c > 0.0)) throw std::invalid_argument("RfSpec: conversion_c must be > 0");
    if (!(sample_rate > 2.0 * std::max(f1_mhz, f0_mhz))) {
        throw std::invalid_argument(
            "RfSpec: sample_rate must exceed twice the highest tone (aliasing guard)");
    }
}

RfTones rf_parameters(const PulsePair& pair, double t_local, double conversion_c) {
    const double omega = envelope_value(pair.envelope, t_local);
    const double s1 = 2.0 * pair.params.b() * omega;  // signed tone-1 component
    const double s0 = 2.0 * pair.params.a() * omega;  // signed tone-0 magnitude

    RfTones tones;
    tones.tone1.amplitude = conversion_c * std::abs(s1);
    tones.tone1.phase = (s1 < 0.0) ? kPi : 0.0;
    tones.tone0.amplitude = conversion_c * std::abs(s0);
    tones.tone0.phase = -pair.params.phi + ((s0 < 0.0) ? kPi : 0.0);
    return tones;
}

Waveform synthesize(const PulseSequence& seq, const RfSpec& spec) {
    spec.validate();

    Waveform w;
    w.rate = spec.sample_rate;
    w.channels = {"tone1+tone0"};
    const auto count = static_cast<std::size_t>(std::ceil(seq.t2 * spec.sample_rate));
    w.samples.reserve(count);

    const double w1 = 2.0 * kPi * spec.f1_mhz;  // rad/us
    const double w0 = 2.0 * kPi * spec.f0_mhz;
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / spec.sample_rate;
        const PulsePair& pair = (t < seq.t1) ? seq.pair1 : seq.pair2;
        const double t_local = (t < seq.t1) ? t : t - seq.t1;
        const RfTones tones = rf_parameters(pair, t_local, spec.conversion_c);
        const double value = tones.tone1.amplitude * std::cos(w1 * t + tones.tone1.phase) +
                             tones.tone0.amplitude * std::cos(w0 * t + tones.tone0.phase);
        if (!std::isfinite(value)) {
            throw std::runtime_error("synthesize: non-finite sample at t = " + std::to_string(t));
        }
        w.samples.push_back(static_cast<float>(value));
    }
    return w;
}

namespace {

// Full convolution with a length-`win` averaging kernel; output length
// n + win - 1.
std::vector<double> boxcar_full(const std::vector<double>& x, int win) {
    std::vector<double> y(x.size() + static_cast<std::size_t>(win) - 1, 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (k < x.size()) acc += x[k];
        if (k >= static_cast<std::size_t>(win)) {
            const std::size_t drop = k - static_cast<std::size_t>(win);
            if (drop < x.size()) acc -= x[drop];
        }
        y[k] = acc / win;
    }
    return y;
}

}  // namespace

std::vector<double> demodulate_tone(const Waveform& w, const RfSpec& spec, double f_mhz,
                                    double static_phase) {
    spec.validate();
    if (w.samples.empty()) return {};
    if (!(w.rate > 0.0)) throw std::invalid_argument("demodulate_tone: waveform rate must be > 0");

    // Boxcar window sized to null the difference frequency f10 (where the
    // other tone lands after mixing); two cascades give a double null and an
    // integer win-1 total group delay.
    const int win = std::max(1, static_cast<int>(std::lround(w.rate / spec.f10_mhz)));

    std::vector<double> mixed(w.samples.size());
    const double wf = 2.0 * kPi * f_mhz;
    for (std::size_t i = 0; i < mixed.size(); ++i) {
        const double t = static_cast<double>(i) / w.rate;
        mixed[i] = 2.0 * static_cast<double>(w.samples[i]) * std::cos(wf * t + static_phase);
    }

    const std::vector<double> stage = boxcar_full(boxcar_full(mixed, win), win);
    std::vector<double> out(w.samples.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = stage[i + static_cast<std::size_t>(win) - 1];
    }
    return out;
}

double two_color_energy(const PulseSequence& seq) {
    // |Omega_1|^2 + |Omega_0|^2 = 4 Omega^2 (A^2 + B^2 = 1), integrated by
    // composite Simpson per pair.
    auto pair_energy = [](const PulsePair& pair) {
        const int intervals = 4096;
        const double h = pair.envelope.duration / intervals;
        double sum = 0.0;
        for (int i = 0; i <= intervals; ++i) {
            const double v = envelope_value(pair.envelope, i * h);
            const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            sum += w * v * v;
        }
        return 4.0 * sum * h / 3.0;
    };
    return pair_energy(seq.pair1) + pair_energy(seq.pair2);
}

WaveformInfo waveform_info(const PulseSequence& seq, const RfSpec& spec) {
    spec.validate();
    WaveformInfo info;

    const Waveform w = synthesize(seq, spec);
    const double dt = 1.0 / spec.sample_rate;
    for (float s : w.samples) info.energy += static_cast<double>(s) * s * dt;

    // Per-tone envelopes on the same grid.
    const std::size_t n = w.samples.size();
    std::vector<double> env1(n), env0(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec.sample_rate;
        const PulsePair& pair = (t < seq.t1) ? seq.pair1 : seq.pair2;
        const double t_local = (t < seq.t1) ? t : t - seq.t1;
        const RfTones tones = rf_parameters(pair, t_local, spec.conversion_c);
        env1[i] = tones.tone1.amplitude;
        env0[i] = tones.tone0.amplitude;
    }

    auto max_slew = [&](const std::vector<double>& e) {
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < e.size(); ++i) {
            worst = std::max(worst, std::abs(e[i + 1] - e[i]) * spec.sample_rate);
        }
        return worst;
    };
    info.max_envelope_slew = std::max(max_slew(env1), max_slew(env0));

    // One-sided 99%-energy bandwidth: walk DFT bins upward until the
    // accumulated spectral energy (Parseval-normalized) reaches 99%.
    auto bw99 = [&](const std::vector<double>& e) {
        double total = 0.0;
        for (double v : e) total += v * v;
        if (total == 0.0) return 0.0;
        const double target = 0.99 * total * static_cast<double>(n);
        double acc = 0.0;
        for (std::size_t k = 0; k <= n / 2; ++k) {
            double re = 0.0, im = 0.0;
            const double step = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                re += e[i] * std::cos(step * static_cast<double>(i));
                im += e[i] * std::sin(step * static_cast<double>(i));
            }
            const bool shared = (k == 0) || (2 * k == n);
            acc += (shared ? 1.0 : 2.0) * (re * re + im * im);
            if (acc >= target) {
                return static_cast<double>(k) * spec.sample_rate / static_cast<double>(n);
            }
        }
        return 0.5 * spec.sample_rate;
    };
    info.envelope_bw99_mhz = std::max(bw99(env1), bw99(env0));
    return info;
}

namespace {

nlohmann::json sidecar_json(const Waveform& w, const std::string& format) {
    nlohmann::json j;
    j["rate_per_us"] = w.rate;
    j["channels"] = w.channels;
    j["duration_us"] = w.duration_us();
    j["sample_count"] = w.samples.size();
    j["format"] = format;
    return j;
}

std::string f32_bytes(const std::vector<float>& samples) {
    std::string bytes;
    bytes.reserve(samples.size() * 4);
    for (float s : samples) {
        std::uint32_t u = 0;
        std::memcpy(&u, &s, 4);
        bytes.push_back(static_cast<char>(u & 0xff));
        bytes.push_back(static_cast<char>((u >> 8) & 0xff));
        bytes.push_back(static_cast<char>((u >> 16) & 0xff));
        bytes.push_back(static_cast<char>((u >> 24) & 0xff));
    }
    return bytes;
}

std::vector<float> f32_parse(const std::string& bytes) {
    if (bytes.size() % 4 != 0) {
        throw std::runtime_error("f32 stream length is not a multiple of 4");
    }
    std::vector<float> samples(bytes.size() / 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto b = [&](std::size_t k) {
            return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + k]));
        };
        const std::uint32_t u = b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
        float s = 0.0f;
        std::memcpy(&s, &u, 4);
        samples[i] = s;
    }
    return samples;
}

}  // namespace

void export_waveform(const Waveform& w, const std::string& path_base,
                     const std::string& format) {
    if (format == "csv") {
        std::string out = "t_us,value\n";
        for (std::size_t i = 0; i < w.samples.size(); ++i) {
            out += format_g9(static_cast<double>(i) / w.rate);
            out += ',';
            out += format_g9(static_cast<double>(w.samples[i]));
            out += '\n';
        }
        atomic_write_text(path_base + ".csv", out);
    } else if (format == "f32") {
        atomic_write_bytes(path_base + ".f32", f32_bytes(w.samples));
    } else {
        throw std::invalid_argument("export_waveform: format must be \"csv\" or \"f32\"");
    }
    atomic_write_text(path_base + ".json", sidecar_json(w, format).dump(2) + "\n");
}

Waveform import_waveform(const std::string& path_base) {
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(read_file_text(path_base + ".json"));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("waveform sidecar " + path_base + ".json: " + e.what());
    }

    Waveform w;
    w.rate = sidecar.at("rate_per_us").get<double>();
    w.channels = sidecar.at("channels").get<std::vector<std::string>>();
    const auto count = sidecar.at("sample_count").get<std::size_t>();
    const auto format = sidecar.at("format").get<std::string>();

    if (format == "f32") {
        w.samples = f32_parse(read_file_text(path_base + ".f32"));
    } else if (format == "csv") {
        const std::string text = read_file_text(path_base + ".csv");
        std::size_t pos = text.find('\n');  // skip header
        if (pos == std::string::npos) throw std::runtime_error("waveform CSV has no data rows");
        ++pos;
        while (pos < text.size()) {
            const std::size_t comma = text.find(',', pos);
            const std::size_t eol = text.find('\n', pos);
            if (comma == std::string::npos || eol == std::string::npos || comma > eol) break;
            w.samples.push_back(std::strtof(text.c_str() + comma + 1, nullptr));
            pos = eol + 1;
        }
    } else {
        throw std::runtime_error("waveform sidecar names unknown format \"" + format + "\"");
    }

    if (w.samples.size() != count) {
        throw std::runtime_error("waveform sample count mismatch: sidecar says " +
                                 std::to_string(count) + ", file holds " +
                                 std::to_string(w.samples.size()));
    }
    return w;
}

}  // namespace geomgate
