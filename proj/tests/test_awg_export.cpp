#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "geomgate/awg_export.hpp"

using namespace geomgate;

namespace {

RfSpec bench_spec() {
    RfSpec spec;
    spec.f1_mhz = 80.0;
    spec.f0_mhz = 68.0;
    spec.f10_mhz = 12.0;
    spec.conversion_c = 1.0;
    spec.sample_rate = 960.0;
    return spec;
}

PulseSequence op1_sx() { return build_sequence(GateParams::sigma_x(), presets::op1(), 4.0, 8.0); }

std::string fresh_dir(const char* tag) {
    const std::filesystem::path p =
        std::filesystem::temp_directory_path() / (std::string("geomgate_awg_") + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

double rms(const std::vector<double>& v, size_t lo, size_t hi) {
    double acc = 0.0;
    for (size_t i = lo; i < hi; ++i) acc += v[i] * v[i];
    return std::sqrt(acc / static_cast<double>(hi - lo));
}

}  // namespace

TEST_SUITE("awg_export") {

TEST_CASE("rf spec validation") {
    CHECK_NOTHROW(bench_spec().validate());

    RfSpec s = bench_spec();
    s.f0_mhz = 60.0;  // breaks f1 - f0 = f10
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = bench_spec();
    s.sample_rate = 100.0;  // below Nyquist for 80 MHz
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = bench_spec();
    s.conversion_c = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = bench_spec();
    s.f10_mhz = -12.0;
    s.f0_mhz = 92.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("tone parameters encode sign as a pi phase offset") {
    const PulseSequence seq = op1_sx();

    // Midpulse: Omega > 0, B < 0 so the tone-1 component is negative.
    const RfTones mid = rf_parameters(seq.pair1, 2.0, 1.0);
    CHECK(mid.tone1.amplitude > 0.0);
    CHECK(mid.tone1.phase == doctest::Approx(kPi));
    CHECK(mid.tone0.phase == doctest::Approx(0.0));
    // A = |B| for sigma_x: equal amplitudes.
    CHECK(mid.tone1.amplitude == doctest::Approx(mid.tone0.amplitude).epsilon(1e-12));

    // At t = 0 the envelope is slightly negative, so both signs flip.
    const RfTones edge = rf_parameters(seq.pair1, 0.0, 1.0);
    CHECK(edge.tone1.phase == doctest::Approx(0.0));
    CHECK(edge.tone0.phase == doctest::Approx(kPi));

    // Conversion constant scales amplitudes linearly, phases untouched.
    const RfTones scaled = rf_parameters(seq.pair1, 2.0, 2.5);
    CHECK(scaled.tone1.amplitude == doctest::Approx(2.5 * mid.tone1.amplitude).epsilon(1e-15));
    CHECK(scaled.tone1.phase == mid.tone1.phase);

    // sigma_y statics: phi = pi/2 enters tone 0 as -pi/2.
    const PulseSequence sy = build_sequence(GateParams::sigma_y(), presets::op1(), 4.0, 8.0);
    const RfTones ty = rf_parameters(sy.pair1, 2.0, 1.0);
    CHECK(ty.tone0.phase == doctest::Approx(-kPi / 2.0));

    // sigma_z drives only tone 1 on pair 1.
    const PulseSequence sz = build_sequence(GateParams::sigma_z(), presets::op1(), 4.0, 8.0);
    CHECK(rf_parameters(sz.pair1, 2.0, 1.0).tone0.amplitude == 0.0);
}

TEST_CASE("synthesis: sample count, determinism, linear scaling") {
    const PulseSequence seq = op1_sx();
    const RfSpec spec = bench_spec();
    const Waveform w = synthesize(seq, spec);

    CHECK(w.samples.size() == 7680);  // ceil(8 us * 960 /us)
    CHECK(w.rate == 960.0);
    REQUIRE(w.channels.size() == 1);
    CHECK(w.channels[0] == "tone1+tone0");
    CHECK(w.duration_us() == doctest::Approx(8.0).epsilon(1e-12));
    for (float s : w.samples) CHECK(std::isfinite(s));

    // Deterministic resynthesis.
    const Waveform w2 = synthesize(seq, spec);
    REQUIRE(w2.samples.size() == w.samples.size());
    for (size_t i = 0; i < w.samples.size(); i += 511) CHECK(w2.samples[i] == w.samples[i]);

    // Doubling C doubles every sample (exactly, in float).
    RfSpec spec2 = bench_spec();
    spec2.conversion_c = 2.0;
    const Waveform wd = synthesize(seq, spec2);
    for (size_t i = 0; i < w.samples.size(); i += 257) {
        CHECK(wd.samples[i] == doctest::Approx(2.0 * w.samples[i]).epsilon(1e-6));
    }

    RfSpec bad = bench_spec();
    bad.sample_rate = 0.0;
    CHECK_THROWS_AS((void)synthesize(seq, bad), std::invalid_argument);
}

TEST_CASE("energy consistency with the two-color integral") {
    const PulseSequence seq = op1_sx();
    const RfSpec spec = bench_spec();
    const WaveformInfo info = waveform_info(seq, spec);
    const double expected = spec.conversion_c * spec.conversion_c / 2.0 * two_color_energy(seq);
    CHECK(info.energy == doctest::Approx(expected).epsilon(0.02));
    CHECK(info.max_envelope_slew > 0.0);
    // Envelope spectral occupancy is set by the highest cosine harmonic:
    // n = 8 over a 4 us pair gives 1 MHz.
    CHECK(info.envelope_bw99_mhz == doctest::Approx(1.0).epsilon(0.3));

    // Energy scales with C^2.
    RfSpec spec2 = bench_spec();
    spec2.conversion_c = 3.0;
    CHECK(waveform_info(seq, spec2).energy == doctest::Approx(9.0 * info.energy).epsilon(1e-4));
}

TEST_CASE("software lock-in recovers both signed basebands within 1 percent") {
    const PulseSequence seq = op1_sx();
    const RfSpec spec = bench_spec();
    const Waveform w = synthesize(seq, spec);

    const int win = static_cast<int>(std::lround(spec.sample_rate / spec.f10_mhz));  // 80
    const size_t trim = static_cast<size_t>(2 * win);

    for (int tone = 0; tone < 2; ++tone) {
        const double f = tone == 0 ? spec.f1_mhz : spec.f0_mhz;
        const double static_phase = 0.0;  // phi = 0 for sigma_x on both tones
        const std::vector<double> rec = demodulate_tone(w, spec, f, static_phase);
        REQUIRE(rec.size() == w.samples.size());

        std::vector<double> err(rec.size(), 0.0);
        std::vector<double> ideal(rec.size(), 0.0);
        for (size_t i = 0; i < rec.size(); ++i) {
            const double t = static_cast<double>(i) / spec.sample_rate;
            const PulsePair& pair = t < seq.t1 ? seq.pair1 : seq.pair2;
            const double t_local = t < seq.t1 ? t : t - seq.t1;
            const ToneValues tv = tone_values(pair, std::min(t_local, pair.envelope.duration));
            ideal[i] = tone == 0 ? tv.omega1 : tv.omega0.real();
            err[i] = rec[i] - ideal[i];
        }
        const double e = rms(err, trim, rec.size() - trim);
        const double sig = rms(ideal, trim, ideal.size() - trim);
        CAPTURE(tone);
        CHECK(e / sig < 0.01);  // measured ~0.5%
        CHECK(e / sig > 1e-5);  // sanity: the comparison is not vacuous
    }
}

TEST_CASE("export and import round-trip bit-exactly") {
    const PulseSequence seq = op1_sx();
    const Waveform w = synthesize(seq, bench_spec());

    for (const char* format : {"csv", "f32"}) {
        const std::string base = fresh_dir(format) + "/waveform";
        export_waveform(w, base, format);

        // Sidecar always present.
        CHECK(std::filesystem::exists(base + ".json"));
        CHECK(std::filesystem::exists(base + (std::string(format) == "csv" ? ".csv" : ".f32")));

        const Waveform back = import_waveform(base);
        CHECK(back.rate == w.rate);
        REQUIRE(back.samples.size() == w.samples.size());
        bool identical = true;
        for (size_t i = 0; i < w.samples.size(); ++i) {
            if (back.samples[i] != w.samples[i]) {
                identical = false;
                break;
            }
        }
        CAPTURE(format);
        CHECK(identical);
        REQUIRE(back.channels.size() == 1);
        CHECK(back.channels[0] == "tone1+tone0");
    }

    // CSV has one header plus one line per sample.
    {
        const std::string base = fresh_dir("csvcount") + "/waveform";
        export_waveform(w, base, "csv");
        std::FILE* f = std::fopen((base + ".csv").c_str(), "rb");
        REQUIRE(f != nullptr);
        size_t lines = 0;
        int c;
        while ((c = std::fgetc(f)) != EOF) {
            if (c == '\n') ++lines;
        }
        std::fclose(f);
        CHECK(lines == w.samples.size() + 1);
    }

    // f32 payload is exactly 4 bytes per sample.
    {
        const std::string base = fresh_dir("f32size") + "/waveform";
        export_waveform(w, base, "f32");
        CHECK(std::filesystem::file_size(base + ".f32") == 4 * w.samples.size());
    }

    CHECK_THROWS_AS(export_waveform(w, "/nonexistent_dir_zz/waveform", "csv"),
                    std::runtime_error);
    CHECK_THROWS_AS(export_waveform(w, fresh_dir("badfmt") + "/waveform", "wav"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)import_waveform("/nonexistent_dir_zz/waveform"), std::runtime_error);
}

}  // TEST_SUITE
