#pragma once

// Two-tone RF drive synthesis for an arbitrary waveform generator.
//
// The emitted channel is
//   w(t) = E1(t) cos(2 pi f1 t + phi_1 + flip_1(t))
//        + E0(t) cos(2 pi f0 t + phi_0 + flip_0(t)),
// where each tone's amplitude is E = C * |signed component|, the static
// phases are (phi_1, phi_0) = (0, -phi), and a pi phase flip encodes every
// interval where the signed component is negative. The flip is a phase
// offset, not an amplitude sign change, so exported amplitudes stay
// non-negative; the two encodings produce the identical real signal.

#include <string>
#include <vector>

#include "geomgate/pulse_model.hpp"

namespace geomgate {

// Hardware-facing constants. Frequencies are in MHz (= cycles/us), the sample
// rate in samples/us. All values describe the experiment, so none have
// meaningful defaults; validate() enforces the documented invariants.
struct RfSpec {
    double f1_mhz = 0.0;        // |1>-|e> tone
    double f0_mhz = 0.0;        // |0>-|e> tone
    double f10_mhz = 0.0;       // qubit splitting; invariant: f1 - f0 = f10 > 0
    double conversion_c = 1.0;  // amplitude conversion constant (> 0)
    double sample_rate = 0.0;   // samples/us; must exceed 2*max(f1, f0)

    void validate() const;  // throws std::invalid_argument naming the field
};

// Instantaneous polar parameters of one tone.
struct TonePolar {
    double amplitude = 0.0;  // C * |component|, >= 0
    double phase = 0.0;      // static phase, plus pi where the component < 0
};

struct RfTones {
    TonePolar tone1;
    TonePolar tone0;
};

// Amplitude/phase encoding of the pair's two signed components at local time
// t_local in [0, envelope duration].
RfTones rf_parameters(const PulsePair& pair, double t_local, double conversion_c);

struct Waveform {
    std::vector<float> samples;         // single summed channel
    double rate = 0.0;                  // samples/us
    std::vector<std::string> channels;  // labels; {"tone1+tone0"} for the sum

    double duration_us() const {
        return rate > 0.0 ? static_cast<double>(samples.size()) / rate : 0.0;
    }
};

// Samples the summed two-tone drive over [0, seq.t2] at spec.sample_rate;
// sample count = ceil(t2 * rate). Deterministic. Throws std::invalid_argument
// when the spec invariants (including the aliasing guard) fail.
Waveform synthesize(const PulseSequence& seq, const RfSpec& spec);

// Software lock-in recovery of one tone's signed baseband C * component(t):
// mixes with 2 cos(2 pi f t + static_phase) and applies two cascaded boxcar
// averages of window round(rate / f10) samples, delay-compensated so the
// output aligns with the input grid. Edge samples within one window of the
// ends are distorted by the filter ramp-in; callers comparing against the
// ideal baseband should trim them.
std::vector<double> demodulate_tone(const Waveform& w, const RfSpec& spec, double f_mhz,
                                    double static_phase);

// Integral over [0, t2] of |Omega_1|^2 + |Omega_0|^2 (rad^2/us); with the
// tones well separated the waveform obeys sum(w^2)*dt ~= (C^2/2) * this.
double two_color_energy(const PulseSequence& seq);

// Informational hardware summary (rise-time proxy): per-tone envelope slew
// and spectral occupancy, plus the waveform energy itself.
struct WaveformInfo {
    double energy = 0.0;                // sum of squared samples * dt
    double max_envelope_slew = 0.0;     // max |dE/dt| over both tones, per us^2
    double envelope_bw99_mhz = 0.0;     // one-sided 99%-energy envelope width
};

WaveformInfo waveform_info(const PulseSequence& seq, const RfSpec& spec);

// File formats: "csv" writes <path_base>.csv with header t_us,value; "f32"
// writes <path_base>.f32 as a little-endian 32-bit float stream. Both write a
// <path_base>.json sidecar (rate, channels, duration, count, format). The
// samples round-trip bit-exactly through either format via import_waveform.
void export_waveform(const Waveform& w, const std::string& path_base, const std::string& format);
Waveform import_waveform(const std::string& path_base);

}  // namespace geomgate
