#pragma once

#include <cstdint>
#include <vector>

#include "pulselab/biometrics.hpp"
#include "pulselab/extract.hpp"
#include "pulselab/ibi.hpp"

namespace pulselab {

enum class IbiModel { Fixed, Jittered, Supplied };

/// Synthetic recording parameters. Channel values are on an 8-bit
/// intensity scale; noise_std and drift_amplitude use the same units.
struct SynthSpec {
    double duration_s = 60.0;
    double fps = 30.0;
    double base_hr_bpm = 72.0;
    double hrv_sdnn_ms = 0.0;
    IbiModel ibi_model = IbiModel::Fixed;
    std::vector<double> supplied_ibis_s;
    double pulse_width_s = 0.12;  // gaussian sigma of each beat
    double amplitude = 0.01;      // fractional modulation depth
    double noise_std = 0.0;
    double drift_amplitude = 0.0;
    double drift_hz = 0.05;
    std::uint64_t seed = 0;
};

/// Mean skin tone (R, G, B) and the relative pulsatility of each channel.
inline constexpr double kSkinTone[3] = {175.0, 125.0, 100.0};
inline constexpr double kPulsatility[3] = {0.33, 0.77, 0.53};
inline constexpr double kFirstBeatS = 0.3;

struct SynthResult {
    RgbTrace trace;
    UniformSignal pulse;              // clean blood-volume wave at fps, beats as maxima
    std::vector<double> beat_times;   // beats inside the recording
    IbiSeries ibis;                   // intervals between consecutive beats
    BiometricReading overall;         // over the whole recording
    std::vector<BiometricReading> windowed;  // 60 s sliding windows, 10 s warm-up, 1 s step
};

void validate(const SynthSpec& spec);

/// Intervals covering the recording (first beat at kFirstBeatS).
std::vector<double> synth_ibis(const SynthSpec& spec);
/// Exactly `count` intervals from the spec's model.
std::vector<double> synth_ibis(const SynthSpec& spec, std::size_t count);

SynthResult synth_trace(const SynthSpec& spec);

}  // namespace pulselab
