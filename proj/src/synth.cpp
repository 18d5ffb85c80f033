#include "pulselab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "pulselab/error.hpp"

namespace pulselab {

namespace {

constexpr std::uint64_t kNoiseStream = 0x9E3779B97F4A7C15ull;
constexpr double kMaxWidthFraction = 0.25;

double draw_interval(const SynthSpec& spec, std::mt19937_64& rng) {
    const double mean = 60.0 / spec.base_hr_bpm;
    if (spec.ibi_model == IbiModel::Fixed || spec.hrv_sdnn_ms <= 0.0) return mean;
    std::normal_distribution<double> dist(mean, spec.hrv_sdnn_ms / 1000.0);
    // Truncate to the validity band by redrawing.
    for (;;) {
        const double x = dist(rng);
        if (ibi_in_band(x)) return x;
    }
}

}  // namespace

void validate(const SynthSpec& spec) {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
    if (!(spec.duration_s > 0.0)) bad("duration must be positive");
    if (!(spec.fps > 0.0)) bad("fps must be positive");
    if (!(spec.base_hr_bpm >= 39.0 && spec.base_hr_bpm <= 210.0)) {
        bad("heart rate " + std::to_string(spec.base_hr_bpm) + " bpm outside [39, 210]");
    }
    if (!(spec.hrv_sdnn_ms >= 0.0)) bad("sdnn must be non-negative");
    if (!(spec.pulse_width_s > 0.0)) bad("pulse width must be positive");
    if (!(spec.amplitude >= 0.0 && spec.amplitude < 1.0)) bad("amplitude must lie in [0, 1)");
    if (!(spec.noise_std >= 0.0)) bad("noise must be non-negative");
    if (!(spec.drift_amplitude >= 0.0) || !(spec.drift_hz >= 0.0)) bad("drift must be non-negative");
    if (spec.ibi_model == IbiModel::Supplied) {
        if (spec.supplied_ibis_s.empty()) bad("supplied interval model needs intervals");
        for (double x : spec.supplied_ibis_s) {
            if (!(x > 0.0)) bad("supplied intervals must be positive");
        }
    }
}

std::vector<double> synth_ibis(const SynthSpec& spec, std::size_t count) {
    validate(spec);
    if (spec.ibi_model == IbiModel::Supplied) {
        std::vector<double> out;
        for (std::size_t i = 0; i < count; ++i) out.push_back(spec.supplied_ibis_s[i % spec.supplied_ibis_s.size()]);
        return out;
    }
    std::mt19937_64 rng(spec.seed);
    std::vector<double> out(count);
    for (auto& x : out) x = draw_interval(spec, rng);
    return out;
}

std::vector<double> synth_ibis(const SynthSpec& spec) {
    validate(spec);
    if (spec.ibi_model == IbiModel::Supplied) return spec.supplied_ibis_s;
    std::mt19937_64 rng(spec.seed);
    std::vector<double> out;
    double t = kFirstBeatS;
    while (t < spec.duration_s) {
        out.push_back(draw_interval(spec, rng));
        t += out.back();
    }
    return out;
}

SynthResult synth_trace(const SynthSpec& spec) {
    validate(spec);
    const auto intervals = synth_ibis(spec);

    std::vector<double> beats{kFirstBeatS};
    for (double x : intervals) beats.push_back(beats.back() + x);

    SynthResult out;
    for (double b : beats) {
        if (b < spec.duration_s) out.beat_times.push_back(b);
    }
    for (std::size_t k = 1; k < out.beat_times.size(); ++k) {
        const double ibi = intervals[k - 1];
        out.ibis.entries.push_back({out.beat_times[k], ibi, ibi_in_band(ibi)});
    }

    const auto frames = static_cast<std::size_t>(std::llround(spec.duration_s * spec.fps));
    // Each beat is narrowed to a quarter of its shorter neighbouring interval
    // so closely spaced beats stay resolvable as separate maxima.
    std::vector<double> widths(beats.size(), spec.pulse_width_s);
    for (std::size_t k = 0; k < beats.size(); ++k) {
        double nearest = std::numeric_limits<double>::infinity();
        if (k + 1 < beats.size()) nearest = beats[k + 1] - beats[k];
        if (k > 0) nearest = std::min(nearest, beats[k] - beats[k - 1]);
        widths[k] = std::min(spec.pulse_width_s, kMaxWidthFraction * nearest);
    }
    const double reach = 6.0 * spec.pulse_width_s;
    std::mt19937_64 noise_rng(spec.seed ^ kNoiseStream);
    std::normal_distribution<double> noise(0.0, 1.0);

    out.trace.nominal_rate = spec.fps;
    out.trace.samples.reserve(frames);
    out.pulse = UniformSignal{std::vector<double>(frames), spec.fps, 0.0};
    std::size_t first_beat = 0;
    for (std::size_t i = 0; i < frames; ++i) {
        const double t = static_cast<double>(i) / spec.fps;
        while (first_beat < beats.size() && beats[first_beat] < t - reach) ++first_beat;
        double p = 0.0;
        for (std::size_t k = first_beat; k < beats.size() && beats[k] <= t + reach; ++k) {
            const double d = t - beats[k];
            p += std::exp(-d * d / (2.0 * widths[k] * widths[k]));
        }
        out.pulse.samples[i] = p;

        const double drift = spec.drift_amplitude * std::sin(2.0 * std::numbers::pi * spec.drift_hz * t);
        double c[3];
        for (int ch = 0; ch < 3; ++ch) {
            const double n = spec.noise_std > 0.0 ? spec.noise_std * noise(noise_rng) : 0.0;
            // More blood absorbs more light.
            c[ch] = kSkinTone[ch] * (1.0 - spec.amplitude * kPulsatility[ch] * p) + drift + n;
        }
        out.trace.samples.push_back({t, c[0], c[1], c[2]});
    }

    out.overall = reading_for_window(out.ibis, {0.0, spec.duration_s});
    const double last_t = frames > 0 ? static_cast<double>(frames - 1) / spec.fps : 0.0;
    out.windowed = sliding_readings(out.ibis, 0.0, last_t, 60.0, 10.0, 1.0);
    return out;
}

}  // namespace pulselab
