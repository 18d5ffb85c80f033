#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace pulselab {

struct Sample {
    double t;      // seconds since stream start
    double value;
};

/// Uniformly sampled signal; sample k sits at t0 + k / sample_rate.
struct UniformSignal {
    std::vector<double> samples;
    double sample_rate = 30.0;
    double t0 = 0.0;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    double time_at(std::size_t k) const noexcept { return t0 + static_cast<double>(k) / sample_rate; }
    double duration() const noexcept { return static_cast<double>(samples.size()) / sample_rate; }
};

struct BandpassSpec {
    double low_hz = 0.65;
    double high_hz = 3.5;
    int order = 2;
};

/// Operating band matching 39..210 bpm.
inline constexpr BandpassSpec kOperatingBand{0.65, 3.5, 2};
/// Band used for ground-truth conditioning (45..150 bpm).
inline constexpr BandpassSpec kGroundTruthBand{0.75, 2.5, 2};

/// Transposed direct-form II biquad, a0 normalized to 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

struct FilterCoefficients {
    std::vector<Biquad> sections;

    /// Complex response at frequency_hz for a filter running at sample_rate.
    std::complex<double> response(double frequency_hz, double sample_rate) const;
    double magnitude(double frequency_hz, double sample_rate) const {
        return std::abs(response(frequency_hz, sample_rate));
    }
};

/// Running state for a biquad cascade. One instance per stream.
class SosFilter {
public:
    explicit SosFilter(FilterCoefficients coeffs);

    double step(double x) noexcept;
    void reset() noexcept;
    /// Set the state to the steady-state response for a constant input `level`.
    void settle(double level) noexcept;

    const FilterCoefficients& coefficients() const noexcept { return coeffs_; }

private:
    FilterCoefficients coeffs_;
    std::vector<std::array<double, 2>> state_;
};

UniformSignal resample_uniform(std::span<const Sample> trace, double target_rate);

/// Linear interpolation between (ta, va) and (tb, vb) at t. Shared by the
/// batch and streaming resamplers so both produce identical values.
inline double interpolate_linear(double ta, double va, double tb, double vb, double t) noexcept {
    if (t == ta) return va;
    if (t == tb) return vb;
    return va + (vb - va) * ((t - ta) / (tb - ta));
}

UniformSignal detrend_moving_mean(const UniformSignal& signal, double window_s);

/// Number of samples in a detrending window of window_s seconds (odd, >= 1).
std::size_t detrend_window_samples(double window_s, double sample_rate);

/// Mean of values[lo..hi] (inclusive) subtracted from values[k].
double detrend_sample(std::span<const double> values, std::size_t k, std::size_t lo, std::size_t hi) noexcept;

FilterCoefficients design_butterworth_bandpass(const BandpassSpec& spec, double sample_rate);

UniformSignal filter_causal(const UniformSignal& signal, const FilterCoefficients& coeffs);
UniformSignal filter_zero_phase(const UniformSignal& signal, const FilterCoefficients& coeffs);

}  // namespace pulselab
