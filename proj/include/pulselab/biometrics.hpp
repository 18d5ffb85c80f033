#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pulselab/extract.hpp"
#include "pulselab/ibi.hpp"
#include "pulselab/signal.hpp"

namespace pulselab {

/// Why a biometric could not be computed for a window.
enum class Undefined { None, NoValidIbis, TooFewIbis, DegenerateWindow, NotApplicable };

std::string_view to_string(Undefined reason);

struct Estimate {
    std::optional<double> value;
    Undefined reason = Undefined::None;

    bool defined() const noexcept { return value.has_value(); }
    static Estimate of(double v) { return {v, Undefined::None}; }
    static Estimate missing(Undefined why) { return {std::nullopt, why}; }
};

struct TimeWindow {
    double t_start;
    double t_end;
};

struct BiometricReading {
    TimeWindow window;
    Estimate hr_bpm;
    Estimate sdnn_ms;
    Estimate stress_si;
    std::size_t n_ibis = 0;

    /// "ok" when every field is defined, otherwise the first missing reason.
    std::string_view status() const;
};

struct HistogramMode {
    double mode_bin_start;  // seconds
    double mo;              // bin centre, seconds
    double amo;             // fraction of intervals in the mode bin
};

inline constexpr double kHistogramBinS = 0.050;
/// Width, in standard deviations, of the interval range covering 95% of samples.
inline constexpr double kSdnnRangeFactor = 3.92;

/// 60 / mean interval.
double heart_rate_bpm(std::span<const double> ibis_s);
/// Population standard deviation, in milliseconds.
double sdnn_ms(std::span<const double> ibis_s);
/// Histogram in 50 ms bins anchored at 0; ties go to the lower bin.
HistogramMode ibi_histogram_mode(std::span<const double> ibis_s);
/// Baevsky stress index with the 3.92 * SDNN range: AMo / (2 * Mo * 3.92 * SDNN), all in seconds.
double baevsky_si(std::span<const double> ibis_s);

/// Dominant in-band frequency of `wave` after zero-phase bandpassing to `band`, times 60.
double hr_from_fft(const UniformSignal& wave, const BandpassSpec& band = kGroundTruthBand);
inline double hr_from_fft(const PulseWave& wave, const BandpassSpec& band = kGroundTruthBand) {
    return hr_from_fft(wave.signal, band);
}

/// Biometrics over the valid intervals whose closing peak lies in [t_start, t_end].
BiometricReading reading_for_window(const IbiSeries& ibis, TimeWindow window);
/// Readings at t_begin + min_window_s + k * step_s up to t_last, each over
/// [max(t_begin, t - window_s), t].
std::vector<BiometricReading> sliding_readings(const IbiSeries& ibis, double t_begin, double t_last, double window_s,
                                               double min_window_s, double step_s);
/// Biometrics over a bare list of intervals (assumed to be in the window).
BiometricReading reading_from_intervals(std::span<const double> ibis_s, TimeWindow window);

inline double ms_to_s(double ms) noexcept { return ms / 1000.0; }
inline double s_to_ms(double s) noexcept { return s * 1000.0; }

}  // namespace pulselab
