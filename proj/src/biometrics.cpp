#include "pulselab/biometrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "pulselab/error.hpp"

namespace pulselab {

namespace {

constexpr double kMinFftDurationS = 10.0;
constexpr double kFftGridHz = 0.01;

// FFTW's planner is not thread-safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

bool all_identical(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

std::string_view to_string(Undefined reason) {
    switch (reason) {
        case Undefined::None: return "ok";
        case Undefined::NoValidIbis: return "no_valid_ibis";
        case Undefined::TooFewIbis: return "too_few_ibis";
        case Undefined::DegenerateWindow: return "degenerate";
        case Undefined::NotApplicable: return "not_applicable";
    }
    return "unknown";
}

std::string_view BiometricReading::status() const {
    for (const auto* e : {&hr_bpm, &sdnn_ms, &stress_si}) {
        if (!e->defined()) return to_string(e->reason);
    }
    return "ok";
}

double heart_rate_bpm(std::span<const double> ibis_s) {
    if (ibis_s.empty()) throw Error(ErrorCode::NoValidIbis, "heart rate needs at least one interval");
    return 60.0 / mean_of(ibis_s);
}

double sdnn_ms(std::span<const double> ibis_s) {
    if (ibis_s.size() < 2) throw Error(ErrorCode::TooFewIbis, "SDNN needs at least two intervals");
    if (all_identical(ibis_s)) return 0.0;
    const double m = mean_of(ibis_s);
    double ss = 0.0;
    for (double x : ibis_s) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(ibis_s.size())) * 1000.0;
}

HistogramMode ibi_histogram_mode(std::span<const double> ibis_s) {
    if (ibis_s.empty()) throw Error(ErrorCode::EmptyInput, "histogram of no intervals");
    // Bin on whole microseconds so values such as 0.85 s land in [0.85, 0.90).
    constexpr long long bin_us = 50'000;
    std::map<long long, std::size_t> counts;
    for (double x : ibis_s) ++counts[std::llround(x * 1e6) / bin_us];

    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;  // map order: ties keep the lower bin
    }
    const double start = static_cast<double>(best->first) * kHistogramBinS;
    return {start, start + kHistogramBinS / 2.0, static_cast<double>(best->second) / static_cast<double>(ibis_s.size())};
}

double baevsky_si(std::span<const double> ibis_s) {
    const double sdnn_s = sdnn_ms(ibis_s) / 1000.0;
    if (sdnn_s == 0.0) throw Error(ErrorCode::DegenerateWindow, "all intervals identical, SDNN is zero");
    const auto mode = ibi_histogram_mode(ibis_s);
    return mode.amo / (2.0 * mode.mo * kSdnnRangeFactor * sdnn_s);
}

double hr_from_fft(const UniformSignal& wave, const BandpassSpec& band) {
    if (wave.duration() < kMinFftDurationS - 1e-9) {
        throw Error(ErrorCode::SignalTooShort,
                    "FFT heart rate needs >= 10 s of signal, got " + std::to_string(wave.duration()) + " s");
    }
    const auto filtered = filter_zero_phase(wave, design_butterworth_bandpass(band, wave.sample_rate));

    const auto grid_min = static_cast<std::size_t>(std::ceil(wave.sample_rate / kFftGridHz));
    std::size_t n = 1;
    while (n < std::max(filtered.size(), grid_min)) n <<= 1;

    std::vector<double> input(n, 0.0);
    std::copy(filtered.samples.begin(), filtered.samples.end(), input.begin());
    std::vector<fftw_complex> spectrum(n / 2 + 1);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), input.data(), spectrum.data(), FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    const double step = wave.sample_rate / static_cast<double>(n);
    double best_power = -1.0;
    double best_hz = band.low_hz;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const double f = static_cast<double>(k) * step;
        if (f < band.low_hz || f > band.high_hz) continue;
        const double power = spectrum[k][0] * spectrum[k][0] + spectrum[k][1] * spectrum[k][1];
        if (power > best_power) {
            best_power = power;
            best_hz = f;
        }
    }
    return best_hz * 60.0;
}

BiometricReading reading_from_intervals(std::span<const double> ibis_s, TimeWindow window) {
    BiometricReading reading;
    reading.window = window;
    reading.n_ibis = ibis_s.size();
    if (ibis_s.empty()) {
        reading.hr_bpm = reading.sdnn_ms = reading.stress_si = Estimate::missing(Undefined::NoValidIbis);
        return reading;
    }
    if (ibis_s.size() < 2) {
        reading.hr_bpm = reading.sdnn_ms = reading.stress_si = Estimate::missing(Undefined::TooFewIbis);
        return reading;
    }
    reading.hr_bpm = Estimate::of(heart_rate_bpm(ibis_s));
    const double sdnn = sdnn_ms(ibis_s);
    reading.sdnn_ms = Estimate::of(sdnn);
    reading.stress_si = sdnn > 0.0 ? Estimate::of(baevsky_si(ibis_s)) : Estimate::missing(Undefined::DegenerateWindow);
    return reading;
}

BiometricReading reading_for_window(const IbiSeries& ibis, TimeWindow window) {
    std::vector<double> selected;
    for (const auto& e : ibis.entries) {
        if (e.valid && e.t_end >= window.t_start && e.t_end <= window.t_end) selected.push_back(e.ibi);
    }
    return reading_from_intervals(selected, window);
}

std::vector<BiometricReading> sliding_readings(const IbiSeries& ibis, double t_begin, double t_last, double window_s,
                                               double min_window_s, double step_s) {
    if (!(step_s > 0.0) || !(min_window_s > 0.0) || !(window_s >= min_window_s)) {
        throw Error(ErrorCode::InvalidConfig, "need 0 < min window <= window and a positive step");
    }
    std::vector<BiometricReading> out;
    for (std::size_t k = 0;; ++k) {
        const double t = t_begin + min_window_s + static_cast<double>(k) * step_s;
        if (t > t_last + 1e-9) break;
        out.push_back(reading_for_window(ibis, {std::max(t_begin, t - window_s), t}));
    }
    return out;
}

}  // namespace pulselab
