#include "pulselab/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pulselab/error.hpp"

namespace pulselab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonempty(const UniformSignal& signal) {
    if (signal.empty()) throw Error(ErrorCode::EmptySignal, "signal has no samples");
}

}  // namespace

std::complex<double> FilterCoefficients::response(double frequency_hz, double sample_rate) const {
    const double omega = 2.0 * kPi * frequency_hz / sample_rate;
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h{1.0, 0.0};
    for (const auto& s : sections) {
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    }
    return h;
}

SosFilter::SosFilter(FilterCoefficients coeffs)
    : coeffs_(std::move(coeffs)), state_(coeffs_.sections.size(), {0.0, 0.0}) {}

double SosFilter::step(double x) noexcept {
    for (std::size_t i = 0; i < coeffs_.sections.size(); ++i) {
        const auto& s = coeffs_.sections[i];
        auto& z = state_[i];
        const double y = s.b0 * x + z[0];
        z[0] = s.b1 * x - s.a1 * y + z[1];
        z[1] = s.b2 * x - s.a2 * y;
        x = y;
    }
    return x;
}

void SosFilter::reset() noexcept {
    std::fill(state_.begin(), state_.end(), std::array<double, 2>{0.0, 0.0});
}

void SosFilter::settle(double level) noexcept {
    for (std::size_t i = 0; i < coeffs_.sections.size(); ++i) {
        const auto& s = coeffs_.sections[i];
        const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
        const double y = gain * level;
        state_[i][1] = s.b2 * level - s.a2 * y;
        state_[i][0] = s.b1 * level - s.a1 * y + state_[i][1];
        level = y;
    }
}

UniformSignal resample_uniform(std::span<const Sample> trace, double target_rate) {
    if (!(target_rate > 0.0) || !std::isfinite(target_rate)) {
        throw Error(ErrorCode::InvalidConfig, "target rate must be positive");
    }
    if (trace.size() < 2) throw Error(ErrorCode::TooFewSamples, "need at least 2 samples to resample");
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (!std::isfinite(trace[i].t) || !std::isfinite(trace[i].value)) {
            throw Error(ErrorCode::Format, "non-finite sample at index " + std::to_string(i));
        }
        if (i > 0 && !(trace[i].t > trace[i - 1].t)) {
            throw Error(ErrorCode::NonMonotonicTimestamps, "timestamps must strictly increase (index " + std::to_string(i) + ")");
        }
    }

    // Grid points first + k / rate that do not pass the last timestamp.
    const double first = trace.front().t;
    const double last = trace.back().t;
    auto grid = [&](std::size_t k) { return first + static_cast<double>(k) / target_rate; };
    auto count = static_cast<std::size_t>(std::floor((last - first) * target_rate)) + 1;
    while (grid(count) <= last) ++count;
    while (count > 1 && grid(count - 1) > last) --count;

    UniformSignal out;
    out.sample_rate = target_rate;
    out.t0 = first;
    out.samples.reserve(count);
    std::size_t j = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = grid(k);
        while (j + 2 < trace.size() && trace[j + 1].t < t) ++j;
        const auto& a = trace[j];
        const auto& b = trace[j + 1];
        out.samples.push_back(interpolate_linear(a.t, a.value, b.t, b.value, t));
    }
    return out;
}

std::size_t detrend_window_samples(double window_s, double sample_rate) {
    const auto half = static_cast<std::size_t>(std::floor(window_s * sample_rate / 2.0 + 1e-9));
    return 2 * half + 1;
}

double detrend_sample(std::span<const double> values, std::size_t k, std::size_t lo, std::size_t hi) noexcept {
    double sum = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) sum += values[i];
    return values[k] - sum / static_cast<double>(hi - lo + 1);
}

UniformSignal detrend_moving_mean(const UniformSignal& signal, double window_s) {
    require_nonempty(signal);
    if (!(window_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "detrend window must be positive");
    const std::size_t half = detrend_window_samples(window_s, signal.sample_rate) / 2;
    const std::size_t n = signal.size();

    UniformSignal out{std::vector<double>(n), signal.sample_rate, signal.t0};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k >= half ? k - half : 0;
        const std::size_t hi = std::min(n - 1, k + half);
        out.samples[k] = detrend_sample(signal.samples, k, lo, hi);
    }
    return out;
}

FilterCoefficients design_butterworth_bandpass(const BandpassSpec& spec, double sample_rate) {
    const double nyquist = sample_rate / 2.0;
    if (!(sample_rate > 0.0) || !(spec.low_hz > 0.0) || !(spec.low_hz < spec.high_hz) || !(spec.high_hz < nyquist)) {
        throw Error(ErrorCode::InvalidBand, "band [" + std::to_string(spec.low_hz) + ", " + std::to_string(spec.high_hz) +
                                                "] Hz is not inside (0, " + std::to_string(nyquist) + ") Hz");
    }
    if (spec.order < 1) throw Error(ErrorCode::InvalidBand, "filter order must be >= 1");

    // Pre-warped analog band edges for the bilinear transform.
    const double k = 2.0 * sample_rate;
    const double w_low = k * std::tan(kPi * spec.low_hz / sample_rate);
    const double w_high = k * std::tan(kPi * spec.high_hz / sample_rate);
    const double w0 = std::sqrt(w_low * w_high);
    const double bw = w_high - w_low;

    auto to_digital = [k](std::complex<double> s) { return (k + s) / (k - s); };
    auto zeros_at_dc_and_nyquist = [] {
        Biquad q;
        q.b0 = 1.0;
        q.b1 = 0.0;
        q.b2 = -1.0;
        return q;
    };

    // Analog Butterworth prototype poles in the upper half plane; each maps to
    // a pair of bandpass poles (s^2 - p*bw*s + w0^2 = 0) and one section per
    // conjugate pair.
    FilterCoefficients coeffs;
    const int n = spec.order;
    for (int i = 0; i < n; ++i) {
        const std::complex<double> p = std::polar(1.0, kPi * (2.0 * i + n + 1) / (2.0 * n));
        if (p.imag() < -1e-12) continue;
        const std::complex<double> pb = p * bw;
        const std::complex<double> disc = std::sqrt(pb * pb - 4.0 * w0 * w0);
        const std::complex<double> s1 = (pb + disc) / 2.0;
        const std::complex<double> s2 = (pb - disc) / 2.0;
        if (p.imag() > 1e-12) {
            for (const auto& s : {s1, s2}) {
                const auto z = to_digital(s);
                Biquad q = zeros_at_dc_and_nyquist();
                q.a1 = -2.0 * z.real();
                q.a2 = std::norm(z);
                coeffs.sections.push_back(q);
            }
        } else {
            // Real prototype pole (odd orders): s1, s2 are conjugates or both real.
            const auto z1 = to_digital(s1);
            const auto z2 = to_digital(s2);
            Biquad q = zeros_at_dc_and_nyquist();
            q.a1 = -(z1 + z2).real();
            q.a2 = (z1 * z2).real();
            coeffs.sections.push_back(q);
        }
    }

    // Unity gain at the digital frequency that maps to the analog centre.
    const double center_hz = sample_rate / kPi * std::atan(w0 / k);
    const double gain = coeffs.magnitude(center_hz, sample_rate);
    coeffs.sections.front().b0 /= gain;
    coeffs.sections.front().b2 /= gain;
    return coeffs;
}

UniformSignal filter_causal(const UniformSignal& signal, const FilterCoefficients& coeffs) {
    require_nonempty(signal);
    SosFilter filter(coeffs);
    UniformSignal out{std::vector<double>(signal.size()), signal.sample_rate, signal.t0};
    for (std::size_t i = 0; i < signal.size(); ++i) out.samples[i] = filter.step(signal.samples[i]);
    return out;
}

UniformSignal filter_zero_phase(const UniformSignal& signal, const FilterCoefficients& coeffs) {
    // A bandpass of design order N is realized with N sections.
    const std::size_t order = coeffs.sections.size();
    const std::size_t n = signal.size();
    if (n <= 3 * order) {
        throw Error(ErrorCode::SignalTooShort,
                    "zero-phase filtering needs more than " + std::to_string(3 * order) + " samples, got " + std::to_string(n));
    }

    // Odd extension at both ends, as in the usual forward-backward scheme.
    const std::size_t pad = std::min(3 * (2 * order + 1), n - 1);
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    const double first = signal.samples.front();
    const double last = signal.samples.back();
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * first - signal.samples[i]);
    ext.insert(ext.end(), signal.samples.begin(), signal.samples.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * last - signal.samples[n - 1 - i]);

    SosFilter filter(coeffs);
    auto pass = [&filter](std::vector<double>& v) {
        filter.reset();
        filter.settle(v.front());
        for (double& x : v) x = filter.step(x);
    };
    pass(ext);
    std::reverse(ext.begin(), ext.end());
    pass(ext);
    std::reverse(ext.begin(), ext.end());

    UniformSignal out{std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                                          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)),
                      signal.sample_rate, signal.t0};
    return out;
}

}  // namespace pulselab
