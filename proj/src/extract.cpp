#include "pulselab/extract.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pulselab/error.hpp"

namespace pulselab {

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<double> normalized(std::span<const double> v) {
    const double m = mean_of(v);
    std::vector<double> out(v.size(), 0.0);
    if (m != 0.0) {
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / m;
    }
    return out;
}

std::vector<double> hann_periodic(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        w[j] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    }
    return w;
}

void require_samples(const RgbTrace& trace, std::size_t needed) {
    if (trace.samples.size() < needed) {
        throw Error(ErrorCode::TooFewSamples, "trace has " + std::to_string(trace.samples.size()) +
                                                  " samples, need at least " + std::to_string(needed));
    }
}

struct Channels {
    std::vector<double> r, g, b;
    double t0 = 0.0;
};

Channels resample_channels(const RgbTrace& trace, double rate) {
    require_samples(trace, 2);
    std::vector<Sample> tmp(trace.samples.size());
    Channels out;
    auto one = [&](auto field) {
        for (std::size_t i = 0; i < trace.samples.size(); ++i) tmp[i] = {trace.samples[i].t, trace.samples[i].*field};
        auto u = resample_uniform(tmp, rate);
        out.t0 = u.t0;
        return std::move(u.samples);
    };
    out.r = one(&RgbSample::r);
    out.g = one(&RgbSample::g);
    out.b = one(&RgbSample::b);
    return out;
}

PulseWave finish(std::vector<double> raw, double t0, double rate, const BandpassSpec& band, FilterMode mode) {
    const auto coeffs = design_butterworth_bandpass(band, rate);
    UniformSignal u{std::move(raw), rate, t0};
    PulseWave wave;
    wave.band = band;
    wave.signal = mode == FilterMode::Causal ? filter_causal(u, coeffs) : filter_zero_phase(u, coeffs);
    return wave;
}

PulseWave extract_projected(ExtractorId id, const RgbTrace& trace, double rate, const BandpassSpec& band,
                            double window_s, FilterMode mode) {
    if (!(window_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "projection window must be positive");
    if (!(rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "rate must be positive");
    design_butterworth_bandpass(band, rate);  // validate before doing work

    const auto ch = resample_channels(trace, rate);
    const std::size_t n = ch.r.size();
    const std::size_t window = projection_window_samples(window_s, rate);
    if (n < window) {
        throw Error(ErrorCode::TooFewSamples, "trace spans " + std::to_string(n) + " samples at " + std::to_string(rate) +
                                                  " Hz, projection window needs " + std::to_string(window));
    }
    const std::size_t hop = window / 2;
    const auto hann = hann_periodic(window);

    std::vector<double> acc(n, 0.0);
    for (std::size_t s = 0; s + window <= n; s += hop) {
        const auto h = project_window(id, std::span(ch.r).subspan(s, window), std::span(ch.g).subspan(s, window),
                                      std::span(ch.b).subspan(s, window));
        for (std::size_t j = 0; j < window; ++j) acc[s + j] += hann[j] * h[j];
    }
    return finish(std::move(acc), ch.t0, rate, band, mode);
}

}  // namespace

std::string_view to_string(ExtractorId id) {
    switch (id) {
        case ExtractorId::Green: return "green";
        case ExtractorId::Chrom: return "chrom";
        case ExtractorId::Pos: return "pos";
    }
    return "unknown";
}

std::optional<ExtractorId> parse_extractor(std::string_view name) {
    if (name == "green" || name == "GREEN") return ExtractorId::Green;
    if (name == "chrom" || name == "CHROM") return ExtractorId::Chrom;
    if (name == "pos" || name == "POS") return ExtractorId::Pos;
    return std::nullopt;
}

std::size_t projection_window_samples(double window_s, double rate) {
    const auto half = static_cast<std::size_t>(std::llround(window_s * rate / 2.0));
    return 2 * std::max<std::size_t>(half, 1);
}

std::vector<double> project_window(ExtractorId id, std::span<const double> r, std::span<const double> g,
                                   std::span<const double> b) {
    const std::size_t n = r.size();
    const auto rn = normalized(r);
    const auto gn = normalized(g);
    const auto bn = normalized(b);

    std::vector<double> primary(n), secondary(n), h(n);
    double sign = 1.0;
    if (id == ExtractorId::Pos) {
        for (std::size_t i = 0; i < n; ++i) {
            primary[i] = gn[i] - bn[i];
            secondary[i] = gn[i] + bn[i] - 2.0 * rn[i];
        }
        // S1 and S2 both fall when blood volume rises.
        sign = -1.0;
    } else if (id == ExtractorId::Chrom) {
        for (std::size_t i = 0; i < n; ++i) {
            primary[i] = 3.0 * rn[i] - 2.0 * gn[i];
            secondary[i] = 1.5 * rn[i] + gn[i] - 1.5 * bn[i];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) h[i] = -gn[i];
        const double m = mean_of(h);
        for (double& x : h) x -= m;
        return h;
    }

    const double s_primary = stddev_of(primary);
    const double s_secondary = stddev_of(secondary);
    // POS adds the tuned secondary projection, CHROM subtracts it.
    const double alpha = s_secondary > 0.0 ? s_primary / s_secondary : 0.0;
    const double k = id == ExtractorId::Pos ? alpha : -alpha;
    for (std::size_t i = 0; i < n; ++i) h[i] = primary[i] + k * secondary[i];
    const double m = mean_of(h);
    for (double& x : h) x = sign * (x - m);
    return h;
}

PulseWave extract_green(const RgbTrace& trace, double rate, const BandpassSpec& band, FilterMode mode) {
    if (!(rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "rate must be positive");
    design_butterworth_bandpass(band, rate);
    const auto ch = resample_channels(trace, rate);
    UniformSignal inverted{std::vector<double>(ch.g.size()), rate, ch.t0};
    for (std::size_t i = 0; i < ch.g.size(); ++i) inverted.samples[i] = -ch.g[i];
    // Moving-mean window whose first null sits at the band's lower edge.
    auto detrended = detrend_moving_mean(inverted, 1.0 / band.low_hz);
    return finish(std::move(detrended.samples), ch.t0, rate, band, mode);
}

PulseWave extract_chrom(const RgbTrace& trace, double rate, const BandpassSpec& band, double window_s, FilterMode mode) {
    return extract_projected(ExtractorId::Chrom, trace, rate, band, window_s, mode);
}

PulseWave extract_pos(const RgbTrace& trace, double rate, const BandpassSpec& band, double window_s, FilterMode mode) {
    return extract_projected(ExtractorId::Pos, trace, rate, band, window_s, mode);
}

PulseWave extract(ExtractorId id, const RgbTrace& trace, double rate, const BandpassSpec& band, double window_s,
                  FilterMode mode) {
    switch (id) {
        case ExtractorId::Green: return extract_green(trace, rate, band, mode);
        case ExtractorId::Chrom: return extract_chrom(trace, rate, band, window_s, mode);
        case ExtractorId::Pos: return extract_pos(trace, rate, band, window_s, mode);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown extractor");
}

StreamingExtractor::StreamingExtractor(ExtractorId id, double rate, const BandpassSpec& band, double window_s)
    : id_(id),
      rate_(rate),
      window_(projection_window_samples(window_s, rate)),
      hop_(window_ / 2),
      detrend_half_(detrend_window_samples(1.0 / band.low_hz, rate) / 2),
      hann_(hann_periodic(window_)),
      filter_(design_butterworth_bandpass(band, rate)) {
    if (!(window_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "projection window must be positive");
}

void StreamingExtractor::reset() {
    filter_.reset();
    r_.clear();
    g_.clear();
    b_.clear();
    overlap_.clear();
    base_ = n_in_ = n_out_ = 0;
}

std::size_t StreamingExtractor::buffer_capacity() const noexcept {
    const std::size_t history = id_ == ExtractorId::Green ? 2 * detrend_half_ + 1 : window_;
    // History is compacted once it doubles; the accumulator never exceeds a window.
    return 3 * 2 * history + window_;
}

void StreamingExtractor::emit(double raw, std::vector<double>& out) {
    out.push_back(filter_.step(raw));
    ++n_out_;
}

void StreamingExtractor::push(double r, double g, double b, std::vector<double>& out) {
    ++n_in_;
    if (id_ == ExtractorId::Green) {
        g_.push_back(-g);
        // Sample k is final once k + half has arrived.
        while (n_out_ + detrend_half_ < n_in_) {
            const std::size_t k = n_out_;
            const std::size_t lo = k >= detrend_half_ ? k - detrend_half_ : 0;
            const std::size_t hi = k + detrend_half_;
            emit(detrend_sample(g_, k - base_, lo - base_, hi - base_), out);
        }
        const std::size_t keep_from = n_out_ >= detrend_half_ ? n_out_ - detrend_half_ : 0;
        if (keep_from - base_ > 2 * detrend_half_ + 1) {
            const auto drop = static_cast<std::ptrdiff_t>(keep_from - base_);
            g_.erase(g_.begin(), g_.begin() + drop);
            base_ = keep_from;
        }
        return;
    }

    r_.push_back(r);
    g_.push_back(g);
    b_.push_back(b);

    if (n_in_ < window_ || (n_in_ - window_) % hop_ != 0) return;
    const std::size_t s = n_in_ - window_;
    const std::size_t off = s - base_;
    const auto h = project_window(id_, std::span(r_).subspan(off, window_), std::span(g_).subspan(off, window_),
                                  std::span(b_).subspan(off, window_));
    // overlap_[0] holds sample n_out_; windows start on hop boundaries so s >= n_out_.
    overlap_.resize(s + window_ - n_out_, 0.0);
    for (std::size_t j = 0; j < window_; ++j) overlap_[s - n_out_ + j] += hann_[j] * h[j];

    // Samples before the next window start are final.
    const std::size_t final_end = s + hop_;
    const std::size_t count = final_end - n_out_;
    for (std::size_t i = 0; i < count; ++i) emit(overlap_[i], out);
    overlap_.erase(overlap_.begin(), overlap_.begin() + static_cast<std::ptrdiff_t>(count));

    const std::size_t keep_from = s + hop_;
    if (keep_from - base_ >= window_) {
        const auto drop = static_cast<std::ptrdiff_t>(keep_from - base_);
        r_.erase(r_.begin(), r_.begin() + drop);
        g_.erase(g_.begin(), g_.begin() + drop);
        b_.erase(b_.begin(), b_.begin() + drop);
        base_ = keep_from;
    }
}

}  // namespace pulselab
