#include "pulselab/ibi.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "pulselab/error.hpp"

namespace pulselab {

namespace {

// Median of in-band intervals within this many entries of the one being repaired.
constexpr std::size_t kMedianNeighbourhood = 5;
constexpr double kSplitRatioLow = 1.6;
constexpr double kSplitRatioHigh = 2.4;

std::size_t confirmation_delay(const PeakDetectorConfig& cfg, double rate) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.min_distance_s * rate - 1e-9)));
}

// x(j) returns sample j for j in [first, last]; i is interior to that range.
template <typename Access>
bool is_peak(const Access& x, std::size_t i, std::size_t last, const PeakWindows& w, double fraction) {
    if (i == 0 || i >= last) return false;
    const double v = x(i);
    if (!(v > x(i - 1)) || !(v >= x(i + 1))) return false;

    const std::size_t left = i >= w.distance ? i - w.distance : 0;
    const std::size_t right = std::min(last, i + w.distance);
    double left_base = v;
    for (std::size_t j = left; j < i; ++j) {
        const double u = x(j);
        if (!(v > u)) return false;
        left_base = std::min(left_base, u);
    }
    double right_base = v;
    for (std::size_t j = i + 1; j <= right; ++j) {
        const double u = x(j);
        if (u > v) return false;
        right_base = std::min(right_base, u);
    }

    const std::size_t amp_left = i >= w.amplitude ? i - w.amplitude : 0;
    double lo = v;
    double hi = v;
    for (std::size_t j = amp_left; j <= right; ++j) {
        const double u = x(j);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    const double amplitude = hi - lo;
    if (!(amplitude > 0.0)) return false;
    const double prominence = v - std::max(left_base, right_base);
    return prominence >= fraction * amplitude;
}

std::optional<double> local_median(const std::vector<IbiEntry>& entries, std::size_t i) {
    std::vector<double> near;
    const std::size_t lo = i >= kMedianNeighbourhood ? i - kMedianNeighbourhood : 0;
    const std::size_t hi = std::min(entries.size() - 1, i + kMedianNeighbourhood);
    for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i && entries[j].valid) near.push_back(entries[j].ibi);
    }
    if (near.empty()) return std::nullopt;
    std::sort(near.begin(), near.end());
    const std::size_t m = near.size() / 2;
    return near.size() % 2 == 1 ? near[m] : 0.5 * (near[m - 1] + near[m]);
}

}  // namespace

std::vector<double> IbiSeries::valid_intervals() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.valid) out.push_back(e.ibi);
    }
    return out;
}

PeakWindows PeakWindows::from(const PeakDetectorConfig& cfg, double sample_rate) {
    if (!(cfg.min_distance_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "min_distance_s must be positive");
    if (!(cfg.prominence_fraction > 0.0) || cfg.prominence_fraction > 1.0) {
        throw Error(ErrorCode::InvalidConfig, "prominence_fraction must lie in (0, 1]");
    }
    if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "sample rate must be positive");
    // Peaks end up at least distance + 1 samples apart, which must cover min_distance_s.
    const std::size_t c = confirmation_delay(cfg, sample_rate);
    PeakWindows w;
    w.distance = std::max<std::size_t>(1, c - 1);
    w.amplitude = static_cast<std::size_t>(std::llround(cfg.amplitude_window_s * sample_rate));
    return w;
}

PeakList detect_peaks(const UniformSignal& wave, const PeakDetectorConfig& cfg) {
    if (wave.empty()) throw Error(ErrorCode::EmptySignal, "cannot detect peaks in an empty signal");
    const auto w = PeakWindows::from(cfg, wave.sample_rate);
    const auto& x = wave.samples;
    auto at = [&x](std::size_t j) { return x[j]; };

    PeakList peaks;
    peaks.sample_rate = wave.sample_rate;
    const std::size_t last = x.size() - 1;
    for (std::size_t i = 1; i < last; ++i) {
        if (is_peak(at, i, last, w, cfg.prominence_fraction)) {
            peaks.indices.push_back(i);
            peaks.times.push_back(wave.time_at(i));
        }
    }
    return peaks;
}

StreamingPeakDetector::StreamingPeakDetector(double sample_rate, double t0, const PeakDetectorConfig& cfg)
    : rate_(sample_rate), t0_(t0), cfg_(cfg), windows_(PeakWindows::from(cfg, sample_rate)) {}

void StreamingPeakDetector::reset(double t0) {
    t0_ = t0;
    n_ = 0;
    buffer_.clear();
}

bool StreamingPeakDetector::push_sample(double value, std::size_t& index) {
    buffer_.push_back(value);
    ++n_;
    const std::size_t delay = confirmation_delay(cfg_, rate_);
    const std::size_t needed = windows_.amplitude + delay + 1;
    while (buffer_.size() > needed) buffer_.pop_front();

    if (n_ < delay + 1) return false;
    const std::size_t i = n_ - 1 - delay;
    const std::size_t first = n_ - buffer_.size();
    auto at = [this, first](std::size_t j) { return buffer_[j - first]; };
    // Right-hand windows only reach i + distance <= n_ - 1, so this matches the batch result.
    if (is_peak(at, i, n_ - 1, windows_, cfg_.prominence_fraction)) {
        index = i;
        return true;
    }
    return false;
}

PeakList StreamingPeakDetector::push(const UniformSignal& chunk) {
    PeakList out;
    out.sample_rate = rate_;
    if (chunk.empty()) return out;
    if (std::abs(chunk.sample_rate - rate_) > 1e-9 * rate_) {
        throw Error(ErrorCode::InvalidConfig, "chunk sample rate differs from detector rate");
    }
    const double expected = next_time();
    const double tolerance = 0.5 / rate_;
    if (chunk.t0 < expected - tolerance) {
        throw Error(ErrorCode::OutOfOrderChunk,
                    "chunk starts at " + std::to_string(chunk.t0) + " s, expected " + std::to_string(expected) + " s");
    }
    if (chunk.t0 > expected + tolerance) {
        throw Error(ErrorCode::NonContiguousChunk,
                    "chunk starts at " + std::to_string(chunk.t0) + " s, expected " + std::to_string(expected) + " s");
    }
    for (double v : chunk.samples) {
        std::size_t index = 0;
        if (push_sample(v, index)) {
            out.indices.push_back(index);
            out.times.push_back(t0_ + static_cast<double>(index) / rate_);
        }
    }
    return out;
}

IbiSeries peaks_to_ibis(const PeakList& peaks) {
    IbiSeries series;
    for (std::size_t k = 1; k < peaks.times.size(); ++k) {
        const double ibi = peaks.sample_rate > 0.0
                               ? static_cast<double>(peaks.indices[k] - peaks.indices[k - 1]) / peaks.sample_rate
                               : peaks.times[k] - peaks.times[k - 1];
        series.entries.push_back({peaks.times[k], ibi, ibi_in_band(ibi)});
    }
    return series;
}

IbiSeries correct_ibis(const IbiSeries& series) {
    std::vector<IbiEntry> entries = series.entries;
    for (auto& e : entries) e.valid = ibi_in_band(e.ibi);

    // Every repair turns at least one invalid entry into valid ones, so this terminates.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<IbiEntry> out;
        out.reserve(entries.size() + 4);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const IbiEntry& e = entries[i];
            if (e.valid) {
                out.push_back(e);
                continue;
            }
            if (e.ibi < kMinIbiS && i + 1 < entries.size()) {
                const double merged = e.ibi + entries[i + 1].ibi;
                if (ibi_in_band(merged)) {
                    out.push_back({entries[i + 1].t_end, merged, true});
                    ++i;
                    changed = true;
                    continue;
                }
            }
            if (e.ibi > kMaxIbiS) {
                const auto median = local_median(entries, i);
                const double half = e.ibi / 2.0;
                if (median && e.ibi >= kSplitRatioLow * *median && e.ibi <= kSplitRatioHigh * *median && ibi_in_band(half)) {
                    out.push_back({e.t_end - half, half, true});
                    out.push_back({e.t_end, half, true});
                    changed = true;
                    continue;
                }
            }
            out.push_back(e);
        }
        entries = std::move(out);
    }
    return IbiSeries{std::move(entries)};
}

}  // namespace pulselab
