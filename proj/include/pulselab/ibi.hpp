#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "pulselab/extract.hpp"
#include "pulselab/signal.hpp"

namespace pulselab {

/// Interval validity band, 39..210 bpm.
inline constexpr double kMinIbiS = 60.0 / 210.0;
inline constexpr double kMaxIbiS = 60.0 / 39.0;

inline bool ibi_in_band(double ibi_s) noexcept { return ibi_s >= kMinIbiS && ibi_s <= kMaxIbiS; }

struct PeakList {
    std::vector<std::size_t> indices;
    std::vector<double> times;
    /// Rate of the indexed signal; when set, intervals come from index differences.
    double sample_rate = 0.0;

    std::size_t size() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }
};

struct IbiEntry {
    double t_end;  // time of the closing peak
    double ibi;    // seconds
    bool valid;
};

struct IbiSeries {
    std::vector<IbiEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
    std::vector<double> valid_intervals() const;
};

struct PeakDetectorConfig {
    double min_distance_s = kMinIbiS;
    /// Required prominence as a fraction of the rolling amplitude.
    double prominence_fraction = 0.3;
    double amplitude_window_s = 10.0;
};

/// Sample-count parameters derived from a config at a given rate.
struct PeakWindows {
    std::size_t distance;   // peaks are confirmed `distance` samples after they occur
    std::size_t amplitude;  // look-back for the rolling amplitude

    static PeakWindows from(const PeakDetectorConfig& cfg, double sample_rate);
};

/// Offline peak detection.
///
/// Sample i is a peak when it is a local maximum (first sample of a flat
/// top counts), strictly exceeds the preceding `distance` samples, is not
/// exceeded by the following `distance` samples, and rises at least
/// prominence_fraction * (max - min over [i - amplitude, i + distance])
/// above the higher of the two bases min(x[i-distance..i]) and
/// min(x[i..i+distance]). Windows are clipped at the signal ends. Two
/// peaks are therefore always more than `distance` samples apart.
PeakList detect_peaks(const UniformSignal& wave, const PeakDetectorConfig& cfg = {});
inline PeakList detect_peaks(const PulseWave& wave, const PeakDetectorConfig& cfg = {}) {
    return detect_peaks(wave.signal, cfg);
}

/// Incremental form of detect_peaks. A peak is reported once `distance`
/// samples after it have been seen and is never retracted; over any
/// chunking the reported peaks equal the offline result except within the
/// last `distance` samples.
class StreamingPeakDetector {
public:
    StreamingPeakDetector(double sample_rate, double t0 = 0.0, const PeakDetectorConfig& cfg = {});

    /// Chunk must start exactly where the previous one ended.
    PeakList push(const UniformSignal& chunk);
    /// Push one sample; returns true and sets `index` when a peak is confirmed.
    bool push_sample(double value, std::size_t& index);

    void reset(double t0);

    double sample_rate() const noexcept { return rate_; }
    double t0() const noexcept { return t0_; }
    std::size_t samples_seen() const noexcept { return n_; }
    double next_time() const noexcept { return t0_ + static_cast<double>(n_) / rate_; }
    std::size_t buffer_size() const noexcept { return buffer_.size(); }
    std::size_t buffer_capacity() const noexcept { return windows_.amplitude + windows_.distance + 2; }

private:
    double rate_;
    double t0_;
    PeakDetectorConfig cfg_;
    PeakWindows windows_;
    std::deque<double> buffer_;  // buffer_[0] is absolute sample n_ - buffer_.size()
    std::size_t n_ = 0;
};

IbiSeries peaks_to_ibis(const PeakList& peaks);

/// Repair then drop: an out-of-band short interval is merged into its
/// successor when the sum lands in band; an out-of-band long interval that
/// is 2x the local median (+-20%) is split into two equal halves when each
/// half lands in band. Repeats to a fixed point, so applying it twice is
/// the same as once. Anything still out of band stays flagged invalid.
IbiSeries correct_ibis(const IbiSeries& series);

}  // namespace pulselab
