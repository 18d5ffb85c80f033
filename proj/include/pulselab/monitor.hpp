#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pulselab/biometrics.hpp"
#include "pulselab/extract.hpp"
#include "pulselab/ibi.hpp"

namespace pulselab {

struct MonitorConfig {
    ExtractorId extractor = ExtractorId::Pos;
    double nominal_rate = 30.0;
    double window_s = 60.0;
    double min_window_s = 10.0;
    double update_period_s = 1.0;
    BandpassSpec band = kOperatingBand;
    double projection_window_s = kDefaultProjectionWindowS;
    PeakDetectorConfig peaks{};
    /// Frame gaps longer than this (face lost) restart the session.
    double gap_reset_s = 2.0;

    void validate() const;
};

struct BudgetStats {
    std::size_t frames = 0;  // frames in the measured sample
    double mean_s = 0.0;
    double p95_s = 0.0;
    double max_s = 0.0;
};

/// Live session: extraction, peak detection, interval correction and
/// windowed readings, updated frame by frame.
///
/// No reading is produced until min_window_s of data exists in the current
/// segment. Readings cover [max(segment start, t - window_s), t] and are
/// emitted at most once per update_period_s. Every stage is incremental and
/// buffers are bounded, so per-frame work does not grow with stream length.
class MonitorSession {
public:
    explicit MonitorSession(MonitorConfig config);

    std::optional<BiometricReading> push_frame(double t, double r, double g, double b);
    std::optional<BiometricReading> push_frame(const RgbSample& s) { return push_frame(s.t, s.r, s.g, s.b); }
    std::vector<BiometricReading> push_frames(std::span<const RgbSample> frames);

    /// Wall-time statistics of push_frame over the most recent frames.
    BudgetStats per_frame_budget_check() const;

    /// Called with the time of each newly confirmed peak.
    void set_peak_observer(std::function<void(double)> observer) { peak_observer_ = std::move(observer); }
    /// Called with each finalized pulse sample (time, value).
    void set_pulse_observer(std::function<void(double, double)> observer) { pulse_observer_ = std::move(observer); }

    const MonitorConfig& config() const noexcept { return config_; }
    std::size_t frames_processed() const noexcept { return frames_; }
    std::optional<double> segment_start() const noexcept { return segment_start_; }
    std::size_t buffered_intervals() const noexcept { return ibis_.size(); }
    /// Count of buffered values across all stages.
    std::size_t buffered_elements() const noexcept;
    /// Upper bound for buffered_elements(), fixed by the configuration.
    std::size_t buffer_bound() const noexcept;

    static constexpr std::size_t kTimingCapacity = 8192;
    static constexpr std::size_t kMinBudgetFrames = 1000;

private:
    std::optional<BiometricReading> ingest(double t, double r, double g, double b);
    void start_segment(double t, double r, double g, double b);
    void feed_grid_sample(double r, double g, double b);
    BiometricReading make_reading(double t);

    MonitorConfig config_;
    StreamingExtractor extractor_;
    StreamingPeakDetector detector_;

    std::optional<double> segment_start_;
    RgbSample previous_{};
    std::size_t next_grid_ = 0;
    std::vector<double> pulse_scratch_;
    std::optional<std::size_t> last_peak_index_;
    std::deque<IbiEntry> ibis_;
    std::optional<double> last_emit_t_;

    std::size_t frames_ = 0;
    std::vector<double> timings_;
    std::size_t timing_next_ = 0;

    std::function<void(double)> peak_observer_;
    std::function<void(double, double)> pulse_observer_;
};

/// Replays a recording through a MonitorSession frame by frame.
std::vector<BiometricReading> process_recording(const RgbTrace& trace, const MonitorConfig& config);

}  // namespace pulselab
