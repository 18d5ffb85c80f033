#include "pulselab/monitor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "pulselab/error.hpp"

namespace pulselab {

namespace {

constexpr double kTimeEps = 1e-9;

}  // namespace

void MonitorConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (!(nominal_rate > 0.0)) bad("nominal rate must be positive");
    if (!(min_window_s > 0.0)) bad("minimum window must be positive");
    if (!(min_window_s <= window_s)) bad("minimum window exceeds window");
    if (!(update_period_s > 0.0)) bad("update period must be positive");
    if (!(gap_reset_s > 0.0)) bad("gap reset must be positive");
    design_butterworth_bandpass(band, nominal_rate);
}

MonitorSession::MonitorSession(MonitorConfig config)
    : config_((config.validate(), config)),
      extractor_(config_.extractor, config_.nominal_rate, config_.band, config_.projection_window_s),
      detector_(config_.nominal_rate, 0.0, config_.peaks) {
    timings_.reserve(kTimingCapacity);
}

std::optional<BiometricReading> MonitorSession::push_frame(double t, double r, double g, double b) {
    const auto begin = std::chrono::steady_clock::now();
    auto reading = ingest(t, r, g, b);
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - begin;

    if (timings_.size() < kTimingCapacity) {
        timings_.push_back(spent.count());
    } else {
        timings_[timing_next_] = spent.count();
    }
    timing_next_ = (timing_next_ + 1) % kTimingCapacity;
    ++frames_;
    return reading;
}

std::vector<BiometricReading> MonitorSession::push_frames(std::span<const RgbSample> frames) {
    std::vector<BiometricReading> out;
    for (const auto& f : frames) {
        if (auto reading = push_frame(f)) out.push_back(std::move(*reading));
    }
    return out;
}

void MonitorSession::start_segment(double t, double r, double g, double b) {
    extractor_.reset();
    detector_.reset(t);
    segment_start_ = t;
    previous_ = {t, r, g, b};
    next_grid_ = 0;
    last_peak_index_.reset();
    ibis_.clear();
    last_emit_t_.reset();
    feed_grid_sample(r, g, b);
}

void MonitorSession::feed_grid_sample(double r, double g, double b) {
    ++next_grid_;
    pulse_scratch_.clear();
    extractor_.push(r, g, b, pulse_scratch_);
    for (double v : pulse_scratch_) {
        if (pulse_observer_) pulse_observer_(detector_.next_time(), v);
        std::size_t index = 0;
        if (!detector_.push_sample(v, index)) continue;
        const double peak_t = *segment_start_ + static_cast<double>(index) / config_.nominal_rate;
        if (peak_observer_) peak_observer_(peak_t);
        if (last_peak_index_) {
            const double ibi = static_cast<double>(index - *last_peak_index_) / config_.nominal_rate;
            ibis_.push_back({peak_t, ibi, ibi_in_band(ibi)});
        }
        last_peak_index_ = index;
    }
}

std::optional<BiometricReading> MonitorSession::ingest(double t, double r, double g, double b) {
    if (!std::isfinite(t) || !std::isfinite(r) || !std::isfinite(g) || !std::isfinite(b)) {
        throw Error(ErrorCode::Format, "non-finite frame");
    }
    if (segment_start_ && !(t > previous_.t)) {
        throw Error(ErrorCode::NonMonotonicTimestamps,
                    "frame at " + std::to_string(t) + " s does not follow " + std::to_string(previous_.t) + " s");
    }

    if (!segment_start_ || t - previous_.t > config_.gap_reset_s) {
        start_segment(t, r, g, b);
    } else {
        // Grid points in (previous_.t, t] are interpolated on the segment ending at this frame.
        for (;;) {
            const double tg = *segment_start_ + static_cast<double>(next_grid_) / config_.nominal_rate;
            if (tg > t) break;
            feed_grid_sample(interpolate_linear(previous_.t, previous_.r, t, r, tg),
                             interpolate_linear(previous_.t, previous_.g, t, g, tg),
                             interpolate_linear(previous_.t, previous_.b, t, b, tg));
        }
        previous_ = {t, r, g, b};
    }

    while (!ibis_.empty() && ibis_.front().t_end < t - config_.window_s) ibis_.pop_front();

    if (t - *segment_start_ < config_.min_window_s - kTimeEps) return std::nullopt;
    if (last_emit_t_ && t - *last_emit_t_ < config_.update_period_s - kTimeEps) return std::nullopt;
    last_emit_t_ = t;
    return make_reading(t);
}

BiometricReading MonitorSession::make_reading(double t) {
    const TimeWindow window{std::max(*segment_start_, t - config_.window_s), t};
    IbiSeries in_window;
    for (const auto& e : ibis_) {
        if (e.t_end >= window.t_start && e.t_end <= window.t_end) in_window.entries.push_back(e);
    }
    return reading_for_window(correct_ibis(in_window), window);
}

BudgetStats MonitorSession::per_frame_budget_check() const {
    if (frames_ < kMinBudgetFrames) {
        throw Error(ErrorCode::InsufficientSamples, "budget statistics need at least " + std::to_string(kMinBudgetFrames) +
                                                        " frames, have " + std::to_string(frames_));
    }
    std::vector<double> sorted = timings_;
    std::sort(sorted.begin(), sorted.end());
    BudgetStats stats;
    stats.frames = sorted.size();
    double sum = 0.0;
    for (double x : sorted) sum += x;
    stats.mean_s = sum / static_cast<double>(sorted.size());
    const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size()))) - 1;
    stats.p95_s = sorted[std::min(idx, sorted.size() - 1)];
    stats.max_s = sorted.back();
    return stats;
}

std::size_t MonitorSession::buffered_elements() const noexcept {
    return extractor_.buffered() + detector_.buffer_size() + ibis_.size() + timings_.size();
}

std::size_t MonitorSession::buffer_bound() const noexcept {
    // At most one interval per min_distance within a window.
    const auto max_ibis = static_cast<std::size_t>(std::ceil(config_.window_s / config_.peaks.min_distance_s)) + 2;
    return extractor_.buffer_capacity() + detector_.buffer_capacity() + max_ibis + kTimingCapacity;
}

std::vector<BiometricReading> process_recording(const RgbTrace& trace, const MonitorConfig& config) {
    if (trace.samples.empty()) throw Error(ErrorCode::EmptyTrace, "recording has no frames");
    MonitorSession session(config);
    return session.push_frames(trace.samples);
}

}  // namespace pulselab
