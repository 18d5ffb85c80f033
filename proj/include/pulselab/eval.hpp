#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pulselab/biometrics.hpp"
#include "pulselab/extract.hpp"
#include "pulselab/ibi.hpp"

namespace pulselab {

double mae(std::span<const double> pred, std::span<const double> target);
/// Percent.
double mape(std::span<const double> pred, std::span<const double> target);
double rmse(std::span<const double> pred, std::span<const double> target);
/// Sample correlation; nullopt when either series is constant.
std::optional<double> pearson(std::span<const double> pred, std::span<const double> target);

struct MetricSet {
    std::size_t n = 0;
    double mae = 0.0;
    std::optional<double> mape;  // undefined when any target is zero
    double rmse = 0.0;
    std::optional<double> pearson;
};

/// All four metrics; pearson is left undefined for fewer than two points,
/// mape when a target is zero.
MetricSet compute_metrics(std::span<const double> pred, std::span<const double> target);

enum class GroundTruthProtocol { Peaks, Fft, VerifiedPeaks };

std::string_view to_string(GroundTruthProtocol p);
std::optional<GroundTruthProtocol> parse_protocol(std::string_view name);

/// Reference biometrics for one recording.
///  - Peaks: zero-phase 0.75-2.5 Hz bandpass, peak detection, interval correction.
///  - Fft: dominant frequency of the 0.75-2.5 Hz bandpassed signal.
///  - VerifiedPeaks: intervals straight from the supplied peak times.
/// Fft leaves SDNN and stress undefined (NotApplicable).
BiometricReading ground_truth_readings(const UniformSignal& pulse, GroundTruthProtocol protocol,
                                       std::optional<std::span<const double>> verified_peaks = std::nullopt,
                                       const PeakDetectorConfig& peaks = {});

/// Biometrics for a full recording from peak times.
BiometricReading reading_from_peak_times(std::span<const double> peak_times);

struct Recording {
    std::string id;
    RgbTrace trace;
    std::optional<UniformSignal> reference_pulse;
    std::optional<std::vector<double>> verified_peaks;
    std::optional<std::string> load_error;
};

struct EvalConfig {
    ExtractorId extractor = ExtractorId::Pos;
    GroundTruthProtocol protocol = GroundTruthProtocol::Peaks;
    BandpassSpec band = kOperatingBand;
    double projection_window_s = kDefaultProjectionWindowS;
    PeakDetectorConfig peaks{};
    /// 0 = hardware concurrency.
    std::size_t threads = 1;
};

struct RecordingResult {
    std::string id;
    bool ok = false;
    std::string error;
    BiometricReading predicted{};
    BiometricReading target{};
};

struct EvalReport {
    std::vector<RecordingResult> rows;
    std::optional<MetricSet> hr;
    std::optional<MetricSet> sdnn;
    std::optional<MetricSet> stress;

    std::size_t successes() const;
    std::size_t failures() const { return rows.size() - successes(); }
};

/// Prediction from a recording's trace: offline extraction, then either the
/// peak pipeline or (Fft protocol) the dominant-frequency estimate.
BiometricReading predict_recording(const RgbTrace& trace, const EvalConfig& config);

/// Per-recording failures are recorded in the report, not thrown.
EvalReport evaluate_corpus(const std::vector<Recording>& recordings, const EvalConfig& config);

/// One sub-directory per recording holding `trace.csv` plus any of
/// `pulse.csv`, `ground_truth.txt` (UBFC layout), `peaks.txt`.
/// Directories are visited in name order.
std::vector<Recording> load_corpus(const std::filesystem::path& dir);

void write_report_csv(const std::filesystem::path& path, const EvalReport& report);
std::string format_summary(const EvalReport& report);

}  // namespace pulselab
