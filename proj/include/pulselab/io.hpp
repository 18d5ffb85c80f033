#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pulselab/biometrics.hpp"
#include "pulselab/extract.hpp"
#include "pulselab/signal.hpp"

namespace pulselab::io {

/// Frame rate from the median frame interval, rounded to 0.01 Hz.
double infer_rate(const std::vector<double>& times_s);

/// `t_ms,r,g,b`
RgbTrace read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(const std::filesystem::path& path, const RgbTrace& trace);

/// `t_ms,value`; non-uniform input is resampled onto its inferred rate.
UniformSignal read_pulse_csv(const std::filesystem::path& path);
void write_pulse_csv(const std::filesystem::path& path, const UniformSignal& signal);

/// One interval per line in integer milliseconds; returns seconds.
std::vector<double> read_ibi_file(const std::filesystem::path& path);
void write_ibi_file(const std::filesystem::path& path, const std::vector<double>& ibis_s);

/// One peak time per line in seconds.
std::vector<double> read_peaks_file(const std::filesystem::path& path);
void write_peaks_file(const std::filesystem::path& path, const std::vector<double>& times_s);

/// Three whitespace-separated rows: pulse wave, instantaneous HR, timestamps (s).
struct UbfcGroundTruth {
    std::vector<double> pulse;
    std::vector<double> hr_bpm;
    std::vector<double> times_s;

    UniformSignal to_signal() const;
};
UbfcGroundTruth read_ubfc_ground_truth(const std::filesystem::path& path);

/// `t_end_s,hr_bpm,sdnn_ms,stress_si,n_ibis,status`; undefined values are empty.
void write_readings_csv(const std::filesystem::path& path, const std::vector<BiometricReading>& readings);
std::string readings_csv_header();
std::string readings_csv_row(const BiometricReading& reading);

}  // namespace pulselab::io
