#include "pulselab/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "pulselab/error.hpp"
#include "pulselab/io.hpp"

namespace pulselab {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "prediction has " + std::to_string(pred.size()) + " values, target " + std::to_string(target.size()));
    }
    if (pred.empty()) throw Error(ErrorCode::EmptyInput, "metrics of empty series");
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::string cell(const Estimate& e) {
    if (!e.defined()) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *e.value);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::optional<MetricSet> metrics_for(const std::vector<RecordingResult>& rows, Estimate BiometricReading::*field) {
    std::vector<double> pred, target;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        const auto& p = r.predicted.*field;
        const auto& t = r.target.*field;
        if (p.defined() && t.defined()) {
            pred.push_back(*p.value);
            target.push_back(*t.value);
        }
    }
    if (pred.empty()) return std::nullopt;
    return compute_metrics(pred, target);
}

}  // namespace

double mae(std::span<const double> pred, std::span<const double> target) {
    check_pair(pred, target);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
    return s / static_cast<double>(pred.size());
}

double mape(std::span<const double> pred, std::span<const double> target) {
    check_pair(pred, target);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (target[i] == 0.0) throw Error(ErrorCode::ZeroTarget, "MAPE undefined for a zero target at index " + std::to_string(i));
        s += std::abs(pred[i] - target[i]) / std::abs(target[i]);
    }
    return s / static_cast<double>(pred.size()) * 100.0;
}

double rmse(std::span<const double> pred, std::span<const double> target) {
    check_pair(pred, target);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
    return std::sqrt(s / static_cast<double>(pred.size()));
}

std::optional<double> pearson(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw Error(ErrorCode::LengthMismatch, "pearson of series with different lengths");
    if (pred.size() < 2) throw Error(ErrorCode::TooFewPoints, "pearson needs at least two points");
    const double mp = mean_of(pred);
    const double mt = mean_of(target);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double dx = pred[i] - mp;
        const double dy = target[i] - mt;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricSet compute_metrics(std::span<const double> pred, std::span<const double> target) {
    MetricSet m;
    m.n = pred.size();
    m.mae = mae(pred, target);
    if (std::none_of(target.begin(), target.end(), [](double t) { return t == 0.0; })) m.mape = mape(pred, target);
    m.rmse = rmse(pred, target);
    if (pred.size() >= 2) m.pearson = pearson(pred, target);
    return m;
}

std::string_view to_string(GroundTruthProtocol p) {
    switch (p) {
        case GroundTruthProtocol::Peaks: return "peaks";
        case GroundTruthProtocol::Fft: return "fft";
        case GroundTruthProtocol::VerifiedPeaks: return "verified";
    }
    return "unknown";
}

std::optional<GroundTruthProtocol> parse_protocol(std::string_view name) {
    if (name == "peaks") return GroundTruthProtocol::Peaks;
    if (name == "fft") return GroundTruthProtocol::Fft;
    if (name == "verified") return GroundTruthProtocol::VerifiedPeaks;
    return std::nullopt;
}

BiometricReading reading_from_peak_times(std::span<const double> peak_times) {
    PeakList peaks;
    peaks.times.assign(peak_times.begin(), peak_times.end());
    peaks.indices.resize(peak_times.size());
    const TimeWindow window = peak_times.empty() ? TimeWindow{0.0, 0.0} : TimeWindow{peak_times.front(), peak_times.back()};
    return reading_for_window(peaks_to_ibis(peaks), window);
}

namespace {

BiometricReading fft_reading(const UniformSignal& pulse, TimeWindow window) {
    BiometricReading r;
    r.window = window;
    r.hr_bpm = Estimate::of(hr_from_fft(pulse, kGroundTruthBand));
    r.sdnn_ms = r.stress_si = Estimate::missing(Undefined::NotApplicable);
    return r;
}

BiometricReading peak_pipeline_reading(const UniformSignal& pulse, const PeakDetectorConfig& cfg) {
    const auto peaks = detect_peaks(pulse, cfg);
    const TimeWindow window{pulse.t0, pulse.time_at(pulse.size() - 1)};
    return reading_for_window(correct_ibis(peaks_to_ibis(peaks)), window);
}

}  // namespace

BiometricReading ground_truth_readings(const UniformSignal& pulse, GroundTruthProtocol protocol,
                                       std::optional<std::span<const double>> verified_peaks,
                                       const PeakDetectorConfig& peaks) {
    switch (protocol) {
        case GroundTruthProtocol::VerifiedPeaks:
            if (!verified_peaks) throw Error(ErrorCode::MissingVerifiedPeaks, "verified-peaks protocol needs a peak list");
            return reading_from_peak_times(*verified_peaks);
        case GroundTruthProtocol::Fft:
            return fft_reading(pulse, {pulse.t0, pulse.t0 + pulse.duration()});
        case GroundTruthProtocol::Peaks: {
            if (pulse.empty()) throw Error(ErrorCode::EmptySignal, "reference pulse is empty");
            const auto filtered = filter_zero_phase(pulse, design_butterworth_bandpass(kGroundTruthBand, pulse.sample_rate));
            return peak_pipeline_reading(filtered, peaks);
        }
    }
    throw Error(ErrorCode::InvalidConfig, "unknown protocol");
}

BiometricReading predict_recording(const RgbTrace& trace, const EvalConfig& config) {
    const auto wave = extract(config.extractor, trace, trace.nominal_rate, config.band, config.projection_window_s,
                              FilterMode::ZeroPhase);
    if (config.protocol == GroundTruthProtocol::Fft) {
        return fft_reading(wave.signal, {wave.signal.t0, wave.signal.t0 + wave.signal.duration()});
    }
    return peak_pipeline_reading(wave.signal, config.peaks);
}

std::size_t EvalReport::successes() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.ok; }));
}

EvalReport evaluate_corpus(const std::vector<Recording>& recordings, const EvalConfig& config) {
    if (recordings.empty()) throw Error(ErrorCode::EmptyInput, "corpus has no recordings");

    EvalReport report;
    report.rows.resize(recordings.size());
    auto evaluate_one = [&](std::size_t i) {
        const auto& rec = recordings[i];
        auto& row = report.rows[i];
        row.id = rec.id;
        try {
            if (rec.load_error) throw Error(ErrorCode::Format, *rec.load_error);
            if (config.protocol == GroundTruthProtocol::VerifiedPeaks) {
                if (!rec.verified_peaks) throw Error(ErrorCode::MissingVerifiedPeaks, "no verified peaks for " + rec.id);
                row.target = reading_from_peak_times(*rec.verified_peaks);
            } else {
                if (!rec.reference_pulse) throw Error(ErrorCode::EmptySignal, "no reference pulse for " + rec.id);
                row.target = ground_truth_readings(*rec.reference_pulse, config.protocol, std::nullopt, config.peaks);
            }
            row.predicted = predict_recording(rec.trace, config);
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };

    std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = std::min(threads, recordings.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < recordings.size(); ++i) evaluate_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < recordings.size(); i = next++) evaluate_one(i);
            });
        }
    }

    report.hr = metrics_for(report.rows, &BiometricReading::hr_bpm);
    report.sdnn = metrics_for(report.rows, &BiometricReading::sdnn_ms);
    report.stress = metrics_for(report.rows, &BiometricReading::stress_si);
    return report;
}

std::vector<Recording> load_corpus(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "corpus directory not found: " + dir.string());
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) subdirs.push_back(entry.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    if (subdirs.empty()) throw Error(ErrorCode::EmptyInput, "corpus " + dir.string() + " contains no recordings");

    std::vector<Recording> out;
    for (const auto& sub : subdirs) {
        Recording rec;
        rec.id = sub.filename().string();
        try {
            rec.trace = io::read_trace_csv(sub / "trace.csv");
            if (fs::exists(sub / "pulse.csv")) {
                rec.reference_pulse = io::read_pulse_csv(sub / "pulse.csv");
            } else if (fs::exists(sub / "ground_truth.txt")) {
                rec.reference_pulse = io::read_ubfc_ground_truth(sub / "ground_truth.txt").to_signal();
            }
            if (fs::exists(sub / "peaks.txt")) rec.verified_peaks = io::read_peaks_file(sub / "peaks.txt");
        } catch (const std::exception& e) {
            rec.load_error = e.what();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << "recording,status,hr_pred,hr_true,sdnn_pred,sdnn_true,stress_pred,stress_true,error\n";
    for (const auto& r : report.rows) {
        out << csv_escape(r.id) << ',' << (r.ok ? "ok" : "failed") << ',';
        if (r.ok) {
            out << cell(r.predicted.hr_bpm) << ',' << cell(r.target.hr_bpm) << ',' << cell(r.predicted.sdnn_ms) << ','
                << cell(r.target.sdnn_ms) << ',' << cell(r.predicted.stress_si) << ',' << cell(r.target.stress_si) << ",\n";
        } else {
            out << ",,,,,," << csv_escape(r.error) << '\n';
        }
    }
    out << "\nbiometric,n,mae,mape_pct,rmse,pearson\n";
    auto line = [&out](const char* name, const std::optional<MetricSet>& m) {
        if (!m) return;
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,", name, m->n, m->mae);
        out << buf;
        if (m->mape) {
            std::snprintf(buf, sizeof buf, "%.6f", *m->mape);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.6f,", m->rmse);
        out << buf;
        if (m->pearson) {
            std::snprintf(buf, sizeof buf, "%.6f", *m->pearson);
            out << buf;
        }
        out << '\n';
    };
    line("hr_bpm", report.hr);
    line("sdnn_ms", report.sdnn);
    line("stress_si", report.stress);
}

std::string format_summary(const EvalReport& report) {
    std::ostringstream os;
    char buf[200];
    std::snprintf(buf, sizeof buf, "recordings: %zu ok, %zu failed\n", report.successes(), report.failures());
    os << buf;
    std::snprintf(buf, sizeof buf, "%-10s %4s %10s %9s %10s %8s\n", "biometric", "n", "MAE", "MAPE%", "RMSE", "Pearson");
    os << buf;
    auto line = [&](const char* name, const std::optional<MetricSet>& m) {
        if (!m) return;
        char p[32] = "n/a";
        char pct[32] = "n/a";
        if (m->pearson) std::snprintf(p, sizeof p, "%.3f", *m->pearson);
        if (m->mape) std::snprintf(pct, sizeof pct, "%.2f", *m->mape);
        std::snprintf(buf, sizeof buf, "%-10s %4zu %10.3f %9s %10.3f %8s\n", name, m->n, m->mae, pct, m->rmse, p);
        os << buf;
    };
    line("HR", report.hr);
    line("SDNN", report.sdnn);
    line("Stress", report.stress);
    return os.str();
}

}  // namespace pulselab
