#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

#include "pulselab/biometrics.hpp"
#include "pulselab/error.hpp"
#include "pulselab/eval.hpp"
#include "pulselab/extract.hpp"
#include "pulselab/ibi.hpp"
#include "pulselab/io.hpp"
#include "pulselab/monitor.hpp"
#include "pulselab/synth.hpp"

namespace fs = std::filesystem;
using namespace pulselab;

namespace {

enum Exit { kOk = 0, kInput = 1, kPrecondition = 2, kInternal = 3 };

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::Format:
        case ErrorCode::Io:
        case ErrorCode::EmptyTrace:
        case ErrorCode::NonMonotonicTimestamps:
        case ErrorCode::TooFewSamples:
        case ErrorCode::EmptySignal:
        case ErrorCode::SignalTooShort:
            return kInput;
        case ErrorCode::InvalidBand:
        case ErrorCode::InvalidSpec:
        case ErrorCode::InvalidConfig:
        case ErrorCode::EmptyInput:
        case ErrorCode::MissingVerifiedPeaks:
        case ErrorCode::LengthMismatch:
        case ErrorCode::ZeroTarget:
        case ErrorCode::TooFewPoints:
        case ErrorCode::NoValidIbis:
        case ErrorCode::TooFewIbis:
        case ErrorCode::DegenerateWindow:
        case ErrorCode::InsufficientSamples:
            return kPrecondition;
        case ErrorCode::OutOfOrderChunk:
        case ErrorCode::NonContiguousChunk:
            return kInternal;
    }
    return kInternal;
}

// "a,b" -> pair; throws a precondition error otherwise.
std::pair<double, double> parse_pair(const std::string& text, const char* flag) {
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) throw std::invalid_argument(text);
        std::size_t used_a = 0, used_b = 0;
        const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
        const double x = std::stod(a, &used_a);
        const double y = std::stod(b, &used_b);
        if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(text);
        return {x, y};
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidConfig, std::string(flag) + " expects two numbers as 'a,b', got '" + text + "'");
    }
}

BandpassSpec parse_band(const std::string& text) {
    const auto [lo, hi] = parse_pair(text, "--band");
    return {lo, hi, kOperatingBand.order};
}

ExtractorId parse_algo(const std::string& name) {
    if (auto id = parse_extractor(name)) return *id;
    throw Error(ErrorCode::InvalidConfig, "unknown algorithm '" + name + "' (pos, chrom, green)");
}

std::size_t thread_cap() {
    const char* env = std::getenv("PULSELAB_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw Error(ErrorCode::InvalidConfig, "PULSELAB_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
}

struct SynthArgs {
    double duration = 0, fps = 0, hr = 0, sdnn = 0, noise = 0;
    std::string drift;
    std::uint64_t seed = 0;
    std::string out, truth;
};

int run_synth(const SynthArgs& a) {
    SynthSpec spec;
    spec.duration_s = a.duration;
    spec.fps = a.fps;
    spec.base_hr_bpm = a.hr;
    spec.hrv_sdnn_ms = a.sdnn;
    spec.ibi_model = a.sdnn > 0.0 ? IbiModel::Jittered : IbiModel::Fixed;
    spec.noise_std = a.noise;
    if (!a.drift.empty()) std::tie(spec.drift_amplitude, spec.drift_hz) = parse_pair(a.drift, "--drift");
    spec.seed = a.seed;
    const auto result = synth_trace(spec);

    io::write_trace_csv(a.out, result.trace);
    if (!a.truth.empty()) {
        const fs::path dir = a.truth;
        io::write_pulse_csv(dir / "pulse.csv", result.pulse);
        io::write_peaks_file(dir / "peaks.txt", result.beat_times);
        io::write_ibi_file(dir / "ibis.txt", result.ibis.valid_intervals());
        io::write_readings_csv(dir / "truth.csv", result.windowed);
    }
    const auto& o = result.overall;
    std::printf("synth: %zu frames, %zu beats, hr %.2f bpm, sdnn %.2f ms -> %s\n", result.trace.samples.size(),
                result.beat_times.size(), o.hr_bpm.value.value_or(0.0), o.sdnn_ms.value.value_or(0.0), a.out.c_str());
    return kOk;
}

struct ExtractArgs {
    std::string algo = "pos", input, band, out;
};

int run_extract(const ExtractArgs& a) {
    const auto id = parse_algo(a.algo);
    const auto band = a.band.empty() ? kOperatingBand : parse_band(a.band);
    design_butterworth_bandpass(band, 1000.0);  // validates the band before any file I/O
    const auto trace = io::read_trace_csv(a.input);
    const auto wave = extract(id, trace, trace.nominal_rate, band);
    io::write_pulse_csv(a.out, wave.signal);
    std::printf("extract: %s, %zu samples at %.2f Hz -> %s\n", std::string(to_string(id)).c_str(), wave.signal.size(),
                wave.signal.sample_rate, a.out.c_str());
    return kOk;
}

struct AnalyzeArgs {
    std::string pulse, ibis, out;
    double window = 60.0, min_window = 10.0, step = 1.0;
};

int run_analyze(const AnalyzeArgs& a) {
    if (!(a.min_window > 0.0 && a.min_window <= a.window && a.step > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "need 0 < --min-window <= --window and --step > 0");
    }
    IbiSeries series;
    double t_begin = 0.0, t_last = 0.0;
    if (!a.pulse.empty()) {
        const auto pulse = io::read_pulse_csv(a.pulse);
        series = correct_ibis(peaks_to_ibis(detect_peaks(pulse)));
        t_begin = pulse.t0;
        t_last = pulse.time_at(pulse.size() - 1);
    } else {
        double t = 0.0;
        for (double x : io::read_ibi_file(a.ibis)) {
            t += x;
            series.entries.push_back({t, x, ibi_in_band(x)});
        }
        t_last = t;
    }
    const auto readings = sliding_readings(series, t_begin, t_last, a.window, a.min_window, a.step);
    io::write_readings_csv(a.out, readings);
    std::printf("analyze: %zu intervals, %zu readings -> %s\n", series.entries.size(), readings.size(), a.out.c_str());
    return kOk;
}

struct MonitorArgs {
    std::string algo = "pos", input, out, peaks_out;
    double window = 60.0, min_window = 10.0, step = 1.0;
    bool budget = false;
};

int run_monitor(const MonitorArgs& a) {
    MonitorConfig config;
    config.extractor = parse_algo(a.algo);
    config.window_s = a.window;
    config.min_window_s = a.min_window;
    config.update_period_s = a.step;
    config.validate();
    const auto trace = io::read_trace_csv(a.input);
    if (trace.nominal_rate > 0.0) config.nominal_rate = trace.nominal_rate;

    MonitorSession session(config);
    std::vector<double> peaks;
    if (!a.peaks_out.empty()) session.set_peak_observer([&](double t) { peaks.push_back(t); });
    const auto readings = session.push_frames(trace.samples);

    io::write_readings_csv(a.out, readings);
    if (!a.peaks_out.empty()) io::write_peaks_file(a.peaks_out, peaks);
    std::printf("monitor: %zu frames, %zu readings -> %s\n", session.frames_processed(), readings.size(), a.out.c_str());
    if (a.budget) {
        const auto stats = session.per_frame_budget_check();
        std::printf("per-frame: mean %.4f ms, p95 %.4f ms, max %.4f ms over %zu frames\n", stats.mean_s * 1e3,
                    stats.p95_s * 1e3, stats.max_s * 1e3, stats.frames);
    }
    return kOk;
}

struct EvalArgs {
    std::string corpus, algo = "pos", protocol = "peaks", out;
};

int run_eval(const EvalArgs& a) {
    EvalConfig config;
    config.extractor = parse_algo(a.algo);
    const auto protocol = parse_protocol(a.protocol);
    if (!protocol) throw Error(ErrorCode::InvalidConfig, "unknown protocol '" + a.protocol + "' (peaks, fft, verified)");
    config.protocol = *protocol;
    config.threads = thread_cap();

    const auto recordings = load_corpus(a.corpus);
    const auto report = evaluate_corpus(recordings, config);
    write_report_csv(a.out, report);
    std::cout << format_summary(report);
    for (const auto& row : report.rows) {
        if (!row.ok) std::cerr << "eval: " << row.id << " failed: " << row.error << '\n';
    }
    return report.successes() > 0 ? kOk : kInput;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulse-wave extraction, interval detection and heart-rate biometrics"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate a synthetic RGB trace with known beats");
    s->add_option("--duration", synth.duration, "Length in seconds")->required();
    s->add_option("--fps", synth.fps, "Frame rate in Hz")->required();
    s->add_option("--hr", synth.hr, "Mean heart rate in bpm, within [39, 210]")->required();
    s->add_option("--sdnn", synth.sdnn, "Interval standard deviation in ms (0 = fixed intervals)");
    s->add_option("--noise", synth.noise, "Gaussian noise std on the 0-255 channel scale");
    s->add_option("--drift", synth.drift, "Sinusoidal illumination drift as 'amplitude,hz'");
    s->add_option("--seed", synth.seed, "Random seed")->required();
    s->add_option("-o,--output", synth.out, "Trace CSV to write")->required();
    s->add_option("--truth", synth.truth, "Directory for pulse.csv, peaks.txt, ibis.txt and truth.csv");

    ExtractArgs ext;
    auto* e = app.add_subcommand("extract", "Extract a filtered pulse wave from a trace");
    e->add_option("--algo", ext.algo, "pos, chrom or green")->capture_default_str();
    e->add_option("--input", ext.input, "Trace CSV (t_ms,r,g,b)")->required();
    e->add_option("--band", ext.band, "Passband as 'low,high' in Hz (default 0.65,3.5)");
    e->add_option("-o,--output", ext.out, "Pulse CSV to write")->required();

    AnalyzeArgs an;
    auto* a = app.add_subcommand("analyze", "Windowed heart rate, SDNN and stress from a pulse wave or intervals");
    auto* pulse_opt = a->add_option("--pulse", an.pulse, "Pulse CSV (t_ms,value)");
    auto* ibis_opt = a->add_option("--ibis", an.ibis, "Interval file, integer ms per line");
    pulse_opt->excludes(ibis_opt);
    a->add_option("--window", an.window, "Window length in seconds")->capture_default_str();
    a->add_option("--min-window", an.min_window, "Data needed before the first reading, seconds")->capture_default_str();
    a->add_option("--step", an.step, "Seconds between readings")->capture_default_str();
    a->add_option("-o,--output", an.out, "Readings CSV to write")->required();

    MonitorArgs mon;
    auto* m = app.add_subcommand("monitor", "Replay a trace frame by frame through a live session");
    m->add_option("--algo", mon.algo, "pos, chrom or green")->capture_default_str();
    m->add_option("--input", mon.input, "Trace CSV (t_ms,r,g,b)")->required();
    m->add_option("--window", mon.window, "Window length in seconds")->capture_default_str();
    m->add_option("--min-window", mon.min_window, "Warm-up before the first reading, seconds")->capture_default_str();
    m->add_option("--step", mon.step, "Seconds between readings")->capture_default_str();
    m->add_option("--peaks-out", mon.peaks_out, "Write confirmed peak times here");
    m->add_flag("--budget", mon.budget, "Print per-frame processing time");
    m->add_option("-o,--output", mon.out, "Readings CSV to write")->required();

    EvalArgs ev;
    auto* v = app.add_subcommand("eval", "Evaluate an extractor over a corpus directory");
    v->add_option("--corpus", ev.corpus, "One sub-directory per recording")->required();
    v->add_option("--algo", ev.algo, "pos, chrom or green")->capture_default_str();
    v->add_option("--protocol", ev.protocol, "Reference protocol: peaks, fft or verified")->capture_default_str();
    v->add_option("-o,--output", ev.out, "Report CSV to write")->required();
    v->footer("PULSELAB_THREADS caps the number of worker threads.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kPrecondition;
    }

    try {
        if (*s) return run_synth(synth);
        if (*e) return run_extract(ext);
        if (*a) {
            if (an.pulse.empty() && an.ibis.empty()) {
                std::cerr << "analyze: one of --pulse or --ibis is required\n";
                return kPrecondition;
            }
            return run_analyze(an);
        }
        if (*m) return run_monitor(mon);
        if (*v) return run_eval(ev);
    } catch (const Error& err) {
        std::cerr << "error [" << to_string(err.code()) << "]: " << err.what() << '\n';
        return exit_code(err.code());
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
