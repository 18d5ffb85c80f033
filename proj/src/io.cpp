#include "pulselab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pulselab/error.hpp"

namespace pulselab::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

double parse_number(std::string_view field, const std::filesystem::path& path, std::size_t line) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::Format,
                    path.string() + ":" + std::to_string(line) + ": not a number: '" + std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// Rows of a CSV with a fixed header; blank lines are skipped.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path, std::string_view header) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != header) {
        throw Error(ErrorCode::Format, path.string() + ": expected header '" + std::string(header) + "'");
    }
    const std::size_t columns = split(header, ',').size();
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        if (fields.size() != columns) {
            throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                               std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(columns);
        for (auto f : fields) row.push_back(parse_number(f, path, line_no));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> read_column(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        out.push_back(parse_number(line, path, line_no));
    }
    return out;
}

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string format_estimate(const Estimate& e, const char* fmt) { return e.defined() ? format(fmt, *e.value) : ""; }

}  // namespace

double infer_rate(const std::vector<double>& times_s) {
    if (times_s.size() < 2) throw Error(ErrorCode::TooFewSamples, "cannot infer a rate from fewer than 2 timestamps");
    std::vector<double> dt;
    dt.reserve(times_s.size() - 1);
    for (std::size_t i = 1; i < times_s.size(); ++i) dt.push_back(times_s[i] - times_s[i - 1]);
    std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2), dt.end());
    const double median = dt[dt.size() / 2];
    if (!(median > 0.0)) throw Error(ErrorCode::NonMonotonicTimestamps, "median frame interval is not positive");
    return std::round(100.0 / median) / 100.0;
}

RgbTrace read_trace_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path, "t_ms,r,g,b");
    if (rows.empty()) throw Error(ErrorCode::EmptyTrace, path.string() + ": no frames");
    RgbTrace trace;
    trace.samples.reserve(rows.size());
    std::vector<double> times;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row[1] < 0.0 || row[2] < 0.0 || row[3] < 0.0) {
            throw Error(ErrorCode::Format, path.string() + ": negative intensity on data row " + std::to_string(i + 1));
        }
        const double t = row[0] / 1000.0;
        if (!trace.samples.empty() && !(t > trace.samples.back().t)) {
            throw Error(ErrorCode::NonMonotonicTimestamps, path.string() + ": timestamps must strictly increase (data row " +
                                                               std::to_string(i + 1) + ")");
        }
        trace.samples.push_back({t, row[1], row[2], row[3]});
        times.push_back(t);
    }
    if (times.size() >= 2) trace.nominal_rate = infer_rate(times);
    return trace;
}

void write_trace_csv(const std::filesystem::path& path, const RgbTrace& trace) {
    auto out = open_out(path);
    out << "t_ms,r,g,b\n";
    char buf[160];
    for (const auto& s : trace.samples) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", s.t * 1000.0, s.r, s.g, s.b);
        out << buf;
    }
}

UniformSignal read_pulse_csv(const std::filesystem::path& path) {
    const auto rows = read_csv(path, "t_ms,value");
    std::vector<Sample> samples;
    samples.reserve(rows.size());
    std::vector<double> times;
    for (const auto& row : rows) {
        samples.push_back({row[0] / 1000.0, row[1]});
        times.push_back(row[0] / 1000.0);
    }
    if (samples.size() < 2) throw Error(ErrorCode::TooFewSamples, path.string() + ": pulse wave needs at least 2 samples");
    return resample_uniform(samples, infer_rate(times));
}

void write_pulse_csv(const std::filesystem::path& path, const UniformSignal& signal) {
    auto out = open_out(path);
    out << "t_ms,value\n";
    char buf[96];
    for (std::size_t k = 0; k < signal.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.6f,%.12g\n", signal.time_at(k) * 1000.0, signal.samples[k]);
        out << buf;
    }
}

std::vector<double> read_ibi_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto field = trim(line);
        if (field.empty()) continue;
        long long ms = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), ms);
        if (ec != std::errc() || ptr != field.data() + field.size() || ms <= 0) {
            throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(line_no) +
                                               ": expected a positive integer interval in ms, got '" + std::string(field) + "'");
        }
        out.push_back(static_cast<double>(ms) / 1000.0);
    }
    return out;
}

void write_ibi_file(const std::filesystem::path& path, const std::vector<double>& ibis_s) {
    auto out = open_out(path);
    for (double x : ibis_s) out << std::llround(x * 1000.0) << '\n';
}

std::vector<double> read_peaks_file(const std::filesystem::path& path) {
    auto peaks = read_column(path);
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        if (!(peaks[i] > peaks[i - 1])) {
            throw Error(ErrorCode::Format, path.string() + ": peak times must strictly increase");
        }
    }
    return peaks;
}

void write_peaks_file(const std::filesystem::path& path, const std::vector<double>& times_s) {
    auto out = open_out(path);
    char buf[64];
    for (double t : times_s) {
        std::snprintf(buf, sizeof buf, "%.9f\n", t);
        out << buf;
    }
}

UniformSignal UbfcGroundTruth::to_signal() const {
    std::vector<Sample> samples(pulse.size());
    for (std::size_t i = 0; i < pulse.size(); ++i) samples[i] = {times_s[i], pulse[i]};
    return resample_uniform(samples, infer_rate(times_s));
}

UbfcGroundTruth read_ubfc_ground_truth(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::istringstream fields{std::string(trim(line))};
        std::string field;
        while (fields >> field) row.push_back(parse_number(field, path, line_no));
        rows.push_back(std::move(row));
    }
    if (rows.size() != 3) {
        throw Error(ErrorCode::Format, path.string() + ": expected 3 rows (pulse, HR, time), got " + std::to_string(rows.size()));
    }
    if (rows[0].size() != rows[1].size() || rows[0].size() != rows[2].size()) {
        throw Error(ErrorCode::Format, path.string() + ": rows have unequal lengths");
    }
    if (rows[0].size() < 2) throw Error(ErrorCode::TooFewSamples, path.string() + ": fewer than 2 samples");
    return {std::move(rows[0]), std::move(rows[1]), std::move(rows[2])};
}

std::string readings_csv_header() { return "t_end_s,hr_bpm,sdnn_ms,stress_si,n_ibis,status"; }

std::string readings_csv_row(const BiometricReading& r) {
    return format("%.3f", r.window.t_end) + "," + format_estimate(r.hr_bpm, "%.4f") + "," +
           format_estimate(r.sdnn_ms, "%.4f") + "," + format_estimate(r.stress_si, "%.6f") + "," +
           std::to_string(r.n_ibis) + "," + std::string(r.status());
}

void write_readings_csv(const std::filesystem::path& path, const std::vector<BiometricReading>& readings) {
    auto out = open_out(path);
    out << readings_csv_header() << '\n';
    for (const auto& r : readings) out << readings_csv_row(r) << '\n';
}

}  // namespace pulselab::io
