#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pulselab/signal.hpp"

namespace pulselab {

/// Per-frame mean skin-region colour.
struct RgbSample {
    double t;  // seconds
    double r;
    double g;
    double b;
};

struct RgbTrace {
    std::vector<RgbSample> samples;
    double nominal_rate = 30.0;
};

struct PulseWave {
    UniformSignal signal;
    BandpassSpec band = kOperatingBand;
};

enum class ExtractorId { Green, Chrom, Pos };

std::string_view to_string(ExtractorId id);
std::optional<ExtractorId> parse_extractor(std::string_view name);

/// Causal filtering reproduces what a live session sees; zero-phase is for
/// offline analysis where peak timing must not shift.
enum class FilterMode { Causal, ZeroPhase };

inline constexpr double kDefaultProjectionWindowS = 1.6;

PulseWave extract_green(const RgbTrace& trace, double rate, const BandpassSpec& band = kOperatingBand,
                        FilterMode mode = FilterMode::ZeroPhase);
PulseWave extract_chrom(const RgbTrace& trace, double rate, const BandpassSpec& band = kOperatingBand,
                        double window_s = kDefaultProjectionWindowS, FilterMode mode = FilterMode::ZeroPhase);
PulseWave extract_pos(const RgbTrace& trace, double rate, const BandpassSpec& band = kOperatingBand,
                      double window_s = kDefaultProjectionWindowS, FilterMode mode = FilterMode::ZeroPhase);
PulseWave extract(ExtractorId id, const RgbTrace& trace, double rate, const BandpassSpec& band = kOperatingBand,
                  double window_s = kDefaultProjectionWindowS, FilterMode mode = FilterMode::ZeroPhase);

/// Unfiltered projection for one window of temporally normalized channels.
/// Output is mean-centred with heartbeats as maxima. A window whose
/// secondary projection has zero spread falls back to the primary one.
std::vector<double> project_window(ExtractorId id, std::span<const double> r, std::span<const double> g,
                                   std::span<const double> b);

/// Number of samples in a projection window (even, >= 2).
std::size_t projection_window_samples(double window_s, double rate);

/// Incremental extractor fed with frames already on the uniform grid.
///
/// Emits each pulse sample once no later input can change it, so the
/// emitted prefix is bit-identical to the causal batch extractor on the
/// same samples. Latency is one projection window for CHROM/POS and half a
/// detrending window for GREEN.
class StreamingExtractor {
public:
    StreamingExtractor(ExtractorId id, double rate, const BandpassSpec& band = kOperatingBand,
                       double window_s = kDefaultProjectionWindowS);

    /// Push one uniform-grid sample; finalized pulse values are appended to `out`.
    void push(double r, double g, double b, std::vector<double>& out);
    void reset();

    std::size_t samples_in() const noexcept { return n_in_; }
    std::size_t samples_out() const noexcept { return n_out_; }
    std::size_t buffered() const noexcept { return r_.size() + g_.size() + b_.size() + overlap_.size(); }
    /// Upper bound on buffered doubles, independent of stream length.
    std::size_t buffer_capacity() const noexcept;

private:
    void emit(double raw, std::vector<double>& out);

    ExtractorId id_;
    double rate_;
    std::size_t window_;  // projection window (CHROM/POS)
    std::size_t hop_;
    std::size_t detrend_half_;  // GREEN
    std::vector<double> hann_;
    SosFilter filter_;

    // Sliding history; index 0 corresponds to absolute sample `base_`.
    std::vector<double> r_, g_, b_;
    std::vector<double> overlap_;  // pending overlap-add accumulator starting at n_out_
    std::size_t base_ = 0;
    std::size_t n_in_ = 0;
    std::size_t n_out_ = 0;
};

}  // namespace pulselab
