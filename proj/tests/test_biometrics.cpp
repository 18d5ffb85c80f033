#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pulselab/biometrics.hpp"
#include "pulselab/error.hpp"

using namespace pulselab;

namespace {

const std::vector<double> kFive{0.80, 0.82, 0.81, 0.79, 1.00};

UniformSignal sinusoid(double hz, double seconds = 60.0, double rate = 30.0) {
    const auto n = static_cast<std::size_t>(seconds * rate);
    UniformSignal s{std::vector<double>(n), rate, 0.0};
    for (std::size_t i = 0; i < n; ++i) s.samples[i] = std::sin(2 * std::numbers::pi * hz * i / rate);
    return s;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("reference values for a small interval set") {
    CHECK(heart_rate_bpm(kFive) == doctest::Approx(71.09004739336493).epsilon(1e-12));
    CHECK(sdnn_ms(kFive) == doctest::Approx(78.63841300534999).epsilon(1e-12));
    CHECK(baevsky_si(kFive) == doctest::Approx(1.1796318737046891).epsilon(1e-12));
    const auto m = ibi_histogram_mode(kFive);
    CHECK(m.mode_bin_start == doctest::Approx(0.80));
    CHECK(m.mo == doctest::Approx(0.825));
    CHECK(m.amo == doctest::Approx(0.6));
}

TEST_CASE("heart rate") {
    const std::vector<double> one_sec(10, 1.0);
    CHECK(heart_rate_bpm(one_sec) == 60.0);
    CHECK(heart_rate_bpm(std::vector<double>{0.5, 1.0}) == doctest::Approx(80.0));
    CHECK(heart_rate_bpm(std::vector<double>{0.5, 0.5}) == doctest::Approx(120.0));
    CHECK(heart_rate_bpm(std::vector<double>{0.8, 0.75, 0.85}) == doctest::Approx(75.0));
    CHECK(code_of([] { heart_rate_bpm(std::vector<double>{}); }) == ErrorCode::NoValidIbis);
}

TEST_CASE("SDNN is the population standard deviation") {
    CHECK(sdnn_ms(std::vector<double>{0.9, 1.1}) == doctest::Approx(100.0));
    CHECK(sdnn_ms(std::vector<double>{0.8, 1.0}) == doctest::Approx(100.0));
    CHECK(sdnn_ms(std::vector<double>(7, 0.8)) == 0.0);
    CHECK(code_of([] { sdnn_ms(std::vector<double>{0.8}); }) == ErrorCode::TooFewIbis);
}

TEST_CASE("histogram bins") {
    SUBCASE("bin edges are half-open") {
        const auto m = ibi_histogram_mode(std::vector<double>{0.85, 0.85, 0.899, 0.95});
        CHECK(m.mode_bin_start == doctest::Approx(0.85));
        CHECK(m.amo == doctest::Approx(0.75));
    }
    SUBCASE("ties go to the shorter bin") {
        const auto m = ibi_histogram_mode(std::vector<double>{0.71, 0.72, 0.91, 0.92});
        CHECK(m.mode_bin_start == doctest::Approx(0.70));
        CHECK(m.mo == doctest::Approx(0.725));
        CHECK(m.amo == doctest::Approx(0.5));
    }
}

TEST_CASE("stress index") {
    // Two values 100 ms apart: sdnn 50 ms, mode bin [0.80, 0.85) by tie rule.
    const std::vector<double> v{0.8, 0.9};
    CHECK(baevsky_si(v) == doctest::Approx(0.5 / (2 * 0.825 * 3.92 * 0.05)));
    CHECK(code_of([] { baevsky_si(std::vector<double>(5, 0.75)); }) == ErrorCode::DegenerateWindow);
}

TEST_CASE("relaxed series scores lower stress than a rigid one") {
    const std::vector<double> rigid{0.80, 0.81, 0.82, 0.81, 0.80, 0.83};
    const std::vector<double> relaxed{0.70, 0.81, 0.92, 0.81, 0.85, 0.76};
    CHECK(ibi_histogram_mode(rigid).mo == ibi_histogram_mode(relaxed).mo);
    CHECK(baevsky_si(relaxed) < baevsky_si(rigid));
}

TEST_CASE("unit conversion round-trips") {
    for (double ms : {285.0, 812.5, 1538.0}) {
        CHECK(s_to_ms(ms_to_s(ms)) == doctest::Approx(ms).epsilon(1e-15));
    }
    std::vector<double> from_ms;
    for (double ms : {800.0, 820.0, 810.0, 790.0, 1000.0}) from_ms.push_back(ms_to_s(ms));
    CHECK(baevsky_si(from_ms) == doctest::Approx(baevsky_si(kFive)).epsilon(1e-12));
}

TEST_CASE("readings carry reasons for undefined values") {
    const TimeWindow w{0.0, 10.0};
    const auto none = reading_from_intervals({}, w);
    CHECK_FALSE(none.hr_bpm.defined());
    CHECK(none.hr_bpm.reason == Undefined::NoValidIbis);
    CHECK(none.status() == "no_valid_ibis");

    const auto one = reading_from_intervals(std::vector<double>{0.8}, w);
    CHECK_FALSE(one.hr_bpm.defined());
    CHECK(one.hr_bpm.reason == Undefined::TooFewIbis);
    CHECK(one.sdnn_ms.reason == Undefined::TooFewIbis);
    CHECK(one.stress_si.reason == Undefined::TooFewIbis);
    CHECK(one.status() == "too_few_ibis");

    const auto flat = reading_from_intervals(std::vector<double>(4, 0.75), w);
    CHECK(*flat.hr_bpm.value == doctest::Approx(80.0));
    CHECK(*flat.sdnn_ms.value == 0.0);
    CHECK(flat.stress_si.reason == Undefined::DegenerateWindow);
    CHECK(flat.status() == "degenerate");

    const auto ok = reading_from_intervals(kFive, w);
    CHECK(ok.status() == "ok");
    CHECK(ok.n_ibis == 5);
}

TEST_CASE("window selection uses valid intervals closing inside the window") {
    IbiSeries s;
    s.entries = {{1.0, 1.0, true}, {2.0, 1.0, true}, {2.2, 0.2, false}, {3.0, 0.8, true}, {4.0, 1.0, true}};
    const auto r = reading_for_window(s, {2.0, 3.0});
    CHECK(r.n_ibis == 2);
    CHECK(*r.hr_bpm.value == doctest::Approx(60.0 / 0.9));
}

TEST_CASE("sliding readings follow the warm-up schedule") {
    IbiSeries s;
    for (int k = 1; k <= 120; ++k) s.entries.push_back({static_cast<double>(k), 1.0, true});
    const auto rs = sliding_readings(s, 0.0, 120.0, 60.0, 10.0, 1.0);
    REQUIRE(rs.size() == 111);
    CHECK(rs.front().window.t_start == 0.0);
    CHECK(rs.front().window.t_end == 10.0);
    CHECK(rs[25].window.t_end == 35.0);
    CHECK(rs[25].window.t_start == 0.0);
    CHECK(rs.back().window.t_start == 60.0);
    CHECK(rs.back().window.t_end == 120.0);
    CHECK(code_of([&] { sliding_readings(s, 0.0, 120.0, 5.0, 10.0, 1.0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("FFT heart rate on pure tones") {
    for (double hz : {0.8, 1.0, 1.5, 2.0}) {
        CHECK(std::abs(hr_from_fft(sinusoid(hz)) - hz * 60.0) <= 0.6);
    }
    CHECK(code_of([] { hr_from_fft(sinusoid(1.0, 9.0)); }) == ErrorCode::SignalTooShort);
}

TEST_CASE("property: interval order does not matter") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(kMinIbiS, kMaxIbiS);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(5 + trial % 50);
        for (auto& x : v) x = u(rng);
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(heart_rate_bpm(shuffled) == doctest::Approx(heart_rate_bpm(v)).epsilon(1e-12));
        CHECK(sdnn_ms(shuffled) == doctest::Approx(sdnn_ms(v)).epsilon(1e-12));
        CHECK(baevsky_si(shuffled) == doctest::Approx(baevsky_si(v)).epsilon(1e-12));
    }
}

TEST_CASE("property: scaling intervals scales HR inversely and SDNN linearly") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.5, 0.7), c(1.1, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(10);
        for (auto& x : v) x = u(rng);
        const double k = c(rng);
        auto scaled = v;
        for (auto& x : scaled) x *= k;
        CHECK(heart_rate_bpm(scaled) == doctest::Approx(heart_rate_bpm(v) / k).epsilon(1e-12));
        CHECK(sdnn_ms(scaled) == doctest::Approx(sdnn_ms(v) * k).epsilon(1e-12));
    }
}
