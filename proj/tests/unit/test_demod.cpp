#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "tofsim/demod.hpp"
#include "tofsim/error.hpp"

using namespace tofsim;

namespace {
constexpr double kFs = 625e6;
constexpr double kF = 31.25e6;
const double kRange = constants::ambiguity_range(kF);

SignalSpec sine(double a, double dc, double phase = 0.0) { return {WaveKind::Sine, a, dc, kF, phase}; }

double wrap_diff(double a, double b) {
    double d = std::fmod(a - b, 2 * constants::kPi);
    if (d > constants::kPi) d -= 2 * constants::kPi;
    if (d < -constants::kPi) d += 2 * constants::kPi;
    return std::abs(d);
}
}  // namespace

TEST_CASE("correlate: unit sine with itself over one period") {
    const Trace t = synthesize(sine(1.0, 0.0), kFs, 20);
    CHECK(correlate(t, t) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("correlate: quadrature sines are orthogonal") {
    const Trace a = synthesize(sine(1.0, 0.0), kFs, 20);
    const Trace b = synthesize(sine(1.0, 0.0, constants::kPi / 2), kFs, 20);
    CHECK(std::abs(correlate(a, b)) < 1e-15);
}

TEST_CASE("correlate: spectral parameters over 500 periods") {
    const Trace r = synthesize(sine(0.526, 0.572), kFs, 10000);
    const Trace s = synthesize(sine(0.4704, 0.0099), kFs, 10000);
    const double expected = 0.526 * 0.4704 / 2 + 0.572 * 0.0099;
    CHECK(expected == doctest::Approx(0.12938).epsilon(1e-4));
    CHECK(correlate(r, s) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(correlate(r, s) ==
          doctest::Approx(oracle::direct_correlation(0.526, 0.572, 0.4704, 0.0099, 0, 0, kF, kFs, 10000)).epsilon(1e-12));
}

TEST_CASE("correlate: mismatched traces are rejected") {
    const Trace a = synthesize(sine(1.0, 0.0), kFs, 20);
    const Trace b = synthesize(sine(1.0, 0.0), kFs, 40);
    const Trace c = synthesize(sine(1.0, 0.0), 2 * kFs, 20);
    CHECK_THROWS_AS(correlate(a, b), ValidationError);
    CHECK_THROWS_AS(correlate(a, c), ValidationError);
}

TEST_CASE("demodulate4: in-phase and quadrature cases") {
    const double R = 0.6, M = 0.4704;
    const SignalSpec demod = sine(M, 0.0099);
    SUBCASE("phi = 0") {
        const auto cs = demodulate4(synthesize(sine(R, 0.3), kFs, 200), demod);
        CHECK(cs.c[0] - cs.c[2] == doctest::Approx(R * M).epsilon(1e-12));
        CHECK(std::abs(cs.c[3] - cs.c[1]) < 1e-14);
    }
    SUBCASE("phi = pi/2") {
        const auto cs = demodulate4(synthesize(sine(R, 0.3, -constants::kPi / 2), kFs, 200), demod);
        CHECK(std::abs(cs.c[0] - cs.c[2]) < 1e-14);
        CHECK(std::abs(cs.c[3] - cs.c[1]) == doctest::Approx(R * M).epsilon(1e-12));
    }
}

TEST_CASE("demodulate4: offset is R_DC times M_DC at any phase") {
    for (double phi : {0.0, 0.4, 2.0, 5.9}) {
        const auto cs = demodulate4(synthesize(sine(0.526, 0.572, -phi), kFs, 10000), sine(0.4704, 0.0099));
        CHECK(extract(cs).offset == doctest::Approx(0.572 * 0.0099).epsilon(1e-12));
        CHECK(extract(cs).offset == doctest::Approx(0.0057).epsilon(0.01));
    }
}

TEST_CASE("demodulate4: taps match the direct-summation oracle") {
    const double phi = 1.1;
    const auto cs = demodulate4(synthesize(sine(0.3, 0.35, -phi), kFs, 500), sine(0.47, 0.01));
    for (int n = 0; n < 4; ++n) {
        const double pn = n * constants::kPi / 2;
        CHECK(cs.c[n] == doctest::Approx(oracle::direct_correlation(0.3, 0.35, 0.47, 0.01, phi, pn, kF, kFs, 500))
                             .epsilon(1e-12));
        CHECK(cs.c[n] == doctest::Approx(oracle::closed_form_correlation(0.3, 0.35, 0.47, 0.01, phi, pn)).epsilon(1e-12));
    }
}

TEST_CASE("demodulate4: trace and analytic demodulation inputs agree") {
    const Trace rx = synthesize(sine(0.3, 0.35, -0.8), kFs, 1000);
    const auto a = demodulate4(rx, sine(0.47, 0.01));
    const auto b = demodulate4(rx, synthesize(sine(0.47, 0.01), kFs, 1000), kF);
    CHECK(a == b);
}

TEST_CASE("demodulate4: fs/4f not an integer falls back to resynthesis") {
    const double fs = 600e6;  // 19.2 samples per period
    const SignalSpec demod{WaveKind::Sine, 0.47, 0.01, kF, 0.0};
    const Trace rx = synthesize({WaveKind::Sine, 0.3, 0.35, kF, -1.3}, fs, 96);  // 5 periods
    const auto cs = demodulate4(rx, demod);
    CHECK_FALSE(cs.non_integer_periods);
    CHECK(extract(cs).phase_rad == doctest::Approx(1.3).epsilon(1e-9));
    CHECK_THROWS_AS(demodulate4(rx, synthesize(demod, fs, 96), kF), ValidationError);
}

TEST_CASE("extract: in-phase correlation set") {
    CorrelationSet cs;
    cs.c = {0.5, 0.25, 0.0, 0.25};
    cs.modulation_frequency_hz = kF;
    cs.integration_time_s = 16e-6;
    const auto r = extract(cs);
    CHECK(r.phase_rad == 0.0);
    CHECK(r.distance_m == 0.0);
    CHECK(r.offset == 0.25);
    CHECK(r.amplitude == doctest::Approx(0.25));
}

TEST_CASE("extract: a quarter-period delay reads c/8f") {
    const auto cs = demodulate4(synthesize(sine(0.5, 0.5, -constants::kPi / 2), kFs, 200), sine(0.47, 0.01));
    const auto r = extract(cs);
    CHECK(r.phase_rad == doctest::Approx(constants::kPi / 2).epsilon(1e-12));
    CHECK(r.distance_m == doctest::Approx(oracle::c / (8 * kF)).epsilon(1e-12));
    CHECK(r.distance_m == doctest::Approx(1.19917).epsilon(1e-5));
}

TEST_CASE("extract: contrast from measured spectral amplitudes") {
    CorrelationSet cs;
    cs.c = {0.00566 + 0.247, 0.00566, 0.00566 - 0.247, 0.00566};
    cs.modulation_frequency_hz = kF;
    cs.integration_time_s = 16e-6;
    const auto r = extract(cs);
    CHECK(r.contrast == doctest::Approx(0.247 / 0.00566).epsilon(1e-12));
    CHECK(r.contrast == doctest::Approx(43.7).epsilon(0.01));
    CHECK(std::abs(r.contrast - 43.2203) / 43.2203 < 0.02);
}

TEST_CASE("extract: degenerate inputs are flagged") {
    CorrelationSet flat;
    flat.c = {0.1, 0.1, 0.1, 0.1};
    flat.modulation_frequency_hz = kF;
    flat.integration_time_s = 16e-6;
    CHECK(extract(flat).phase_undefined);
    CHECK(extract(flat).amplitude == 0.0);

    CorrelationSet no_offset;
    no_offset.c = {0.5, 0.0, -0.5, 0.0};
    no_offset.modulation_frequency_hz = kF;
    no_offset.integration_time_s = 16e-6;
    const auto r = extract(no_offset);
    CHECK(r.contrast_infinite);
    CHECK(std::isinf(r.contrast));
}

TEST_CASE("property: phase round trip over 360 phases") {
    const SignalSpec demod = sine(0.4704, 0.0099);
    double worst = 0.0;
    for (int k = 0; k < 360; ++k) {
        const double phi = 2 * constants::kPi * k / 360.0;
        const auto r = extract(demodulate4(synthesize(sine(0.526, 0.572, -phi), kFs, 200), demod));
        worst = std::max(worst, wrap_diff(r.phase_rad, phi));
        CHECK(r.distance_m >= 0.0);
        CHECK(r.distance_m < kRange);
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("property: closed forms for A and B on random integer-period pairs") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.01, 1.0), ph(0.0, 6.28);
    std::uniform_int_distribution<int> periods(1, 40);
    for (int k = 0; k < 100; ++k) {
        const double R = u(rng), Rdc = u(rng), M = u(rng), Mdc = u(rng);
        const std::size_t n = 20 * periods(rng);
        const auto r = extract(demodulate4(synthesize(sine(R, Rdc, -ph(rng)), kFs, n), sine(M, Mdc)));
        CHECK(r.amplitude == doctest::Approx(R * M / 2).epsilon(1e-9));
        CHECK(r.offset == doctest::Approx(Rdc * Mdc).epsilon(1e-9));
    }
}

TEST_CASE("property: whole periods cancel the cross terms, a half period does not") {
    const SignalSpec demod = sine(0.47, 0.01);
    const auto one = demodulate4(synthesize(sine(0.5, 0.5, -0.9), kFs, 400), demod);
    const auto two = demodulate4(synthesize(sine(0.5, 0.5, -0.9), kFs, 800), demod);
    for (int n = 0; n < 4; ++n) CHECK(std::abs(one.c[n] - two.c[n]) < 1e-12);
    CHECK_FALSE(one.non_integer_periods);

    const auto half = demodulate4(synthesize(sine(0.5, 0.5, -0.9), kFs, 410), demod);
    CHECK(half.non_integer_periods);
    CHECK(std::abs(extract(half).phase_rad - 0.9) > 1e-6);
}

TEST_CASE("property: distance wraps with phase") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> ph(0.0, 50.0);
    for (int k = 0; k < 500; ++k) {
        const double p = ph(rng);
        const double d = distance_from_phase(p, kF);
        CHECK(d >= 0.0);
        CHECK(d < kRange);
        CHECK(std::abs(distance_from_phase(p + 2 * constants::kPi, kF) - d) < 1e-9);
    }
    CHECK(distance_from_phase(phase_from_distance(5.0, kF), kF) == doctest::Approx(5.0 - kRange).epsilon(1e-12));
}

TEST_CASE("property: serial and parallel demodulation are bit-identical") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<double> v(10000);
    const Trace clean = synthesize(sine(0.3, 0.35, -2.2), kFs, 10000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = clean[i] + noise(rng);
    const Trace rx(v, kFs);
    const auto s = demodulate4(rx, sine(0.47, 0.01), Execution::Serial);
    const auto p = demodulate4(rx, sine(0.47, 0.01), Execution::Parallel);
    for (int n = 0; n < 4; ++n) CHECK(std::memcmp(&s.c[n], &p.c[n], sizeof(double)) == 0);
}

TEST_CASE("pairwise_dot agrees with an extended-precision sum") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {1u, 31u, 32u, 33u, 1000u, 100003u}) {
        std::vector<double> a(n), b(n);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
            ref += static_cast<long double>(a[i]) * b[i];
        }
        CHECK(std::abs(pairwise_dot(a, b) - static_cast<double>(ref)) < 1e-13 * std::sqrt(static_cast<double>(n)));
    }
}
