#include "tofsim/demod.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "tofsim/constants.hpp"
#include "tofsim/error.hpp"

namespace tofsim {

namespace {

constexpr std::size_t kLeafSize = 32;

double dot_tree(const double* a, const double* b, std::size_t n) {
    if (n <= kLeafSize) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    const std::size_t half = n / 2;
    return dot_tree(a, b, half) + dot_tree(a + half, b + half, n - half);
}

void check_compatible(const Trace& a, const Trace& b) {
    require(a.size() == b.size(), "correlate: trace lengths differ");
    require(a.sample_rate_hz() == b.sample_rate_hz(), "correlate: sample rates differ");
}

// Samples per quarter period, or 0 if not an integer.
std::size_t quarter_shift(double sample_rate_hz, double frequency_hz) {
    const double q = sample_rate_hz / (4.0 * frequency_hz);
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * q) return 0;
    return static_cast<std::size_t>(r);
}

CorrelationSet correlate_all(const Trace& received, const std::array<Trace, 4>& copies, double f,
                             Execution exec) {
    for (const auto& c : copies) check_compatible(received, c);
    CorrelationSet cs;
    if (exec == Execution::Parallel) {
        std::array<std::future<double>, 4> parts;
        for (int n = 0; n < 4; ++n)
            parts[n] = std::async(std::launch::async, [&, n] { return correlate(received, copies[n]); });
        for (int n = 0; n < 4; ++n) cs.c[n] = parts[n].get();
    } else {
        for (int n = 0; n < 4; ++n) cs.c[n] = correlate(received, copies[n]);
    }
    cs.integration_time_s = received.duration_s();
    cs.modulation_frequency_hz = f;
    cs.non_integer_periods = !spans_integer_periods(cs.integration_time_s, f);
    return cs;
}

}  // namespace

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "pairwise_dot: length mismatch");
    return dot_tree(a.data(), b.data(), a.size());
}

double correlate(const Trace& received, const Trace& demod) {
    check_compatible(received, demod);
    return pairwise_dot(received.samples(), demod.samples()) / static_cast<double>(received.size());
}

bool spans_integer_periods(double duration_s, double frequency_hz) {
    const double periods = duration_s * frequency_hz;
    return std::abs(periods - std::round(periods)) <= 1e-9 * std::max(1.0, periods) && periods >= 0.5;
}

CorrelationSet demodulate4(const Trace& received, const Trace& demod_base, double modulation_frequency_hz,
                           Execution exec) {
    require(modulation_frequency_hz > 0.0, "modulation frequency must be > 0");
    check_compatible(received, demod_base);
    const std::size_t q = quarter_shift(demod_base.sample_rate_hz(), modulation_frequency_hz);
    require(q != 0, "demodulate4: a quarter period must be an integer number of samples to rotate a trace");
    // s(t + nT/4) is sample i + n·q.
    std::array<Trace, 4> copies{demod_base, demod_base.rotated(q), demod_base.rotated(2 * q),
                                demod_base.rotated(3 * q)};
    return correlate_all(received, copies, modulation_frequency_hz, exec);
}

std::array<Trace, 4> demod_copies(const SignalSpec& demod_spec, double sample_rate_hz, std::size_t n_samples) {
    demod_spec.validate();
    const double f = demod_spec.frequency_hz;
    const std::size_t q = quarter_shift(sample_rate_hz, f);
    const double duration = static_cast<double>(n_samples) / sample_rate_hz;
    if (q != 0 && spans_integer_periods(duration, f)) {
        Trace base = synthesize(demod_spec, sample_rate_hz, n_samples);
        return {base, base.rotated(q), base.rotated(2 * q), base.rotated(3 * q)};
    }
    return make_quadrature_set(demod_spec, sample_rate_hz, n_samples);
}

CorrelationSet demodulate4(const Trace& received, const std::array<Trace, 4>& copies,
                           double modulation_frequency_hz, Execution exec) {
    require(modulation_frequency_hz > 0.0, "modulation frequency must be > 0");
    return correlate_all(received, copies, modulation_frequency_hz, exec);
}

CorrelationSet demodulate4(const Trace& received, const SignalSpec& demod_spec, Execution exec) {
    return correlate_all(received, demod_copies(demod_spec, received.sample_rate_hz(), received.size()),
                         demod_spec.frequency_hz, exec);
}

double phase_from_distance(double distance_m, double modulation_frequency_hz) {
    return 4.0 * constants::kPi * modulation_frequency_hz * distance_m / constants::kSpeedOfLight;
}

double distance_from_phase(double phase_rad, double modulation_frequency_hz) {
    double p = std::fmod(phase_rad, constants::kTwoPi);
    if (p < 0.0) p += constants::kTwoPi;
    if (p >= constants::kTwoPi) p = 0.0;
    const double d = constants::kSpeedOfLight * p / (4.0 * constants::kPi * modulation_frequency_hz);
    return d < constants::ambiguity_range(modulation_frequency_hz) ? d : 0.0;
}

DemodResult extract(const CorrelationSet& cs) {
    require(cs.integration_time_s > 0.0, "correlation set: integration time must be > 0");
    require(cs.modulation_frequency_hz > 0.0, "correlation set: modulation frequency must be > 0");
    const auto& c = cs.c;
    const double in_phase = c[0] - c[2];
    const double quadrature = c[3] - c[1];

    DemodResult r;
    r.integration_time_s = cs.integration_time_s;
    r.modulation_frequency_hz = cs.modulation_frequency_hz;
    r.non_integer_periods = cs.non_integer_periods;
    r.amplitude = std::hypot(in_phase, quadrature) / 2.0;
    r.offset = (c[0] + c[1] + c[2] + c[3]) / 4.0;

    // A delay τ on the received signal gives C(φn) ∝ cos(2πfτ + φn), so
    // atan2(C3 − C1, C0 − C2) = +2πfτ.
    if (in_phase == 0.0 && quadrature == 0.0) {
        r.phase_undefined = true;
        r.phase_rad = 0.0;
    } else {
        double p = std::atan2(quadrature, in_phase);
        if (p < 0.0) p += constants::kTwoPi;
        if (p >= constants::kTwoPi) p = 0.0;
        r.phase_rad = p;
    }
    r.distance_m = distance_from_phase(r.phase_rad, cs.modulation_frequency_hz);

    if (r.offset > 0.0) {
        r.contrast = r.amplitude / r.offset;
    } else {
        r.contrast = std::numeric_limits<double>::infinity();
        r.contrast_infinite = true;
    }
    return r;
}

}  // namespace tofsim
