#pragma once

#include <array>
#include <span>
#include <variant>

#include "tofsim/waveform.hpp"

namespace tofsim {

/// The four cross-correlated samples C(0), C(π/2), C(π), C(3π/2) of one
/// integration window.
struct CorrelationSet {
    std::array<double, 4> c{};             // V²
    double integration_time_s = 0.0;       // T_int
    double modulation_frequency_hz = 0.0;  // f
    /// Window is not an integer number of modulation periods; the cross terms
    /// no longer cancel and A, B, φ carry a bias.
    bool non_integer_periods = false;

    bool operator==(const CorrelationSet&) const = default;
};

struct DemodResult {
    double amplitude = 0.0;  // A, V²
    double offset = 0.0;     // B, V²
    double phase_rad = 0.0;  // [0, 2π)
    double distance_m = 0.0; // [0, c/2f)
    double contrast = 0.0;   // A/B, +inf when B <= 0
    double integration_time_s = 0.0;
    double modulation_frequency_hz = 0.0;
    bool phase_undefined = false;   // A == 0
    bool contrast_infinite = false; // B <= 0
    bool non_integer_periods = false;
};

enum class Execution { Serial, Parallel };

/// Pairwise (tree) sum of a[i]·b[i]. The reduction order depends only on the
/// length, so results are reproducible across runs and threads.
double pairwise_dot(std::span<const double> a, std::span<const double> b);

/// Discrete cross-correlation: mean of the pointwise product.
double correlate(const Trace& received, const Trace& demod);

/// True when `duration·f` is an integer within a relative tolerance of 1e-9.
bool spans_integer_periods(double duration_s, double frequency_hz);

/// Four-tap demodulation against a demodulation trace. Copies shifted by
/// nπ/2 are obtained by cyclic rotation, which requires fs/(4f) to be an
/// integer sample count.
CorrelationSet demodulate4(const Trace& received, const Trace& demod_base, double modulation_frequency_hz,
                           Execution exec = Execution::Serial);

/// Four-tap demodulation against an analytic demodulation signal. Uses cyclic
/// rotation when exact, otherwise synthesizes the four shifted copies.
CorrelationSet demodulate4(const Trace& received, const SignalSpec& demod_spec,
                           Execution exec = Execution::Serial);

/// The four demodulation copies of an analytic signal: cyclic rotations of one
/// synthesized trace when fs/(4f) is an integer sample count and the window
/// spans whole periods, otherwise four separately synthesized traces.
std::array<Trace, 4> demod_copies(const SignalSpec& demod_spec, double sample_rate_hz, std::size_t n_samples);

/// Four-tap demodulation against precomputed copies (index n = phase nπ/2).
CorrelationSet demodulate4(const Trace& received, const std::array<Trace, 4>& copies,
                           double modulation_frequency_hz, Execution exec = Execution::Serial);

/// Amplitude, offset, phase, distance and contrast of a CorrelationSet.
DemodResult extract(const CorrelationSet& cs);

/// Phase that a round-trip distance produces: 4πfd/c (not wrapped).
double phase_from_distance(double distance_m, double modulation_frequency_hz);

/// Distance for a phase, wrapped into [0, c/2f).
double distance_from_phase(double phase_rad, double modulation_frequency_hz);

}  // namespace tofsim
