#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "tofsim/constants.hpp"

namespace tofsim {

enum class WaveKind { Sine, Square };

/// A periodic tone: amplitude·wave(2πft + phase) + offset.
///
/// Square waves toggle between offset−amplitude and offset+amplitude with
/// 50% duty; the high half is frac(ft + phase/2π) in [0, 0.5).
struct SignalSpec {
    WaveKind kind = WaveKind::Sine;
    double amplitude = 0.0;  // V
    double offset = 0.0;     // V
    double frequency_hz = constants::kModulationFrequency;
    double phase_rad = 0.0;

    void validate() const;
    /// Value at sample index i of a sampler running at sample_rate_hz.
    double at_sample(std::size_t i, double sample_rate_hz) const;
};

/// Uniformly sampled voltage waveform.
class Trace {
public:
    Trace(std::vector<double> samples, double sample_rate_hz, double origin_time_s = 0.0);

    std::span<const double> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double operator[](std::size_t i) const { return samples_[i]; }
    double sample_rate_hz() const { return sample_rate_hz_; }
    double origin_time_s() const { return origin_time_s_; }
    double sample_period_s() const { return 1.0 / sample_rate_hz_; }
    /// Integration time T_int = N / fs.
    double duration_s() const { return static_cast<double>(samples_.size()) / sample_rate_hz_; }

    /// Trace whose sample i equals this[(i + shift) mod N].
    Trace rotated(std::size_t shift) const;

    bool operator==(const Trace&) const = default;

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
    double origin_time_s_;
};

Trace synthesize(const SignalSpec& spec, double sample_rate_hz, std::size_t n_samples);

/// The four demodulation copies with phase offsets 0, π/2, π, 3π/2 added.
std::array<Trace, 4> make_quadrature_set(const SignalSpec& spec, double sample_rate_hz,
                                         std::size_t n_samples);

struct QuantizedTrace {
    Trace trace;
    std::size_t clip_count = 0;
};

/// Clips to ±full_scale/2 and rounds to a mid-tread grid with
/// LSB = full_scale / 2^bits (levels k·LSB, both rails representable).
QuantizedTrace quantize(const Trace& t, int bits, double full_scale_v);

// Trace CSV: "# sample_rate_hz=<float>" header, then one float32 voltage per line.
void write_trace_csv(std::ostream& out, const Trace& t);
Trace read_trace_csv(std::istream& in);
void save_trace_csv(const std::filesystem::path& path, const Trace& t);
Trace load_trace_csv(const std::filesystem::path& path);

}  // namespace tofsim
