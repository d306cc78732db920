#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tofsim/demod.hpp"
#include "tofsim/link_budget.hpp"
#include "tofsim/radiometry.hpp"
#include "tofsim/waveform.hpp"

namespace tofsim {

struct Digitizer {
    int bits = constants::kDigitizerBits;
    double full_scale_v = constants::kDigitizerFullScale;
};

/// One distance measurement of the scanning sensor.
struct MeasurementSetup {
    double true_distance_m = 1.5;
    double received_amplitude_v = 0.0;  // R
    double received_offset_v = 0.0;     // R_DC
    double integration_time_s = 16e-6;
    std::uint64_t seed = 0;
    ApdChain chain{};
    Digitizer digitizer{};

    double modulation_frequency_hz = constants::kModulationFrequency;
    double sample_rate_hz = constants::kSampleRate;
    double demod_amplitude_v = constants::kDemodAmplitude;
    double demod_offset_v = constants::kDemodOffset;

    /// false: ideal analog limit (no shot noise, no quantization).
    bool noise = true;
    /// Above this expected count per sample, Poisson draws use a Gaussian.
    double gaussian_threshold = 1000.0;
    /// Std of additive per-sample electronic noise (V). Not part of the
    /// shot-noise precision model; used to study model error.
    double electronic_noise_v = 0.0;

    void validate() const;
    std::size_t sample_count() const;
};

/// Precomputes the noiseless received trace and the demodulation copies of a
/// setup so that repeated trials only pay for noise generation and the four
/// correlations. Immutable after construction; run() is thread-safe.
class MeasurementSimulator {
public:
    explicit MeasurementSimulator(const MeasurementSetup& setup);

    /// One trial with the given seed.
    DemodResult run(std::uint64_t seed) const;
    /// Received trace for one trial after noise and quantization.
    Trace received_trace(std::uint64_t seed) const;
    const Trace& noiseless_received() const { return clean_; }
    const MeasurementSetup& setup() const { return setup_; }

private:
    MeasurementSetup setup_;
    Trace clean_;
    std::array<Trace, 4> demod_copies_;
    double volts_per_electron_;  // per-sample conversion
};

DemodResult simulate_measurement(const MeasurementSetup& setup);

struct SampleSeries {
    std::vector<double> values;
    std::size_t trial_count() const { return values.size(); }
};

struct TrialSeries {
    SampleSeries distance_m;
    SampleSeries amplitude;
    SampleSeries offset;
};

/// n_trials independent measurements; trial i uses derive_seed(setup.seed, i).
TrialSeries run_trials(const MeasurementSetup& setup, std::size_t n_trials);

struct SeriesStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n−1) standard deviation
    std::vector<double> moving_average;
    /// Std of the moving average: the slow ("seasonal") fluctuation.
    double seasonal_stddev = 0.0;
};

/// Centered moving average truncated at the edges.
SeriesStats series_stats(const SampleSeries& s, std::size_t window);

inline constexpr std::size_t kDefaultTrials = 2000;

/// Cartesian grid of (distance, reflectivity, integration time) points.
struct SweepSpec {
    std::vector<double> distances_m;
    std::vector<double> reflectivities{0.95};
    std::vector<double> integration_times_s{16e-6};
    std::size_t n_trials = kDefaultTrials;
    /// Template for every point; distance, R, R_DC, T_int and seed are overridden.
    MeasurementSetup base{};
    LinkBudget link{};
    std::uint64_t seed = 0;
};

struct SweepRow {
    double distance_m = 0.0;
    double reflectivity = 0.0;
    double integration_time_s = 0.0;
    double std_m = 0.0;
    double delta_percent = 0.0;
    double mean_distance_m = 0.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double model_std_m = 0.0;  // predict_noise at (mean_a, mean_b)
    bool saturated = false;
};

/// Runs every grid point; points are ordered distance-major, then
/// reflectivity, then integration time.
std::vector<SweepRow> precision_sweep(const SweepSpec& spec);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ModelComparisonRow {
    double distance_m = 0.0;
    double reflectivity = 0.0;
    double integration_time_s = 0.0;
    double measured_std_m = 0.0;
    double predicted_std_m = 0.0;
    double abs_error_m = 0.0;
};

struct ModelComparison {
    std::vector<ModelComparisonRow> rows;
    double mean_abs_error_m = 0.0;
    double max_abs_error_m = 0.0;
    /// mean_abs_error / mean(measured std).
    double relative_mae = 0.0;
    /// Measured spread is numerically zero somewhere (noise disabled); the
    /// relative error is not meaningful there.
    bool degenerate = false;
};

ModelComparison model_vs_measured(const std::vector<SweepRow>& sweep, const ApdChain& chain,
                                  double demod_amplitude_v = constants::kDemodAmplitude,
                                  double demod_offset_v = constants::kDemodOffset,
                                  double modulation_frequency_hz = constants::kModulationFrequency);

}  // namespace tofsim
