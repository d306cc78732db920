#include "tofsim/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>

#include "tofsim/error.hpp"
#include "tofsim/parallel.hpp"

namespace tofsim {

void MeasurementSetup::validate() const {
    require(std::isfinite(true_distance_m) && true_distance_m >= 0.0, "true distance must be >= 0");
    require(received_amplitude_v >= 0.0 && received_offset_v >= 0.0, "received amplitude and offset must be >= 0");
    require(integration_time_s > 0.0, "integration time must be > 0");
    require(modulation_frequency_hz > 0.0, "modulation frequency must be > 0");
    require(sample_rate_hz > 2.0 * modulation_frequency_hz, "sample rate must exceed twice the modulation frequency");
    require(demod_amplitude_v >= 0.0, "demodulation amplitude must be >= 0");
    require(gaussian_threshold >= 0.0, "gaussian threshold must be >= 0");
    require(electronic_noise_v >= 0.0, "electronic noise must be >= 0");
    require(digitizer.bits >= 2 && digitizer.bits <= 24, "digitizer bits must be in [2, 24]");
    require(digitizer.full_scale_v > 0.0, "digitizer full scale must be > 0");
    chain.validate();
    require(sample_count() >= 1, "integration time is shorter than one sample");
}

std::size_t MeasurementSetup::sample_count() const {
    return static_cast<std::size_t>(std::llround(integration_time_s * sample_rate_hz));
}

namespace {

Trace clean_received(const MeasurementSetup& s) {
    s.validate();
    SignalSpec spec;
    spec.amplitude = s.received_amplitude_v;
    spec.offset = s.received_offset_v;
    spec.frequency_hz = s.modulation_frequency_hz;
    spec.phase_rad = -phase_from_distance(s.true_distance_m, s.modulation_frequency_hz);
    return synthesize(spec, s.sample_rate_hz, s.sample_count());
}

std::array<Trace, 4> copies_for(const MeasurementSetup& s) {
    SignalSpec spec;
    spec.amplitude = s.demod_amplitude_v;
    spec.offset = s.demod_offset_v;
    spec.frequency_hz = s.modulation_frequency_hz;
    return demod_copies(spec, s.sample_rate_hz, s.sample_count());
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

MeasurementSimulator::MeasurementSimulator(const MeasurementSetup& setup)
    : setup_(setup),
      clean_(clean_received(setup)),
      demod_copies_(copies_for(setup)),
      volts_per_electron_(voltage_from_electrons(1.0, 1.0 / setup.sample_rate_hz, setup.chain)) {}

Trace MeasurementSimulator::received_trace(std::uint64_t seed) const {
    if (!setup_.noise) return clean_;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::vector<double> v(clean_.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        // Primary photoelectrons expected in this sample interval; negative
        // power from an over-modulated model is clamped to zero.
        const double mean = std::max(clean_[i], 0.0) / volts_per_electron_;
        double count = 0.0;
        if (mean > setup_.gaussian_threshold) {
            count = mean + std::sqrt(mean) * unit_normal(rng);
        } else if (mean > 0.0) {
            std::poisson_distribution<long long> poisson(mean);
            count = static_cast<double>(poisson(rng));
        }
        double volts = count * volts_per_electron_;
        if (setup_.electronic_noise_v > 0.0) volts += setup_.electronic_noise_v * unit_normal(rng);
        v[i] = volts;
    }
    Trace noisy(std::move(v), clean_.sample_rate_hz());
    return quantize(noisy, setup_.digitizer.bits, setup_.digitizer.full_scale_v).trace;
}

DemodResult MeasurementSimulator::run(std::uint64_t seed) const {
    const CorrelationSet cs =
        setup_.noise ? demodulate4(received_trace(seed), demod_copies_, setup_.modulation_frequency_hz)
                     : demodulate4(clean_, demod_copies_, setup_.modulation_frequency_hz);
    return extract(cs);
}

DemodResult simulate_measurement(const MeasurementSetup& setup) {
    return MeasurementSimulator(setup).run(setup.seed);
}

TrialSeries run_trials(const MeasurementSetup& setup, std::size_t n_trials) {
    require(n_trials >= 1, "n_trials must be >= 1");
    const MeasurementSimulator sim(setup);
    TrialSeries out;
    out.distance_m.values.resize(n_trials);
    out.amplitude.values.resize(n_trials);
    out.offset.values.resize(n_trials);
    parallel_for(n_trials, [&](std::size_t i) {
        const DemodResult r = sim.run(derive_seed(setup.seed, i));
        out.distance_m.values[i] = r.distance_m;
        out.amplitude.values[i] = r.amplitude;
        out.offset.values[i] = r.offset;
    });
    return out;
}

SeriesStats series_stats(const SampleSeries& s, std::size_t window) {
    const auto& v = s.values;
    require(!v.empty(), "series_stats: empty series");
    require(window >= 1 && window <= v.size(), "series_stats: window must be in [1, length]");
    SeriesStats st;
    st.mean = mean_of(v);
    st.stddev = sample_stddev(v);

    const std::size_t n = v.size();
    const std::size_t back = (window - 1) / 2;
    const std::size_t ahead = window - 1 - back;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
    st.moving_average.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= back ? i - back : 0;
        const std::size_t hi = std::min(n - 1, i + ahead);
        st.moving_average[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    st.seasonal_stddev = sample_stddev(st.moving_average);
    return st;
}

std::vector<SweepRow> precision_sweep(const SweepSpec& spec) {
    require(!spec.distances_m.empty() && !spec.reflectivities.empty() && !spec.integration_times_s.empty(),
            "precision_sweep: empty grid");
    require(spec.n_trials >= 2, "precision_sweep: n_trials must be >= 2");
    spec.link.validate();

    std::vector<SweepRow> rows;
    std::uint64_t point = 0;
    for (double d : spec.distances_m) {
        for (double rho : spec.reflectivities) {
            for (double t_int : spec.integration_times_s) {
                const ReceivedSignal rx = received_amplitude(rho, d, spec.link);
                MeasurementSetup setup = spec.base;
                setup.true_distance_m = d;
                setup.received_amplitude_v = rx.amplitude_v;
                setup.received_offset_v = rx.offset_v;
                setup.integration_time_s = t_int;
                setup.seed = derive_seed(spec.seed, point++);
                const TrialSeries trials = run_trials(setup, spec.n_trials);

                SweepRow row;
                row.distance_m = d;
                row.reflectivity = rho;
                row.integration_time_s = t_int;
                row.saturated = rx.saturated;
                row.std_m = sample_stddev(trials.distance_m.values);
                row.mean_distance_m = mean_of(trials.distance_m.values);
                row.delta_percent = distance_noise_percent(row.std_m, d);
                row.mean_a = mean_of(trials.amplitude.values);
                row.mean_b = mean_of(trials.offset.values);

                PrecisionInput in;
                in.amplitude = row.mean_a;
                in.offset = row.mean_b;
                in.integration_time_s = t_int;
                in.modulation_frequency_hz = setup.modulation_frequency_hz;
                in.demod_amplitude = setup.demod_amplitude_v;
                in.demod_offset = setup.demod_offset_v;
                row.model_std_m = row.mean_a > 0.0 ? predict_noise(in, setup.chain)
                                                   : std::numeric_limits<double>::quiet_NaN();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "distance_m,reflectivity,t_int_s,std_m,delta_percent,mean_a,mean_b,model_std_m\n";
    out << std::setprecision(12);
    for (const auto& r : rows) {
        out << r.distance_m << ',' << r.reflectivity << ',' << r.integration_time_s << ',' << r.std_m << ','
            << r.delta_percent << ',' << r.mean_a << ',' << r.mean_b << ',' << r.model_std_m << '\n';
    }
}

ModelComparison model_vs_measured(const std::vector<SweepRow>& sweep, const ApdChain& chain,
                                  double demod_amplitude_v, double demod_offset_v,
                                  double modulation_frequency_hz) {
    require(!sweep.empty(), "model_vs_measured: empty sweep");
    ModelComparison cmp;
    double measured_sum = 0.0;
    for (const auto& r : sweep) {
        require(std::isfinite(r.mean_a) && r.mean_a > 0.0 && std::isfinite(r.mean_b) && r.mean_b >= 0.0,
                "model_vs_measured: sweep row lacks usable mean A/B");
        PrecisionInput in;
        in.amplitude = r.mean_a;
        in.offset = r.mean_b;
        in.integration_time_s = r.integration_time_s;
        in.modulation_frequency_hz = modulation_frequency_hz;
        in.demod_amplitude = demod_amplitude_v;
        in.demod_offset = demod_offset_v;

        ModelComparisonRow row;
        row.distance_m = r.distance_m;
        row.reflectivity = r.reflectivity;
        row.integration_time_s = r.integration_time_s;
        row.measured_std_m = r.std_m;
        row.predicted_std_m = predict_noise(in, chain);
        row.abs_error_m = std::abs(row.predicted_std_m - row.measured_std_m);
        if (r.std_m < 1e-12) cmp.degenerate = true;
        measured_sum += r.std_m;
        cmp.mean_abs_error_m += row.abs_error_m;
        cmp.max_abs_error_m = std::max(cmp.max_abs_error_m, row.abs_error_m);
        cmp.rows.push_back(row);
    }
    const auto n = static_cast<double>(cmp.rows.size());
    cmp.mean_abs_error_m /= n;
    const double mean_measured = measured_sum / n;
    cmp.relative_mae = mean_measured > 0.0 ? cmp.mean_abs_error_m / mean_measured
                                           : std::numeric_limits<double>::infinity();
    return cmp;
}

}  // namespace tofsim
