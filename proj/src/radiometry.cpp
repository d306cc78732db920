#include "tofsim/radiometry.hpp"

#include <cmath>

#include "tofsim/error.hpp"

namespace tofsim {

using constants::kElementaryCharge;
using constants::kPlanck;
using constants::kSpeedOfLight;

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

double quarter_wavelength_of_modulation(double f) { return kSpeedOfLight / (4.0 * f); }

}  // namespace

double qe_from_responsivity(const ApdChain& chain) {
    require(positive(chain.responsivity_a_per_w) && positive(chain.multiplication) &&
                positive(chain.wavelength_m),
            "APD constants must be positive");
    return chain.responsivity_a_per_w * kPlanck * kSpeedOfLight /
           (chain.multiplication * kElementaryCharge * chain.wavelength_m);
}

void ApdChain::validate() const {
    require(positive(transimpedance_v_per_a), "transimpedance gain must be positive");
    const double qe = qe_from_responsivity(*this);
    // Allow a few ulps above 1 so a chain built for QE = 1 is accepted.
    require(qe > 0.0 && qe <= 1.0 + 1e-12,
            "derived quantum efficiency " + std::to_string(qe) + " is outside (0, 1]");
}

double ApdChain::quantum_efficiency() const { return qe_from_responsivity(*this); }

double ApdChain::volts_per_electron_rate() const {
    return transimpedance_v_per_a * multiplication * kElementaryCharge;
}

double power_from_voltage(double volts, const ApdChain& chain) {
    return volts / (chain.responsivity_a_per_w * chain.transimpedance_v_per_a);
}

double voltage_from_power(double watts, const ApdChain& chain) {
    return watts * chain.responsivity_a_per_w * chain.transimpedance_v_per_a;
}

double electrons_from_voltage(double volts, double t_int_s, const ApdChain& chain) {
    require(volts >= 0.0, "electrons_from_voltage: voltage must be >= 0");
    require(t_int_s >= 0.0, "electrons_from_voltage: time must be >= 0");
    const double photon_energy = kPlanck * kSpeedOfLight / chain.wavelength_m;
    return power_from_voltage(volts, chain) * t_int_s / photon_energy * chain.quantum_efficiency();
}

double voltage_from_electrons(double electrons, double t_int_s, const ApdChain& chain) {
    require(t_int_s > 0.0, "voltage_from_electrons: time must be > 0");
    const double photon_energy = kPlanck * kSpeedOfLight / chain.wavelength_m;
    return voltage_from_power(electrons * photon_energy / (chain.quantum_efficiency() * t_int_s), chain);
}

double predict_noise_electrons(double amplitude_electrons, double offset_electrons,
                               double pseudo_electrons, double modulation_frequency_hz) {
    require(amplitude_electrons > 0.0, "amplitude electrons must be > 0");
    require(offset_electrons >= 0.0 && pseudo_electrons >= 0.0, "electron counts must be >= 0");
    require(positive(modulation_frequency_hz), "modulation frequency must be > 0");
    return quarter_wavelength_of_modulation(modulation_frequency_hz) / std::sqrt(8.0) *
           std::sqrt(offset_electrons + pseudo_electrons) / amplitude_electrons;
}

void PrecisionInput::validate() const {
    require(positive(amplitude), "amplitude A must be > 0");
    require(std::isfinite(offset) && offset >= 0.0, "offset B must be >= 0");
    require(positive(integration_time_s), "integration time must be > 0");
    require(positive(modulation_frequency_hz), "modulation frequency must be > 0");
    require(positive(demod_amplitude), "demodulation amplitude M must be > 0");
    require(positive(demod_offset), "demodulation offset M_DC must be > 0");
    require(std::isfinite(pseudo_electrons) && pseudo_electrons >= 0.0, "pseudo electrons must be >= 0");
}

ElectronCounts electrons_from_correlation(const PrecisionInput& in, const ApdChain& chain) {
    in.validate();
    const double received_amplitude = 2.0 * in.amplitude / in.demod_amplitude;
    const double received_offset = in.offset / in.demod_offset;
    return {electrons_from_voltage(received_amplitude, in.integration_time_s, chain),
            electrons_from_voltage(received_offset, in.integration_time_s, chain)};
}

double predict_noise(const PrecisionInput& in, const ApdChain& chain) {
    in.validate();
    chain.validate();
    const double gqm = chain.volts_per_electron_rate();
    const double t = in.integration_time_s;
    const double scale = in.demod_amplitude * std::sqrt(gqm) / (4.0 * std::sqrt(t));
    const double background = in.offset / in.demod_offset + in.pseudo_electrons * gqm / t;
    return quarter_wavelength_of_modulation(in.modulation_frequency_hz) * scale *
           std::sqrt(background / 2.0) / in.amplitude;
}

double predict_noise_as_printed(const PrecisionInput& in, const ApdChain& chain) {
    in.validate();
    chain.validate();
    const double gqm = chain.volts_per_electron_rate();
    return quarter_wavelength_of_modulation(in.modulation_frequency_hz) * in.demod_amplitude *
           std::sqrt(gqm) / (2.0 * std::sqrt(in.integration_time_s) * in.demod_offset) *
           std::sqrt(in.offset / 2.0) / in.amplitude;
}

double distance_noise_percent(double delta_l_m, double reference_m) {
    require(positive(reference_m), "reference distance must be > 0");
    require(std::isfinite(delta_l_m) && delta_l_m >= 0.0, "distance noise must be >= 0");
    return 100.0 * delta_l_m / reference_m;
}

}  // namespace tofsim
