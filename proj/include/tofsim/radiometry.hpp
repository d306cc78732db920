#pragma once

#include "tofsim/constants.hpp"

namespace tofsim {

/// APD receiver: responsivity R_M (A/W), transimpedance gain G (V/A), mean
/// avalanche multiplication M̄ and wavelength λ. The quantum efficiency is
/// always derived from R_M = M̄·QE·qλ/(hc), never set independently.
struct ApdChain {
    double responsivity_a_per_w = constants::kApdResponsivity;
    double transimpedance_v_per_a = constants::kTransimpedanceGain;
    double multiplication = constants::kApdMultiplication;
    double wavelength_m = constants::kWavelength;

    /// Throws ValidationError unless all constants are positive and QE is in (0, 1].
    void validate() const;
    double quantum_efficiency() const;
    /// Volts produced per primary photoelectron per second: G·M̄·q.
    double volts_per_electron_rate() const;
};

double qe_from_responsivity(const ApdChain& chain);

/// Optical power for an APD output voltage: P = v / (R_M·G).
double power_from_voltage(double volts, const ApdChain& chain);
double voltage_from_power(double watts, const ApdChain& chain);

/// Primary photoelectrons (before multiplication) collected over t_int for a
/// steady output voltage v: N = (v/(R_M·G))·t_int·λ·QE/(hc).
double electrons_from_voltage(double volts, double t_int_s, const ApdChain& chain);
double voltage_from_electrons(double electrons, double t_int_s, const ApdChain& chain);

/// Shot-noise distance precision in photoelectron terms:
/// ΔL = (c/4f)·(1/√8)·√(B̂ + N_pseudo)/Â.
double predict_noise_electrons(double amplitude_electrons, double offset_electrons,
                               double pseudo_electrons, double modulation_frequency_hz);

struct PrecisionInput {
    double amplitude = 0.0;  // A, V²
    double offset = 0.0;     // B, V²
    double integration_time_s = 0.0;
    double modulation_frequency_hz = constants::kModulationFrequency;
    double demod_amplitude = constants::kDemodAmplitude;  // M, V
    double demod_offset = constants::kDemodOffset;        // M_DC, V
    double pseudo_electrons = 0.0;

    void validate() const;
};

/// Photoelectron counts behind a correlation amplitude/offset pair, using
/// A = R·M/2 and B = R_DC·M_DC to recover the received R and R_DC.
struct ElectronCounts {
    double amplitude = 0.0;
    double offset = 0.0;
};
ElectronCounts electrons_from_correlation(const PrecisionInput& in, const ApdChain& chain);

/// Shot-noise precision from the correlation amplitude and offset; the closed
/// form of predict_noise_electrons ∘ electrons_from_correlation:
///   ΔL = (c/4f) · M·√(G·q·M̄) / (4·√T_int) · √((B/M_DC + N_pseudo·G·q·M̄/T_int)/2) / A
double predict_noise(const PrecisionInput& in, const ApdChain& chain);

/// The widely quoted published closed form
///   (c/4f) · M·√(G·q·M̄)/(2·√T_int·M_DC) · √(B/2)/A,
/// which is 2/√M_DC times predict_noise. Kept for comparison only.
double predict_noise_as_printed(const PrecisionInput& in, const ApdChain& chain);

/// δ = 100·ΔL/L in percent.
double distance_noise_percent(double delta_l_m, double reference_m);

}  // namespace tofsim
