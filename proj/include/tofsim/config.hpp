#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "tofsim/demod.hpp"
#include "tofsim/link_budget.hpp"
#include "tofsim/radiometry.hpp"
#include "tofsim/scanner.hpp"
#include "tofsim/simlab.hpp"

namespace tofsim {

/// Run configuration shared by all subcommands. Every field has a default,
/// so an empty JSON object is a valid config.
struct Config {
    double modulation_frequency_hz = constants::kModulationFrequency;
    double sample_rate_hz = constants::kSampleRate;
    double integration_time_s = 16e-6;
    double laser_power_w = constants::kLaserPower;
    double wavelength_m = constants::kWavelength;
    double responsivity_a_per_w = constants::kApdResponsivity;
    double gain_v_per_a = constants::kTransimpedanceGain;
    double multiplication = constants::kApdMultiplication;
    int digitizer_bits = constants::kDigitizerBits;
    double digitizer_full_scale_v = constants::kDigitizerFullScale;
    double demod_amplitude_v = constants::kDemodAmplitude;
    double demod_offset_v = constants::kDemodOffset;
    std::uint64_t seed = 0;

    // Optical link: amplitude R at the reference target fixes the calibration.
    double reference_amplitude_v = 0.4;
    double reference_reflectivity = 0.95;
    double reference_distance_m = 1.5;
    double modulation_depth = 0.526 / 0.572;

    void validate() const;
    ApdChain chain() const;
    LinkBudget link() const;
    /// Measurement template with every field above applied (R, R_DC and the
    /// distance are left for the caller).
    MeasurementSetup measurement() const;
};

/// Keys: modulation_frequency, sample_rate, integration_time, laser {power,
/// wavelength}, apd {responsivity, gain, multiplication}, digitizer {bits,
/// full_scale}, demod {amplitude, offset}, seed, link {reference_amplitude,
/// reference_reflectivity, reference_distance, modulation_depth}. Unknown
/// keys are rejected.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const Config& c);

/// a, b, phase_rad, distance_m, contrast (null when infinite), t_int_s, f_hz
/// and the result flags.
nlohmann::json demod_to_json(const DemodResult& r);
nlohmann::json frame_metadata_to_json(const FrameMetadata& m);
nlohmann::json error_report_to_json(const ErrorReport& r);

}  // namespace tofsim
