#pragma once

#include <numbers>

namespace tofsim::constants {

// SI 2019 exact values.
inline constexpr double kSpeedOfLight = 299'792'458.0;       // m/s
inline constexpr double kPlanck = 6.626'070'15e-34;          // J·s
inline constexpr double kElementaryCharge = 1.602'176'634e-19;  // C

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Defaults of the reference sensor.
inline constexpr double kModulationFrequency = 31.25e6;  // Hz
inline constexpr double kSampleRate = 625e6;             // Hz
inline constexpr double kWavelength = 852e-9;            // m
inline constexpr double kLaserPower = 30e-3;             // W
inline constexpr double kApdResponsivity = 23.0;         // A/W
inline constexpr double kTransimpedanceGain = 1e5;       // V/A
inline constexpr double kApdMultiplication = 50.0;
inline constexpr double kDemodAmplitude = 0.4704;        // V
inline constexpr double kDemodOffset = 0.0099;           // V
inline constexpr int kDigitizerBits = 10;
inline constexpr double kDigitizerFullScale = 2.0;       // V, peak-to-peak

/// Unambiguous range c/(2f).
constexpr double ambiguity_range(double modulation_frequency_hz) {
    return kSpeedOfLight / (2.0 * modulation_frequency_hz);
}

}  // namespace tofsim::constants
