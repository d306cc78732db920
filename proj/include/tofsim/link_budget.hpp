#pragma once

#include "tofsim/constants.hpp"

namespace tofsim {

/// Single-bounce optical link: R = cal·ρ·P/d², R_DC = R/m. The calibration
/// constant absorbs apertures, polarization losses and detector coupling.
struct LinkBudget {
    double calibration = 0.0;  // V·m²/W
    double laser_power_w = constants::kLaserPower;
    /// Received AC/DC ratio m; default is the measured 0.526/0.572 line ratio.
    double modulation_depth = 0.526 / 0.572;
    /// Digitizer peak-to-peak range; R_DC + R is held to full_scale/2.
    double full_scale_v = constants::kDigitizerFullScale;

    /// Calibration such that a target of `reflectivity` at `distance_m`
    /// returns `amplitude_v` at `laser_power_w`.
    static LinkBudget from_reference(double amplitude_v, double reflectivity = 0.95, double distance_m = 1.5,
                                     double laser_power_w = constants::kLaserPower);
    void validate() const;
};

struct ReceivedSignal {
    double amplitude_v = 0.0;  // R
    double offset_v = 0.0;     // R_DC
    bool saturated = false;
};

/// Inverse-square received amplitude; scaled down to the digitizer rail with
/// `saturated` set when R + R_DC exceeds full_scale/2.
ReceivedSignal received_amplitude(double reflectivity, double distance_m, const LinkBudget& budget);

}  // namespace tofsim
