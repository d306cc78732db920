#include "tofsim/link_budget.hpp"

#include <cmath>

#include "tofsim/error.hpp"

namespace tofsim {

LinkBudget LinkBudget::from_reference(double amplitude_v, double reflectivity, double distance_m,
                                      double laser_power_w) {
    require(amplitude_v > 0.0 && reflectivity > 0.0 && distance_m > 0.0 && laser_power_w > 0.0,
            "link budget reference values must be positive");
    LinkBudget b;
    b.laser_power_w = laser_power_w;
    b.calibration = amplitude_v * distance_m * distance_m / (reflectivity * laser_power_w);
    return b;
}

void LinkBudget::validate() const {
    require(std::isfinite(calibration) && calibration > 0.0, "link calibration must be > 0");
    require(laser_power_w > 0.0, "laser power must be > 0");
    require(modulation_depth > 0.0, "modulation depth must be > 0");
    require(full_scale_v > 0.0, "digitizer full scale must be > 0");
}

ReceivedSignal received_amplitude(double reflectivity, double distance_m, const LinkBudget& budget) {
    budget.validate();
    require(distance_m > 0.0, "received_amplitude: distance must be > 0");
    require(reflectivity > 0.0 && reflectivity <= 1.0, "reflectivity must be in (0, 1]");
    ReceivedSignal s;
    s.amplitude_v = budget.calibration * reflectivity * budget.laser_power_w / (distance_m * distance_m);
    s.offset_v = s.amplitude_v / budget.modulation_depth;
    const double rail = budget.full_scale_v / 2.0;
    const double peak = s.amplitude_v + s.offset_v;
    if (peak > rail) {
        const double k = rail / peak;
        s.amplitude_v *= k;
        s.offset_v *= k;
        s.saturated = true;
    }
    return s;
}

}  // namespace tofsim
