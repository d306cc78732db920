#include "tofsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "tofsim/error.hpp"

namespace tofsim {

using nlohmann::json;

void Config::validate() const {
    require(modulation_frequency_hz > 0.0, "config: modulation_frequency must be > 0");
    require(sample_rate_hz > 2.0 * modulation_frequency_hz, "config: sample_rate must exceed twice the modulation frequency");
    require(integration_time_s > 0.0, "config: integration_time must be > 0");
    require(laser_power_w > 0.0, "config: laser.power must be > 0");
    require(digitizer_bits >= 2 && digitizer_bits <= 24, "config: digitizer.bits must be in [2, 24]");
    require(digitizer_full_scale_v > 0.0, "config: digitizer.full_scale must be > 0");
    require(demod_amplitude_v > 0.0 && demod_offset_v > 0.0, "config: demod amplitude and offset must be > 0");
    require(reference_amplitude_v > 0.0, "config: link.reference_amplitude must be > 0");
    require(reference_reflectivity > 0.0 && reference_reflectivity <= 1.0,
            "config: link.reference_reflectivity must be in (0, 1]");
    require(reference_distance_m > 0.0, "config: link.reference_distance must be > 0");
    require(modulation_depth > 0.0, "config: link.modulation_depth must be > 0");
    chain().validate();
}

ApdChain Config::chain() const {
    ApdChain c;
    c.responsivity_a_per_w = responsivity_a_per_w;
    c.transimpedance_v_per_a = gain_v_per_a;
    c.multiplication = multiplication;
    c.wavelength_m = wavelength_m;
    return c;
}

LinkBudget Config::link() const {
    LinkBudget l = LinkBudget::from_reference(reference_amplitude_v, reference_reflectivity, reference_distance_m,
                                              laser_power_w);
    l.modulation_depth = modulation_depth;
    l.full_scale_v = digitizer_full_scale_v;
    return l;
}

MeasurementSetup Config::measurement() const {
    MeasurementSetup s;
    s.integration_time_s = integration_time_s;
    s.seed = seed;
    s.chain = chain();
    s.digitizer = {digitizer_bits, digitizer_full_scale_v};
    s.modulation_frequency_hz = modulation_frequency_hz;
    s.sample_rate_hz = sample_rate_hz;
    s.demod_amplitude_v = demod_amplitude_v;
    s.demod_offset_v = demod_offset_v;
    return s;
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!known.count(item.key())) throw ValidationError("config: unknown key '" + where + item.key() + "'");
    }
}

void read_number(const json& obj, const char* key, double& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ValidationError("config: '" + where + key + "' must be a number");
    dst = v.get<double>();
}

const json& section(const json& j, const char* key) {
    static const json empty = json::object();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_object()) throw ValidationError(std::string("config: '") + key + "' must be an object");
    return j.at(key);
}

}  // namespace

Config parse_config(const json& j) {
    require(j.is_object(), "config: top level must be a JSON object");
    reject_unknown(j,
                   {"modulation_frequency", "sample_rate", "integration_time", "laser", "apd", "digitizer", "demod",
                    "seed", "link"},
                   "");
    Config c;
    read_number(j, "modulation_frequency", c.modulation_frequency_hz, "");
    read_number(j, "sample_rate", c.sample_rate_hz, "");
    read_number(j, "integration_time", c.integration_time_s, "");

    const json& laser = section(j, "laser");
    reject_unknown(laser, {"power", "wavelength"}, "laser.");
    read_number(laser, "power", c.laser_power_w, "laser.");
    read_number(laser, "wavelength", c.wavelength_m, "laser.");

    const json& apd = section(j, "apd");
    reject_unknown(apd, {"responsivity", "gain", "multiplication"}, "apd.");
    read_number(apd, "responsivity", c.responsivity_a_per_w, "apd.");
    read_number(apd, "gain", c.gain_v_per_a, "apd.");
    read_number(apd, "multiplication", c.multiplication, "apd.");

    const json& dig = section(j, "digitizer");
    reject_unknown(dig, {"bits", "full_scale"}, "digitizer.");
    if (dig.contains("bits")) {
        require(dig.at("bits").is_number_integer(), "config: 'digitizer.bits' must be an integer");
        c.digitizer_bits = dig.at("bits").get<int>();
    }
    read_number(dig, "full_scale", c.digitizer_full_scale_v, "digitizer.");

    const json& demod = section(j, "demod");
    reject_unknown(demod, {"amplitude", "offset"}, "demod.");
    read_number(demod, "amplitude", c.demod_amplitude_v, "demod.");
    read_number(demod, "offset", c.demod_offset_v, "demod.");

    if (j.contains("seed")) {
        const json& s = j.at("seed");
        require(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0),
                "config: 'seed' must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }

    const json& link = section(j, "link");
    reject_unknown(link, {"reference_amplitude", "reference_reflectivity", "reference_distance", "modulation_depth"},
                   "link.");
    read_number(link, "reference_amplitude", c.reference_amplitude_v, "link.");
    read_number(link, "reference_reflectivity", c.reference_reflectivity, "link.");
    read_number(link, "reference_distance", c.reference_distance_m, "link.");
    read_number(link, "modulation_depth", c.modulation_depth, "link.");

    c.validate();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json config_to_json(const Config& c) {
    return {
        {"modulation_frequency", c.modulation_frequency_hz},
        {"sample_rate", c.sample_rate_hz},
        {"integration_time", c.integration_time_s},
        {"laser", {{"power", c.laser_power_w}, {"wavelength", c.wavelength_m}}},
        {"apd", {{"responsivity", c.responsivity_a_per_w}, {"gain", c.gain_v_per_a}, {"multiplication", c.multiplication}}},
        {"digitizer", {{"bits", c.digitizer_bits}, {"full_scale", c.digitizer_full_scale_v}}},
        {"demod", {{"amplitude", c.demod_amplitude_v}, {"offset", c.demod_offset_v}}},
        {"seed", c.seed},
        {"link",
         {{"reference_amplitude", c.reference_amplitude_v},
          {"reference_reflectivity", c.reference_reflectivity},
          {"reference_distance", c.reference_distance_m},
          {"modulation_depth", c.modulation_depth}}},
    };
}

json demod_to_json(const DemodResult& r) {
    json j = {
        {"a", r.amplitude},
        {"b", r.offset},
        {"phase_rad", r.phase_rad},
        {"distance_m", r.distance_m},
        {"contrast", nullptr},
        {"t_int_s", r.integration_time_s},
        {"f_hz", r.modulation_frequency_hz},
        {"phase_undefined", r.phase_undefined},
        {"contrast_infinite", r.contrast_infinite},
        {"non_integer_periods", r.non_integer_periods},
    };
    if (!r.contrast_infinite && std::isfinite(r.contrast)) j["contrast"] = r.contrast;
    return j;
}

json frame_metadata_to_json(const FrameMetadata& m) {
    return {
        {"width", m.width},
        {"height", m.height},
        {"t_int_s", m.integration_time_s},
        {"f_hz", m.modulation_frequency_hz},
        {"frame_time_s", m.frame_time_s},
        {"seed", m.seed},
        {"noise", m.noise},
        {"saturated_pixels", m.saturated_pixels},
    };
}

json error_report_to_json(const ErrorReport& r) {
    return {
        {"compared_pixels", r.compared_pixels},
        {"missing_pixels", r.missing_pixels},
        {"max_error_m", r.max_error_m},
        {"mean_error_m", r.mean_error_m},
        {"rms_error_m", r.rms_error_m},
        {"histogram", {{"bin_edges_m", r.bin_edges_m}, {"counts", r.counts}}},
    };
}

}  // namespace tofsim
