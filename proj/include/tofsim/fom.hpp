#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tofsim {

/// One row of a cross-sensor comparison. Text columns are carried verbatim.
struct SensorRecord {
    std::string name;
    std::size_t pixels_x = 0;
    std::size_t pixels_y = 0;
    double frame_time_s = 0.0;
    std::string wavelength_nm;         // e.g. "940, 850"
    double illumination_power_w = 0.0;
    bool power_assumed = false;
    std::string modulation_frequency;  // e.g. "15, 30", "Not specified"
    double distance_noise_percent = 0.0;
    std::string range;                 // range the noise was stated at
    std::optional<double> published_fom;
    std::string notes;

    void validate() const;
    std::size_t pixel_count() const { return pixels_x * pixels_y; }
};

/// Illuminated optical energy per pixel times the distance noise, in nJ/pixel.
/// The percentage enters as its numeric value (0.056 for 0.056 %).
double compute_fom(const SensorRecord& r);

struct RankedRecord {
    SensorRecord record;
    double fom_nj_per_pixel = 0.0;
};

/// Ascending FoM (lowest = best); ties keep input order.
std::vector<RankedRecord> rank_table(const std::vector<SensorRecord>& records);

/// The nine-sensor comparison table shipped with the library.
std::vector<SensorRecord> builtin_records();

struct RecordLoad {
    std::vector<SensorRecord> records;
    std::vector<std::string> warnings;
};

/// CSV with a header row. Required columns: name, pixels_x, pixels_y,
/// frame_time_s, illumination_power_w, distance_noise_percent. Optional:
/// wavelength_nm, modulation_frequency, range, power_assumed, published_fom,
/// notes. Fields may be double-quoted ("" escapes a quote). Malformed rows
/// raise ValidationError naming the line.
RecordLoad parse_records(std::istream& in);
RecordLoad load_records(const std::filesystem::path& path);

void write_fom_table(std::ostream& out, const std::vector<RankedRecord>& table);
void write_fom_csv(std::ostream& out, const std::vector<RankedRecord>& table);

}  // namespace tofsim
