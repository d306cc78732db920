#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tofsim/link_budget.hpp"
#include "tofsim/simlab.hpp"

namespace tofsim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    bool operator==(const Vec3&) const = default;
};

double dot(Vec3 a, Vec3 b);
Vec3 cross(Vec3 a, Vec3 b);
double norm(Vec3 a);
Vec3 normalized(Vec3 a);

// Sensor frame: origin at the sensor, +z boresight, +x right, +y up.

/// Infinite plane through `point` with normal `normal`.
struct Plane {
    Vec3 point;
    Vec3 normal{0, 0, 1};
};

struct Sphere {
    Vec3 center;
    double radius = 0.0;
};

/// Finite capped cylinder; `center` is the middle of the axis segment.
struct Cylinder {
    Vec3 center;
    Vec3 axis{0, 1, 0};
    double radius = 0.0;
    double height = 0.0;
};

/// Axis-aligned box.
struct Box {
    Vec3 center;
    Vec3 size;
};

using Shape = std::variant<Plane, Sphere, Cylinder, Box>;

struct Primitive {
    Shape shape;
    double reflectivity = 0.95;
};

struct Scene {
    std::vector<Primitive> primitives;
    void validate() const;
};

struct Hit {
    double distance_m = 0.0;
    double reflectivity = 0.0;
};

/// Nearest intersection along a ray from the origin; nullopt on a miss.
/// `direction` must be unit length within 1e-9.
std::optional<Hit> raycast(const Scene& scene, Vec3 direction);

/// Raster of viewing directions, row-major, row 0 at the top.
struct RasterGrid {
    std::size_t width = 1;
    std::size_t height = 1;
    double horizontal_fov_rad = 0.5;
    double vertical_fov_rad = 0.5;

    void validate() const;
    std::size_t pixel_count() const { return width * height; }
    /// Unit direction through the centre of pixel (col, row); pixels are
    /// equally spaced in scan angle.
    Vec3 direction(std::size_t col, std::size_t row) const;
};

struct ScanConfig {
    double integration_time_s = 800e-9;
    bool noise = true;
    std::uint64_t seed = 0;
    LinkBudget link{};
    /// Template for per-pixel measurements; distance, R, R_DC, T_int, seed
    /// and noise are overridden.
    MeasurementSetup measurement{};
};

struct FrameMetadata {
    std::size_t width = 0;
    std::size_t height = 0;
    double integration_time_s = 0.0;
    double modulation_frequency_hz = 0.0;
    double frame_time_s = 0.0;
    std::uint64_t seed = 0;
    bool noise = true;
    std::size_t saturated_pixels = 0;
};

struct DepthFrame {
    FrameMetadata meta;
    std::vector<float> depth_m;     // NaN where nothing was hit
    std::vector<float> amplitude;   // A in V², 0 where nothing was hit
    std::vector<std::uint8_t> saturated;
};

/// Scans every pixel of `grid`. Pixel p uses derive_seed(config.seed, p), so
/// the frame does not depend on execution order.
DepthFrame render_frame(const Scene& scene, const RasterGrid& grid, const ScanConfig& config);

struct ErrorReport {
    std::vector<double> bin_edges_m;    // bins + 1 edges
    std::vector<std::size_t> counts;
    std::size_t compared_pixels = 0;
    std::size_t missing_pixels = 0;     // returned/expected mismatch
    double max_error_m = 0.0;
    double mean_error_m = 0.0;
    double rms_error_m = 0.0;
};

/// Absolute depth error against analytic ground truth (re-raycast). Truth is
/// wrapped into the ambiguity interval and the difference is taken on the
/// circle, so a reading of 4.79 m against a truth of 0.001 m counts as a
/// small error. Errors above `max_bin_m` land in the last bin.
ErrorReport error_report(const DepthFrame& frame, const Scene& scene, const RasterGrid& grid,
                         std::size_t bins = 20, double max_bin_m = 0.02);

// FDM1 (depth, m) / FAM1 (amplitude, V²): "FDM1\n<w> <h>\n" then w·h
// little-endian float32, row-major.
void write_raster(std::ostream& out, const std::string& magic, std::size_t width, std::size_t height,
                  const std::vector<float>& values);
struct Raster {
    std::string magic;
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<float> values;
};
Raster read_raster(std::istream& in);
void save_raster(const std::filesystem::path& path, const std::string& magic, std::size_t width,
                 std::size_t height, const std::vector<float>& values);
Raster load_raster(const std::filesystem::path& path);

/// CSV: row,col,depth_m,amplitude,saturated.
void write_frame_csv(std::ostream& out, const DepthFrame& frame);

/// Scene JSON: a list of primitives (or {"primitives": [...]}) with fields
/// type ∈ {plane, sphere, cylinder, box}, pose, size, reflectivity.
///   plane:    pose {position, normal}
///   sphere:   pose {position}, size {radius}
///   cylinder: pose {position, axis}, size {radius, height}
///   box:      pose {position}, size [sx, sy, sz]
Scene parse_scene_json(const std::string& text);
Scene load_scene(const std::filesystem::path& path);

}  // namespace tofsim
