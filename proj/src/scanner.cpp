#include "tofsim/scanner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tofsim/error.hpp"
#include "tofsim/parallel.hpp"

namespace tofsim {

double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross(Vec3 a, Vec3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(Vec3 a) {
    const double n = norm(a);
    require(n > 0.0, "cannot normalize a zero vector");
    return (1.0 / n) * a;
}

namespace {

constexpr double kMinHit = 1e-12;
constexpr double kNoHit = std::numeric_limits<double>::infinity();

double nearest_positive(double t0, double t1) {
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > kMinHit) return t0;
    if (t1 > kMinHit) return t1;
    return kNoHit;
}

double intersect(const Plane& p, Vec3 d) {
    const Vec3 n = normalized(p.normal);
    const double denom = dot(n, d);
    if (std::abs(denom) < 1e-15) return kNoHit;
    const double t = dot(n, p.point) / denom;
    return t > kMinHit ? t : kNoHit;
}

double intersect(const Sphere& s, Vec3 d) {
    const Vec3 oc = -1.0 * s.center;
    const double b = dot(d, oc);
    const double c = dot(oc, oc) - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return kNoHit;
    const double root = std::sqrt(disc);
    return nearest_positive(-b - root, -b + root);
}

double intersect(const Cylinder& cyl, Vec3 d) {
    const Vec3 a = normalized(cyl.axis);
    const Vec3 o = -1.0 * cyl.center;
    const double half = cyl.height / 2.0;
    const double oa = dot(o, a);
    const double da = dot(d, a);
    double best = kNoHit;

    const Vec3 o_perp = o - oa * a;
    const Vec3 d_perp = d - da * a;
    const double qa = dot(d_perp, d_perp);
    if (qa > 1e-18) {
        const double qb = dot(o_perp, d_perp);
        const double qc = dot(o_perp, o_perp) - cyl.radius * cyl.radius;
        const double disc = qb * qb - qa * qc;
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            for (double t : {(-qb - root) / qa, (-qb + root) / qa}) {
                if (t > kMinHit && t < best && std::abs(oa + t * da) <= half) best = t;
            }
        }
    }
    if (std::abs(da) > 1e-15) {
        for (double cap : {-half, half}) {
            const double t = (cap - oa) / da;
            if (t <= kMinHit || t >= best) continue;
            const Vec3 p = o + t * d;
            const Vec3 radial = p - dot(p, a) * a;
            if (dot(radial, radial) <= cyl.radius * cyl.radius) best = t;
        }
    }
    return best;
}

double intersect(const Box& b, Vec3 d) {
    const double lo[3] = {b.center.x - b.size.x / 2, b.center.y - b.size.y / 2, b.center.z - b.size.z / 2};
    const double hi[3] = {b.center.x + b.size.x / 2, b.center.y + b.size.y / 2, b.center.z + b.size.z / 2};
    const double dir[3] = {d.x, d.y, d.z};
    double t_near = -kNoHit;
    double t_far = kNoHit;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(dir[k]) < 1e-300) {
            if (lo[k] > 0.0 || hi[k] < 0.0) return kNoHit;
            continue;
        }
        double t0 = lo[k] / dir[k];
        double t1 = hi[k] / dir[k];
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
    }
    if (t_near > t_far) return kNoHit;
    return nearest_positive(t_near, t_far);
}

bool positive(Vec3 v) { return v.x > 0.0 && v.y > 0.0 && v.z > 0.0; }

}  // namespace

void Scene::validate() const {
    require(!primitives.empty(), "scene has no primitives");
    for (std::size_t i = 0; i < primitives.size(); ++i) {
        const auto& p = primitives[i];
        const std::string where = "primitive " + std::to_string(i) + ": ";
        require(p.reflectivity > 0.0 && p.reflectivity <= 1.0, where + "reflectivity must be in (0, 1]");
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Plane>) {
                    require(norm(s.normal) > 0.0, where + "plane normal must be nonzero");
                } else if constexpr (std::is_same_v<T, Sphere>) {
                    require(s.radius > 0.0, where + "sphere radius must be > 0");
                } else if constexpr (std::is_same_v<T, Cylinder>) {
                    require(norm(s.axis) > 0.0, where + "cylinder axis must be nonzero");
                    require(s.radius > 0.0 && s.height > 0.0, where + "cylinder radius and height must be > 0");
                } else {
                    require(positive(s.size), where + "box size must be > 0 on every axis");
                }
            },
            p.shape);
    }
}

std::optional<Hit> raycast(const Scene& scene, Vec3 direction) {
    require(std::abs(norm(direction) - 1.0) <= 1e-9, "raycast direction must be a unit vector");
    double best = kNoHit;
    double rho = 0.0;
    for (const auto& p : scene.primitives) {
        const double t = std::visit([&](const auto& s) { return intersect(s, direction); }, p.shape);
        if (t < best) {
            best = t;
            rho = p.reflectivity;
        }
    }
    if (!std::isfinite(best)) return std::nullopt;
    return Hit{best, rho};
}

void RasterGrid::validate() const {
    require(width >= 1 && height >= 1, "raster width and height must be >= 1");
    require(horizontal_fov_rad > 0.0 && horizontal_fov_rad < constants::kPi, "horizontal FoV must be in (0, pi)");
    require(vertical_fov_rad > 0.0 && vertical_fov_rad < constants::kPi, "vertical FoV must be in (0, pi)");
}

Vec3 RasterGrid::direction(std::size_t col, std::size_t row) const {
    const double u = (static_cast<double>(col) + 0.5) / static_cast<double>(width) - 0.5;
    const double v = 0.5 - (static_cast<double>(row) + 0.5) / static_cast<double>(height);
    const double ax = u * horizontal_fov_rad;
    const double ay = v * vertical_fov_rad;
    return normalized({std::tan(ax), std::tan(ay), 1.0});
}

DepthFrame render_frame(const Scene& scene, const RasterGrid& grid, const ScanConfig& config) {
    scene.validate();
    grid.validate();
    config.link.validate();
    require(config.integration_time_s > 0.0, "integration time must be > 0");

    const std::size_t n = grid.pixel_count();
    DepthFrame frame;
    frame.meta.width = grid.width;
    frame.meta.height = grid.height;
    frame.meta.integration_time_s = config.integration_time_s;
    frame.meta.modulation_frequency_hz = config.measurement.modulation_frequency_hz;
    frame.meta.frame_time_s = static_cast<double>(n) * config.integration_time_s;
    frame.meta.seed = config.seed;
    frame.meta.noise = config.noise;
    frame.depth_m.assign(n, std::numeric_limits<float>::quiet_NaN());
    frame.amplitude.assign(n, 0.0f);
    frame.saturated.assign(n, 0);

    MeasurementSetup base = config.measurement;
    base.integration_time_s = config.integration_time_s;
    base.noise = config.noise;

    parallel_for(n, [&](std::size_t p) {
        const auto hit = raycast(scene, grid.direction(p % grid.width, p / grid.width));
        if (!hit) return;
        const ReceivedSignal rx = received_amplitude(hit->reflectivity, hit->distance_m, config.link);
        MeasurementSetup setup = base;
        setup.true_distance_m = hit->distance_m;
        setup.received_amplitude_v = rx.amplitude_v;
        setup.received_offset_v = rx.offset_v;
        const DemodResult r = MeasurementSimulator(setup).run(derive_seed(config.seed, p));
        frame.depth_m[p] = static_cast<float>(r.distance_m);
        frame.amplitude[p] = static_cast<float>(r.amplitude);
        frame.saturated[p] = rx.saturated ? 1 : 0;
    });
    frame.meta.saturated_pixels =
        static_cast<std::size_t>(std::count(frame.saturated.begin(), frame.saturated.end(), 1));
    return frame;
}

ErrorReport error_report(const DepthFrame& frame, const Scene& scene, const RasterGrid& grid, std::size_t bins,
                         double max_bin_m) {
    require(frame.meta.width == grid.width && frame.meta.height == grid.height,
            "error_report: frame resolution does not match the grid");
    require(frame.depth_m.size() == grid.pixel_count(), "error_report: frame size does not match the grid");
    require(bins >= 1 && max_bin_m > 0.0, "error_report: need >= 1 bin and a positive range");

    const double range = constants::ambiguity_range(frame.meta.modulation_frequency_hz);
    ErrorReport rep;
    rep.counts.assign(bins, 0);
    for (std::size_t i = 0; i <= bins; ++i)
        rep.bin_edges_m.push_back(max_bin_m * static_cast<double>(i) / static_cast<double>(bins));

    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t p = 0; p < grid.pixel_count(); ++p) {
        const auto truth = raycast(scene, grid.direction(p % grid.width, p / grid.width));
        const bool returned = !std::isnan(frame.depth_m[p]);
        if (!truth || !returned) {
            if (truth.has_value() != returned) ++rep.missing_pixels;
            continue;
        }
        const double expected = std::fmod(truth->distance_m, range);
        double err = std::abs(static_cast<double>(frame.depth_m[p]) - expected);
        err = std::min(err, range - err);
        ++rep.compared_pixels;
        sum += err;
        sum_sq += err * err;
        rep.max_error_m = std::max(rep.max_error_m, err);
        const auto bin = static_cast<std::size_t>(err / max_bin_m * static_cast<double>(bins));
        ++rep.counts[std::min(bin, bins - 1)];
    }
    if (rep.compared_pixels > 0) {
        const auto n = static_cast<double>(rep.compared_pixels);
        rep.mean_error_m = sum / n;
        rep.rms_error_m = std::sqrt(sum_sq / n);
    }
    return rep;
}

void write_raster(std::ostream& out, const std::string& magic, std::size_t width, std::size_t height,
                  const std::vector<float>& values) {
    require(values.size() == width * height, "raster size does not match its dimensions");
    out << magic << '\n' << width << ' ' << height << '\n';
    for (float v : values) {
        auto bits = std::bit_cast<std::uint32_t>(v);
        unsigned char bytes[4];
        for (int k = 0; k < 4; ++k) bytes[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xFFu);
        out.write(reinterpret_cast<const char*>(bytes), 4);
    }
}

Raster read_raster(std::istream& in) {
    Raster r;
    std::string dims;
    if (!std::getline(in, r.magic) || !std::getline(in, dims)) throw ValidationError("raster: truncated header");
    require(r.magic == "FDM1" || r.magic == "FAM1", "raster: unknown magic '" + r.magic + "'");
    std::istringstream ds(dims);
    long long w = 0, h = 0;
    ds >> w >> h;
    require(ds && w >= 1 && h >= 1, "raster: malformed dimensions line '" + dims + "'");
    r.width = static_cast<std::size_t>(w);
    r.height = static_cast<std::size_t>(h);
    r.values.resize(r.width * r.height);
    for (auto& v : r.values) {
        unsigned char bytes[4];
        if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw ValidationError("raster: truncated data");
        std::uint32_t bits = 0;
        for (int k = 0; k < 4; ++k) bits |= static_cast<std::uint32_t>(bytes[k]) << (8 * k);
        v = std::bit_cast<float>(bits);
    }
    return r;
}

void save_raster(const std::filesystem::path& path, const std::string& magic, std::size_t width,
                 std::size_t height, const std::vector<float>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_raster(out, magic, width, height, values);
    if (!out) throw IoError("failed writing " + path.string());
}

Raster load_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_raster(in);
}

void write_frame_csv(std::ostream& out, const DepthFrame& frame) {
    out << "row,col,depth_m,amplitude,saturated\n";
    out << std::setprecision(std::numeric_limits<float>::max_digits10);
    for (std::size_t p = 0; p < frame.depth_m.size(); ++p) {
        out << p / frame.meta.width << ',' << p % frame.meta.width << ',';
        if (std::isnan(frame.depth_m[p])) out << "nan";
        else out << frame.depth_m[p];
        out << ',' << frame.amplitude[p] << ',' << int{frame.saturated[p]} << '\n';
    }
}

namespace {

using nlohmann::json;

Vec3 vec_from(const json& j, const std::string& what) {
    if (j.is_array() && j.size() == 3 && std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); }))
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (j.is_object() && j.contains("x") && j.contains("y") && j.contains("z"))
        return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>()};
    throw ValidationError(what + " must be [x, y, z]");
}

double number_from(const json& j, const char* key, const std::string& what) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_number())
        throw ValidationError(what + " needs numeric '" + key + "'");
    return j.at(key).get<double>();
}

Primitive primitive_from(const json& j, std::size_t index) {
    const std::string where = "scene primitive " + std::to_string(index);
    require(j.is_object(), where + " must be an object");
    require(j.contains("type") && j.at("type").is_string(), where + " needs a string 'type'");
    const std::string type = j.at("type").get<std::string>();
    const json pose = j.value("pose", json::object());
    const json size = j.value("size", json());

    Primitive p;
    if (j.contains("reflectivity")) {
        require(j.at("reflectivity").is_number(), where + ": reflectivity must be a number");
        p.reflectivity = j.at("reflectivity").get<double>();
    }
    auto position = [&] { return pose.contains("position") ? vec_from(pose.at("position"), where + " position") : Vec3{}; };

    if (type == "plane") {
        Plane s;
        s.point = position();
        if (pose.contains("normal")) s.normal = vec_from(pose.at("normal"), where + " normal");
        p.shape = s;
    } else if (type == "sphere") {
        Sphere s;
        s.center = position();
        s.radius = size.is_number() ? size.get<double>() : number_from(size, "radius", where);
        p.shape = s;
    } else if (type == "cylinder") {
        Cylinder s;
        s.center = position();
        if (pose.contains("axis")) s.axis = vec_from(pose.at("axis"), where + " axis");
        s.radius = number_from(size, "radius", where);
        s.height = number_from(size, "height", where);
        p.shape = s;
    } else if (type == "box") {
        Box s;
        s.center = position();
        s.size = vec_from(size, where + " size");
        p.shape = s;
    } else {
        throw ValidationError(where + ": unknown type '" + type + "'");
    }
    return p;
}

}  // namespace

Scene parse_scene_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scene JSON: ") + e.what());
    }
    const json* list = &doc;
    if (doc.is_object() && doc.contains("primitives")) list = &doc.at("primitives");
    require(list->is_array(), "scene JSON must be a list of primitives");
    Scene scene;
    try {
        for (std::size_t i = 0; i < list->size(); ++i) scene.primitives.push_back(primitive_from((*list)[i], i));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scene JSON: ") + e.what());
    }
    scene.validate();
    return scene;
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scene_json(ss.str());
}

}  // namespace tofsim
