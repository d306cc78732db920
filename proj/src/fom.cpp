#include "tofsim/fom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tofsim/error.hpp"

namespace tofsim {

void SensorRecord::validate() const {
    require(!name.empty(), "sensor record needs a name");
    require(pixels_x > 0 && pixels_y > 0, name + ": pixel counts must be > 0");
    require(frame_time_s > 0.0, name + ": frame time must be > 0");
    require(illumination_power_w > 0.0, name + ": illumination power must be > 0");
    require(distance_noise_percent > 0.0, name + ": distance noise must be > 0");
}

double compute_fom(const SensorRecord& r) {
    r.validate();
    const double joules_per_pixel = r.illumination_power_w * r.frame_time_s / static_cast<double>(r.pixel_count());
    return joules_per_pixel * 1e9 * r.distance_noise_percent;
}

std::vector<RankedRecord> rank_table(const std::vector<SensorRecord>& records) {
    std::vector<RankedRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r, compute_fom(r)});
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedRecord& a, const RankedRecord& b) { return a.fom_nj_per_pixel < b.fom_nj_per_pixel; });
    return out;
}

std::vector<SensorRecord> builtin_records() {
    auto rec = [](std::string name, std::size_t px, std::size_t py, double frame, std::string wl, double mw,
                  bool assumed, std::string mod, double pct, std::string range, double published) {
        SensorRecord r;
        r.name = std::move(name);
        r.pixels_x = px;
        r.pixels_y = py;
        r.frame_time_s = frame;
        r.wavelength_nm = std::move(wl);
        r.illumination_power_w = mw * 1e-3;
        r.power_assumed = assumed;
        r.modulation_frequency = std::move(mod);
        r.distance_noise_percent = pct;
        r.range = std::move(range);
        r.published_fom = published;
        return r;
    };
    std::vector<SensorRecord> t{
        rec("SR-3000", 176, 144, 0.04, "850", 800, true, "20 MHz", 2.375, "0.8 m", 2998),
        rec("SR-4000", 176, 144, 0.0185, "850", 800, true, "15, 30 MHz", 0.5, "1.60 m", 291.98),
        rec("PMD[vision]-19k", 160, 120, 0.0667, "870", 4000, false, "20 MHz", 0.5, "1.50 m", 6947),
        rec("PMD-camcube 3.0", 200, 200, 0.0667, "870", 800, true, "21 MHz", 0.5, "1.60 m", 667),
        rec("PMD-camera module", 172, 224, 0.01, "940, 850", 1000, false, "Not specified", 0.15, "1 m", 38.933),
        rec("Kinect V2", 512, 424, 0.0333, "850", 1000, false, "multiple", 0.145, "1.50 m", 22.24),
        rec("Kim et al", 320, 240, 0.0167, "855", 1340, false, "10-100 MHz", 0.54, "0.75-4 m", 157.35),
        rec("Keel et al", 640, 480, 0.0167, "940", 2000, false, "10-150 MHz", 0.30, "1.50 m", 32.617),
        rec("This work", 320, 240, 0.614, "852", 30, false, "31.25 MHz", 0.056, "1.50 m", 13.44),
    };
    t[6].notes = "range-dependent noise; single published value used";
    return t;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"' && cur.empty() && !was_quoted) {
            quoted = was_quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur += ch;
        }
    }
    if (quoted) throw ValidationError("line " + std::to_string(line_no) + ": unterminated quoted field");
    fields.push_back(std::move(cur));
    for (auto& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& column, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ValidationError("line " + std::to_string(line_no) + ": column " + column + " is not a number: '" + s + "'");
    return v;
}

std::size_t parse_count(const std::string& s, const std::string& column, std::size_t line_no) {
    unsigned long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError("line " + std::to_string(line_no) + ": column " + column +
                              " is not a non-negative integer: '" + s + "'");
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& s, std::size_t line_no) {
    std::string l = s;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (l.empty() || l == "0" || l == "false" || l == "no") return false;
    if (l == "1" || l == "true" || l == "yes") return true;
    throw ValidationError("line " + std::to_string(line_no) + ": power_assumed must be true/false, got '" + s + "'");
}

}  // namespace

RecordLoad parse_records(std::istream& in) {
    RecordLoad out;
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> col;
    bool have_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto fields = split_csv_line(line, line_no);
        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = i;
            for (const char* req : {"name", "pixels_x", "pixels_y", "frame_time_s", "illumination_power_w",
                                    "distance_noise_percent"}) {
                if (!col.count(req))
                    throw ValidationError("line " + std::to_string(line_no) + ": header lacks column " + req);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != col.size())
            throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(col.size()) +
                                  " fields, got " + std::to_string(fields.size()));
        auto get = [&](const char* key) -> std::string {
            const auto it = col.find(key);
            return it == col.end() ? std::string() : fields[it->second];
        };

        SensorRecord r;
        r.name = get("name");
        r.pixels_x = parse_count(get("pixels_x"), "pixels_x", line_no);
        r.pixels_y = parse_count(get("pixels_y"), "pixels_y", line_no);
        r.frame_time_s = parse_double(get("frame_time_s"), "frame_time_s", line_no);
        r.illumination_power_w = parse_double(get("illumination_power_w"), "illumination_power_w", line_no);
        r.distance_noise_percent = parse_double(get("distance_noise_percent"), "distance_noise_percent", line_no);
        r.wavelength_nm = get("wavelength_nm");
        r.modulation_frequency = get("modulation_frequency");
        r.range = get("range");
        r.notes = get("notes");
        r.power_assumed = parse_bool(get("power_assumed"), line_no);
        if (const auto pub = get("published_fom"); !pub.empty()) r.published_fom = parse_double(pub, "published_fom", line_no);
        try {
            r.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        out.records.push_back(std::move(r));
    }
    if (out.records.empty()) out.warnings.push_back("no sensor records found");
    return out;
}

RecordLoad load_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_records(in);
}

void write_fom_table(std::ostream& out, const std::vector<RankedRecord>& table) {
    std::size_t name_w = 4;
    for (const auto& r : table) name_w = std::max(name_w, r.record.name.size());
    out << std::left << std::setw(5) << "rank" << std::setw(static_cast<int>(name_w) + 2) << "sensor" << std::right
        << std::setw(10) << "pixels" << std::setw(10) << "frame_s" << std::setw(16) << "power_mW" << std::setw(10)
        << "noise_%" << std::setw(12) << "FoM_nJ/px" << '\n';
    std::size_t rank = 1;
    bool any_assumed = false;
    for (const auto& row : table) {
        const auto& r = row.record;
        std::ostringstream px, power;
        px << r.pixels_x << 'x' << r.pixels_y;
        power << r.illumination_power_w * 1e3 << (r.power_assumed ? " (assumed)" : "");
        any_assumed = any_assumed || r.power_assumed;
        out << std::left << std::setw(5) << rank++ << std::setw(static_cast<int>(name_w) + 2) << r.name << std::right
            << std::setw(10) << px.str() << std::setw(10) << r.frame_time_s << std::setw(16) << power.str()
            << std::setw(10) << r.distance_noise_percent << std::setw(12) << std::fixed << std::setprecision(2)
            << row.fom_nj_per_pixel << std::defaultfloat << std::setprecision(6) << '\n';
    }
    if (any_assumed) out << "(assumed): illumination power not published for that sensor\n";
}

namespace {
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}
}  // namespace

void write_fom_csv(std::ostream& out, const std::vector<RankedRecord>& table) {
    out << "rank,name,pixels_x,pixels_y,frame_time_s,wavelength_nm,illumination_power_w,power_assumed,"
           "modulation_frequency,distance_noise_percent,range,fom_nj_per_pixel,published_fom,notes\n";
    out << std::setprecision(10);
    std::size_t rank = 1;
    for (const auto& row : table) {
        const auto& r = row.record;
        out << rank++ << ',' << csv_field(r.name) << ',' << r.pixels_x << ',' << r.pixels_y << ',' << r.frame_time_s
            << ',' << csv_field(r.wavelength_nm) << ',' << r.illumination_power_w << ','
            << (r.power_assumed ? "true" : "false") << ',' << csv_field(r.modulation_frequency) << ','
            << r.distance_noise_percent << ',' << csv_field(r.range) << ',' << row.fom_nj_per_pixel << ',';
        if (r.published_fom) out << *r.published_fom;
        out << ',' << csv_field(r.notes) << '\n';
    }
}

}  // namespace tofsim
