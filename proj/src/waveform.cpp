#include "tofsim/waveform.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "tofsim/error.hpp"

namespace tofsim {

void SignalSpec::validate() const {
    require(std::isfinite(amplitude) && amplitude >= 0.0, "signal amplitude must be >= 0");
    require(std::isfinite(offset), "signal offset must be finite");
    require(std::isfinite(frequency_hz) && frequency_hz > 0.0, "signal frequency must be > 0");
    require(std::isfinite(phase_rad), "signal phase must be finite");
}

double SignalSpec::at_sample(std::size_t i, double sample_rate_hz) const {
    // Cycles elapsed, computed as (f·i)/fs so that exact fractions such as
    // i/20 stay exact and square-wave edges land on the intended sample.
    const double cycles = (frequency_hz * static_cast<double>(i)) / sample_rate_hz;
    if (kind == WaveKind::Sine) {
        const double whole = std::floor(cycles);
        return amplitude * std::sin(constants::kTwoPi * (cycles - whole) + phase_rad) + offset;
    }
    double frac = cycles + phase_rad / constants::kTwoPi;
    frac -= std::floor(frac);
    return frac < 0.5 ? offset + amplitude : offset - amplitude;
}

Trace::Trace(std::vector<double> samples, double sample_rate_hz, double origin_time_s)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz), origin_time_s_(origin_time_s) {
    require(!samples_.empty(), "trace must contain at least one sample");
    require(std::isfinite(sample_rate_hz_) && sample_rate_hz_ > 0.0, "sample rate must be > 0");
}

Trace Trace::rotated(std::size_t shift) const {
    const std::size_t n = samples_.size();
    shift %= n;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = samples_[(i + shift) % n];
    return Trace(std::move(out), sample_rate_hz_, origin_time_s_);
}

Trace synthesize(const SignalSpec& spec, double sample_rate_hz, std::size_t n_samples) {
    spec.validate();
    require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0, "sample rate must be > 0");
    require(n_samples >= 1, "n_samples must be >= 1");
    require(sample_rate_hz > 2.0 * spec.frequency_hz, "sample rate must exceed twice the signal frequency");
    std::vector<double> v(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) v[i] = spec.at_sample(i, sample_rate_hz);
    return Trace(std::move(v), sample_rate_hz);
}

std::array<Trace, 4> make_quadrature_set(const SignalSpec& spec, double sample_rate_hz,
                                         std::size_t n_samples) {
    auto shifted = [&](int n) {
        SignalSpec s = spec;
        s.phase_rad += n * (constants::kPi / 2.0);
        return synthesize(s, sample_rate_hz, n_samples);
    };
    return {shifted(0), shifted(1), shifted(2), shifted(3)};
}

QuantizedTrace quantize(const Trace& t, int bits, double full_scale_v) {
    require(bits >= 2 && bits <= 24, "digitizer bits must be in [2, 24]");
    require(std::isfinite(full_scale_v) && full_scale_v > 0.0, "full scale must be > 0");
    const double half = full_scale_v / 2.0;
    const double lsb = full_scale_v / std::ldexp(1.0, bits);
    const double max_code = std::ldexp(1.0, bits - 1);
    std::vector<double> out(t.size());
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double v = t[i];
        if (v > half || v < -half) {
            ++clipped;
            v = std::clamp(v, -half, half);
        }
        const double code = std::clamp(std::nearbyint(v / lsb), -max_code, max_code);
        out[i] = code * lsb;
    }
    return {Trace(std::move(out), t.sample_rate_hz(), t.origin_time_s()), clipped};
}

void write_trace_csv(std::ostream& out, const Trace& t) {
    out << "# sample_rate_hz=" << std::setprecision(17) << t.sample_rate_hz() << '\n';
    out << std::setprecision(std::numeric_limits<float>::max_digits10);
    for (double v : t.samples()) out << static_cast<float>(v) << '\n';
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

double parse_double(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError("trace csv line " + std::to_string(line_no) + ": bad number '" +
                              std::string(s) + "'");
    return v;
}

}  // namespace

Trace read_trace_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    double rate = 0.0;
    bool have_header = false;
    std::vector<double> samples;
    while (std::getline(in, line)) {
        ++line_no;
        auto s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            constexpr std::string_view key = "sample_rate_hz=";
            auto pos = s.find(key);
            if (pos != std::string_view::npos) {
                rate = parse_double(trim(s.substr(pos + key.size())), line_no);
                have_header = true;
            }
            continue;
        }
        samples.push_back(parse_double(s, line_no));
    }
    require(have_header, "trace csv: missing '# sample_rate_hz=' header");
    return Trace(std::move(samples), rate);
}

void save_trace_csv(const std::filesystem::path& path, const Trace& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    write_trace_csv(f, t);
    if (!f) throw IoError("write failed: " + path.string());
}

Trace load_trace_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    return read_trace_csv(f);
}

}  // namespace tofsim
