#include "tofsim/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>

#include "tofsim/error.hpp"

namespace tofsim {

namespace {

// FFTW's planner is not reentrant; execution of a plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

std::vector<std::complex<double>> real_fft(const std::vector<double>& input, std::size_t n) {
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
    if (!in || !out) throw std::bad_alloc();

    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    std::fill(in.get(), in.get() + n, 0.0);
    std::copy(input.begin(), input.end(), in.get());
    fftw_execute(plan);

    std::vector<std::complex<double>> result(n / 2 + 1);
    for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out.get()[k][0], out.get()[k][1]};
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return result;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

AmplitudeSpectrum amplitude_spectrum(const Trace& t, std::size_t n_fft, SpectrumScaling scaling) {
    require(is_power_of_two(n_fft), "n_fft must be a power of two");
    require(n_fft >= t.size(), "n_fft must be >= the record length");
    const std::vector<double> samples(t.samples().begin(), t.samples().end());
    const auto spectrum = real_fft(samples, n_fft);

    AmplitudeSpectrum s;
    s.record_length = t.size();
    s.n_fft = n_fft;
    s.sample_rate_hz = t.sample_rate_hz();
    s.scaling = scaling;
    s.bin_frequencies_hz.resize(spectrum.size());
    s.magnitudes.resize(spectrum.size());
    const double norm = 1.0 / static_cast<double>(t.size());
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        s.bin_frequencies_hz[k] = static_cast<double>(k) * s.sample_rate_hz / static_cast<double>(n_fft);
        double m = std::abs(spectrum[k]) * norm;
        const bool edge = k == 0 || (k == n_fft / 2);
        if (scaling == SpectrumScaling::Amplitude && !edge) m *= 2.0;
        s.magnitudes[k] = m;
    }
    return s;
}

LineIntensity line_intensity(const AmplitudeSpectrum& s, double freq_hz) {
    require(!s.magnitudes.empty(), "line_intensity: empty spectrum");
    require(freq_hz >= 0.0, "line_intensity: frequency must be >= 0");
    require(freq_hz <= s.sample_rate_hz / 2.0, "line_intensity: frequency above Nyquist");
    const double pos = freq_hz / s.bin_width_hz();
    auto bin = static_cast<std::size_t>(std::floor(pos));
    // Exactly halfway stays on the lower bin.
    if (pos - static_cast<double>(bin) > 0.5) ++bin;
    bin = std::min(bin, s.magnitudes.size() - 1);
    return {s.magnitudes[bin], s.bin_frequencies_hz[bin], bin};
}

ContrastEstimate spectral_contrast(const AmplitudeSpectrum& received, const AmplitudeSpectrum& demod,
                                   double freq_hz) {
    require(received.n_fft == demod.n_fft, "spectral_contrast: n_fft differs");
    require(received.sample_rate_hz == demod.sample_rate_hz, "spectral_contrast: sample rates differ");
    const double rf = line_intensity(received, freq_hz).magnitude;
    const double mf = line_intensity(demod, freq_hz).magnitude;
    const double r0 = line_intensity(received, 0.0).magnitude;
    const double m0 = line_intensity(demod, 0.0).magnitude;
    // A DC line at the transform's round-off floor counts as zero.
    auto negligible = [](double dc, const AmplitudeSpectrum& s) {
        const double peak = *std::max_element(s.magnitudes.begin(), s.magnitudes.end());
        return dc <= 1e-12 * peak;
    };
    if (negligible(r0, received) || negligible(m0, demod)) return {std::numeric_limits<double>::infinity(), true};
    return {rf * mf / (r0 * m0), false};
}

void write_spectrum_csv(std::ostream& out, const AmplitudeSpectrum& s) {
    out << "frequency_hz,magnitude_v\n" << std::setprecision(17);
    for (std::size_t k = 0; k < s.magnitudes.size(); ++k)
        out << s.bin_frequencies_hz[k] << ',' << s.magnitudes[k] << '\n';
}

void save_spectrum_csv(const std::filesystem::path& path, const AmplitudeSpectrum& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    write_spectrum_csv(f, s);
    if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace tofsim
