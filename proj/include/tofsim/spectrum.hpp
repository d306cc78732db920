#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tofsim/waveform.hpp"

namespace tofsim {

/// How bin magnitudes are normalized. Both divide by the record length (not
/// n_fft) and use a rectangular window.
///  - Magnitude: |X[k]| / N_rec for every bin. A coherent tone of amplitude a
///    reads a/2; DC reads its value. This reproduces the reference sensor's
///    published square-wave spectrum (0.3119 line, 0.623 line/DC ratio).
///  - Amplitude: DC = |X[0]| / N_rec, other bins 2|X[k]| / N_rec (Nyquist bin
///    not doubled). A coherent tone of amplitude a reads a.
enum class SpectrumScaling { Magnitude, Amplitude };

/// One-sided half of a real trace's spectrum.
struct AmplitudeSpectrum {
    std::vector<double> bin_frequencies_hz;
    std::vector<double> magnitudes;  // V
    std::size_t record_length = 0;
    std::size_t n_fft = 0;
    double sample_rate_hz = 0.0;
    SpectrumScaling scaling = SpectrumScaling::Magnitude;

    double bin_width_hz() const { return sample_rate_hz / static_cast<double>(n_fft); }
};

/// Zero-pads the trace to n_fft (a power of two >= its length) and transforms.
AmplitudeSpectrum amplitude_spectrum(const Trace& t, std::size_t n_fft,
                                     SpectrumScaling scaling = SpectrumScaling::Magnitude);

struct LineIntensity {
    double magnitude = 0.0;       // V
    double bin_frequency_hz = 0.0;
    std::size_t bin = 0;
};

/// Magnitude of the bin nearest `freq_hz`; ties go to the lower bin.
LineIntensity line_intensity(const AmplitudeSpectrum& s, double freq_hz);

struct ContrastEstimate {
    double value = 0.0;
    bool infinite = false;  // a DC line below 1e-12 of its spectrum's peak
};

/// (R_f·M_f) / (R_0·M_0) from line intensities at f and DC.
ContrastEstimate spectral_contrast(const AmplitudeSpectrum& received, const AmplitudeSpectrum& demod,
                                   double freq_hz);

/// "frequency_hz,magnitude_v" header and rows.
void write_spectrum_csv(std::ostream& out, const AmplitudeSpectrum& s);
void save_spectrum_csv(const std::filesystem::path& path, const AmplitudeSpectrum& s);

}  // namespace tofsim
