#include "tofsim/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tofsim/config.hpp"
#include "tofsim/error.hpp"
#include "tofsim/fom.hpp"
#include "tofsim/radiometry.hpp"
#include "tofsim/scanner.hpp"
#include "tofsim/simlab.hpp"
#include "tofsim/spectrum.hpp"

namespace tofsim {

using nlohmann::json;

namespace {

struct Resolution {
    std::size_t width = 0;
    std::size_t height = 0;
};

Resolution parse_resolution(const std::string& s) {
    const auto x = s.find_first_of("xX");
    Resolution r;
    try {
        if (x == std::string::npos) throw std::invalid_argument(s);
        std::size_t used_w = 0, used_h = 0;
        const std::string w = s.substr(0, x), h = s.substr(x + 1);
        const long long wv = std::stoll(w, &used_w), hv = std::stoll(h, &used_h);
        if (used_w != w.size() || used_h != h.size() || wv < 1 || hv < 1) throw std::invalid_argument(s);
        r.width = static_cast<std::size_t>(wv);
        r.height = static_cast<std::size_t>(hv);
    } catch (const std::logic_error&) {
        throw ValidationError("resolution must look like WxH with positive integers, got '" + s + "'");
    }
    return r;
}

bool parse_switch(const std::string& s, const char* flag) {
    if (s == "on" || s == "true" || s == "1") return true;
    if (s == "off" || s == "false" || s == "0") return false;
    throw ValidationError(std::string(flag) + " must be on or off, got '" + s + "'");
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw IoError("failed writing " + path);
}

std::string replace_extension(const std::string& path, const std::string& ext) {
    return std::filesystem::path(path).replace_extension(ext).string();
}

struct Common {
    std::string config_path;
    Config config() const {
        Config c = config_path.empty() ? Config{} : load_config(config_path);
        c.validate();
        return c;
    }
};

struct DemodArgs {
    double distance = 1.5;
    std::optional<double> amplitude;
    std::optional<double> offset;
    double reflectivity = 0.95;
    std::optional<double> tint;
    std::string noise = "on";
    std::string received;
    std::string trace_out;
    std::string out;
};

int cmd_demod(const Config& cfg, const DemodArgs& a, std::ostream& out) {
    MeasurementSetup setup = cfg.measurement();
    if (a.tint) setup.integration_time_s = *a.tint;
    setup.true_distance_m = a.distance;
    setup.noise = parse_switch(a.noise, "--noise");

    json j;
    if (!a.received.empty()) {
        const Trace rx = load_trace_csv(a.received);
        SignalSpec demod;
        demod.amplitude = cfg.demod_amplitude_v;
        demod.offset = cfg.demod_offset_v;
        demod.frequency_hz = cfg.modulation_frequency_hz;
        const CorrelationSet cs = demodulate4(rx, demod);
        j = demod_to_json(extract(cs));
        j["correlations"] = cs.c;
        j["source"] = a.received;
    } else {
        const ReceivedSignal rx = received_amplitude(a.reflectivity, a.distance, cfg.link());
        setup.received_amplitude_v = a.amplitude.value_or(rx.amplitude_v);
        setup.received_offset_v = a.offset.value_or(a.amplitude ? *a.amplitude / cfg.modulation_depth : rx.offset_v);
        const MeasurementSimulator sim(setup);
        const Trace trace = sim.received_trace(cfg.seed);
        const CorrelationSet cs = demodulate4(trace, demod_copies(
                                                         SignalSpec{WaveKind::Sine, setup.demod_amplitude_v,
                                                                    setup.demod_offset_v, setup.modulation_frequency_hz, 0.0},
                                                         setup.sample_rate_hz, setup.sample_count()),
                                              setup.modulation_frequency_hz);
        j = demod_to_json(extract(cs));
        j["correlations"] = cs.c;
        j["true_distance_m"] = a.distance;
        j["received_amplitude_v"] = setup.received_amplitude_v;
        j["received_offset_v"] = setup.received_offset_v;
        j["noise"] = setup.noise;
        j["seed"] = cfg.seed;
        if (!a.trace_out.empty()) save_trace_csv(a.trace_out, trace);
    }
    emit(a.out, j.dump(2) + "\n", out);
    return kExitOk;
}

struct SpectrumArgs {
    std::string input;
    std::string kind = "sine";
    double amplitude = 0.5;
    double offset = 0.0;
    double phase = 0.0;
    std::size_t record = 10000;
    std::size_t nfft = 16384;
    std::string scaling = "magnitude";
    std::string out;
};

int cmd_spectrum(const Config& cfg, const SpectrumArgs& a, std::ostream& out) {
    SpectrumScaling scaling = SpectrumScaling::Magnitude;
    if (a.scaling == "amplitude") scaling = SpectrumScaling::Amplitude;
    else if (a.scaling != "magnitude") throw ValidationError("--scaling must be magnitude or amplitude");

    std::optional<Trace> trace;
    if (!a.input.empty()) {
        trace = load_trace_csv(a.input);
    } else {
        SignalSpec s;
        if (a.kind == "square") s.kind = WaveKind::Square;
        else if (a.kind != "sine") throw ValidationError("--kind must be sine or square");
        s.amplitude = a.amplitude;
        s.offset = a.offset;
        s.phase_rad = a.phase;
        s.frequency_hz = cfg.modulation_frequency_hz;
        trace = synthesize(s, cfg.sample_rate_hz, a.record);
    }
    const AmplitudeSpectrum spec = amplitude_spectrum(*trace, a.nfft, scaling);

    SignalSpec demod;
    demod.amplitude = cfg.demod_amplitude_v;
    demod.offset = cfg.demod_offset_v;
    demod.frequency_hz = cfg.modulation_frequency_hz;
    const AmplitudeSpectrum demod_spec =
        amplitude_spectrum(synthesize(demod, trace->sample_rate_hz(), trace->size()), a.nfft, scaling);

    const LineIntensity dc = line_intensity(spec, 0.0);
    const LineIntensity line = line_intensity(spec, cfg.modulation_frequency_hz);
    const ContrastEstimate contrast = spectral_contrast(spec, demod_spec, cfg.modulation_frequency_hz);
    json j = {
        {"record_length", spec.record_length},
        {"n_fft", spec.n_fft},
        {"bin_width_hz", spec.bin_width_hz()},
        {"scaling", a.scaling},
        {"dc_v", dc.magnitude},
        {"line_v", line.magnitude},
        {"line_bin_hz", line.bin_frequency_hz},
        {"line_to_dc", dc.magnitude > 0.0 ? json(line.magnitude / dc.magnitude) : json(nullptr)},
        {"contrast_vs_demod", contrast.infinite ? json(nullptr) : json(contrast.value)},
    };
    if (!a.out.empty()) {
        save_spectrum_csv(a.out, spec);
        j["spectrum_csv"] = a.out;
    }
    out << j.dump(2) << "\n";
    return kExitOk;
}

struct PredictArgs {
    double a = 0.0;
    double b = 0.0;
    std::optional<double> tint;
    double pseudo = 0.0;
    double distance = 1.5;
    std::string out;
};

int cmd_predict(const Config& cfg, const PredictArgs& p, std::ostream& out) {
    PrecisionInput in;
    in.amplitude = p.a;
    in.offset = p.b;
    in.integration_time_s = p.tint.value_or(cfg.integration_time_s);
    in.modulation_frequency_hz = cfg.modulation_frequency_hz;
    in.demod_amplitude = cfg.demod_amplitude_v;
    in.demod_offset = cfg.demod_offset_v;
    in.pseudo_electrons = p.pseudo;
    const ApdChain chain = cfg.chain();
    const double dl = predict_noise(in, chain);
    const ElectronCounts e = electrons_from_correlation(in, chain);
    const json j = {
        {"inputs",
         {{"a", in.amplitude},
          {"b", in.offset},
          {"t_int_s", in.integration_time_s},
          {"f_hz", in.modulation_frequency_hz},
          {"demod_amplitude", in.demod_amplitude},
          {"demod_offset", in.demod_offset},
          {"pseudo_electrons", in.pseudo_electrons},
          {"reference_distance_m", p.distance}}},
        {"delta_l_m", dl},
        {"delta_percent", distance_noise_percent(dl, p.distance)},
        {"amplitude_electrons", e.amplitude},
        {"offset_electrons", e.offset},
        {"delta_l_as_printed_m", predict_noise_as_printed(in, chain)},
    };
    emit(p.out, j.dump(2) + "\n", out);
    return kExitOk;
}

struct SweepArgs {
    std::vector<double> distances{0.5, 1.0, 1.5, 2.0, 2.5};
    std::vector<double> reflectivities{0.95};
    std::vector<double> tints;
    std::size_t trials = kDefaultTrials;
    std::string noise = "on";
    std::string out;
    std::string summary;
};

int cmd_sweep(const Config& cfg, const SweepArgs& a, std::ostream& out) {
    SweepSpec spec;
    spec.distances_m = a.distances;
    spec.reflectivities = a.reflectivities;
    spec.integration_times_s = a.tints.empty() ? std::vector<double>{cfg.integration_time_s} : a.tints;
    spec.n_trials = a.trials;
    spec.base = cfg.measurement();
    spec.base.noise = parse_switch(a.noise, "--noise");
    spec.link = cfg.link();
    spec.seed = cfg.seed;
    const auto rows = precision_sweep(spec);

    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    emit(a.out, csv.str(), out);

    if (!a.summary.empty()) {
        const ModelComparison cmp =
            model_vs_measured(rows, cfg.chain(), cfg.demod_amplitude_v, cfg.demod_offset_v, cfg.modulation_frequency_hz);
        const json j = {
            {"points", rows.size()},
            {"trials", a.trials},
            {"seed", cfg.seed},
            {"mean_abs_error_m", cmp.mean_abs_error_m},
            {"max_abs_error_m", cmp.max_abs_error_m},
            {"relative_mae", cmp.relative_mae},
            {"degenerate", cmp.degenerate},
        };
        emit(a.summary, j.dump(2) + "\n", out);
    }
    return kExitOk;
}

struct ScanArgs {
    std::string scene;
    std::string res = "64x48";
    std::optional<double> tint;
    double hfov = 0.4;
    double vfov = 0.3;
    std::string noise = "on";
    std::string out;
    std::string amp_out;
    std::string meta_out;
    std::string csv_out;
};

int cmd_scan(const Config& cfg, const ScanArgs& a, std::ostream& out) {
    const Scene scene = load_scene(a.scene);
    const Resolution res = parse_resolution(a.res);
    RasterGrid grid;
    grid.width = res.width;
    grid.height = res.height;
    grid.horizontal_fov_rad = a.hfov;
    grid.vertical_fov_rad = a.vfov;

    ScanConfig sc;
    sc.integration_time_s = a.tint.value_or(800e-9);
    sc.noise = parse_switch(a.noise, "--noise");
    sc.seed = cfg.seed;
    sc.link = cfg.link();
    sc.measurement = cfg.measurement();
    const DepthFrame frame = render_frame(scene, grid, sc);

    const std::string amp_path = a.amp_out.empty() ? replace_extension(a.out, ".fam") : a.amp_out;
    const std::string meta_path = a.meta_out.empty() ? replace_extension(a.out, ".json") : a.meta_out;
    save_raster(a.out, "FDM1", frame.meta.width, frame.meta.height, frame.depth_m);
    save_raster(amp_path, "FAM1", frame.meta.width, frame.meta.height, frame.amplitude);
    if (!a.csv_out.empty()) {
        std::ostringstream csv;
        write_frame_csv(csv, frame);
        emit(a.csv_out, csv.str(), out);
    }
    json meta = frame_metadata_to_json(frame.meta);
    meta["horizontal_fov_rad"] = grid.horizontal_fov_rad;
    meta["vertical_fov_rad"] = grid.vertical_fov_rad;
    meta["depth_raster"] = std::filesystem::path(a.out).filename().string();
    meta["amplitude_raster"] = std::filesystem::path(amp_path).filename().string();
    meta["error"] = error_report_to_json(error_report(frame, scene, grid));
    emit(meta_path, meta.dump(2) + "\n", out);
    out << "frame_time_s " << meta["frame_time_s"].dump() << "\n";
    return kExitOk;
}

struct FomArgs {
    std::string table;
    bool builtin = false;
    std::string csv_out;
};

int cmd_fom(const FomArgs& a, std::ostream& out, std::ostream& err) {
    if (!a.table.empty() && a.builtin) throw ValidationError("use either --table or --builtin, not both");
    std::vector<SensorRecord> records;
    if (a.table.empty()) {
        records = builtin_records();
    } else {
        RecordLoad load = load_records(a.table);
        for (const auto& w : load.warnings) err << "warning: " << w << "\n";
        records = std::move(load.records);
    }
    const auto table = rank_table(records);
    write_fom_table(out, table);
    if (!a.csv_out.empty()) {
        std::ostringstream csv;
        write_fom_csv(csv, table);
        emit(a.csv_out, csv.str(), out);
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"AMCW time-of-flight scanning sensor simulator", "tofsim"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--config", common.config_path, "JSON run configuration (defaults apply when omitted)");

    DemodArgs demod;
    auto* c_demod = app.add_subcommand("demod", "Simulate one measurement, or demodulate a recorded trace");
    c_demod->add_option("--distance", demod.distance, "True distance in m")->capture_default_str();
    c_demod->add_option("--amplitude", demod.amplitude, "Received amplitude R in V (default: from the link budget)");
    c_demod->add_option("--offset", demod.offset, "Received offset R_DC in V (default: R / modulation depth)");
    c_demod->add_option("--reflectivity", demod.reflectivity, "Target reflectivity for the link budget")
        ->capture_default_str();
    c_demod->add_option("--tint", demod.tint, "Integration time in s (default: config)");
    c_demod->add_option("--noise", demod.noise, "Shot noise and quantization: on|off")->capture_default_str();
    c_demod->add_option("--received", demod.received, "Demodulate this trace CSV instead of simulating");
    c_demod->add_option("--trace-out", demod.trace_out, "Write the simulated received trace as CSV");
    c_demod->add_option("--out", demod.out, "Result JSON path (default: stdout)");

    SpectrumArgs spec;
    auto* c_spec = app.add_subcommand("spectrum", "One-sided spectrum, line intensities and spectral contrast");
    c_spec->add_option("--input", spec.input, "Trace CSV (default: synthesize)");
    c_spec->add_option("--kind", spec.kind, "Synthesized wave: sine|square")->capture_default_str();
    c_spec->add_option("--amplitude", spec.amplitude, "Synthesized amplitude in V")->capture_default_str();
    c_spec->add_option("--offset", spec.offset, "Synthesized offset in V")->capture_default_str();
    c_spec->add_option("--phase", spec.phase, "Synthesized phase in rad")->capture_default_str();
    c_spec->add_option("--record", spec.record, "Synthesized record length in samples")->capture_default_str();
    c_spec->add_option("--nfft", spec.nfft, "FFT length (power of two >= record)")->capture_default_str();
    c_spec->add_option("--scaling", spec.scaling, "magnitude (|X|/N) or amplitude (2|X|/N)")->capture_default_str();
    c_spec->add_option("--out", spec.out, "Spectrum CSV path");

    PredictArgs pred;
    auto* c_pred = app.add_subcommand("predict", "Shot-noise distance precision from A and B");
    c_pred->add_option("--a", pred.a, "Correlation amplitude A in V^2")->required();
    c_pred->add_option("--b", pred.b, "Correlation offset B in V^2")->required();
    c_pred->add_option("--tint", pred.tint, "Integration time in s (default: config)");
    c_pred->add_option("--pseudo", pred.pseudo, "Pseudo-background electrons")->capture_default_str();
    c_pred->add_option("--distance", pred.distance, "Reference distance for the percent noise, m")
        ->capture_default_str();
    c_pred->add_option("--out", pred.out, "Result JSON path (default: stdout)");

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Monte Carlo precision sweep over distance, reflectivity, T_int");
    c_sweep->add_option("--distances", sweep.distances, "Distances in m")->delimiter(',')->capture_default_str();
    c_sweep->add_option("--reflectivities", sweep.reflectivities, "Reflectivities")->delimiter(',')->capture_default_str();
    c_sweep->add_option("--tints", sweep.tints, "Integration times in s (default: config)")->delimiter(',');
    c_sweep->add_option("--trials", sweep.trials, "Trials per grid point")->capture_default_str();
    c_sweep->add_option("--noise", sweep.noise, "on|off")->capture_default_str();
    c_sweep->add_option("--out", sweep.out, "Sweep CSV path (default: stdout)");
    c_sweep->add_option("--summary", sweep.summary, "Model-vs-measured JSON path");

    ScanArgs scan;
    auto* c_scan = app.add_subcommand("scan", "Render depth and amplitude frames of a scene");
    c_scan->add_option("--scene", scan.scene, "Scene JSON")->required();
    c_scan->add_option("--res", scan.res, "Resolution WxH")->capture_default_str();
    c_scan->add_option("--tint", scan.tint, "Integration time per pixel in s (default 800e-9)");
    c_scan->add_option("--hfov", scan.hfov, "Horizontal field of view in rad")->capture_default_str();
    c_scan->add_option("--vfov", scan.vfov, "Vertical field of view in rad")->capture_default_str();
    c_scan->add_option("--noise", scan.noise, "on|off")->capture_default_str();
    c_scan->add_option("--out", scan.out, "FDM1 depth raster path")->required();
    c_scan->add_option("--amp-out", scan.amp_out, "FAM1 amplitude raster path (default: <out>.fam)");
    c_scan->add_option("--meta-out", scan.meta_out, "Metadata JSON path (default: <out>.json)");
    c_scan->add_option("--csv", scan.csv_out, "Also write the frame as CSV");

    FomArgs fom;
    auto* c_fom = app.add_subcommand("fom", "Figure-of-merit comparison table");
    c_fom->add_option("--table", fom.table, "Sensor records CSV");
    c_fom->add_flag("--builtin", fom.builtin, "Use the built-in nine-sensor table (default)");
    c_fom->add_option("--csv", fom.csv_out, "Also write the ranked table as CSV");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (auto* sub : app.get_subcommands()) target = sub;
        out << target->help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitValidation;
    }

    try {
        if (c_fom->parsed()) return cmd_fom(fom, out, err);
        const Config cfg = common.config();
        if (c_demod->parsed()) return cmd_demod(cfg, demod, out);
        if (c_spec->parsed()) return cmd_spectrum(cfg, spec, out);
        if (c_pred->parsed()) return cmd_predict(cfg, pred, out);
        if (c_sweep->parsed()) return cmd_sweep(cfg, sweep, out);
        if (c_scan->parsed()) return cmd_scan(cfg, scan, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace tofsim
