#include "commands.hpp"

#include "csv_io.hpp"

#include "kitwpa/constants.hpp"
#include "kitwpa/detail/parallel.hpp"
#include "kitwpa/error.hpp"
#include "kitwpa/film.hpp"
#include "kitwpa/fixtures.hpp"
#include "kitwpa/mixing.hpp"
#include "kitwpa/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kitwpa::cli {

namespace fs = std::filesystem;

// ---- context --------------------------------------------------------------

fs::path Context::input_path(const std::string& p) const {
    fs::path path(p);
    if (path.is_relative()) path = config_dir / path;
    if (!fs::exists(path)) throw ConfigError("input file not found: " + path.string());
    return path;
}

std::string Context::read_input(const fs::path& p) {
    std::string bytes = read_file(p);
    digest.add(p.filename().string(), bytes);
    return bytes;
}

void Context::write(const std::string& name, const std::string& text) {
    write_text(out_dir / name, text);
    report.outputs.push_back(name);
}

void Context::plot(const std::string& name, const SvgPlot& plot) {
    if (plots) write(name, plot.render());
}

void Context::info(const std::string& msg) const {
    if (verbose && log) *log << "kitwpa: " << msg << '\n';
}

void Context::warn(const std::string& msg) {
    report.warnings.push_back(msg);
    info("warning: " + msg);
}

// ---- shared pieces ----------------------------------------------------------

namespace {

constexpr double kGHz = 1e9;
constexpr double kNoiseTargetK = 0.6;  // amplifier noise temperature goal

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

ojson stopband_json(const tline::Stopband& b) {
    ojson j;
    j["f_lo_Hz"] = b.omega_lo / two_pi;
    j["f_hi_Hz"] = b.omega_hi / two_pi;
    j["width_Hz"] = b.width / two_pi;
    j["bounded_above"] = b.bounded_above;
    return j;
}

ojson noise_json(double omega) {
    ojson j;
    const double t = mixing::quantum_limit_noise(omega);
    j["f_Hz"] = omega / two_pi;
    j["quantum_limit_K"] = t;
    j["target_K"] = kNoiseTargetK;
    j["below_target"] = t < kNoiseTargetK;
    return j;
}

// Dispersion grid for mixing: fine enough for the interpolated wavenumbers
// and capped where bloch_dispersion stops.
std::vector<double> mixing_grid(const tline::LoadedLineSpec& line, double top) {
    top = std::min(top, 2.999 * line.ladder_cutoff());
    return tline::linear_grid(top * 1e-4, top, 24000);
}

// Signals in (lo, hi) whose signal and idler both propagate.
std::vector<double> passband_signals(const mixing::MixingConfig& cfg, double lo, double hi, int n, int* dropped) {
    std::vector<double> out;
    *dropped = 0;
    for (double w : tline::linear_grid(lo, hi, n)) {
        if (cfg.dispersion.in_passband(w) && cfg.dispersion.in_passband(cfg.omega_p - w)) {
            out.push_back(w);
        } else {
            ++*dropped;
        }
    }
    if (out.empty()) throw Error(ErrorCode::FrequencyInStopband, "no signal frequency with propagating signal and idler");
    return out;
}

ojson gain_json(const mixing::GainProfile& p) {
    ojson j;
    auto best = std::max_element(p.points.begin(), p.points.end(),
                                 [](const auto& a, const auto& b) { return a.gain_db < b.gain_db; });
    j["points_count"] = p.points.size();
    j["max_gain_dB"] = best->gain_db;
    j["f_signal_at_max_Hz"] = best->omega_s / two_pi;
    j["line_length_count"] = p.line_length;
    j["full_depletion"] = p.full_depletion;
    if (p.full_depletion) j["max_manley_rowe_drift_ratio"] = p.max_manley_rowe_drift();
    return j;
}

void gain_plot(Context& ctx, const mixing::GainProfile& p, const std::string& title) {
    SvgPlot plot(title, "signal frequency (GHz)", "gain (dB)");
    std::vector<double> x, y;
    for (const auto& q : p.points) {
        x.push_back(q.omega_s / two_pi / kGHz);
        y.push_back(q.gain_db);
    }
    plot.line(x, y, p.full_depletion ? "CME, depleted pump" : "CME, undepleted pump");
    ctx.plot("gain.svg", plot);
}

std::string dispersion_csv(const tline::DispersionCurve& c) {
    std::string s = "f_Hz,k_rad_per_supercell,passband,attenuation_Np_per_supercell\n";
    for (const auto& p : c.samples) {
        s += format_double(p.omega / two_pi) + "," + (std::isfinite(p.k) ? format_double(p.k) : "") + "," +
             (p.passband ? "1" : "0") + "," + format_double(p.attenuation) + "\n";
    }
    return s;
}

void dispersion_plot(Context& ctx, const tline::DispersionCurve& c, const std::string& title,
                     const std::vector<std::pair<double, std::string>>& marks = {}) {
    SvgPlot plot(title, "frequency (GHz)", "k per supercell (rad)");
    std::vector<double> x, y;
    for (const auto& p : c.samples) {
        x.push_back(p.omega / two_pi / kGHz);
        y.push_back(p.passband ? p.k : std::numeric_limits<double>::quiet_NaN());
    }
    plot.line(x, y, "Bloch k");
    for (const auto& b : c.stopbands) plot.band(b.omega_lo / two_pi / kGHz, b.omega_hi / two_pi / kGHz);
    for (const auto& [w, label] : marks) {
        if (c.in_passband(w)) plot.points({w / two_pi / kGHz}, {c.wavenumber(w)}, label);
    }
    ctx.plot("dispersion.svg", plot);
}

}  // namespace

tline::LoadedLineSpec parse_line(Section& s, Context& ctx) {
    if (s.has("file")) {
        const auto path = ctx.input_path(s.string("file"));
        std::string bytes = ctx.read_input(path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(bytes);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
        Section inner(j, path.filename().string());
        auto spec = parse_line(inner, ctx);
        inner.finish();
        return spec;
    }
    tline::LoadedLineSpec spec;
    auto& base = s.child("base");
    spec.base.l0_h = base.number("l0_H");
    spec.base.c_f = base.number("c_F");
    spec.base.i_star_a = base.number_or("i_star_A", std::numeric_limits<double>::infinity());
    if (s.has("pattern")) spec.pattern = s.numbers("pattern");
    spec.target = tline::loading_target_from_string(s.string_or("pattern_target", "c"));
    spec.n_supercells = s.integer_or("n_supercells", 1);
    spec.dc_bias_a = s.number_or("dc_bias_A", 0.0);
    spec.validate();
    return spec;
}

ojson line_to_json(const tline::LoadedLineSpec& spec) {
    ojson j;
    j["base"]["l0_H"] = spec.base.l0_h;
    j["base"]["c_F"] = spec.base.c_f;
    if (std::isfinite(spec.base.i_star_a)) j["base"]["i_star_A"] = spec.base.i_star_a;
    j["pattern"] = spec.pattern;
    j["pattern_target"] = tline::to_string(spec.target);
    j["n_supercells"] = spec.n_supercells;
    j["dc_bias_A"] = spec.dc_bias_a;
    return j;
}

namespace {

// ---- tc ---------------------------------------------------------------------

void cmd_tc(Section& root, Context& ctx) {
    auto& sec = root.child("tc");
    film::TcOptions opt;
    opt.criterion = sec.number_or("criterion", opt.criterion);
    opt.plateau_fraction = sec.number_or("plateau_fraction", opt.plateau_fraction);
    opt.plateau_tolerance = sec.number_or("plateau_tolerance", opt.plateau_tolerance);
    struct Input {
        std::string csv, id, batch;
    };
    std::vector<Input> inputs;
    for (auto* in : sec.children("inputs")) {
        inputs.push_back({in->string("csv"), in->string_or("film_id", ""), in->string_or("deposition_batch", "")});
    }
    root.finish();
    if (inputs.empty()) throw ConfigError("tc.inputs is empty");
    std::vector<film::TransitionCurve> curves;
    for (const auto& in : inputs) {
        const auto path = ctx.input_path(in.csv);
        ctx.read_input(path);
        auto c = read_transition_csv(path);
        if (!in.id.empty()) c.film_id = in.id;
        c.deposition_batch = in.batch;
        curves.push_back(std::move(c));
    }

    struct Row {
        film::TcResult tc;
        double lo, hi;
    };
    const auto rows = detail::parallel_map(curves, [&](const film::TransitionCurve& c) {
        film::TcOptions lo = opt, hi = opt;
        lo.criterion = 0.1;
        hi.criterion = 0.9;
        return Row{film::extract_tc(c, opt), film::extract_tc(c, lo).tc_k, film::extract_tc(c, hi).tc_k};
    });

    SvgPlot plot("Normalized transition curves", "temperature (K)", "R / R_n");
    ojson films = ojson::array();
    for (size_t i = 0; i < curves.size(); ++i) {
        const auto& r = rows[i];
        ojson f;
        f["film_id"] = curves[i].film_id;
        if (!curves[i].deposition_batch.empty()) f["deposition_batch"] = curves[i].deposition_batch;
        f["tc_K"] = r.tc.tc_k;
        f["criterion_ratio"] = opt.criterion;
        f["plateau_ohm"] = r.tc.plateau_ohm;
        f["tc_10pct_K"] = r.lo;
        f["tc_90pct_K"] = r.hi;
        f["transition_width_K"] = r.hi - r.lo;
        films.push_back(f);
        for (const auto& w : r.tc.warnings) ctx.warn(curves[i].film_id + ": " + w);
        std::vector<double> x, y;
        for (const auto& p : curves[i].samples) {
            x.push_back(p.temperature_k);
            y.push_back(p.resistance_ohm / r.tc.plateau_ohm);
        }
        plot.line(x, y, curves[i].film_id);
        ctx.info(curves[i].film_id + ": T_c = " + format_double(r.tc.tc_k) + " K");
    }
    plot.hline(opt.criterion, "criterion");
    ctx.report.results["films"] = films;
    ctx.plot("transition.svg", plot);
}

// ---- lk ---------------------------------------------------------------------

void cmd_lk(Section& root, Context& ctx) {
    struct Input {
        std::string id;
        film::FilmProperties film;
        std::optional<double> f0, lg, c;
        double squares;
    };
    std::vector<Input> inputs;
    for (auto* s : root.child("lk").children("films")) {
        Input in;
        in.id = s->string_or("film_id", "film" + std::to_string(inputs.size() + 1));
        in.film.tc_k = s->number("tc_K");
        in.film.rn_sheet_ohm = s->number("rn_sheet_ohm");
        in.f0 = s->maybe_number("f0_Hz");
        in.lg = s->maybe_number("lg_H");
        in.c = s->maybe_number("c_F");
        in.squares = s->number_or("squares", 1.0);
        const int given = in.f0.has_value() + in.lg.has_value() + in.c.has_value();
        if (given != 0 && given != 3) throw ConfigError(in.id + ": f0_Hz, lg_H and c_F go together");
        inputs.push_back(in);
    }
    root.finish();
    if (inputs.empty()) throw ConfigError("lk.films is empty");

    ojson films = ojson::array();
    std::vector<double> idx, tc_vals, sim_idx, sim_vals;
    for (const auto& in : inputs) {
        in.film.validate();
        ojson f;
        f["film_id"] = in.id;
        f["tc_K"] = in.film.tc_k;
        f["rn_sheet_ohm_per_sq"] = in.film.rn_sheet_ohm;
        f["lk_tc_H_per_sq"] = film::lk_from_tc(in.film.tc_k, in.film.rn_sheet_ohm);
        idx.push_back(static_cast<double>(films.size() + 1));
        tc_vals.push_back(f["lk_tc_H_per_sq"].get<double>() * 1e12);
        if (in.f0) {
            const auto cmp = film::compare_lk_methods(in.film, *in.f0, *in.lg, *in.c, in.squares);
            f["f0_Hz"] = *in.f0;
            f["lg_H"] = *in.lg;
            f["c_F"] = *in.c;
            f["squares_count"] = in.squares;
            f["lk_sim_device_H"] = cmp.lk_sim_device_h;
            f["lk_sim_H_per_sq"] = cmp.lk_sim_h_per_sq;
            f["relative_deviation_ratio"] = cmp.relative_deviation;
            sim_idx.push_back(idx.back());
            sim_vals.push_back(cmp.lk_sim_h_per_sq * 1e12);
        } else {
            ctx.warn(in.id + ": no resonator inputs (f0_Hz, lg_H, c_F); lk_sim not computed");
        }
        films.push_back(f);
    }
    ctx.report.results["films"] = films;

    SvgPlot plot("Kinetic inductance by two methods", "film index", "L_k (pH/sq)");
    plot.points(idx, tc_vals, "from T_c and R_n");
    if (!sim_vals.empty()) plot.points(sim_idx, sim_vals, "from resonance");
    ctx.plot("lk_comparison.svg", plot);
}

// ---- resfit -----------------------------------------------------------------

ojson fit_json(const resonator::ResonanceFit& f) {
    ojson j;
    j["f0_Hz"] = f.f0_hz;
    j["q_loaded_ratio"] = f.q_loaded;
    j["depth_dB"] = f.depth_db;
    j["asymmetry_ratio"] = f.asymmetry;
    j["baseline_dB"] = f.baseline_db;
    j["residual_rms_dB"] = f.residual_rms_db;
    j["iterations_count"] = f.iterations;
    return j;
}

void fit_plot(Context& ctx, const std::vector<resonator::S21Sweep>& sweeps,
              const std::vector<resonator::ResonanceFit>& fits, const std::string& name) {
    SvgPlot plot("Resonance fits", "frequency (GHz)", "|S21| (dB)");
    for (size_t i = 0; i < sweeps.size(); ++i) {
        std::vector<double> x, y, m;
        for (const auto& p : sweeps[i].points) {
            x.push_back(p.frequency_hz / kGHz);
            y.push_back(p.s21_db);
            m.push_back(resonator::skewed_lorentzian_db(p.frequency_hz, fits[i]));
        }
        plot.points(x, y, sweeps[i].resonator_id);
        plot.line(x, m, "");
    }
    ctx.plot(name, plot);
}

void cmd_resfit(Section& root, Context& ctx) {
    struct Input {
        std::string csv, id;
        double power;
    };
    std::vector<Input> inputs;
    for (auto* in : root.child("resfit").children("inputs")) {
        inputs.push_back({in->string("csv"), in->string_or("resonator_id", ""), in->number_or("probe_power_dBm", 0.0)});
    }
    root.finish();
    if (inputs.empty()) throw ConfigError("resfit.inputs is empty");
    std::vector<resonator::S21Sweep> sweeps;
    for (const auto& in : inputs) {
        const auto path = ctx.input_path(in.csv);
        ctx.read_input(path);
        auto s = read_s21_csv(path);
        if (!in.id.empty()) s.resonator_id = in.id;
        s.probe_power_dbm = in.power;
        sweeps.push_back(std::move(s));
    }

    const auto fits = detail::parallel_map(sweeps, [](const resonator::S21Sweep& s) { return resonator::fit_resonance(s); });
    ojson out = ojson::array();
    for (size_t i = 0; i < sweeps.size(); ++i) {
        ojson j = fit_json(fits[i]);
        j["resonator_id"] = sweeps[i].resonator_id;
        j["probe_power_dBm"] = sweeps[i].probe_power_dbm;
        out.push_back(j);
    }
    ctx.report.results["fits"] = out;
    fit_plot(ctx, sweeps, fits, "resfit.svg");
}

// ---- istar ------------------------------------------------------------------

void cmd_istar(Section& root, Context& ctx) {
    auto& sec = root.child("istar");
    const auto manifest_path = ctx.input_path(sec.string("manifest"));
    const auto i_c = sec.maybe_number("i_c_A");
    resonator::IStarOptions opt;
    opt.f0_monotonic_tolerance = sec.number_or("f0_monotonic_tolerance", opt.f0_monotonic_tolerance);
    root.finish();

    nlohmann::json mj;
    try {
        mj = nlohmann::json::parse(ctx.read_input(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(manifest_path.string() + ": " + e.what());
    }
    Section m(mj, manifest_path.filename().string());
    resonator::PowerSweep sweep;
    sweep.beta_a2_per_w = m.number("beta_A2_per_W");
    sweep.lg_h = m.number("lg_H");
    sweep.c_f = m.number("c_F");
    const std::string provenance = m.string("beta_provenance");
    std::vector<resonator::S21Sweep> traces;
    const auto dir = manifest_path.parent_path();
    for (auto* t : m.children("traces")) {
        fs::path p(t->string("csv"));
        if (p.is_relative()) p = dir / p;
        if (!fs::exists(p)) throw ConfigError("input file not found: " + p.string());
        ctx.read_input(p);
        auto s = read_s21_csv(p);
        s.probe_power_dbm = t->number("probe_power_dBm");
        traces.push_back(std::move(s));
    }
    m.finish();

    const auto fits = detail::parallel_map(traces, [](const resonator::S21Sweep& s) { return resonator::fit_resonance(s); });
    for (size_t i = 0; i < traces.size(); ++i) sweep.entries.push_back({traces[i].probe_power_dbm, fits[i]});
    const auto r = resonator::extract_istar(sweep, opt);
    for (const auto& w : r.warnings) ctx.warn(w);

    auto& res = ctx.report.results;
    res["beta_A2_per_W"] = sweep.beta_a2_per_w;
    res["beta_provenance"] = provenance;
    res["i_star_A"] = r.i_star_a;
    res["lk0_H"] = r.lk0_h;
    res["slope_H_per_A2"] = r.slope_h_per_a2;
    res["slope_stderr_H_per_A2"] = r.slope_stderr_h_per_a2;
    res["fit_r_squared_ratio"] = r.fit_r_squared;
    res["points_used_count"] = r.points_used;
    ojson pts = ojson::array();
    for (size_t i = 0; i < r.points.size(); ++i) {
        ojson p;
        p["probe_power_dBm"] = r.points[i].probe_power_dbm;
        p["current_A"] = r.points[i].current_a;
        p["current_sq_A2"] = r.points[i].current_sq_a2;
        p["lk_H"] = r.points[i].lk_h;
        p["fit"] = fit_json(fits[i]);
        pts.push_back(p);
    }
    res["points"] = pts;

    SvgPlot plot("I* measurement of the resonator", "I^2 (mA^2)", "L_k (nH)");
    std::vector<double> x, y;
    for (const auto& p : r.points) {
        x.push_back(p.current_sq_a2 * 1e6);
        y.push_back(p.lk_h * 1e9);
    }
    plot.points(x, y, "from f0");
    const double xmax = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
    plot.line({0.0, xmax}, {r.lk0_h * 1e9, (r.lk0_h + r.slope_h_per_a2 * xmax * 1e-6) * 1e9}, "least squares");
    ctx.plot("istar.svg", plot);

    if (i_c) {
        ojson n;
        n["i_c_A"] = *i_c;
        n["nonlinearity_ratio"] = resonator::nonlinearity_figure(*i_c, r.i_star_a);
        n["benchmark_ratio"] = resonator::benchmark_nonlinearity;
        res["nonlinearity"] = n;
        SvgPlot np("Nonlinearity I_c / I*", "sample", "I_c / I*");
        np.points({1.0}, {n["nonlinearity_ratio"].get<double>()}, "this film");
        np.hline(resonator::benchmark_nonlinearity, "benchmark 0.34");
        ctx.plot("nonlinearity.svg", np);
    } else {
        ctx.warn("no i_c_A given; nonlinearity figure not computed");
    }
}

// ---- dispersion -------------------------------------------------------------

void cmd_dispersion(Section& root, Context& ctx) {
    auto spec = parse_line(root.child("line"), ctx);
    auto& sec = root.child("dispersion");
    const double cutoff = spec.ladder_cutoff();
    const double f_max = sec.number_or("f_max_Hz", cutoff / two_pi);
    const int n = sec.integer_or("points", 4000);
    const double f_min = sec.number_or("f_min_Hz", f_max / n);
    root.finish();
    if (n < 2) throw ConfigError("dispersion.points must be >= 2");

    const auto curve = tline::bloch_dispersion(spec, tline::linear_grid(two_pi * f_min, two_pi * f_max, n));
    auto& res = ctx.report.results;
    res["cutoff_Hz"] = cutoff / two_pi;
    res["cells_per_supercell_count"] = spec.cells_per_supercell();
    res["points_count"] = curve.samples.size();
    ojson bands = ojson::array();
    for (const auto& b : curve.stopbands) bands.push_back(stopband_json(b));
    res["stopbands"] = bands;
    ctx.write("dispersion.csv", dispersion_csv(curve));
    dispersion_plot(ctx, curve, "Bloch dispersion");
}

// ---- design -----------------------------------------------------------------

void cmd_design(Section& root, Context& ctx) {
    auto& sec = root.child("design");
    const double target = two_pi * sec.number("target_pump_Hz");
    tline::UnitCell base;
    {
        auto& b = sec.child("base");
        base.l0_h = b.number("l0_H");
        base.c_f = b.number("c_F");
        base.i_star_a = b.number("i_star_A");
    }
    tline::DesignConstraints k;
    k.target = tline::loading_target_from_string(sec.string_or("pattern_target", "c"));
    k.n_supercells = sec.integer_or("n_supercells", k.n_supercells);
    k.dc_bias_a = sec.number_or("dc_bias_A", k.dc_bias_a);
    k.min_period = sec.integer_or("min_period", k.min_period);
    k.max_period = sec.integer_or("max_period", k.max_period);
    k.max_wide_multiplier = sec.number_or("max_wide_multiplier", k.max_wide_multiplier);
    k.max_narrow_multiplier = sec.number_or("max_narrow_multiplier", k.max_narrow_multiplier);
    const double i_p0 = sec.number("i_p0_A");
    const auto sign = mixing::kerr_sign_from_string(sec.string_or("kerr_sign", "physical"));
    const int n_signal = sec.integer_or("signal_points", 200);
    root.finish();

    ctx.info("searching loadings");
    const auto d = tline::design_loading(target, base, k);
    auto& res = ctx.report.results;
    ojson dj;
    dj["target_pump_Hz"] = target / two_pi;
    dj["period_count"] = d.period;
    dj["wide_multiplier_ratio"] = d.wide_multiplier;
    dj["narrow_multiplier_ratio"] = d.narrow_multiplier;
    dj["edge_ratio"] = d.edge_ratio;
    dj["margin_ratio"] = d.margin;
    dj["narrow_gap"] = stopband_json(d.narrow_gap);
    dj["harmonic_gap"] = stopband_json(d.harmonic_gap);
    dj["total_cells_count"] = d.spec.total_cells();
    dj["line_file"] = "line.json";
    res["design"] = dj;
    ctx.write("line.json", line_to_json(d.spec).dump(2) + "\n");

    ctx.info("placing the pump");
    auto cfg = mixing::make_config(d.spec, 0.0, i_p0, mixing_grid(d.spec, 1.6 * target));
    cfg.kerr_sign = sign;
    const auto place = mixing::solve_pump_placement(cfg, 0.5 * target, 1.5 * target);
    for (const auto& w : place.warnings) ctx.warn(w);
    cfg.omega_p = place.omega_p;
    ojson pj;
    pj["f_p_Hz"] = place.omega_p / two_pi;
    pj["mismatch_at_half_pump_rad"] = place.mismatch;
    pj["stopband"] = stopband_json(place.stopband);
    pj["sign_change"] = place.sign_change;
    pj["kerr_sign"] = mixing::to_string(sign);
    res["placement"] = pj;

    int dropped = 0;
    const auto grid = passband_signals(cfg, 0.02 * cfg.omega_p, 0.98 * cfg.omega_p, n_signal, &dropped);
    if (dropped) ctx.warn(std::to_string(dropped) + " signal points dropped: signal or idler in a stopband");
    const auto profile = mixing::cme_gain(cfg, grid);
    res["gain"] = gain_json(profile);
    ctx.write("gain.csv", profile.to_csv());

    // gain at half the pump against line length
    const double half = 0.5 * cfg.omega_p;
    const double g = mixing::coupling(half, cfg), dk = mixing::phase_mismatch(half, cfg);
    ojson lengths = ojson::array();
    bool monotone = true;
    double prev = -1.0;
    for (int m : {1, 2, 4, 8, 16}) {
        const int n = std::max(1, k.n_supercells * m / 4);
        const double gain = mixing::undepleted_gain(g, dk, n);
        monotone = monotone && gain >= prev;
        prev = gain;
        ojson l;
        l["n_supercells_count"] = n;
        l["gain_dB"] = 10.0 * std::log10(gain);
        lengths.push_back(l);
    }
    ojson lj;
    lj["f_signal_Hz"] = half / two_pi;
    lj["coupling_per_supercell"] = g;
    lj["mismatch_rad"] = dk;
    lj["sweep"] = lengths;
    lj["monotone"] = monotone;
    if (g > 0.5 * std::abs(dk)) {
        // exponential regime: bisect the smallest length reaching 20 dB
        long lo = 0, hi = 1;
        while (mixing::undepleted_gain(g, dk, static_cast<double>(hi)) < 100.0) {
            lo = hi;
            hi *= 2;
        }
        while (hi - lo > 1) {
            const long mid = (lo + hi) / 2;
            (mixing::undepleted_gain(g, dk, static_cast<double>(mid)) >= 100.0 ? hi : lo) = mid;
        }
        lj["n_supercells_for_20dB_count"] = hi;
    } else {
        ctx.warn("20 dB is not reachable at half the pump: mismatch exceeds twice the coupling");
    }
    res["length_scaling"] = lj;
    res["noise"] = noise_json(half);

    dispersion_plot(ctx, cfg.dispersion, "Engineered dispersion",
                    {{cfg.omega_p, "pump"}, {half, "signal = idler"}});
    gain_plot(ctx, profile, "Predicted gain");
}

// ---- gain -------------------------------------------------------------------

struct MixingInput {
    tline::LoadedLineSpec line;
    double omega_p = 0.0;
    double i_p0 = 0.0;
    mixing::KerrSign sign = mixing::KerrSign::Physical;
};

MixingInput parse_mixing(Section& root, Context& ctx) {
    MixingInput in;
    auto& line = root.child("line");
    const bool line_bias = line.has("dc_bias_A");
    in.line = parse_line(line, ctx);
    auto& m = root.child("mixing");
    in.omega_p = two_pi * m.number("omega_p_hz");
    in.i_p0 = m.number("i_p0_A");
    if (auto id = m.maybe_number("i_d_A")) {
        if (line_bias && *id != in.line.dc_bias_a) throw ConfigError("mixing.i_d_A disagrees with line.dc_bias_A");
        in.line.dc_bias_a = *id;
    }
    in.sign = mixing::kerr_sign_from_string(m.string_or("kerr_sign", "physical"));
    return in;
}

void cmd_gain(Section& root, Context& ctx) {
    auto in = parse_mixing(root, ctx);
    auto& sec = root.child("gain");
    const double f_p = in.omega_p / two_pi;
    const double lo = sec.number_or("f_signal_min_Hz", 0.02 * f_p);
    const double hi = sec.number_or("f_signal_max_Hz", 0.98 * f_p);
    const int n = sec.integer_or("points", 200);
    mixing::GainOptions opt;
    opt.full_depletion = sec.boolean_or("full_depletion", false);
    opt.signal_to_pump_db = sec.number_or("signal_to_pump_dB", opt.signal_to_pump_db);
    root.finish();

    auto cfg = mixing::make_config(in.line, in.omega_p, in.i_p0, mixing_grid(in.line, 1.2 * in.omega_p));
    cfg.kerr_sign = in.sign;
    int dropped = 0;
    const auto grid = passband_signals(cfg, two_pi * lo, two_pi * hi, n, &dropped);
    if (dropped) ctx.warn(std::to_string(dropped) + " signal points dropped: signal or idler in a stopband");
    const auto profile = mixing::cme_gain(cfg, grid, opt);
    auto& res = ctx.report.results;
    res["f_p_Hz"] = f_p;
    res["i_p0_A"] = in.i_p0;
    res["i_d_A"] = cfg.i_d;
    res["kerr_sign"] = mixing::to_string(in.sign);
    res["mismatch_at_half_pump_rad"] = mixing::phase_mismatch(0.5 * in.omega_p, cfg);
    res["gain"] = gain_json(profile);
    res["noise"] = noise_json(0.5 * in.omega_p);
    ctx.write("gain.csv", profile.to_csv());
    gain_plot(ctx, profile, "Predicted gain");
}

// ---- oracle -----------------------------------------------------------------

void cmd_oracle(Section& root, Context& ctx) {
    auto& line = root.child("line");
    auto spec = parse_line(line, ctx);
    auto& sec = root.child("oracle");
    std::vector<mixing::Tone> tones;
    for (auto* t : sec.children("tones")) tones.push_back({two_pi * t->number("f_Hz"), t->number("amplitude_A")});
    const double duration = sec.number("duration_s");
    const double bias = sec.number_or("dc_bias_A", spec.dc_bias_a);
    mixing::OracleOptions opt;
    opt.window_fraction = sec.number_or("window_fraction", opt.window_fraction);
    opt.leakage_threshold_dbc = sec.number_or("leakage_threshold_dBc", opt.leakage_threshold_dbc);
    opt.mixing_order = sec.integer_or("mixing_order", opt.mixing_order);
    opt.rtol = sec.number_or("rtol", opt.rtol);
    const bool compare = sec.boolean_or("compare_cme", false);
    const auto sign = mixing::kerr_sign_from_string(sec.string_or("kerr_sign", "physical"));
    root.finish();
    if (compare && tones.size() != 2) throw ConfigError("oracle.compare_cme needs exactly two tones: pump, signal");

    auto& res = ctx.report.results;
    mixing::OracleResult out;
    ctx.info("integrating the ladder");
    if (compare) {
        const auto og = mixing::oracle_signal_gain(spec, tones[0], tones[1], duration, bias, opt);
        out = og.pumped;
        auto biased = spec;
        biased.dc_bias_a = bias;
        auto cfg = mixing::make_config(biased, tones[0].omega, tones[0].amplitude, mixing_grid(biased, 1.2 * tones[0].omega));
        cfg.kerr_sign = sign;
        const double cme = mixing::cme_gain(cfg, {tones[1].omega}).points[0].gain_db;
        ojson c;
        c["gain_oracle_dB"] = og.gain_db;
        c["gain_cme_dB"] = cme;
        c["difference_dB"] = og.gain_db - cme;
        c["tolerance_dB"] = 1.0;
        c["within_tolerance"] = std::abs(og.gain_db - cme) <= 1.0;
        c["idler_out_A"] = og.idler_out;
        c["unpumped_leakage_dBc"] = og.unpumped.leakage_dbc;
        res["comparison"] = c;
    } else {
        out = mixing::time_domain_oracle(spec, tones, duration, bias, opt);
    }
    res["load_ohm"] = out.load_ohm;
    res["leakage_dBc"] = out.leakage_dbc;
    res["rhs_evaluations_count"] = out.rhs_evaluations;
    ojson drive = ojson::array();
    for (const auto& t : tones) {
        ojson d;
        d["f_Hz"] = t.omega / two_pi;
        d["amplitude_in_A"] = t.amplitude;
        d["amplitude_out_A"] = out.amplitude_at(t.omega);
        d["transmission_ratio"] = t.amplitude > 0 ? out.amplitude_at(t.omega) / t.amplitude : 0.0;
        drive.push_back(d);
    }
    res["drive"] = drive;
    ojson lines = ojson::array();
    SvgPlot plot("Output spectrum", "frequency (GHz)", "amplitude (dB re 1 A)");
    std::vector<double> x, y;
    for (const auto& l : out.lines) {
        ojson j;
        j["f_Hz"] = l.omega / two_pi;
        j["amplitude_A"] = l.amplitude;
        j["phase_rad"] = finite_or_zero(l.phase);
        std::string orders;
        for (int o : l.orders) orders += (orders.empty() ? "" : ",") + std::to_string(o);
        j["orders"] = orders;
        lines.push_back(j);
        if (l.amplitude > 0) {
            x.push_back(l.omega / two_pi / kGHz);
            y.push_back(20.0 * std::log10(l.amplitude));
        }
    }
    res["lines"] = lines;
    plot.points(x, y, "fitted lines");
    ctx.plot("spectrum.svg", plot);
}

// ---- gen-fixtures -----------------------------------------------------------

ojson line_section(const tline::LoadedLineSpec& s) { return line_to_json(s); }

void cmd_gen_fixtures(Section& root, Context& ctx) {
    root.finish();
    fixtures::Noise noise(static_cast<std::uint64_t>(ctx.seed));
    auto& res = ctx.report.results;
    auto dump = [&](const std::string& name, const ojson& j) { ctx.write(name, j.dump(2) + "\n"); };

    // transition curves
    fixtures::TransitionFixture a;
    a.noise_ohm = 0.02;
    fixtures::TransitionFixture b = a;
    b.tc_k = 12.6;
    b.width_k = 0.15;
    b.rn_ohm = 120.0;
    const auto ca = fixtures::tanh_transition(a, "film_a", noise);
    const auto cb = fixtures::tanh_transition(b, "film_b", noise);
    write_transition_csv(ctx.out_dir / "film_a.csv", ca);
    write_transition_csv(ctx.out_dir / "film_b.csv", cb);
    ctx.report.outputs.push_back("film_a.csv");
    ctx.report.outputs.push_back("film_b.csv");
    {
        ojson c;
        c["tc"]["inputs"] = ojson::array({{{"csv", "film_a.csv"}, {"film_id", "film_a"}},
                                          {{"csv", "film_b.csv"}, {"film_id", "film_b"}}});
        dump("tc.json", c);
    }

    // self-consistent L_k inputs
    {
        const double tc = 13.0, rn = 100.0, squares = 200.0, lg = 2e-9, c = 0.1e-12;
        const double lk = film::lk_from_tc(tc, rn) * squares;
        ojson f;
        f["film_id"] = "film_a";
        f["tc_K"] = tc;
        f["rn_sheet_ohm"] = rn;
        f["f0_Hz"] = film::resonant_frequency(lk + lg, c);
        f["lg_H"] = lg;
        f["c_F"] = c;
        f["squares"] = squares;
        ojson only_tc;
        only_tc["film_id"] = "film_b";
        only_tc["tc_K"] = 12.6;
        only_tc["rn_sheet_ohm"] = 120.0;
        ojson cfg;
        cfg["lk"]["films"] = ojson::array({f, only_tc});
        dump("lk.json", cfg);
    }

    // one resonance trace
    {
        resonator::ResonanceFit t;
        t.f0_hz = 5e9;
        t.q_loaded = 1e4;
        t.depth_db = 20.0;
        t.asymmetry = 0.1;
        t.baseline_db = -0.5;
        auto s = fixtures::s21_trace(t, 5.0, 401, 0.05, noise);
        write_s21_csv(ctx.out_dir / "s21_single.csv", s);
        ctx.report.outputs.push_back("s21_single.csv");
        ojson cfg;
        cfg["resfit"]["inputs"] = ojson::array({{{"csv", "s21_single.csv"}, {"resonator_id", "res_5GHz"}}});
        dump("resfit.json", cfg);
        res["resonance_truth"] = {{"f0_Hz", t.f0_hz}, {"q_loaded_ratio", t.q_loaded}};
    }

    // power sweep
    {
        fixtures::PowerSweepFixture pf;
        const auto ps = fixtures::power_sweep_traces(pf, noise);
        ojson traces = ojson::array();
        for (const auto& t : ps.traces) {
            const std::string name = "sweep/p" + format_double(t.probe_power_dbm) + "dBm.csv";
            write_s21_csv(ctx.out_dir / name, t);
            ctx.report.outputs.push_back(name);
            traces.push_back({{"csv", fs::path(name).filename().string()}, {"probe_power_dBm", t.probe_power_dbm}});
        }
        ojson m;
        m["beta_A2_per_W"] = ps.beta_a2_per_w;
        m["beta_provenance"] = "synthetic: fixed by the fixture generator";
        m["lg_H"] = ps.lg_h;
        m["c_F"] = ps.c_f;
        m["traces"] = traces;
        dump("sweep/manifest.json", m);
        ojson cfg;
        cfg["istar"]["manifest"] = "sweep/manifest.json";
        cfg["istar"]["i_c_A"] = 0.25e-3;
        dump("istar.json", cfg);
        res["power_sweep_truth"] = {{"i_star_A", pf.i_star_a}, {"lk0_H", pf.lk0_h}, {"lg_H", pf.lg_h},
                                    {"c_F", pf.c_f}, {"sigma_dB", pf.sigma_db}};
    }

    // line configs
    const tline::UnitCell cell{100e-12, 1e-3, 40e-15};
    {
        tline::LoadedLineSpec s;
        s.base = cell;
        s.pattern = tline::three_site_pattern(27, 3.0, 1.15);
        s.n_supercells = 64;
        ojson cfg;
        cfg["line"] = line_section(s);
        cfg["dispersion"] = {{"f_min_Hz", 0.1e9}, {"f_max_Hz", 40e9}, {"points", 4000}};
        dump("dispersion.json", cfg);
    }
    {
        ojson cfg;
        cfg["design"] = {{"target_pump_Hz", 8e9},
                         {"base", {{"l0_H", cell.l0_h}, {"c_F", cell.c_f}, {"i_star_A", cell.i_star_a}}},
                         {"n_supercells", 64},
                         {"dc_bias_A", 0.3e-3},
                         {"i_p0_A", 0.1e-3}};
        dump("design.json", cfg);
    }
    tline::LoadedLineSpec cos_line;
    cos_line.base = cell;
    cos_line.pattern = tline::cosine_pattern(24, {{3, 0.3}, {4, 0.3}, {6, 0.3}});
    cos_line.n_supercells = 64;
    cos_line.dc_bias_a = 0.3e-3;
    const double f_p = 19.33e9;
    {
        ojson cfg;
        cfg["line"] = line_section(cos_line);
        cfg["mixing"] = {{"omega_p_hz", f_p}, {"i_p0_A", 0.05e-3}};
        cfg["gain"] = {{"f_signal_min_Hz", 0.3 * f_p}, {"f_signal_max_Hz", 0.7 * f_p}, {"points", 101}};
        dump("gain.json", cfg);
    }
    {
        tline::LoadedLineSpec lin;
        lin.base = {100e-12, 1.0, 40e-15};
        lin.n_supercells = 64;
        ojson cfg;
        cfg["line"] = line_section(lin);
        cfg["oracle"] = {{"tones", ojson::array({{{"f_Hz", 5e9}, {"amplitude_A", 1e-6}}})}, {"duration_s", 4e-9}};
        dump("oracle.json", cfg);
    }
    {
        ojson cfg;
        cfg["line"] = line_section(cos_line);
        cfg["oracle"] = {{"tones", ojson::array({{{"f_Hz", f_p}, {"amplitude_A", 0.05e-3}},
                                                 {{"f_Hz", 0.45 * f_p}, {"amplitude_A", 1.5e-6}}})},
                         {"duration_s", 30e-9},
                         {"compare_cme", true}};
        dump("oracle_gain.json", cfg);
    }
    res["tc_truth"] = ojson::array({{{"film_id", "film_a"}, {"tc_K", a.tc_k}}, {{"film_id", "film_b"}, {"tc_K", b.tc_k}}});
}

}  // namespace

const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> m{
        {"tc", cmd_tc},         {"lk", cmd_lk},         {"resfit", cmd_resfit},
        {"istar", cmd_istar},   {"dispersion", cmd_dispersion}, {"design", cmd_design},
        {"gain", cmd_gain},     {"oracle", cmd_oracle}, {"gen-fixtures", cmd_gen_fixtures},
    };
    return m;
}

}  // namespace kitwpa::cli
