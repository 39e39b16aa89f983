#include "kitwpa/mixing.hpp"

#include "kitwpa/constants.hpp"
#include "kitwpa/detail/parallel.hpp"
#include "kitwpa/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <iomanip>
#include <sstream>

namespace kitwpa::mixing {

namespace {

using complex = std::complex<double>;

std::string num(double x) {
    std::ostringstream s;
    s << x;
    return s.str();
}

// Discrete-ladder rate factor: 2 tan(k / 2) per cell, summed over the cells
// of a supercell. Reduces to k in the continuum limit.
double ladder_rate(double k_supercell, int cells) {
    const double per_cell = k_supercell / cells;
    return cells * 2.0 * std::tan(0.5 * per_cell);
}

complex sinhc(complex z) {
    if (std::abs(z) < 1e-4) return 1.0 + z * z / 6.0;
    return std::sinh(z) / z;
}

double kerr_factor(KerrSign s) { return s == KerrSign::Physical ? 1.0 : -1.0; }

}  // namespace

double chi(double i_star_a, double i_d_a) {
    if (!std::isfinite(i_star_a) || !std::isfinite(i_d_a) || i_star_a < 0.0) {
        throw Error(ErrorCode::InvalidInput, "chi needs finite i_star >= 0 and finite i_d");
    }
    const double denom = i_star_a * i_star_a + i_d_a * i_d_a;
    if (denom == 0.0) throw Error(ErrorCode::SingularChi, "i_star and i_d are both zero");
    return 1.0 / denom;
}

std::string to_string(KerrSign s) { return s == KerrSign::Physical ? "physical" : "as_printed"; }

KerrSign kerr_sign_from_string(const std::string& s) {
    if (s == "physical") return KerrSign::Physical;
    if (s == "as_printed") return KerrSign::AsPrinted;
    throw Error(ErrorCode::InvalidInput, "kerr sign must be \"physical\" or \"as_printed\", got \"" + s + "\"");
}

void MixingConfig::validate() const {
    if (!(i_star > 0.0)) throw Error(ErrorCode::NonPositiveIStar, "i_star must be positive");
    if (!std::isfinite(i_star)) throw Error(ErrorCode::InvalidInput, "mixing needs a finite i_star");
    if (!(i_p0 >= 0.0) || !std::isfinite(i_p0)) throw Error(ErrorCode::InvalidInput, "i_p0 must be >= 0");
    if (!(i_p0 < i_star)) throw Error(ErrorCode::InvalidInput, "i_p0 must stay below i_star");
    if (!std::isfinite(i_d)) throw Error(ErrorCode::InvalidInput, "i_d must be finite");
    if (dispersion.samples.empty()) throw Error(ErrorCode::EmptyGrid, "mixing config has no dispersion");
    if (omega_p < 0.0) throw Error(ErrorCode::InvalidInput, "omega_p must be positive");
    if (omega_p > 0.0) (void)dispersion.wavenumber(omega_p);
}

MixingConfig make_config(const tline::LoadedLineSpec& line, double omega_p, double i_p0,
                         const std::vector<double>& omega_grid) {
    line.validate();
    MixingConfig cfg;
    cfg.omega_p = omega_p;
    cfg.i_p0 = i_p0;
    cfg.i_d = line.dc_bias_a;
    cfg.i_star = line.base.i_star_a;
    cfg.line = line;
    cfg.dispersion = tline::bloch_dispersion(line, omega_grid);
    cfg.validate();
    return cfg;
}

MismatchTerms mismatch_terms(double omega_s, const MixingConfig& cfg) {
    if (!(omega_s > 0.0 && omega_s < cfg.omega_p)) {
        throw Error(ErrorCode::InvalidInput, "signal " + num(omega_s) + " rad/s outside (0, omega_p)");
    }
    MismatchTerms t;
    t.k_p = cfg.dispersion.wavenumber(cfg.omega_p);
    t.k_s = cfg.dispersion.wavenumber(omega_s);
    t.k_i = cfg.dispersion.wavenumber(cfg.omega_p - omega_s);
    t.geometric = t.k_p - t.k_s - t.k_i;
    const double a = chi(cfg.i_star, cfg.i_d) * cfg.i_p0 * cfg.i_p0 / 8.0;
    t.kerr = kerr_factor(cfg.kerr_sign) * a * (t.k_p - 2.0 * t.k_s - 2.0 * t.k_i);
    return t;
}

double phase_mismatch(double omega_s, const MixingConfig& cfg) {
    return mismatch_terms(omega_s, cfg).total();
}

PumpPlacement solve_pump_placement(const MixingConfig& cfg_in, double band_lo, double band_hi,
                                   const PlacementOptions& options) {
    if (!(band_lo > 0.0 && band_hi > band_lo)) {
        throw Error(ErrorCode::InvalidInput, "placement band must satisfy 0 < lo < hi");
    }
    MixingConfig cfg = cfg_in;
    cfg.omega_p = 0.0;
    cfg.validate();

    const auto& bands = cfg.dispersion.stopbands;
    const auto sb = std::find_if(bands.begin(), bands.end(), [&](const tline::Stopband& b) {
        return b.bounded_above && b.omega_lo >= band_lo && b.omega_lo <= band_hi;
    });
    if (sb == bands.end()) {
        throw Error(ErrorCode::NoStopbandInBand,
                    "no stopband with lower edge in [" + num(band_lo) + ", " + num(band_hi) + "] rad/s");
    }
    const double edge = sb->omega_lo;

    // highest grid frequency still usable for the pump
    double top = 0.0;
    for (const auto& s : cfg.dispersion.samples) {
        if (s.omega < edge && s.passband) top = s.omega;
    }
    const double bottom = options.scan_lo_fraction * edge;
    if (!(top > bottom)) {
        throw Error(ErrorCode::InvalidInput, "dispersion grid does not resolve the region below the stopband");
    }

    auto mismatch_at = [&](double wp) -> std::optional<double> {
        MixingConfig c = cfg;
        c.omega_p = wp;
        try {
            return phase_mismatch(0.5 * wp, c);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::FrequencyInStopband) return std::nullopt;
            throw;
        }
    };

    // denser towards the edge, where the dispersion steepens
    const int n = std::max(options.scan_points, 8);
    std::vector<double> ws(static_cast<size_t>(n));
    const double d_hi = edge - bottom, d_lo = edge - top;
    for (int j = 0; j < n; ++j) {
        const double f = static_cast<double>(j) / (n - 1);
        ws[static_cast<size_t>(j)] = edge - d_hi * std::pow(d_lo / d_hi, f);
    }
    ws.back() = top;

    std::vector<std::optional<double>> vals;
    vals.reserve(ws.size());
    for (double w : ws) vals.push_back(mismatch_at(w));

    PumpPlacement out;
    out.stopband = *sb;
    // sign change nearest the edge
    for (size_t j = ws.size() - 1; j > 0; --j) {
        if (!vals[j] || !vals[j - 1]) continue;
        const double fa = *vals[j - 1], fb = *vals[j];
        if (fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0)) {
            double lo = ws[j - 1], hi = ws[j], flo = fa;
            if (fb == 0.0) {
                lo = hi;
            } else if (fa != 0.0) {
                while (hi - lo > options.rel_tol * hi) {
                    const double mid = 0.5 * (lo + hi);
                    const auto fm = mismatch_at(mid);
                    if (!fm) break;
                    if (*fm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((*fm < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = *fm;
                    } else {
                        hi = mid;
                    }
                }
            }
            const double a = std::abs(*mismatch_at(lo)), b = std::abs(*mismatch_at(hi));
            out.omega_p = a <= b ? lo : hi;
            out.mismatch = *mismatch_at(out.omega_p);
            return out;
        }
    }

    size_t best = ws.size();
    for (size_t j = 0; j < ws.size(); ++j) {
        if (vals[j] && (best == ws.size() || std::abs(*vals[j]) < std::abs(*vals[best]))) best = j;
    }
    if (best == ws.size()) {
        throw Error(ErrorCode::FrequencyInStopband, "no usable pump frequency below the stopband");
    }
    out.omega_p = ws[best];
    out.mismatch = *vals[best];
    out.sign_change = false;
    out.warnings.push_back("NoSignChange: mismatch never crosses zero; returning its minimizer");
    return out;
}

double coupling(double omega_s, const MixingConfig& cfg) {
    const int cells = cfg.line.cells_per_supercell();
    const double ks = ladder_rate(cfg.dispersion.wavenumber(omega_s), cells);
    const double ki = ladder_rate(cfg.dispersion.wavenumber(cfg.omega_p - omega_s), cells);
    return 0.5 * chi(cfg.i_star, cfg.i_d) * cfg.i_d * cfg.i_p0 * std::sqrt(ks * ki);
}

double undepleted_gain(double g, double dk, double length) {
    const complex gp = std::sqrt(complex(g * g - 0.25 * dk * dk));
    const complex a = std::cosh(gp * length) + complex(0.0, 0.5 * dk) * length * sinhc(gp * length);
    return std::norm(a);
}

namespace {

using State = std::array<double, 6>;  // Re/Im of A_p, A_s, A_i

struct CmeRates {
    double eps;                     // 2 chi I_d
    double xi;                      // chi, times the Kerr sign
    double kp, ks, ki;              // ladder rate factors per supercell
    double dk;                      // geometric mismatch per supercell

    void operator()(const State& y, State& dy, double x) const {
        const complex ap(y[0], y[1]), as(y[2], y[3]), ai(y[4], y[5]);
        const double np = std::norm(ap), ns = std::norm(as), ni = std::norm(ai);
        const complex ph = std::polar(1.0, dk * x);
        const complex I(0.0, 1.0);
        const complex dap = I * kp * (0.25 * eps * as * ai * std::conj(ph) + 0.125 * xi * (np + 2 * ns + 2 * ni) * ap);
        const complex das = I * ks * (0.25 * eps * ap * std::conj(ai) * ph + 0.125 * xi * (2 * np + ns + 2 * ni) * as);
        const complex dai = I * ki * (0.25 * eps * ap * std::conj(as) * ph + 0.125 * xi * (2 * np + 2 * ns + ni) * ai);
        dy = {dap.real(), dap.imag(), das.real(), das.imag(), dai.real(), dai.imag()};
    }
};

GainPoint full_depletion_point(const MixingConfig& cfg, double omega_s, const GainOptions& opt) {
    const int cells = cfg.line.cells_per_supercell();
    const auto terms = mismatch_terms(omega_s, cfg);
    const double c = chi(cfg.i_star, cfg.i_d);
    CmeRates rates{2.0 * c * cfg.i_d, kerr_factor(cfg.kerr_sign) * c,
                   ladder_rate(terms.k_p, cells), ladder_rate(terms.k_s, cells),
                   ladder_rate(terms.k_i, cells), terms.geometric};
    if (opt.forced_mismatch) {
        // all of the requested mismatch goes into the phase factor
        rates.xi = 0.0;
        rates.dk = *opt.forced_mismatch;
    }
    const double as0 = cfg.i_p0 * std::pow(10.0, opt.signal_to_pump_db / 20.0);
    State y{cfg.i_p0, 0.0, as0, 0.0, 0.0, 0.0};
    const double length = cfg.line.n_supercells;

    auto photons = [&](const State& s) {
        const double np = (s[0] * s[0] + s[1] * s[1]) / rates.kp;
        const double ns = (s[2] * s[2] + s[3] * s[3]) / rates.ks;
        const double ni = (s[4] * s[4] + s[5] * s[5]) / rates.ki;
        return std::array<double, 2>{np + ns, np + ni};
    };
    const auto m0 = photons(y);

    namespace odeint = boost::numeric::odeint;
    const double atol = 1e-14 * std::max(cfg.i_p0, 1e-30);
    long steps = 0;
    try {
        auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(atol, opt.rtol);
        odeint::integrate_adaptive(stepper, rates, y, 0.0, length, length * 1e-3, [&](const State&, double) {
            if (++steps > 10'000'000) throw Error(ErrorCode::StepFailure, "CME integration exceeded the step cap");
        });
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::StepFailure, std::string("CME integration failed: ") + e.what());
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw Error(ErrorCode::StepFailure, "CME integration produced a non-finite state");
    }
    const auto m1 = photons(y);

    GainPoint p;
    p.omega_s = omega_s;
    p.omega_i = cfg.omega_p - omega_s;
    p.mismatch = opt.forced_mismatch ? *opt.forced_mismatch : terms.total();
    p.coupling = coupling(omega_s, cfg);
    p.gain_db = 10.0 * std::log10((y[2] * y[2] + y[3] * y[3]) / (as0 * as0));
    p.manley_rowe_drift = std::max(std::abs(m1[0] - m0[0]) / m0[0], std::abs(m1[1] - m0[1]) / m0[1]);
    return p;
}

}  // namespace

double GainProfile::max_manley_rowe_drift() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.manley_rowe_drift);
    return m;
}

std::string GainProfile::to_csv() const {
    std::ostringstream s;
    s << std::setprecision(12);
    s << "f_signal_Hz,gain_dB,f_idler_Hz,mismatch_rad\n";
    for (const auto& p : points) {
        s << p.omega_s / two_pi << ',' << p.gain_db << ',' << p.omega_i / two_pi << ',' << p.mismatch << '\n';
    }
    return s.str();
}

GainProfile cme_gain(const MixingConfig& cfg, const std::vector<double>& omega_s_grid, const GainOptions& options) {
    cfg.validate();
    if (!(cfg.omega_p > 0.0)) throw Error(ErrorCode::InvalidInput, "cme_gain needs omega_p");
    if (omega_s_grid.empty()) throw Error(ErrorCode::EmptyGrid, "signal grid is empty");
    if (!(options.rtol > 0.0)) throw Error(ErrorCode::InvalidInput, "rtol must be positive");
    for (double w : omega_s_grid) {
        if (!(w > 0.0 && w < cfg.omega_p)) {
            throw Error(ErrorCode::GridOutOfRange, "signal " + num(w) + " rad/s outside (0, omega_p)");
        }
    }

    GainProfile profile;
    profile.line_length = cfg.line.n_supercells;
    profile.omega_p = cfg.omega_p;
    profile.full_depletion = options.full_depletion;

    if (cfg.i_p0 == 0.0) {
        // nothing couples; still reject evanescent tones
        for (double w : omega_s_grid) {
            GainPoint p;
            p.omega_s = w;
            p.omega_i = cfg.omega_p - w;
            p.mismatch = options.forced_mismatch ? *options.forced_mismatch : phase_mismatch(w, cfg);
            profile.points.push_back(p);
        }
        return profile;
    }

    profile.points = detail::parallel_map(omega_s_grid, [&](double w) {
        if (options.full_depletion) return full_depletion_point(cfg, w, options);
        GainPoint p;
        p.omega_s = w;
        p.omega_i = cfg.omega_p - w;
        p.mismatch = options.forced_mismatch ? *options.forced_mismatch : phase_mismatch(w, cfg);
        p.coupling = coupling(w, cfg);
        p.gain_db = 10.0 * std::log10(undepleted_gain(p.coupling, p.mismatch, cfg.line.n_supercells));
        return p;
    });
    return profile;
}

double quantum_limit_noise(double omega) {
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw Error(ErrorCode::InvalidInput, "omega must be finite and >= 0");
    }
    return PhysicalConstants::hbar * omega / (2.0 * PhysicalConstants::kb);
}

}  // namespace kitwpa::mixing
