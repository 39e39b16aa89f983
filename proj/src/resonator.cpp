#include "kitwpa/resonator.hpp"

#include "kitwpa/detail/levenberg_marquardt.hpp"
#include "kitwpa/error.hpp"
#include "kitwpa/film.hpp"
#include "kitwpa/tline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace kitwpa::resonator {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Robust white-noise estimate from first differences (MAD, Gaussian scaled).
double noise_sigma(const std::vector<S21Point>& pts) {
    std::vector<double> d;
    d.reserve(pts.size());
    for (size_t i = 1; i < pts.size(); ++i) d.push_back(pts[i].s21_db - pts[i - 1].s21_db);
    const double med = median(d);
    for (auto& x : d) x = std::abs(x - med);
    return 1.4826 * median(d) / std::sqrt(2.0);
}

double crossing(const S21Point& a, const S21Point& b, double level) {
    const double t = (level - a.s21_db) / (b.s21_db - a.s21_db);
    return a.frequency_hz + t * (b.frequency_hz - a.frequency_hz);
}

}  // namespace

void S21Sweep::validate() const {
    if (points.size() < 16) {
        throw Error(ErrorCode::InvalidInput,
                    "sweep '" + resonator_id + "' has fewer than 16 points");
    }
    for (size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].frequency_hz) || !std::isfinite(points[i].s21_db)) {
            throw Error(ErrorCode::InvalidInput, "sweep '" + resonator_id + "' has non-finite data");
        }
        if (i > 0 && !(points[i].frequency_hz > points[i - 1].frequency_hz)) {
            throw Error(ErrorCode::InvalidInput,
                        "sweep '" + resonator_id + "' frequencies are not strictly increasing");
        }
    }
}

double skewed_lorentzian_db(double frequency_hz, const ResonanceFit& p) {
    const double x = (frequency_hz - p.f0_hz) * p.q_loaded / p.f0_hz;
    const double contrast = 1.0 - std::pow(10.0, -p.depth_db / 10.0);
    const double lin = 1.0 - contrast * (1.0 + 2.0 * p.asymmetry * x) / (1.0 + 4.0 * x * x);
    return p.baseline_db + 10.0 * std::log10(std::max(lin, 1e-30));
}

ResonanceFit fit_resonance(const S21Sweep& sweep) {
    sweep.validate();
    const auto& pts = sweep.points;
    const size_t n = pts.size();

    // baseline from the outer 10 % on each side
    const size_t edge = std::max<size_t>(2, n / 10);
    std::vector<double> outer;
    for (size_t i = 0; i < edge; ++i) {
        outer.push_back(pts[i].s21_db);
        outer.push_back(pts[n - 1 - i].s21_db);
    }
    const double baseline0 = median(outer);
    const auto min_it = std::min_element(pts.begin(), pts.end(),
                                         [](const auto& a, const auto& b) { return a.s21_db < b.s21_db; });
    const size_t imin = static_cast<size_t>(min_it - pts.begin());
    const double depth0 = baseline0 - min_it->s21_db;
    const double sigma = noise_sigma(pts);
    if (!(depth0 > 3.0 * sigma) || depth0 < 1e-9) {
        std::ostringstream msg;
        msg << "sweep '" << sweep.resonator_id << "': deepest point is " << depth0
            << " dB below baseline, noise " << sigma << " dB";
        throw Error(ErrorCode::NoResonance, msg.str());
    }

    // full width at half depth (linear power scale)
    const double half_level =
        baseline0 + 10.0 * std::log10(0.5 * (1.0 + std::pow(10.0, -depth0 / 10.0)));
    size_t lo = imin, hi = imin;
    while (lo > 0 && pts[lo].s21_db < half_level) --lo;
    while (hi + 1 < n && pts[hi].s21_db < half_level) ++hi;
    double f_left = lo < imin ? crossing(pts[lo], pts[lo + 1], half_level) : pts[lo].frequency_hz;
    double f_right = hi > imin ? crossing(pts[hi - 1], pts[hi], half_level) : pts[hi].frequency_hz;
    double width0 = f_right - f_left;
    const double spacing = (pts.back().frequency_hz - pts.front().frequency_hz) / double(n - 1);
    if (!(width0 > 0.0)) width0 = 2.0 * spacing;

    const double f_init = min_it->frequency_hz;
    const double q_init = f_init / width0;
    const double f_min = pts.front().frequency_hz;
    const double f_max = pts.back().frequency_hz;

    // parameters: [(f0 - f_init) / width0, ln(Q / q_init), depth, asymmetry, baseline]
    auto unpack = [&](const Eigen::VectorXd& p) {
        ResonanceFit r;
        r.f0_hz = f_init + p[0] * width0;
        r.q_loaded = q_init * std::exp(p[1]);
        r.depth_db = p[2];
        r.asymmetry = p[3];
        r.baseline_db = p[4];
        return r;
    };
    auto residuals = [&](const Eigen::VectorXd& p) {
        const ResonanceFit r = unpack(p);
        Eigen::VectorXd res(static_cast<Eigen::Index>(n));
        for (size_t i = 0; i < n; ++i) {
            res[static_cast<Eigen::Index>(i)] =
                skewed_lorentzian_db(pts[i].frequency_hz, r) - pts[i].s21_db;
        }
        return res;
    };
    auto in_bounds = [&](const Eigen::VectorXd& p) {
        const ResonanceFit r = unpack(p);
        return r.f0_hz >= f_min && r.f0_hz <= f_max && std::abs(p[1]) < std::log(1e3) &&
               r.depth_db > 0.0 && r.depth_db < 200.0 && std::abs(r.asymmetry) < 10.0;
    };

    Eigen::VectorXd start(5);
    start << 0.0, 0.0, depth0, 0.0, baseline0;
    const auto lm = detail::levenberg_marquardt(residuals, start, in_bounds);
    if (lm.status != detail::LmStatus::Converged) {
        std::ostringstream msg;
        msg << "sweep '" << sweep.resonator_id << "': "
            << (lm.status == detail::LmStatus::IterationCap ? "iteration cap of 200 reached"
                                                            : "parameters left their bounds");
        throw Error(ErrorCode::FitDiverged, msg.str());
    }

    ResonanceFit fit = unpack(lm.params);
    fit.residual_rms_db = std::sqrt(2.0 * lm.cost / double(n));
    fit.iterations = lm.iterations;
    if (!std::isfinite(fit.residual_rms_db) || !(fit.q_loaded > 0.0)) {
        throw Error(ErrorCode::FitDiverged, "non-finite fit result");
    }
    if (!(f_max - f_min > fit.f0_hz / fit.q_loaded)) {
        throw Error(ErrorCode::InvalidInput,
                    "sweep '" + sweep.resonator_id + "' spans less than one linewidth");
    }
    return fit;
}

double power_to_current(double power_dbm, double beta_a2_per_w) {
    if (!(beta_a2_per_w > 0.0)) {
        throw Error(ErrorCode::NonPositiveBeta, "power-to-current factor must be positive");
    }
    if (std::isnan(power_dbm)) throw Error(ErrorCode::InvalidInput, "probe power is NaN");
    const double watts = std::pow(10.0, (power_dbm - 30.0) / 10.0);
    return std::sqrt(beta_a2_per_w * watts);
}

void PowerSweep::validate() const {
    if (!(beta_a2_per_w > 0.0)) {
        throw Error(ErrorCode::NonPositiveBeta, "power-to-current factor must be positive");
    }
    if (entries.size() < 2) {
        throw Error(ErrorCode::InvalidInput, "power sweep needs at least two entries");
    }
    if (!(c_f > 0.0) || !(lg_h >= 0.0)) {
        throw Error(ErrorCode::InvalidInput, "power sweep needs C > 0 and L_g >= 0");
    }
    std::vector<double> powers;
    for (const auto& e : entries) powers.push_back(e.probe_power_dbm);
    std::sort(powers.begin(), powers.end());
    if (std::adjacent_find(powers.begin(), powers.end()) != powers.end()) {
        throw Error(ErrorCode::InvalidInput, "power sweep contains repeated powers");
    }
}

IStarResult extract_istar(const PowerSweep& sweep, const IStarOptions& options) {
    sweep.validate();
    auto entries = sweep.entries;
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.probe_power_dbm < b.probe_power_dbm; });

    IStarResult out;
    for (size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        IStarPoint p;
        p.probe_power_dbm = e.probe_power_dbm;
        p.current_a = power_to_current(e.probe_power_dbm, sweep.beta_a2_per_w);
        p.current_sq_a2 = p.current_a * p.current_a;
        try {
            p.lk_h = film::lk_from_sim(e.fit.f0_hz, sweep.lg_h, sweep.c_f);
        } catch (const Error& err) {
            if (err.code() != ErrorCode::NegativeResult) throw;
            throw Error(ErrorCode::NegativeLk, err.what());
        }
        out.points.push_back(p);
        if (i > 0) {
            const double prev = entries[i - 1].fit.f0_hz;
            if (e.fit.f0_hz - prev > options.f0_monotonic_tolerance * prev) {
                std::ostringstream msg;
                msg << "f0 rises from " << prev << " Hz to " << e.fit.f0_hz << " Hz between "
                    << entries[i - 1].probe_power_dbm << " and " << e.probe_power_dbm
                    << " dBm; the kinetic-inductance model predicts a decrease";
                out.warnings.push_back(msg.str());
            }
        }
    }

    const size_t n = out.points.size();
    // centred sums; x is rescaled to O(1) to keep the normal equations well conditioned
    double x_scale = 0.0;
    for (const auto& p : out.points) x_scale = std::max(x_scale, p.current_sq_a2);
    double mx = 0.0, my = 0.0;
    for (const auto& p : out.points) {
        mx += p.current_sq_a2 / x_scale;
        my += p.lk_h;
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : out.points) {
        const double dx = p.current_sq_a2 / x_scale - mx;
        const double dy = p.lk_h - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope_scaled = sxy / sxx;
    const double intercept = my - slope_scaled * mx;
    double ssr = 0.0;
    for (const auto& p : out.points) {
        const double r = p.lk_h - (intercept + slope_scaled * p.current_sq_a2 / x_scale);
        ssr += r * r;
    }
    out.slope_h_per_a2 = slope_scaled / x_scale;
    out.lk0_h = intercept;
    out.points_used = static_cast<int>(n);
    out.fit_r_squared = syy > 0.0 ? 1.0 - ssr / syy : std::numeric_limits<double>::quiet_NaN();

    bool significant = out.slope_h_per_a2 > 0.0;
    if (n >= 3) {
        const double se = std::sqrt(ssr / double(n - 2) / sxx) / x_scale;
        out.slope_stderr_h_per_a2 = se;
        significant = significant && out.slope_h_per_a2 > 2.0 * se;
    } else {
        out.warnings.push_back("two-point sweep: slope significance not assessed");
    }
    if (!significant) {
        std::ostringstream msg;
        msg << "slope of L_k versus I^2 is " << out.slope_h_per_a2 << " H/A^2 (stderr "
            << out.slope_stderr_h_per_a2 << "); no resolvable kinetic-inductance nonlinearity";
        throw Error(ErrorCode::NonlinearityUndetectable, msg.str());
    }
    if (!(out.lk0_h > 0.0)) {
        throw Error(ErrorCode::NegativeLk, "zero-current intercept L_k0 is not positive");
    }
    out.i_star_a = std::sqrt(out.lk0_h / out.slope_h_per_a2);
    return out;
}

double nonlinearity_figure(double i_c_a, double i_star_a) {
    if (!(i_star_a > 0.0)) throw Error(ErrorCode::NonPositiveIStar, "I* must be positive");
    if (!(i_c_a >= 0.0)) throw Error(ErrorCode::InvalidInput, "I_c must be non-negative");
    return i_c_a / i_star_a;
}

double resonance_at_power(double power_dbm, double beta_a2_per_w, double lk0_h,
                          double i_star_a, double lg_h, double c_f) {
    const double i = power_to_current(power_dbm, beta_a2_per_w);
    const tline::UnitCell kinetic{lk0_h, i_star_a, c_f};
    return film::resonant_frequency(tline::effective_inductance(kinetic, i) + lg_h, c_f);
}

}  // namespace kitwpa::resonator
