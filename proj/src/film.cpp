#include "kitwpa/film.hpp"

#include "kitwpa/constants.hpp"
#include "kitwpa/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kitwpa::film {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string label(const TransitionCurve& curve) {
    return curve.film_id.empty() ? std::string("curve") : "curve '" + curve.film_id + "'";
}

}  // namespace

void TransitionCurve::validate() const {
    if (samples.size() < 4) {
        throw Error(ErrorCode::InvalidInput, label(*this) + " has fewer than 4 samples");
    }
    for (size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.temperature_k) || !std::isfinite(s.resistance_ohm)) {
            throw Error(ErrorCode::InvalidInput, label(*this) + " contains a non-finite sample");
        }
        if (s.resistance_ohm < 0.0) {
            throw Error(ErrorCode::InvalidInput, label(*this) + " has a negative resistance");
        }
        if (i > 0 && !(s.temperature_k > samples[i - 1].temperature_k)) {
            throw Error(ErrorCode::InvalidInput,
                        label(*this) + " temperatures are not strictly increasing");
        }
    }
}

void FilmProperties::validate() const {
    if (!(tc_k > 0.0)) throw Error(ErrorCode::NonPositiveTc, "film T_c must be positive");
    if (rn_sheet_ohm < 0.0) throw Error(ErrorCode::InvalidInput, "negative sheet resistance");
    if (lk_sheet_h < 0.0) throw Error(ErrorCode::InvalidInput, "negative sheet inductance");
    if (i_star_a && !(*i_star_a > 0.0)) {
        throw Error(ErrorCode::NonPositiveIStar, "I* must be positive when set");
    }
    if (i_c_a && *i_c_a < 0.0) throw Error(ErrorCode::InvalidInput, "negative critical current");
}

TcResult extract_tc(const TransitionCurve& curve, const TcOptions& options) {
    curve.validate();
    if (!(options.criterion > 0.0 && options.criterion < 1.0)) {
        throw Error(ErrorCode::InvalidInput, "criterion must lie in (0, 1)");
    }

    const auto& s = curve.samples;
    const double t_lo = s.front().temperature_k;
    const double t_hi = s.back().temperature_k;
    const double t_plateau = t_hi - options.plateau_fraction * (t_hi - t_lo);

    std::vector<double> top;
    for (const auto& p : s) {
        if (p.temperature_k >= t_plateau) top.push_back(p.resistance_ohm);
    }
    const double r_n = median(top);
    const auto [mn, mx] = std::minmax_element(top.begin(), top.end());
    if (!(r_n > 0.0) || (*mx - *mn) / r_n >= options.plateau_tolerance) {
        std::ostringstream msg;
        msg << label(curve) << " does not settle in the top "
            << options.plateau_fraction * 100.0 << "% of its temperature range";
        throw Error(ErrorCode::NoPlateau, msg.str());
    }

    TcResult result;
    result.plateau_ohm = r_n;
    const double crit = options.criterion;
    int crossings = 0;
    for (size_t i = 1; i < s.size(); ++i) {
        const double r0 = s[i - 1].resistance_ohm / r_n;
        const double r1 = s[i].resistance_ohm / r_n;
        if (r0 < crit && r1 >= crit) {
            if (crossings == 0) {
                const double t0 = s[i - 1].temperature_k;
                const double t1 = s[i].temperature_k;
                result.tc_k = t0 + (crit - r0) / (r1 - r0) * (t1 - t0);
            }
            ++crossings;
        }
    }
    if (crossings == 0) {
        throw Error(ErrorCode::NoCrossing,
                    label(curve) + " never crosses the resistance criterion going upward");
    }
    if (crossings > 1) {
        std::ostringstream msg;
        msg << "NonMonotonicBracket: " << label(curve) << " crosses " << crit
            << " upward " << crossings << " times; first crossing used";
        result.warnings.push_back(msg.str());
    }
    return result;
}

double transition_width(const TransitionCurve& curve, double lo, double hi,
                        const TcOptions& options) {
    TcOptions o = options;
    o.criterion = lo;
    const double t_lo = extract_tc(curve, o).tc_k;
    o.criterion = hi;
    const double t_hi = extract_tc(curve, o).tc_k;
    return t_hi - t_lo;
}

double lk_from_tc(double tc_k, double rn_sheet_ohm) {
    if (!(tc_k > 0.0)) throw Error(ErrorCode::NonPositiveTc, "T_c must be positive");
    if (!(rn_sheet_ohm >= 0.0)) {
        throw Error(ErrorCode::InvalidInput, "sheet resistance must be non-negative");
    }
    return PhysicalConstants::hbar * rn_sheet_ohm /
           (bcs_gap_ratio * pi * PhysicalConstants::kb * tc_k);
}

double resonant_frequency(double l_total_h, double c_f) {
    if (!(l_total_h > 0.0) || !(c_f > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "L and C must be positive");
    }
    return 1.0 / (two_pi * std::sqrt(l_total_h * c_f));
}

double lk_from_sim(double f0_hz, double lg_h, double c_f) {
    if (!(f0_hz > 0.0)) throw Error(ErrorCode::InvalidInput, "f0 must be positive");
    if (!(c_f > 0.0)) throw Error(ErrorCode::InvalidInput, "C must be positive");
    if (!(lg_h >= 0.0)) throw Error(ErrorCode::InvalidInput, "L_g must be non-negative");

    const double w = two_pi * f0_hz;
    const double l_total = 1.0 / (w * w * c_f);
    const double lk = l_total - lg_h;
    if (lk < 0.0) {
        // round-off when f0 was produced from L_g alone
        if (-lk <= 1e-12 * l_total) return 0.0;
        std::ostringstream msg;
        msg << "L_g = " << lg_h << " H exceeds the total inductance " << l_total
            << " H implied by f0 = " << f0_hz << " Hz and C = " << c_f << " F";
        throw Error(ErrorCode::NegativeResult, msg.str());
    }
    return lk;
}

double relative_lk_deviation(double lk_tc, double lk_sim) {
    if (lk_tc == 0.0) {
        throw Error(ErrorCode::IncomparableMethods,
                    "L_k-T_c is zero; relative deviation undefined (division-by-zero guard)");
    }
    return std::abs(lk_sim - lk_tc) / std::abs(lk_tc);
}

LkComparison compare_lk_methods(const FilmProperties& film, double f0_hz, double lg_h,
                                double c_f, double squares) {
    if (!(squares > 0.0)) throw Error(ErrorCode::InvalidInput, "squares must be positive");
    LkComparison out;
    out.tc_k = film.tc_k;
    out.rn_sheet_ohm = film.rn_sheet_ohm;
    out.f0_hz = f0_hz;
    out.lg_h = lg_h;
    out.c_f = c_f;
    out.squares = squares;
    out.lk_tc_h_per_sq = lk_from_tc(film.tc_k, film.rn_sheet_ohm);
    out.lk_sim_device_h = lk_from_sim(f0_hz, lg_h, c_f);
    out.lk_sim_h_per_sq = out.lk_sim_device_h / squares;
    out.relative_deviation = relative_lk_deviation(out.lk_tc_h_per_sq, out.lk_sim_h_per_sq);
    return out;
}

}  // namespace kitwpa::film
