#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kitwpa::film {

struct TransitionSample {
    double temperature_k;
    double resistance_ohm;
};

// R(T) record of one film deposition.
struct TransitionCurve {
    std::vector<TransitionSample> samples;
    std::string film_id;
    std::string deposition_batch;

    // Throws InvalidInput unless temperatures are strictly increasing,
    // resistances non-negative and there are at least 4 samples.
    void validate() const;
};

struct FilmProperties {
    double tc_k = 0.0;
    double rn_sheet_ohm = 0.0;  // normal-state sheet resistance, ohm/sq
    double lk_sheet_h = 0.0;    // kinetic inductance, H/sq
    std::optional<double> i_star_a;
    std::optional<double> i_c_a;
    std::optional<double> thickness_m;

    void validate() const;
};

struct TcOptions {
    double criterion = 0.5;          // fraction of the normal-state resistance
    double plateau_fraction = 0.10;  // top fraction of the temperature range
    double plateau_tolerance = 0.05; // max (max - min) / median inside it
};

struct TcResult {
    double tc_k = 0.0;
    double plateau_ohm = 0.0;
    std::vector<std::string> warnings;
};

// Temperature where R / R_plateau first crosses `criterion` going upward,
// linearly interpolated between the bracketing samples.
TcResult extract_tc(const TransitionCurve& curve, const TcOptions& options = {});

// T(hi) - T(lo), the 10-90 % width by default.
double transition_width(const TransitionCurve& curve, double lo = 0.1, double hi = 0.9,
                        const TcOptions& options = {});

// hbar R_n / (1.76 pi kB T_c). Sheet quantities in, sheet inductance out.
double lk_from_tc(double tc_k, double rn_sheet_ohm);

// L_k = 1 / ((2 pi f0)^2 C) - L_g.
double lk_from_sim(double f0_hz, double lg_h, double c_f);

// 1 / (2 pi sqrt(L C)); the forward map inverted by lk_from_sim.
double resonant_frequency(double l_total_h, double c_f);

struct LkComparison {
    double lk_tc_h_per_sq = 0.0;
    double lk_sim_h_per_sq = 0.0;
    double lk_sim_device_h = 0.0;
    double relative_deviation = 0.0;
    // echoed inputs
    double tc_k = 0.0;
    double rn_sheet_ohm = 0.0;
    double f0_hz = 0.0;
    double lg_h = 0.0;
    double c_f = 0.0;
    double squares = 1.0;
};

// |lk_sim - lk_tc| / lk_tc; IncomparableMethods when lk_tc is zero.
double relative_lk_deviation(double lk_tc, double lk_sim);

// Runs both L_k methods. The resonator value is per device and is divided by
// `squares` (the number of squares of the inductor) before comparison.
LkComparison compare_lk_methods(const FilmProperties& film, double f0_hz, double lg_h,
                                double c_f, double squares = 1.0);

}  // namespace kitwpa::film
