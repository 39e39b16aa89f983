#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kitwpa::resonator {

struct S21Point {
    double frequency_hz;
    double s21_db;
    std::optional<double> phase_rad;  // carried through, unused by the magnitude fit
};

struct S21Sweep {
    std::vector<S21Point> points;
    double probe_power_dbm = 0.0;
    std::string resonator_id;

    // Strictly increasing frequencies, at least 16 finite points.
    void validate() const;
};

struct ResonanceFit {
    double f0_hz = 0.0;
    double q_loaded = 0.0;
    double depth_db = 0.0;
    double asymmetry = 0.0;
    double baseline_db = 0.0;
    double residual_rms_db = 0.0;
    int iterations = 0;
};

// Skewed-Lorentzian magnitude model used by fit_resonance:
//   baseline + 10 log10(1 - (1 - 10^(-depth/10)) (1 + 2 a x) / (1 + 4 x^2)),
//   x = (f - f0) / (f0 / Q).
double skewed_lorentzian_db(double frequency_hz, const ResonanceFit& params);

ResonanceFit fit_resonance(const S21Sweep& sweep);

// RMS current sqrt(beta * P[W]) for a probe power in dBm.
double power_to_current(double power_dbm, double beta_a2_per_w);

struct PowerSweepEntry {
    double probe_power_dbm;
    ResonanceFit fit;
};

struct PowerSweep {
    std::vector<PowerSweepEntry> entries;
    double beta_a2_per_w = 0.0;
    double lg_h = 0.0;
    double c_f = 0.0;

    void validate() const;
};

struct IStarPoint {
    double probe_power_dbm;
    double current_a;
    double current_sq_a2;
    double lk_h;
};

struct IStarResult {
    double i_star_a = 0.0;
    double lk0_h = 0.0;
    double slope_h_per_a2 = 0.0;
    double slope_stderr_h_per_a2 = 0.0;
    double fit_r_squared = 0.0;
    int points_used = 0;
    std::vector<IStarPoint> points;
    std::vector<std::string> warnings;
};

struct IStarOptions {
    // allowed relative f0 increase between consecutive powers before warning
    double f0_monotonic_tolerance = 1e-7;
};

// Ordinary least squares of L_k against I^2; I* = sqrt(L_k0 / slope).
IStarResult extract_istar(const PowerSweep& sweep, const IStarOptions& options = {});

double nonlinearity_figure(double i_c_a, double i_star_a);

// Published I_c / I* of comparable NbTiN lines, drawn as a reference line.
inline constexpr double benchmark_nonlinearity = 0.34;

// Forward model for a power sweep: f0 at a probe power for given L_k0, I*.
double resonance_at_power(double power_dbm, double beta_a2_per_w, double lk0_h,
                          double i_star_a, double lg_h, double c_f);

}  // namespace kitwpa::resonator
