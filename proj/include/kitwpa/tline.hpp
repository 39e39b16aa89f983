#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace kitwpa::tline {

using complex = std::complex<double>;

// Lumped series-L / shunt-C cell. The series inductance follows
// L(I) = l0 (1 + (I / i_star)^2); i_star = +inf gives a linear cell.
struct UnitCell {
    double l0_h = 0.0;
    double i_star_a = std::numeric_limits<double>::infinity();
    double c_f = 0.0;

    void validate() const;
};

double effective_inductance(const UnitCell& cell, double current_a);

// Largest frequency 2 / sqrt(L C) passed by a uniform ladder of this cell.
double cell_cutoff(const UnitCell& cell, double bias_a = 0.0);

// Transfer matrix [[A, B], [C, D]].
struct Abcd {
    complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    complex determinant() const { return a * d - b * c; }
    Abcd operator*(const Abcd& rhs) const;
};

// Series inductor (at the dc bias point) followed by a shunt capacitor.
Abcd abcd_cell(double omega, const UnitCell& cell, double bias_a = 0.0);

enum class LoadingTarget { Capacitance, Inductance };

std::string to_string(LoadingTarget target);
LoadingTarget loading_target_from_string(const std::string& s);

struct CellValues {
    double l_h;  // at the dc bias point
    double c_f;
};

// Periodically loaded line: cell j of every supercell is the base cell with
// its capacitance (or inductance) scaled by pattern[j].
struct LoadedLineSpec {
    UnitCell base;
    std::vector<double> pattern{1.0};
    LoadingTarget target = LoadingTarget::Capacitance;
    int n_supercells = 1;
    double dc_bias_a = 0.0;

    void validate() const;
    int cells_per_supercell() const { return static_cast<int>(pattern.size()); }
    int total_cells() const { return cells_per_supercell() * n_supercells; }
    CellValues cell(int j) const;  // j within one supercell
    double average_l() const;
    double average_c() const;
    // lowest per-cell ladder cutoff 2 / sqrt(L_j C_j)
    double ladder_cutoff() const;
};

Abcd supercell_abcd(double omega, const LoadedLineSpec& spec);

// Half-trace evaluation of one supercell, accumulated as (M - I) so that
// sin^2(k/2) = (2 - A - D) / 4 keeps full precision near k = 0.
struct BlochPoint {
    double sin2_half = 0.0;  // sin^2(k Lambda / 2); passband iff in [0, 1]
    double cos_k() const { return 1.0 - 2.0 * sin2_half; }
    bool passband() const { return sin2_half >= 0.0 && sin2_half <= 1.0; }
    double reduced_phase() const;  // k Lambda folded into [0, pi]; NaN in stopbands
    double attenuation() const;    // Im(k Lambda) in nepers; 0 in passbands
};

BlochPoint bloch_point(double omega, const LoadedLineSpec& spec);

struct DispersionSample {
    double omega = 0.0;
    double k = 0.0;  // rad per supercell, NaN in stopbands
    bool passband = true;
    double attenuation = 0.0;  // Np per supercell
};

struct Stopband {
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    double width = 0.0;
    bool bounded_above = true;  // false if the run reaches the end of the grid
};

struct DispersionCurve {
    std::vector<DispersionSample> samples;
    std::vector<Stopband> stopbands;
    int supercell_length = 1;  // cells per supercell
    LoadedLineSpec spec;

    // k at omega, linearly interpolated between grid points. Throws
    // FrequencyInStopband when either bracketing sample is evanescent and
    // GridOutOfRange outside the grid.
    double wavenumber(double omega) const;
    bool in_passband(double omega) const;
};

// Bloch dispersion of the loaded line on an increasing grid in (0, 3 x cutoff].
// k is unwrapped to be continuous and increasing from k(0+) = 0.
DispersionCurve bloch_dispersion(const LoadedLineSpec& spec, const std::vector<double>& omegas);

// Contiguous non-passband runs with both edges refined by bisection on
// |(A + D) / 2| = 1 to `edge_rel_tol`. Sorted ascending.
std::vector<Stopband> find_stopbands(const DispersionCurve& curve, double edge_rel_tol = 1e-6);

std::vector<double> linear_grid(double lo, double hi, int n);

// Loading family searched by design_loading: a supercell of `period` cells
// (a multiple of 3) where cells 0, period/3 and 2 period/3 carry
// `wide_multiplier` (opens the gap near three times the pump), and cell 0
// carries an extra `narrow_multiplier` (opens the narrow gap near the pump).
std::vector<double> three_site_pattern(int period, double wide_multiplier, double narrow_multiplier);

struct Harmonic {
    int order = 1;  // cycles per supercell
    double depth = 0.0;
};

// pattern[n] = 1 + sum depth cos(2 pi order n / period). Harmonic m opens a
// Bragg gap where k per supercell reaches m pi.
std::vector<double> cosine_pattern(int period, const std::vector<Harmonic>& harmonics);

struct DesignConstraints {
    int min_period = 6;
    int max_period = 240;
    double min_wide_multiplier = 1.0;
    double max_wide_multiplier = 4.0;
    double min_narrow_multiplier = 1.0;
    double max_narrow_multiplier = 1.5;
    LoadingTarget target = LoadingTarget::Capacitance;
    int n_supercells = 64;
    double dc_bias_a = 0.0;
    // accepted window for (narrow-gap lower edge) / target_pump
    double edge_window_lo = 1.00;
    double edge_window_hi = 1.05;
    // a gap counts as narrow if its width is below this fraction of the pump
    double narrow_max_relative_width = 0.05;
    int grid_points_per_axis = 9;
};

struct DesignResult {
    LoadedLineSpec spec;
    int period = 0;
    double wide_multiplier = 1.0;
    double narrow_multiplier = 1.0;
    Stopband narrow_gap;
    Stopband harmonic_gap;
    double edge_ratio = 0.0;  // narrow_gap.omega_lo / target_pump
    double margin = 0.0;      // min of normalized margins for the two goals, in (0, 1]
};

// Grid search plus local refinement over the loading family above.
DesignResult design_loading(double target_pump, const UnitCell& base,
                            const DesignConstraints& constraints = {});

// The two design goals, checked on an arbitrary spec.
struct DesignCheck {
    bool narrow_gap_ok = false;
    bool harmonic_gap_ok = false;
    std::optional<Stopband> narrow_gap;
    std::optional<Stopband> harmonic_gap;
};

DesignCheck check_design(const LoadedLineSpec& spec, double target_pump,
                         const DesignConstraints& constraints = {});

}  // namespace kitwpa::tline
