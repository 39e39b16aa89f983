#pragma once

#include "kitwpa/tline.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kitwpa::mixing {

// 1 / (i_star^2 + i_d^2)
double chi(double i_star_a, double i_d_a);

// Sign of the pump self/cross phase term in the mismatch.
//   physical:   dk = (kp - ks - ki) + (chi Ip0^2 / 8)(kp - 2ks - 2ki)
//   as_printed: dk = (kp - ks - ki) - (chi Ip0^2 / 8)(kp - 2ks - 2ki)
// Kerr phases advance every tone (L grows with current), which gives the
// physical sign; the time-domain oracle agrees with it.
enum class KerrSign { Physical, AsPrinted };

std::string to_string(KerrSign s);
KerrSign kerr_sign_from_string(const std::string& s);

struct MixingConfig {
    double omega_p = 0.0;  // rad/s
    double i_p0 = 0.0;     // pump amplitude (peak) at the input, A
    double i_d = 0.0;      // dc bias, A
    double i_star = 0.0;   // A
    tline::LoadedLineSpec line;
    tline::DispersionCurve dispersion;  // of `line` at bias i_d
    KerrSign kerr_sign = KerrSign::Physical;

    // Checks currents and that the pump lies in a passband. A config with
    // omega_p = 0 is accepted only by solve_pump_placement.
    void validate() const;
};

// Builds the config and the biased dispersion of `line` on `omega_grid`.
// i_d and i_star are taken from the line (dc_bias_a, base.i_star_a).
MixingConfig make_config(const tline::LoadedLineSpec& line, double omega_p, double i_p0,
                         const std::vector<double>& omega_grid);

struct MismatchTerms {
    double k_p = 0.0, k_s = 0.0, k_i = 0.0;  // rad per supercell
    double geometric = 0.0;                  // kp - ks - ki
    double kerr = 0.0;                       // signed pump phase term
    double total() const { return geometric + kerr; }
};

MismatchTerms mismatch_terms(double omega_s, const MixingConfig& cfg);

// Phase mismatch per supercell at signal omega_s, idler omega_p - omega_s.
double phase_mismatch(double omega_s, const MixingConfig& cfg);

struct PumpPlacement {
    double omega_p = 0.0;
    double mismatch = 0.0;  // at omega_p / 2, rad per supercell
    tline::Stopband stopband;
    bool sign_change = true;
    std::vector<std::string> warnings;
};

struct PlacementOptions {
    double scan_lo_fraction = 0.5;  // scan from this fraction of the edge
    int scan_points = 600;
    double rel_tol = 1e-12;
};

// Pump frequency just below the first stopband whose lower edge lies in
// [band_lo, band_hi] that zeroes the mismatch at omega_p / 2. cfg.omega_p is
// ignored. Without a sign change the minimizer of |mismatch| is returned with
// sign_change = false and a NoSignChange warning.
PumpPlacement solve_pump_placement(const MixingConfig& cfg, double band_lo, double band_hi,
                                   const PlacementOptions& options = {});

// Signal-idler coupling per supercell, undepleted pump.
double coupling(double omega_s, const MixingConfig& cfg);

struct GainOptions {
    bool full_depletion = false;
    std::optional<double> forced_mismatch;  // rad per supercell, replaces phase_mismatch
    double rtol = 1e-8;
    double signal_to_pump_db = -30.0;  // input signal power relative to pump
};

struct GainPoint {
    double omega_s = 0.0;
    double gain_db = 0.0;
    double omega_i = 0.0;
    double mismatch = 0.0;  // rad per supercell
    double coupling = 0.0;  // per supercell
    double manley_rowe_drift = 0.0;  // full depletion only
};

struct GainProfile {
    std::vector<GainPoint> points;
    int line_length = 0;  // supercells
    double omega_p = 0.0;
    bool full_depletion = false;

    double max_manley_rowe_drift() const;
    std::string to_csv() const;
};

GainProfile cme_gain(const MixingConfig& cfg, const std::vector<double>& omega_s_grid,
                     const GainOptions& options = {});

// Closed-form undepleted gain (linear power ratio) for coupling g, mismatch
// dk, length in supercells.
double undepleted_gain(double g, double dk, double length);

// hbar omega / (2 kB)
double quantum_limit_noise(double omega);

// ---- time-domain oracle -------------------------------------------------

struct Tone {
    double omega = 0.0;     // rad/s
    double amplitude = 0.0; // A, peak current of the incident wave
};

struct OracleOptions {
    double window_fraction = 0.25;       // steady-state window at the end of the record
    double leakage_threshold_dbc = -60.0;
    int mixing_order = 4;                // products sum |n_j| <= order are fitted
    double rtol = 1e-7;
    double atol = 1e-13;                 // A or V
    double ramp_s = -1.0;                // < 0: automatic
    int samples_per_period = 8;          // of the highest fitted tone
    double max_work = 2e9;               // cells x duration x cutoff budget
    long max_steps = 20'000'000;
};

struct SpectralLine {
    double omega = 0.0;
    double amplitude = 0.0;  // A, output current into the load
    double phase = 0.0;
    std::vector<int> orders;  // integer combination of the drive tones
};

struct OracleResult {
    std::vector<SpectralLine> lines;
    double load_ohm = 0.0;
    double leakage_dbc = 0.0;  // worst half-window disagreement
    long rhs_evaluations = 0;

    // amplitude of the fitted line nearest omega (within 1e-9 relative), else 0
    double amplitude_at(double omega) const;
};

// Integrates the nonlinear ladder driven through a matched source and
// returns the output spectrum over the final window. dc_bias enters every
// inductor through ideal bias tees; spec.dc_bias_a is ignored.
OracleResult time_domain_oracle(const tline::LoadedLineSpec& spec, const std::vector<Tone>& drive,
                                double duration_s, double dc_bias_a,
                                const OracleOptions& options = {});

struct OracleGain {
    double gain_db = 0.0;
    double signal_out_pumped = 0.0;
    double signal_out_unpumped = 0.0;
    double idler_out = 0.0;
    OracleResult pumped;
    OracleResult unpumped;
};

// Signal gain from two oracle runs, with and without the pump.
OracleGain oracle_signal_gain(const tline::LoadedLineSpec& spec, Tone pump, Tone signal,
                              double duration_s, double dc_bias_a,
                              const OracleOptions& options = {});

}  // namespace kitwpa::mixing
