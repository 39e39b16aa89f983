#pragma once

#include "kitwpa/film.hpp"
#include "kitwpa/resonator.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace kitwpa::fixtures {

// Gaussian noise from mt19937_64 via Box-Muller. The standard distributions
// are implementation-defined; this keeps fixtures identical across toolchains.
class Noise {
public:
    explicit Noise(std::uint64_t seed) : rng_(seed) {}
    double gaussian(double sigma);
    double uniform();  // [0, 1)

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct TransitionFixture {
    double tc_k = 13.0;
    double width_k = 0.1;
    double rn_ohm = 100.0;
    double t_lo_k = 11.0;
    double t_hi_k = 15.0;
    double step_k = 0.01;
    double noise_ohm = 0.0;
};

// R = R_n (1 + tanh((T - T_c) / width)) / 2 plus optional Gaussian noise.
film::TransitionCurve tanh_transition(const TransitionFixture& f, const std::string& film_id, Noise& noise);

// Skewed-Lorentzian trace centred on truth.f0_hz, spanning
// +-half_span_linewidths f0/Q, with Gaussian noise of sigma_db.
resonator::S21Sweep s21_trace(const resonator::ResonanceFit& truth, double half_span_linewidths, int points,
                              double sigma_db, Noise& noise);

struct PowerSweepFixture {
    double i_star_a = 1e-3;
    double lk0_h = 8e-9;
    double lg_h = 2e-9;
    double c_f = 0.1e-12;
    double beta_a2_per_w = 10.0;
    std::vector<double> powers_dbm{-60, -57, -54, -51, -48, -45};
    double q_loaded = 2e4;
    double depth_db = 15.0;
    double sigma_db = 0.05;
    int points = 401;
    double half_span_linewidths = 6.0;
};

struct PowerSweepTraces {
    std::vector<resonator::S21Sweep> traces;  // one per power, probe_power_dbm set
    double beta_a2_per_w = 0.0;
    double lg_h = 0.0;
    double c_f = 0.0;
};

// S21 traces whose resonances follow the kinetic-inductance forward model.
PowerSweepTraces power_sweep_traces(const PowerSweepFixture& f, Noise& noise);

}  // namespace kitwpa::fixtures
