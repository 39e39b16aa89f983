#include "kitwpa/fixtures.hpp"

#include "kitwpa/constants.hpp"
#include "kitwpa/error.hpp"

#include <algorithm>
#include <cmath>

namespace kitwpa::fixtures {

double Noise::uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double Noise::gaussian(double sigma) {
    if (sigma == 0.0) return 0.0;
    if (has_spare_) {
        has_spare_ = false;
        return sigma * spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return sigma * r * std::cos(two_pi * u2);
}

film::TransitionCurve tanh_transition(const TransitionFixture& f, const std::string& film_id, Noise& noise) {
    if (!(f.step_k > 0.0 && f.t_hi_k > f.t_lo_k && f.width_k > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "transition fixture needs t_lo < t_hi and positive step, width");
    }
    film::TransitionCurve c;
    c.film_id = film_id;
    const int n = static_cast<int>(std::round((f.t_hi_k - f.t_lo_k) / f.step_k));
    for (int i = 0; i <= n; ++i) {
        const double t = f.t_lo_k + i * f.step_k;
        const double r = f.rn_ohm * (1.0 + std::tanh((t - f.tc_k) / f.width_k)) / 2.0;
        c.samples.push_back({t, std::max(0.0, r + noise.gaussian(f.noise_ohm))});
    }
    return c;
}

resonator::S21Sweep s21_trace(const resonator::ResonanceFit& truth, double half_span_linewidths, int points,
                              double sigma_db, Noise& noise) {
    if (points < 2 || !(half_span_linewidths > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "trace fixture needs >= 2 points and a positive span");
    }
    const double lw = truth.f0_hz / truth.q_loaded;
    resonator::S21Sweep s;
    for (int i = 0; i < points; ++i) {
        const double f = truth.f0_hz + lw * half_span_linewidths * (2.0 * i / (points - 1) - 1.0);
        s.points.push_back({f, resonator::skewed_lorentzian_db(f, truth) + noise.gaussian(sigma_db), std::nullopt});
    }
    return s;
}

PowerSweepTraces power_sweep_traces(const PowerSweepFixture& f, Noise& noise) {
    PowerSweepTraces out;
    out.beta_a2_per_w = f.beta_a2_per_w;
    out.lg_h = f.lg_h;
    out.c_f = f.c_f;
    for (double p : f.powers_dbm) {
        resonator::ResonanceFit truth;
        truth.f0_hz = resonator::resonance_at_power(p, f.beta_a2_per_w, f.lk0_h, f.i_star_a, f.lg_h, f.c_f);
        truth.q_loaded = f.q_loaded;
        truth.depth_db = f.depth_db;
        auto trace = s21_trace(truth, f.half_span_linewidths, f.points, f.sigma_db, noise);
        trace.probe_power_dbm = p;
        out.traces.push_back(std::move(trace));
    }
    return out;
}

}  // namespace kitwpa::fixtures
