#include "kitwpa/constants.hpp"
#include "kitwpa/error.hpp"
#include "kitwpa/mixing.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

namespace kitwpa::mixing {

namespace {

using State = std::vector<double>;

// State: ac inductor currents i_1..i_M, then node voltages v_1..v_M.
// Cell n is a series inductor from node n-1 to node n and a shunt capacitor
// at node n. Node 0 is the source side: v_0 = V_s - R i_1.
struct Ladder {
    std::vector<double> l0, inv_c;
    double inv_istar2 = 0.0;
    double bias = 0.0;
    double r = 0.0;
    std::vector<Tone> drive;
    double ramp = 0.0;

    double source(double t) const {
        double v = 0.0;
        for (const auto& d : drive) v += d.amplitude * std::cos(d.omega * t);
        double env = 1.0;
        if (t < ramp) env = 0.5 * (1.0 - std::cos(pi * t / ramp));
        return 2.0 * r * env * v;
    }

    void operator()(const State& x, State& dx, double t) const {
        const size_t m = l0.size();
        const double* i = x.data();
        const double* v = x.data() + m;
        double* di = dx.data();
        double* dv = dx.data() + m;
        double v_prev = source(t) - r * i[0];
        for (size_t n = 0; n < m; ++n) {
            const double itot = bias + i[n];
            di[n] = (v_prev - v[n]) / (l0[n] * (1.0 + itot * itot * inv_istar2));
            v_prev = v[n];
        }
        for (size_t n = 0; n + 1 < m; ++n) dv[n] = (i[n] - i[n + 1]) * inv_c[n];
        dv[m - 1] = (i[m - 1] - v[m - 1] / r) * inv_c[m - 1];
    }
};

struct FitTone {
    double omega;
    std::vector<int> orders;
};

std::vector<FitTone> fit_tones(const std::vector<Tone>& drive, int order, double omega_max, double min_sep) {
    const int nd = static_cast<int>(drive.size());
    std::vector<std::pair<int, FitTone>> cands;  // (total order, tone)
    std::vector<int> n(static_cast<size_t>(nd), -order);
    while (true) {
        int tot = 0;
        double w = 0.0;
        for (int j = 0; j < nd; ++j) {
            tot += std::abs(n[static_cast<size_t>(j)]);
            w += n[static_cast<size_t>(j)] * drive[static_cast<size_t>(j)].omega;
        }
        if (tot >= 1 && tot <= order && w > 0.0 && w < omega_max) cands.push_back({tot, {w, n}});
        int j = 0;
        while (j < nd && ++n[static_cast<size_t>(j)] > order) {
            n[static_cast<size_t>(j)] = -order;
            ++j;
        }
        if (j == nd) break;
    }
    std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second.omega < b.second.omega;
    });
    std::vector<FitTone> out;
    for (auto& [tot, t] : cands) {
        const bool clash = std::any_of(out.begin(), out.end(), [&](const FitTone& o) {
            return std::abs(o.omega - t.omega) < min_sep;
        });
        if (clash) {
            if (tot == 1) throw Error(ErrorCode::InvalidInput, "drive tones are not resolvable in the analysis window");
            continue;
        }
        if (t.omega < min_sep) {
            if (tot == 1) throw Error(ErrorCode::InvalidInput, "drive tone too slow for the analysis window");
            continue;  // merged with dc
        }
        out.push_back(t);
    }
    return out;
}

// Hann-weighted least squares of y on dc + cos/sin at the given tones.
std::vector<std::complex<double>> fit_phasors(const std::vector<double>& t, const std::vector<double>& y,
                                              size_t begin, size_t end, const std::vector<FitTone>& tones) {
    const Eigen::Index rows = static_cast<Eigen::Index>(end - begin);
    const Eigen::Index cols = 1 + 2 * static_cast<Eigen::Index>(tones.size());
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    const double t0 = t[begin], span = t[end - 1] - t[begin];
    for (Eigen::Index r = 0; r < rows; ++r) {
        const size_t s = begin + static_cast<size_t>(r);
        const double tt = t[s];
        const double w = std::sqrt(std::pow(std::sin(pi * (tt - t0) / span), 2) + 1e-12);
        a(r, 0) = w;
        for (size_t q = 0; q < tones.size(); ++q) {
            const double ph = tones[q].omega * tt;
            a(r, 1 + 2 * static_cast<Eigen::Index>(q)) = w * std::cos(ph);
            a(r, 2 + 2 * static_cast<Eigen::Index>(q)) = w * std::sin(ph);
        }
        b(r) = w * y[s];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    std::vector<std::complex<double>> out(tones.size());
    for (size_t q = 0; q < tones.size(); ++q) {
        // a cos(wt + phi) = a cos(phi) cos(wt) - a sin(phi) sin(wt)
        out[q] = {c(1 + 2 * static_cast<Eigen::Index>(q)), -c(2 + 2 * static_cast<Eigen::Index>(q))};
    }
    return out;
}

}  // namespace

double OracleResult::amplitude_at(double omega) const {
    for (const auto& l : lines) {
        if (std::abs(l.omega - omega) <= 1e-9 * std::max(1.0, omega)) return l.amplitude;
    }
    return 0.0;
}

OracleResult time_domain_oracle(const tline::LoadedLineSpec& spec_in, const std::vector<Tone>& drive,
                                double duration_s, double dc_bias_a, const OracleOptions& opt) {
    tline::LoadedLineSpec spec = spec_in;
    spec.dc_bias_a = dc_bias_a;
    spec.validate();
    if (drive.empty()) throw Error(ErrorCode::InvalidInput, "oracle needs at least one drive tone");
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw Error(ErrorCode::InvalidInput, "duration must be positive");
    }
    if (!(opt.window_fraction > 0.0 && opt.window_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidInput, "window fraction must lie in (0, 1)");
    }
    const double cutoff = spec.ladder_cutoff();
    for (const auto& d : drive) {
        if (!(d.omega > 0.0 && d.omega < cutoff)) {
            throw Error(ErrorCode::InvalidInput, "drive tone outside (0, ladder cutoff)");
        }
        if (!(d.amplitude >= 0.0) || !std::isfinite(d.amplitude)) {
            throw Error(ErrorCode::InvalidInput, "drive amplitude must be >= 0");
        }
    }
    const int m = spec.total_cells();
    // unbiased cutoff bounds the fastest dynamics
    tline::LoadedLineSpec unbiased = spec;
    unbiased.dc_bias_a = 0.0;
    const double work = m * duration_s * unbiased.ladder_cutoff();
    if (work > opt.max_work) {
        std::ostringstream msg;
        msg << "cells x duration x cutoff = " << work << " exceeds the budget " << opt.max_work;
        throw Error(ErrorCode::BudgetExceeded, msg.str());
    }

    Ladder ladder;
    ladder.l0.resize(static_cast<size_t>(m));
    ladder.inv_c.resize(static_cast<size_t>(m));
    for (int n = 0; n < m; ++n) {
        const double mult = spec.pattern[static_cast<size_t>(n % spec.cells_per_supercell())];
        const bool ind = spec.target == tline::LoadingTarget::Inductance;
        ladder.l0[static_cast<size_t>(n)] = spec.base.l0_h * (ind ? mult : 1.0);
        ladder.inv_c[static_cast<size_t>(n)] = 1.0 / (spec.base.c_f * (ind ? 1.0 : mult));
    }
    ladder.inv_istar2 = std::isfinite(spec.base.i_star_a) ? 1.0 / (spec.base.i_star_a * spec.base.i_star_a) : 0.0;
    ladder.bias = dc_bias_a;
    ladder.r = std::sqrt(spec.average_l() / spec.average_c());
    ladder.drive = drive;
    double w_min = INFINITY;
    for (const auto& d : drive) w_min = std::min(w_min, d.omega);
    ladder.ramp = opt.ramp_s >= 0.0 ? opt.ramp_s : std::min(0.1 * duration_s, 8.0 * two_pi / w_min);

    const double t_window = duration_s * opt.window_fraction;
    const double t_start = duration_s - t_window;
    if (ladder.ramp > t_start) throw Error(ErrorCode::NotSteady, "drive ramp overlaps the analysis window");
    // half-window Hann main lobes must not overlap
    const double min_sep = two_pi * 4.0 / t_window;
    const auto tones = fit_tones(drive, opt.mixing_order, cutoff, min_sep);
    double w_top = 0.0;
    for (const auto& t : tones) w_top = std::max(w_top, t.omega);
    const double dt = two_pi / (w_top * opt.samples_per_period);
    const size_t n_samples = static_cast<size_t>(std::floor(t_window / dt)) + 1;
    if (n_samples < 4 * (2 * tones.size() + 1)) throw Error(ErrorCode::NotSteady, "analysis window too short");

    std::vector<double> times;
    times.reserve(n_samples + 1);
    times.push_back(0.0);
    for (size_t j = 0; j < n_samples; ++j) times.push_back(t_start + dt * static_cast<double>(j));

    State x(2 * static_cast<size_t>(m), 0.0);
    std::vector<double> ts, ys;
    ts.reserve(n_samples);
    ys.reserve(n_samples);
    long steps = 0;  // rhs evaluations
    namespace odeint = boost::numeric::odeint;
    try {
        auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(opt.atol, opt.rtol);
        auto counted = [&](const State& s, State& d, double t) {
            ++steps;
            ladder(s, d, t);
        };
        odeint::integrate_times(
            stepper, counted, x, times.begin(), times.end(), dt,
            [&](const State& s, double t) {
                if (t < t_start) return;
                ts.push_back(t);
                ys.push_back(s[2 * static_cast<size_t>(m) - 1] / ladder.r);
            },
            odeint::max_step_checker(static_cast<int>(std::min<long>(opt.max_steps, 2'000'000'000))));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::StepFailure, std::string("ladder integration failed: ") + e.what());
    }
    for (double y : ys) {
        if (!std::isfinite(y)) throw Error(ErrorCode::StepFailure, "ladder integration produced a non-finite output");
    }

    const auto full = fit_phasors(ts, ys, 0, ts.size(), tones);
    const size_t half = ts.size() / 2;
    const auto first = fit_phasors(ts, ys, 0, half, tones);
    const auto second = fit_phasors(ts, ys, half, ts.size(), tones);

    OracleResult res;
    res.load_ohm = ladder.r;
    res.rhs_evaluations = steps;
    double biggest = 0.0, worst = 0.0;
    for (size_t q = 0; q < tones.size(); ++q) {
        SpectralLine l;
        l.omega = tones[q].omega;
        l.amplitude = std::abs(full[q]);
        l.phase = std::arg(full[q]);
        l.orders = tones[q].orders;
        res.lines.push_back(l);
        biggest = std::max(biggest, l.amplitude);
        worst = std::max(worst, std::abs(first[q] - second[q]));
    }
    res.leakage_dbc = biggest > 0.0 ? 20.0 * std::log10(std::max(worst, 1e-300) / biggest) : -300.0;
    if (res.leakage_dbc > opt.leakage_threshold_dbc) {
        std::ostringstream msg;
        msg << "output not steady over the analysis window (" << res.leakage_dbc << " dBc)";
        throw Error(ErrorCode::NotSteady, msg.str());
    }
    std::sort(res.lines.begin(), res.lines.end(), [](const auto& a, const auto& b) { return a.omega < b.omega; });
    return res;
}

OracleGain oracle_signal_gain(const tline::LoadedLineSpec& spec, Tone pump, Tone signal, double duration_s,
                              double dc_bias_a, const OracleOptions& options) {
    OracleGain g;
    g.pumped = time_domain_oracle(spec, {pump, signal}, duration_s, dc_bias_a, options);
    Tone off = pump;
    off.amplitude = 0.0;
    g.unpumped = time_domain_oracle(spec, {off, signal}, duration_s, dc_bias_a, options);
    g.signal_out_pumped = g.pumped.amplitude_at(signal.omega);
    g.signal_out_unpumped = g.unpumped.amplitude_at(signal.omega);
    g.idler_out = g.pumped.amplitude_at(pump.omega - signal.omega);
    if (!(g.signal_out_unpumped > 0.0)) throw Error(ErrorCode::NotSteady, "no signal at the output");
    g.gain_db = 20.0 * std::log10(g.signal_out_pumped / g.signal_out_unpumped);
    return g;
}

}  // namespace kitwpa::mixing
