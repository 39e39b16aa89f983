#include "kitwpa/constants.hpp"
#include "kitwpa/error.hpp"
#include "kitwpa/tline.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace kitwpa::tline {

namespace {

struct Candidate {
    int period = 0;
    double wide = 1.0;
    double narrow = 1.0;
    double margin = -1.0;  // <= 0 means infeasible
};

LoadedLineSpec make_spec(const UnitCell& base, const DesignConstraints& k, int period,
                         double wide, double narrow) {
    LoadedLineSpec spec;
    spec.base = base;
    spec.pattern = three_site_pattern(period, wide, narrow);
    spec.target = k.target;
    spec.n_supercells = k.n_supercells;
    spec.dc_bias_a = k.dc_bias_a;
    return spec;
}

std::vector<double> merge_grids(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end(),
                        [](double x, double y) { return std::abs(x - y) <= 1e-12 * y; }),
            a.end());
    return a;
}

// Grid dense around the pump, coarse elsewhere, up to 3.5 x pump.
std::vector<double> design_grid(double pump, double limit) {
    const double top = std::min(3.5 * pump, limit);
    auto coarse = linear_grid(top / 2000.0, top, 2000);
    auto fine = linear_grid(0.9 * pump, 1.1 * pump, 2001);
    return merge_grids(std::move(coarse), fine);
}

double goal_margin(const Stopband& narrow, const Stopband& harmonic, double pump,
                   const DesignConstraints& k) {
    const double r = narrow.omega_lo / pump;
    const double half = 0.5 * (k.edge_window_hi - k.edge_window_lo);
    const double m_edge = std::min(r - k.edge_window_lo, k.edge_window_hi - r) / half;
    const double h = 3.0 * pump;
    const double m_harm =
        2.0 * std::min(h - harmonic.omega_lo, harmonic.omega_hi - h) / harmonic.width;
    return std::min(m_edge, m_harm);
}

// Fast evaluation for the search: gaps from direct scans of the half trace.
double evaluate(const UnitCell& base, const DesignConstraints& k, double pump, int period,
                double wide, double narrow) {
    const auto spec = make_spec(base, k, period, wide, narrow);
    const double limit = 3.0 * spec.ladder_cutoff();
    const double h = 3.0 * pump;
    if (h >= spec.ladder_cutoff()) return -1.0;
    if (bloch_point(h, spec).passband()) return -1.0;

    // harmonic gap edges: step outward from 3 x pump, then bisect
    auto edge = [&](double dir) -> std::optional<double> {
        double inside = h;
        for (double step = 0.002 * h;; step *= 1.5) {
            const double w = inside + dir * step;
            if (w <= 0.0 || w > limit) return std::nullopt;
            if (bloch_point(w, spec).passband()) {
                double a = w, b = inside;
                while (std::abs(a - b) > 1e-9 * h) {
                    const double m = 0.5 * (a + b);
                    (bloch_point(m, spec).passband() ? a : b) = m;
                }
                return 0.5 * (a + b);
            }
            inside = w;
        }
    };
    const auto lo = edge(-1.0);
    const auto hi = edge(+1.0);
    if (!lo || !hi || *hi >= spec.ladder_cutoff()) return -1.0;
    Stopband harmonic{*lo, *hi, *hi - *lo, true};

    // narrow gap: first stopband in (0.05, 1.1) x pump
    const auto grid = linear_grid(0.05 * pump, 1.1 * pump, 4000);
    std::optional<Stopband> first;
    for (size_t i = 1; i < grid.size(); ++i) {
        if (!bloch_point(grid[i], spec).passband()) {
            double a = grid[i - 1], b = grid[i];
            while (std::abs(a - b) > 1e-9 * pump) {
                const double m = 0.5 * (a + b);
                (bloch_point(m, spec).passband() ? a : b) = m;
            }
            double lo_edge = 0.5 * (a + b);
            size_t j = i;
            while (j + 1 < grid.size() && !bloch_point(grid[j + 1], spec).passband()) ++j;
            double hi_edge = grid[j];
            if (j + 1 < grid.size()) {
                a = grid[j + 1];
                b = grid[j];
                while (std::abs(a - b) > 1e-9 * pump) {
                    const double m = 0.5 * (a + b);
                    (bloch_point(m, spec).passband() ? a : b) = m;
                }
                hi_edge = 0.5 * (a + b);
            }
            first = Stopband{lo_edge, hi_edge, hi_edge - lo_edge, true};
            break;
        }
    }
    if (!first) return -1.0;
    if (first->width > k.narrow_max_relative_width * pump) return -1.0;
    return goal_margin(*first, harmonic, pump, k);
}

}  // namespace

DesignCheck check_design(const LoadedLineSpec& spec, double target_pump,
                         const DesignConstraints& constraints) {
    spec.validate();
    DesignCheck out;
    const double limit = 3.0 * spec.ladder_cutoff();
    const auto curve = bloch_dispersion(spec, design_grid(target_pump, limit));
    for (const auto& band : curve.stopbands) {
        if (!out.narrow_gap) {
            // the first gap above dc is the one the pump sits against
            out.narrow_gap = band;
            const double r = band.omega_lo / target_pump;
            out.narrow_gap_ok = band.bounded_above && r > constraints.edge_window_lo &&
                                r < constraints.edge_window_hi &&
                                band.width <= constraints.narrow_max_relative_width * target_pump;
        }
        const double h = 3.0 * target_pump;
        if (band.bounded_above && band.omega_lo <= h && band.omega_hi >= h) {
            out.harmonic_gap = band;
            out.harmonic_gap_ok = true;
        }
    }
    return out;
}

DesignResult design_loading(double target_pump, const UnitCell& base,
                            const DesignConstraints& k) {
    base.validate();
    if (!(target_pump > 0.0)) throw Error(ErrorCode::InvalidInput, "target pump must be positive");
    const double cutoff = cell_cutoff(base, k.dc_bias_a);
    if (3.0 * target_pump >= cutoff) {
        std::ostringstream msg;
        msg << "third harmonic " << 3.0 * target_pump << " rad/s is beyond the ladder cutoff "
            << cutoff << " rad/s";
        throw Error(ErrorCode::DesignInfeasible, msg.str());
    }

    const int n = std::max(2, k.grid_points_per_axis);
    auto axis = [&](double lo, double hi) {
        return hi > lo ? linear_grid(lo, hi, n) : std::vector<double>{lo};
    };
    const auto wides = axis(k.min_wide_multiplier, k.max_wide_multiplier);
    const auto narrows = axis(k.min_narrow_multiplier, k.max_narrow_multiplier);

    // Loading with multipliers >= 1 only lowers the Bragg frequencies, so the
    // unloaded first Bragg gap must lie above the pump; heavy loading lowers
    // it by at most sqrt of the supercell-average multiplier.
    const double w_max = std::max(k.max_wide_multiplier, 1.0);
    const double n_max = std::max(k.max_narrow_multiplier, 1.0);
    Candidate best;
    for (int period = std::max(3, k.min_period + (3 - k.min_period % 3) % 3);
         period <= k.max_period; period += 3) {
        const double bragg = cutoff * std::sin(pi / (2.0 * period));
        const double heaviest = 1.0 + (3.0 * (w_max - 1.0) + w_max * (n_max - 1.0)) / period;
        if (bragg < k.edge_window_lo * target_pump) continue;
        if (bragg / std::sqrt(heaviest) > 1.5 * k.edge_window_hi * target_pump) continue;
        for (double w : wides) {
            for (double m : narrows) {
                const double margin = evaluate(base, k, target_pump, period, w, m);
                if (margin > best.margin) best = {period, w, m, margin};
            }
        }
    }
    if (best.margin <= 0.0) {
        throw Error(ErrorCode::DesignInfeasible,
                    "no loading pattern in the constraint box places a narrow gap above the "
                    "pump and a gap over its third harmonic");
    }

    // pattern search on the two multipliers at the best period
    double step_w = wides.size() > 1 ? (wides[1] - wides[0]) / 2.0 : 0.0;
    double step_m = narrows.size() > 1 ? (narrows[1] - narrows[0]) / 2.0 : 0.0;
    for (int it = 0; it < 40 && (step_w > 1e-4 || step_m > 1e-4); ++it) {
        bool improved = false;
        const double dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : dirs) {
            const double w = std::clamp(best.wide + d[0] * step_w, k.min_wide_multiplier,
                                        k.max_wide_multiplier);
            const double m = std::clamp(best.narrow + d[1] * step_m, k.min_narrow_multiplier,
                                        k.max_narrow_multiplier);
            const double margin = evaluate(base, k, target_pump, best.period, w, m);
            if (margin > best.margin + 1e-12) {
                best = {best.period, w, m, margin};
                improved = true;
            }
        }
        if (!improved) {
            step_w /= 2.0;
            step_m /= 2.0;
        }
    }

    DesignResult out;
    out.spec = make_spec(base, k, best.period, best.wide, best.narrow);
    out.period = best.period;
    out.wide_multiplier = best.wide;
    out.narrow_multiplier = best.narrow;
    const auto check = check_design(out.spec, target_pump, k);
    if (!check.narrow_gap_ok || !check.harmonic_gap_ok) {
        throw Error(ErrorCode::DesignInfeasible,
                    "best candidate failed verification on the full dispersion grid");
    }
    out.narrow_gap = *check.narrow_gap;
    out.harmonic_gap = *check.harmonic_gap;
    out.edge_ratio = out.narrow_gap.omega_lo / target_pump;
    out.margin = goal_margin(out.narrow_gap, out.harmonic_gap, target_pump, k);
    return out;
}

}  // namespace kitwpa::tline
