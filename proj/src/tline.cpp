#include "kitwpa/tline.hpp"

#include "kitwpa/constants.hpp"
#include "kitwpa/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kitwpa::tline {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Lossless ladder matrices keep the form [[1 + ea, i b], [i c, 1 + ed]] with
// real ea, ed, b, c; storing the deviations from identity avoids cancellation
// in A + D - 2 at low frequency.
struct LosslessAbcd {
    double ea = 0.0, ed = 0.0, b = 0.0, c = 0.0;

    LosslessAbcd then(const LosslessAbcd& y) const {
        LosslessAbcd r;
        r.ea = ea + y.ea + ea * y.ea - b * y.c;
        r.ed = ed + y.ed + ed * y.ed - c * y.b;
        r.b = (1.0 + ea) * y.b + b * (1.0 + y.ed);
        r.c = c * (1.0 + y.ea) + (1.0 + ed) * y.c;
        return r;
    }
};

LosslessAbcd lossless_cell(double omega, const CellValues& v) {
    return {-omega * omega * v.l_h * v.c_f, 0.0, omega * v.l_h, omega * v.c_f};
}

LosslessAbcd lossless_supercell(double omega, const std::vector<CellValues>& cells) {
    LosslessAbcd m;
    for (const auto& v : cells) m = m.then(lossless_cell(omega, v));
    return m;
}

std::vector<CellValues> supercell_values(const LoadedLineSpec& spec) {
    std::vector<CellValues> cells;
    cells.reserve(spec.pattern.size());
    for (int j = 0; j < spec.cells_per_supercell(); ++j) cells.push_back(spec.cell(j));
    return cells;
}

BlochPoint bloch_point(double omega, const std::vector<CellValues>& cells) {
    const LosslessAbcd m = lossless_supercell(omega, cells);
    return BlochPoint{-(m.ea + m.ed) / 4.0};
}

double unwrap(int band, double theta) {
    return band * pi + (band % 2 == 0 ? theta : pi - theta);
}

// Golden-section search for the extremum of sin^2(k/2) on [lo, hi].
double locate_band_turn(const std::vector<CellValues>& cells, double lo, double hi,
                        bool maximum) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [&](double w) {
        const double s = bloch_point(w, cells).sin2_half;
        return maximum ? -s : s;
    };
    double a = lo, b = hi;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double refine_edge(const std::vector<CellValues>& cells, double w_pass, double w_stop,
                   double rel_tol) {
    while (std::abs(w_stop - w_pass) > rel_tol * std::max(w_pass, w_stop)) {
        const double mid = 0.5 * (w_pass + w_stop);
        if (bloch_point(mid, cells).passband()) {
            w_pass = mid;
        } else {
            w_stop = mid;
        }
    }
    return 0.5 * (w_pass + w_stop);
}

}  // namespace

void UnitCell::validate() const {
    if (!(l0_h > 0.0) || !(c_f > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "unit cell needs l0 > 0 and c > 0");
    }
    if (!(i_star_a > 0.0)) throw Error(ErrorCode::NonPositiveIStar, "unit cell I* must be positive");
}

double effective_inductance(const UnitCell& cell, double current_a) {
    if (std::isinf(cell.i_star_a)) return cell.l0_h;
    const double r = current_a / cell.i_star_a;
    return cell.l0_h * (1.0 + r * r);
}

double cell_cutoff(const UnitCell& cell, double bias_a) {
    return 2.0 / std::sqrt(effective_inductance(cell, bias_a) * cell.c_f);
}

Abcd Abcd::operator*(const Abcd& rhs) const {
    return {a * rhs.a + b * rhs.c, a * rhs.b + b * rhs.d, c * rhs.a + d * rhs.c,
            c * rhs.b + d * rhs.d};
}

Abcd abcd_cell(double omega, const UnitCell& cell, double bias_a) {
    const complex z{0.0, omega * effective_inductance(cell, bias_a)};
    const complex y{0.0, omega * cell.c_f};
    const Abcd series{1.0, z, 0.0, 1.0};
    const Abcd shunt{1.0, 0.0, y, 1.0};
    return series * shunt;
}

std::string to_string(LoadingTarget target) {
    return target == LoadingTarget::Capacitance ? "c" : "l";
}

LoadingTarget loading_target_from_string(const std::string& s) {
    if (s == "c") return LoadingTarget::Capacitance;
    if (s == "l") return LoadingTarget::Inductance;
    throw Error(ErrorCode::InvalidInput, "pattern_target must be \"c\" or \"l\", got \"" + s + "\"");
}

void LoadedLineSpec::validate() const {
    base.validate();
    if (pattern.empty()) throw Error(ErrorCode::InvalidInput, "loading pattern is empty");
    for (double m : pattern) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw Error(ErrorCode::InvalidInput, "loading multipliers must be positive");
        }
    }
    if (n_supercells < 1) throw Error(ErrorCode::InvalidInput, "n_supercells must be >= 1");
    if (!std::isfinite(dc_bias_a)) throw Error(ErrorCode::InvalidInput, "dc bias must be finite");
}

CellValues LoadedLineSpec::cell(int j) const {
    const double l = effective_inductance(base, dc_bias_a);
    const double m = pattern.at(static_cast<size_t>(j));
    return target == LoadingTarget::Capacitance ? CellValues{l, base.c_f * m}
                                                : CellValues{l * m, base.c_f};
}

double LoadedLineSpec::average_l() const {
    double s = 0.0;
    for (int j = 0; j < cells_per_supercell(); ++j) s += cell(j).l_h;
    return s / cells_per_supercell();
}

double LoadedLineSpec::average_c() const {
    double s = 0.0;
    for (int j = 0; j < cells_per_supercell(); ++j) s += cell(j).c_f;
    return s / cells_per_supercell();
}

double LoadedLineSpec::ladder_cutoff() const {
    double w = std::numeric_limits<double>::infinity();
    for (int j = 0; j < cells_per_supercell(); ++j) {
        const auto v = cell(j);
        w = std::min(w, 2.0 / std::sqrt(v.l_h * v.c_f));
    }
    return w;
}

Abcd supercell_abcd(double omega, const LoadedLineSpec& spec) {
    Abcd m;
    for (int j = 0; j < spec.cells_per_supercell(); ++j) {
        const auto v = spec.cell(j);
        m = m * Abcd{1.0 - omega * omega * v.l_h * v.c_f, complex{0.0, omega * v.l_h},
                     complex{0.0, omega * v.c_f}, 1.0};
    }
    return m;
}

double BlochPoint::reduced_phase() const {
    if (!passband()) return nan;
    return 2.0 * std::atan2(std::sqrt(sin2_half), std::sqrt(1.0 - sin2_half));
}

double BlochPoint::attenuation() const {
    if (passband()) return 0.0;
    return std::acosh(std::abs(cos_k()));
}

BlochPoint bloch_point(double omega, const LoadedLineSpec& spec) {
    return bloch_point(omega, supercell_values(spec));
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    if (n < 1) return {};
    if (n == 1) return {lo};
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = lo + (hi - lo) * i / double(n - 1);
    return g;
}

DispersionCurve bloch_dispersion(const LoadedLineSpec& spec, const std::vector<double>& omegas) {
    spec.validate();
    if (omegas.empty()) throw Error(ErrorCode::EmptyGrid, "frequency grid is empty");
    const double limit = 3.0 * spec.ladder_cutoff();
    for (size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0) || omegas[i] > limit * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "grid point " << omegas[i] << " rad/s outside (0, 3 x cutoff = " << limit << "]";
            throw Error(ErrorCode::GridOutOfRange, msg.str());
        }
        if (i > 0 && !(omegas[i] > omegas[i - 1])) {
            throw Error(ErrorCode::InvalidInput, "frequency grid must be strictly increasing");
        }
    }

    const auto cells = supercell_values(spec);
    DispersionCurve curve;
    curve.spec = spec;
    curve.supercell_length = spec.cells_per_supercell();
    curve.samples.resize(omegas.size());
    std::vector<double> theta(omegas.size(), nan);

    int band = 0;
    long prev = -1;   // last passband sample
    long prev2 = -1;  // passband sample before it, if contiguous
    bool gap_since_prev = false;
    for (size_t j = 0; j < omegas.size(); ++j) {
        const double w = omegas[j];
        const BlochPoint bp = bloch_point(w, cells);
        auto& s = curve.samples[j];
        s.omega = w;
        s.passband = bp.passband();
        s.attenuation = bp.attenuation();
        if (!s.passband) {
            s.k = nan;
            if (prev >= 0) gap_since_prev = true;
            continue;
        }
        theta[j] = bp.reduced_phase();
        if (prev >= 0) {
            if (gap_since_prev) {
                ++band;
                prev2 = -1;
            } else {
                const double tp = theta[static_cast<size_t>(prev)];
                const bool even = band % 2 == 0;
                const bool reversed = even ? theta[j] < tp : theta[j] > tp;
                if (reversed) {
                    // a closed (or sub-grid) gap at k Lambda = (band + 1) pi was crossed
                    const double lo = omegas[static_cast<size_t>(prev2 >= 0 ? prev2 : prev)];
                    const double turn = locate_band_turn(cells, lo, w, even);
                    ++band;
                    if (omegas[static_cast<size_t>(prev)] > turn) {
                        curve.samples[static_cast<size_t>(prev)].k =
                            unwrap(band, theta[static_cast<size_t>(prev)]);
                    }
                }
            }
        }
        s.k = unwrap(band, theta[j]);
        prev2 = gap_since_prev ? -1 : prev;
        prev = static_cast<long>(j);
        gap_since_prev = false;
    }
    curve.stopbands = find_stopbands(curve);
    return curve;
}

std::vector<Stopband> find_stopbands(const DispersionCurve& curve, double edge_rel_tol) {
    const auto cells = supercell_values(curve.spec);
    const auto& s = curve.samples;
    std::vector<Stopband> out;
    size_t i = 0;
    while (i < s.size()) {
        if (s[i].passband) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < s.size() && !s[j + 1].passband) ++j;
        Stopband band;
        band.omega_lo = i > 0 ? refine_edge(cells, s[i - 1].omega, s[i].omega, edge_rel_tol)
                              : s[i].omega;
        if (j + 1 < s.size()) {
            band.omega_hi = refine_edge(cells, s[j + 1].omega, s[j].omega, edge_rel_tol);
        } else {
            band.omega_hi = s[j].omega;
            band.bounded_above = false;
        }
        band.width = band.omega_hi - band.omega_lo;
        out.push_back(band);
        i = j + 1;
    }
    return out;
}

double DispersionCurve::wavenumber(double omega) const {
    if (samples.empty()) throw Error(ErrorCode::EmptyGrid, "dispersion curve is empty");
    if (!(omega > 0.0) || omega > samples.back().omega) {
        std::ostringstream msg;
        msg << "frequency " << omega << " rad/s outside the dispersion grid";
        throw Error(ErrorCode::GridOutOfRange, msg.str());
    }
    auto stop = [&](double w) {
        std::ostringstream msg;
        msg << "frequency " << w << " rad/s lies in a stopband";
        return Error(ErrorCode::FrequencyInStopband, msg.str());
    };
    if (omega <= samples.front().omega) {
        if (!samples.front().passband) throw stop(omega);
        return samples.front().k * omega / samples.front().omega;
    }
    const auto it = std::lower_bound(samples.begin(), samples.end(), omega,
                                     [](const DispersionSample& a, double w) { return a.omega < w; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (!lo.passband || !hi.passband) throw stop(omega);
    const double t = (omega - lo.omega) / (hi.omega - lo.omega);
    return lo.k + t * (hi.k - lo.k);
}

bool DispersionCurve::in_passband(double omega) const {
    try {
        (void)wavenumber(omega);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::vector<double> three_site_pattern(int period, double wide_multiplier, double narrow_multiplier) {
    if (period < 3 || period % 3 != 0) {
        throw Error(ErrorCode::InvalidInput, "three-site pattern needs a period that is a multiple of 3");
    }
    std::vector<double> p(static_cast<size_t>(period), 1.0);
    for (int q = 0; q < 3; ++q) p[static_cast<size_t>(q * period / 3)] = wide_multiplier;
    p[0] *= narrow_multiplier;
    return p;
}

std::vector<double> cosine_pattern(int period, const std::vector<Harmonic>& harmonics) {
    if (period < 1) throw Error(ErrorCode::InvalidInput, "cosine pattern needs a positive period");
    std::vector<double> p(static_cast<size_t>(period), 1.0);
    for (const auto& h : harmonics) {
        for (int n = 0; n < period; ++n) {
            p[static_cast<size_t>(n)] += h.depth * std::cos(two_pi * h.order * n / period);
        }
    }
    for (double v : p) {
        if (!(v > 0.0)) throw Error(ErrorCode::InvalidInput, "cosine pattern has a non-positive multiplier");
    }
    return p;
}

}  // namespace kitwpa::tline
