#include <gtest/gtest.h>

#include "kitwpa/error.hpp"
#include "kitwpa/film.hpp"

#include <cmath>
#include <random>

using namespace kitwpa;
using namespace kitwpa::film;

namespace {

TransitionCurve tanh_curve(double tc, double width, double rn, double t0, double t1, double dt) {
    TransitionCurve c;
    c.film_id = "tanh";
    const int n = static_cast<int>(std::round((t1 - t0) / dt));
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + i * dt;
        c.samples.push_back({t, rn * (1.0 + std::tanh((t - tc) / width)) / 2.0});
    }
    return c;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected kitwpa::Error";
    return ErrorCode::InvalidInput;
}

}  // namespace

TEST(ExtractTc, TanhMidpoint) {
    const auto curve = tanh_curve(13.0, 0.1, 80.0, 11.0, 15.0, 0.01);
    EXPECT_NEAR(extract_tc(curve).tc_k, 13.0, 0.01);
}

TEST(ExtractTc, IdealStepLandsOnStep) {
    TransitionCurve c;
    for (int i = 0; i <= 600; ++i) {
        const double t = 6.0 + 0.01 * i;
        c.samples.push_back({t, t >= 9.0 - 1e-9 ? 50.0 : 0.0});
    }
    // linear interpolation across the 10 mK step
    EXPECT_NEAR(extract_tc(c).tc_k, 9.0, 0.005);
}

TEST(ExtractTc, FlatCurveHasNoCrossing) {
    TransitionCurve c;
    for (int i = 0; i < 20; ++i) c.samples.push_back({5.0 + i, 42.0});
    EXPECT_EQ(code_of([&] { extract_tc(c); }), ErrorCode::NoCrossing);
}

TEST(ExtractTc, UnsettledTopIsNoPlateau) {
    TransitionCurve c;
    for (int i = 0; i < 40; ++i) c.samples.push_back({1.0 + i * 0.5, 3.0 * i});
    EXPECT_EQ(code_of([&] { extract_tc(c); }), ErrorCode::NoPlateau);
}

TEST(ExtractTc, ValidationErrors) {
    TransitionCurve few;
    few.samples = {{1, 0}, {2, 1}, {3, 1}};
    EXPECT_EQ(code_of([&] { extract_tc(few); }), ErrorCode::InvalidInput);
    auto c = tanh_curve(13.0, 0.1, 80.0, 11.0, 15.0, 0.1);
    std::swap(c.samples[3], c.samples[4]);
    EXPECT_EQ(code_of([&] { extract_tc(c); }), ErrorCode::InvalidInput);
    c = tanh_curve(13.0, 0.1, 80.0, 11.0, 15.0, 0.1);
    c.samples[2].resistance_ohm = -1.0;
    EXPECT_EQ(code_of([&] { extract_tc(c); }), ErrorCode::InvalidInput);
    c = tanh_curve(13.0, 0.1, 80.0, 11.0, 15.0, 0.1);
    TcOptions o;
    o.criterion = 1.0;
    EXPECT_EQ(code_of([&] { extract_tc(c, o); }), ErrorCode::InvalidInput);
}

TEST(ExtractTc, NonMonotonicBracketWarns) {
    auto c = tanh_curve(13.0, 0.1, 80.0, 11.0, 15.0, 0.01);
    // dip back below half the normal resistance above the transition
    for (auto& s : c.samples) {
        if (s.temperature_k > 13.5 && s.temperature_k < 13.6) s.resistance_ohm = 10.0;
    }
    const auto r = extract_tc(c);
    EXPECT_NEAR(r.tc_k, 13.0, 0.01);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("NonMonotonicBracket"), std::string::npos);
}

TEST(ExtractTc, TransitionWidthOfTanh) {
    // 10-90 % of (1 + tanh(u)) / 2 spans 2 atanh(0.8) in u
    const auto curve = tanh_curve(13.0, 0.1, 80.0, 11.0, 15.0, 0.001);
    EXPECT_NEAR(transition_width(curve), 0.2 * std::atanh(0.8), 1e-3);
}

TEST(ExtractTc, InvariantUnderResistanceScaling) {
    const auto curve = tanh_curve(12.3, 0.07, 80.0, 10.0, 15.0, 0.013);
    const double base = extract_tc(curve).tc_k;
    for (double alpha : {1e-3, 0.5, 3.0, 1e4}) {
        auto scaled = curve;
        for (auto& s : scaled.samples) s.resistance_ohm *= alpha;
        EXPECT_NEAR(extract_tc(scaled).tc_k, base, 1e-12 * base) << alpha;
    }
}

TEST(ExtractTc, MonotoneInCriterionForRandomMonotoneCurves) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        TransitionCurve c;
        double r = 0.0;
        const int n = 50 + static_cast<int>(u(rng) * 100);
        const int settle = n - n / 5;
        for (int i = 0; i < n; ++i) {
            c.samples.push_back({2.0 + 0.05 * i, r});
            if (i < settle) r += u(rng) * u(rng);  // non-decreasing
        }
        if (r <= 0.0) continue;
        double prev = -1.0;
        for (double crit : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            TcOptions o;
            o.criterion = crit;
            const double t = extract_tc(c, o).tc_k;
            EXPECT_LE(prev, t) << "trial " << trial << " criterion " << crit;
            prev = t;
        }
    }
}

TEST(LkFromTc, SpotValues) {
    EXPECT_NEAR(lk_from_tc(13.0, 100.0), 1.0626420202858666e-11, 1e-15);
    EXPECT_NEAR(lk_from_tc(6.5, 100.0), 2.1252840405717333e-11, 1e-15);
    EXPECT_EQ(lk_from_tc(13.0, 0.0), 0.0);
}

TEST(LkFromTc, ScalingProperties) {
    const double ref = lk_from_tc(11.0, 73.0);
    for (double a : {0.1, 0.7, 2.0, 13.0}) {
        EXPECT_NEAR(lk_from_tc(a * 11.0, 73.0), ref / a, 1e-14 * ref / a);
        EXPECT_NEAR(lk_from_tc(11.0, a * 73.0), a * ref, 1e-14 * a * ref);
    }
}

TEST(LkFromTc, Errors) {
    EXPECT_EQ(code_of([] { lk_from_tc(0.0, 100.0); }), ErrorCode::NonPositiveTc);
    EXPECT_EQ(code_of([] { lk_from_tc(-1.0, 100.0); }), ErrorCode::NonPositiveTc);
    EXPECT_EQ(code_of([] { lk_from_tc(10.0, -1.0); }), ErrorCode::InvalidInput);
}

TEST(LkFromSim, SpotValues) {
    EXPECT_NEAR(lk_from_sim(5.0329e9, 2e-9, 0.1e-12), 8e-9, 8e-12);
    const double f_lg = resonant_frequency(2e-9, 0.1e-12);
    EXPECT_NEAR(lk_from_sim(f_lg, 2e-9, 0.1e-12), 0.0, 1e-20);
    EXPECT_EQ(code_of([] { lk_from_sim(10e9, 10e-9, 0.1e-12); }), ErrorCode::NegativeResult);
    EXPECT_EQ(code_of([] { lk_from_sim(0.0, 1e-9, 1e-12); }), ErrorCode::InvalidInput);
    EXPECT_EQ(code_of([] { lk_from_sim(1e9, 1e-9, 0.0); }), ErrorCode::InvalidInput);
}

TEST(LkFromSim, RoundTripThroughForwardModel) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lk(0.0, 50e-9), lg(0.0, 10e-9), c(1e-14, 1e-11);
    for (int i = 0; i < 500; ++i) {
        const double l_k = lk(rng), l_g = lg(rng), cap = c(rng);
        if (l_k + l_g <= 0.0) continue;
        const double f0 = resonant_frequency(l_k + l_g, cap);
        EXPECT_NEAR(lk_from_sim(f0, l_g, cap), l_k, 1e-9 * (l_k + l_g));
    }
}

TEST(CompareLkMethods, SelfConsistentFilm) {
    FilmProperties film;
    film.tc_k = 13.0;
    film.rn_sheet_ohm = 100.0;
    const double squares = 600.0;
    const double lg = 2e-9, c = 0.1e-12;
    const double f0 = resonant_frequency(squares * lk_from_tc(13.0, 100.0) + lg, c);
    const auto cmp = compare_lk_methods(film, f0, lg, c, squares);
    EXPECT_LT(cmp.relative_deviation, 1e-6);
    EXPECT_NEAR(cmp.lk_sim_device_h, squares * cmp.lk_tc_h_per_sq, 1e-6 * cmp.lk_sim_device_h);
}

TEST(CompareLkMethods, RelativeDeviationArithmetic) {
    EXPECT_NEAR(relative_lk_deviation(10e-12, 11e-12), 0.10, 1e-12);
    EXPECT_EQ(code_of([] { relative_lk_deviation(0.0, 1e-12); }), ErrorCode::IncomparableMethods);
    FilmProperties film;
    film.tc_k = 13.0;
    film.rn_sheet_ohm = 0.0;
    EXPECT_EQ(code_of([&] { compare_lk_methods(film, 5e9, 2e-9, 0.1e-12); }),
              ErrorCode::IncomparableMethods);
}
