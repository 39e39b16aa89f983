#include <gtest/gtest.h>

#include "kitwpa/error.hpp"
#include "kitwpa/film.hpp"
#include "kitwpa/resonator.hpp"

#include <cmath>
#include <random>

using namespace kitwpa;
using namespace kitwpa::resonator;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected kitwpa::Error";
    return ErrorCode::InvalidInput;
}

S21Sweep synthetic(const ResonanceFit& truth, double half_span_linewidths, int n,
                   double sigma = 0.0, unsigned seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
    const double lw = truth.f0_hz / truth.q_loaded;
    S21Sweep s;
    s.resonator_id = "synthetic";
    for (int i = 0; i < n; ++i) {
        const double f = truth.f0_hz + lw * half_span_linewidths * (2.0 * i / (n - 1) - 1.0);
        double y = skewed_lorentzian_db(f, truth);
        if (sigma > 0.0) y += noise(rng);
        s.points.push_back({f, y, std::nullopt});
    }
    return s;
}

ResonanceFit truth_5ghz() {
    ResonanceFit t;
    t.f0_hz = 5e9;
    t.q_loaded = 1e4;
    t.depth_db = 20.0;
    t.asymmetry = 0.0;
    t.baseline_db = -0.5;
    return t;
}

}  // namespace

TEST(SkewedLorentzian, DepthAtResonance) {
    auto t = truth_5ghz();
    EXPECT_NEAR(skewed_lorentzian_db(t.f0_hz, t), t.baseline_db - t.depth_db, 1e-12);
    t.asymmetry = 0.3;
    EXPECT_NEAR(skewed_lorentzian_db(t.f0_hz, t), t.baseline_db - t.depth_db, 1e-12);
}

TEST(FitResonance, NoiseFreeSymmetricLorentzian) {
    const auto t = truth_5ghz();
    const auto fit = fit_resonance(synthetic(t, 5.0, 401));
    EXPECT_NEAR(fit.f0_hz, t.f0_hz, 1e-7 * t.f0_hz);
    EXPECT_NEAR(fit.q_loaded, t.q_loaded, 1e-3 * t.q_loaded);
    EXPECT_NEAR(fit.depth_db, t.depth_db, 1e-6);
    EXPECT_LT(fit.residual_rms_db, 1e-6);
}

TEST(FitResonance, NoiseFreeAsymmetricLorentzian) {
    auto t = truth_5ghz();
    t.asymmetry = 0.2;
    t.depth_db = 12.0;
    const auto fit = fit_resonance(synthetic(t, 6.0, 301));
    EXPECT_NEAR(fit.f0_hz, t.f0_hz, 1e-7 * t.f0_hz);
    EXPECT_NEAR(fit.q_loaded, t.q_loaded, 1e-3 * t.q_loaded);
    EXPECT_NEAR(fit.asymmetry, 0.2, 1e-6);
}

TEST(FitResonance, FlatTraceHasNoResonance) {
    S21Sweep s;
    for (int i = 0; i < 64; ++i) s.points.push_back({5e9 + i * 1e4, -0.1, std::nullopt});
    EXPECT_EQ(code_of([&] { fit_resonance(s); }), ErrorCode::NoResonance);
}

TEST(FitResonance, TooFewPoints) {
    S21Sweep s = synthetic(truth_5ghz(), 5.0, 12);
    EXPECT_EQ(code_of([&] { fit_resonance(s); }), ErrorCode::InvalidInput);
}

TEST(FitResonance, ShiftCovariance) {
    const auto t = truth_5ghz();
    const auto base = synthetic(t, 5.0, 401);
    const auto f_ref = fit_resonance(base).f0_hz;
    for (double delta : {-3.3e6, 1.25e5, 7.0e7}) {
        auto shifted = base;
        for (auto& p : shifted.points) p.frequency_hz += delta;
        EXPECT_NEAR(fit_resonance(shifted).f0_hz, f_ref + delta, 1e-9 * (f_ref + delta));
    }
}

// Monte-Carlo over noise seeds: the centre estimate stays within f0 / (100 Q).
TEST(FitResonance, NoisyTraceRecoversCentre) {
    const auto t = truth_5ghz();
    int failures = 0;
    for (unsigned seed = 1; seed <= 100; ++seed) {
        const auto fit = fit_resonance(synthetic(t, 5.0, 401, 0.05, seed));
        if (std::abs(fit.f0_hz - t.f0_hz) > t.f0_hz / (100.0 * t.q_loaded)) ++failures;
    }
    EXPECT_EQ(failures, 0);
}

TEST(PowerToCurrent, SpotValues) {
    EXPECT_NEAR(power_to_current(-60.0, 1e-3), 1e-6, 1e-15);
    EXPECT_NEAR(power_to_current(0.0, 1.0), 0.03162277660168379, 1e-15);
    EXPECT_EQ(power_to_current(-INFINITY, 2.0), 0.0);
    EXPECT_EQ(code_of([] { power_to_current(-60.0, 0.0); }), ErrorCode::NonPositiveBeta);
}

TEST(PowerToCurrent, MonotoneAndSqrtBeta) {
    double prev = 0.0;
    for (double p = -120.0; p <= 10.0; p += 0.5) {
        const double i = power_to_current(p, 1e-3);
        EXPECT_GT(i, prev);
        prev = i;
        EXPECT_NEAR(power_to_current(p, 4e-3), 2.0 * i, 1e-14 * i);
    }
}

namespace {

PowerSweep forward_sweep(double lk0, double istar, double lg, double c, double beta,
                         const std::vector<double>& powers) {
    PowerSweep s;
    s.beta_a2_per_w = beta;
    s.lg_h = lg;
    s.c_f = c;
    for (double p : powers) {
        ResonanceFit fit;
        fit.f0_hz = resonance_at_power(p, beta, lk0, istar, lg, c);
        fit.q_loaded = 1e5;
        s.entries.push_back({p, fit});
    }
    return s;
}

}  // namespace

TEST(ExtractIStar, ForwardModelRoundTrip) {
    const auto s = forward_sweep(8e-9, 1e-3, 2e-9, 0.1e-12, 1e-3, {-70, -65, -60, -55, -50});
    const auto r = extract_istar(s);
    EXPECT_NEAR(r.i_star_a, 1e-3, 1e-6 * 1e-3);
    EXPECT_NEAR(r.lk0_h, 8e-9, 1e-9 * 8e-9);
    EXPECT_EQ(r.points_used, 5);
    EXPECT_NEAR(r.fit_r_squared, 1.0, 1e-9);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(ExtractIStar, TwoPointSweepIsExact) {
    const auto s = forward_sweep(8e-9, 1e-3, 2e-9, 0.1e-12, 1e-3, {-60, -50});
    const auto r = extract_istar(s);
    EXPECT_NEAR(r.i_star_a, 1e-3, 1e-9 * 1e-3);
}

TEST(ExtractIStar, FlatSweepIsUndetectable) {
    auto s = forward_sweep(8e-9, 1e-3, 2e-9, 0.1e-12, 1e-3, {-70, -60, -50});
    for (auto& e : s.entries) e.fit.f0_hz = s.entries.front().fit.f0_hz;
    EXPECT_EQ(code_of([&] { extract_istar(s); }), ErrorCode::NonlinearityUndetectable);
}

TEST(ExtractIStar, InconsistentGeometryIsNegativeLk) {
    auto s = forward_sweep(8e-9, 1e-3, 2e-9, 0.1e-12, 1e-3, {-70, -60, -50});
    s.lg_h = 20e-9;
    EXPECT_EQ(code_of([&] { extract_istar(s); }), ErrorCode::NegativeLk);
}

TEST(ExtractIStar, RisingF0Warns) {
    auto s = forward_sweep(8e-9, 1e-3, 2e-9, 0.1e-12, 1e-3, {-70, -65, -60, -55, -50});
    s.entries[1].fit.f0_hz *= 1.0 + 1e-6;
    const auto r = extract_istar(s);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings[0].find("f0 rises"), std::string::npos);
}

TEST(ExtractIStar, RejectsBadSweeps) {
    auto s = forward_sweep(8e-9, 1e-3, 2e-9, 0.1e-12, 1e-3, {-70, -60, -50});
    s.beta_a2_per_w = 0.0;
    EXPECT_EQ(code_of([&] { extract_istar(s); }), ErrorCode::NonPositiveBeta);
    s = forward_sweep(8e-9, 1e-3, 2e-9, 0.1e-12, 1e-3, {-60, -60, -50});
    EXPECT_EQ(code_of([&] { extract_istar(s); }), ErrorCode::InvalidInput);
}

// Noise-free data from the kinetic-inductance model over a wide parameter box.
TEST(ExtractIStar, RoundTripProperty) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const double lk0 = 1e-9 * std::pow(100.0, u(rng));
        const double istar = 1e-4 * std::pow(100.0, u(rng));
        const auto s =
            forward_sweep(lk0, istar, 2e-9, 0.1e-12, 1e-3, {-70, -66, -62, -58, -54, -50});
        const auto r = extract_istar(s);
        EXPECT_NEAR(r.i_star_a, istar, 1e-6 * istar) << "trial " << trial;
        EXPECT_NEAR(r.lk0_h, lk0, 1e-6 * lk0) << "trial " << trial;
    }
}

TEST(NonlinearityFigure, Values) {
    EXPECT_DOUBLE_EQ(nonlinearity_figure(0.25e-3, 1e-3), 0.25);
    EXPECT_DOUBLE_EQ(nonlinearity_figure(0.34e-3, 1e-3), 0.34);
    EXPECT_EQ(nonlinearity_figure(0.0, 1e-3), 0.0);
    EXPECT_EQ(code_of([] { nonlinearity_figure(1e-3, 0.0); }), ErrorCode::NonPositiveIStar);
}
