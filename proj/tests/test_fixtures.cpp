#include <gtest/gtest.h>

#include "kitwpa/film.hpp"
#include "kitwpa/fixtures.hpp"
#include "kitwpa/resonator.hpp"

#include <cmath>

using namespace kitwpa;

TEST(Noise, SameSeedSameStream) {
    fixtures::Noise a(5), b(5), c(6);
    for (int i = 0; i < 100; ++i) {
        const double x = a.gaussian(1.0);
        EXPECT_EQ(x, b.gaussian(1.0));
        EXPECT_NE(x, c.gaussian(1.0));
    }
}

TEST(Noise, GaussianMoments) {
    fixtures::Noise n(1);
    const int count = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < count; ++i) {
        const double x = n.gaussian(2.0);
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / count, 0.0, 0.02);
    EXPECT_NEAR(std::sqrt(s2 / count), 2.0, 0.02);
    EXPECT_EQ(n.gaussian(0.0), 0.0);
}

TEST(Fixtures, TanhTransitionRecoversTc) {
    fixtures::Noise n(3);
    const auto c = fixtures::tanh_transition({}, "f", n);
    EXPECT_EQ(c.samples.size(), 401u);
    EXPECT_NEAR(film::extract_tc(c).tc_k, 13.0, 0.01);
}

// I* recovered from noisy S21 traces generated by the kinetic-inductance
// forward model, fitted trace by trace.
TEST(Fixtures, PowerSweepRoundTrip) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        fixtures::Noise n(seed);
        const fixtures::PowerSweepFixture f;
        const auto traces = fixtures::power_sweep_traces(f, n);
        resonator::PowerSweep sweep;
        sweep.beta_a2_per_w = traces.beta_a2_per_w;
        sweep.lg_h = traces.lg_h;
        sweep.c_f = traces.c_f;
        for (const auto& t : traces.traces) sweep.entries.push_back({t.probe_power_dbm, resonator::fit_resonance(t)});
        EXPECT_NEAR(resonator::extract_istar(sweep).i_star_a, 1e-3, 0.02e-3) << seed;
    }
}

TEST(Fixtures, NoiseFreePowerSweepIsExact) {
    fixtures::Noise n(1);
    fixtures::PowerSweepFixture f;
    f.sigma_db = 0.0;
    const auto traces = fixtures::power_sweep_traces(f, n);
    resonator::PowerSweep sweep;
    sweep.beta_a2_per_w = traces.beta_a2_per_w;
    sweep.lg_h = traces.lg_h;
    sweep.c_f = traces.c_f;
    for (const auto& t : traces.traces) sweep.entries.push_back({t.probe_power_dbm, resonator::fit_resonance(t)});
    EXPECT_NEAR(resonator::extract_istar(sweep).i_star_a, 1e-3, 1e-6 * 1e-3);
}
