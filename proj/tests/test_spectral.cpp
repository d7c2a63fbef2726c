#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "eprlab/spectral.hpp"
#include "eprlab/states.hpp"

using namespace eprlab;
using namespace eprlab::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

// Separable Gaussian test amplitude with a known transform under the
// exp(-2 pi i x p / h) / sqrt(h) convention:
//   psi(x) = (2 pi s^2)^(-1/4) exp(-(x - m)^2 / (4 s^2))
//   phi(p) = sqrt(4 pi s^2 / h) (2 pi s^2)^(-1/4) exp(-(2 pi s p / h)^2) exp(-2 pi i m p / h)
complex gauss_x(double x, double m, double s)
{
    return std::pow(2.0 * kPi * s * s, -0.25) * std::exp(-(x - m) * (x - m) / (4.0 * s * s));
}

complex gauss_p(double p, double m, double s, double h)
{
    const double k = 2.0 * kPi * s * p / h;
    return std::sqrt(4.0 * kPi * s * s / h) * std::pow(2.0 * kPi * s * s, -0.25) *
           std::exp(-k * k) * std::polar(1.0, -2.0 * kPi * m * p / h);
}

}  // namespace

TEST(Spectral, RejectsNonPowerOfTwo)
{
    const GridSpec spec{AxisSpec{0.0, 10.0, 100}, AxisSpec{0.0, 10.0, 128}};
    EXPECT_THROW(sample([](double, double) { return complex(1.0); }, spec, 1.0), ResolutionError);
}

TEST(Spectral, ResolutionAndRangeValidation)
{
    const State s = State::create(1.0, 0.1, 0.0);
    try {
        validate_position_spec(s, GridSpec{AxisSpec{0.0, 32.0, 64}, AxisSpec{0.0, 32.0, 64}});
        FAIL() << "expected ResolutionError";
    } catch (const ResolutionError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("resolution:", 0), 0u);
    }
    try {
        validate_position_spec(s, GridSpec{AxisSpec{0.0, 8.0, 512}, AxisSpec{0.0, 8.0, 512}});
        FAIL() << "expected ResolutionError";
    } catch (const ResolutionError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("range:", 0), 0u);
    }
}

TEST(Spectral, FeasibleSpecPicksSmallestGrid)
{
    const GridSpec g = feasible_spec(State::create(1.0, 0.05, 2.0));
    EXPECT_EQ(g.axis1.n, 4096u);
    EXPECT_EQ(g.axis1.center, -1.0);
    EXPECT_EQ(g.axis2.center, 1.0);
    EXPECT_EQ(feasible_spec(State::create(1.0, 0.5, 0.0)).axis1.n, 256u);
    EXPECT_THROW(feasible_spec(State::create(1.0, 1e-3, 0.0)), ResolutionError);
}

TEST(Spectral, SeparableGaussianMatchesAnalyticTransform)
{
    const double h = 2.0 * kPi;
    const double m1 = 0.7;
    const double m2 = -1.3;
    const double s = 0.8;
    const GridSpec spec{AxisSpec{0.5, 24.0, 256}, AxisSpec{-1.0, 24.0, 256}};
    const SampledGrid2D pos = sample(
        [&](double a, double b) { return gauss_x(a, m1, s) * gauss_x(b, m2, s); }, spec, h);
    const SampledGrid2D mom = dft_2d(pos);
    const double err = relative_l2_error(
        mom, [&](double p, double q) { return gauss_p(p, m1, s, h) * gauss_p(q, m2, s, h); });
    EXPECT_LT(err, 1e-12);
}

TEST(Spectral, InverseRoundTrip)
{
    const double h = 3.0;
    const GridSpec spec{AxisSpec{0.2, 20.0, 128}, AxisSpec{0.0, 16.0, 64}};
    const SampledGrid2D pos = sample(
        [](double a, double b) {
            return gauss_x(a, 0.0, 1.0) * gauss_x(b, 0.5, 0.9) * std::polar(1.0, 0.3 * a - b);
        },
        spec, h);
    const SampledGrid2D back = idft_2d(dft_2d(pos));
    EXPECT_LT(relative_l2_error(back, pos), 1e-13);
    EXPECT_THROW(idft_2d(pos), MismatchedGrid);
    EXPECT_THROW(dft_2d(dft_2d(pos)), MismatchedGrid);
}

TEST(Spectral, ParsevalOnStateGrid)
{
    const State s = State::create(1.0, 0.25, 1.0);
    const SampledGrid2D pos = sample_position(s, feasible_spec(s));
    const SampledGrid2D mom = dft_2d(pos);
    const ParsevalResult r = parseval_check(pos, mom);
    EXPECT_TRUE(r.passes);
    EXPECT_NEAR(r.position_norm, 1.0, 1e-10);
    EXPECT_NEAR(r.ratio, 1.0, 1e-12);
}

TEST(Spectral, ParsevalRejectsUnrelatedGrids)
{
    const State s = State::create(1.0, 0.25, 0.0);
    const SampledGrid2D pos = sample_position(s, feasible_spec(s));
    const SampledGrid2D other =
        sample_position(s, GridSpec{AxisSpec{0.0, 40.0, 1024}, AxisSpec{0.0, 40.0, 1024}});
    EXPECT_THROW(parseval_check(pos, dft_2d(other)), MismatchedGrid);
    EXPECT_THROW(parseval_check(dft_2d(pos), pos), MismatchedGrid);
}

TEST(Spectral, StateTransformMatchesClosedForm)
{
    for (double x0 : {0.0, 1.5}) {
        const State s = State::create(1.0, 0.2, x0);
        const SampledGrid2D mom = dft_2d(sample_position(s, feasible_spec(s)));
        const double err = relative_l2_error(
            mom, [&s](double p1, double p2) { return momentum_amplitude(s, p1, p2); });
        EXPECT_LT(err, 1e-10) << "x0 = " << x0;
    }
}

TEST(Spectral, CgsStateTransformMatchesClosedForm)
{
    const State s = State::create(1.0, 0.2, 0.5, PlanckConvention::cgs());
    const SampledGrid2D mom = dft_2d(sample_position(s, feasible_spec(s)));
    EXPECT_LT(relative_l2_error(mom, [&s](double p1, double p2) { return momentum_amplitude(s, p1, p2); }),
              1e-10);
}

TEST(Spectral, PhaseSlopeAlongAntiDiagonal)
{
    const State s = State::create(1.0, 0.2, 2.0);
    const SampledGrid2D mom = dft_2d(sample_position(s, feasible_spec(s)));
    const double slope = 2.0 * kPi * s.x0() / s.convention().h();
    const PhaseSlope p = phase_slope_along_antidiagonal(mom, slope);
    EXPECT_GT(p.samples, 10u);
    // The uncorrected slope is off by the ridge offset, eps^2 / (8 sx^2 + eps^2)
    // of the increment.
    const double shift = 0.04 / 8.04;
    EXPECT_NEAR(p.max_deviation, shift * p.expected_per_sample, 1e-6);
    const PhaseSlope q = phase_slope_along_antidiagonal(mom, slope * (1.0 - shift));
    EXPECT_LT(q.max_deviation, 1e-8);
    EXPECT_NEAR(p.expected_per_sample, slope * mom.axis1().step, 0.0);
}

TEST(Spectral, TruncationZeroesOuterSamples)
{
    const GridSpec spec{AxisSpec{0.0, 8.0, 8}, AxisSpec{0.0, 8.0, 8}};
    const SampledGrid2D g = sample([](double, double) { return complex(1.0); }, spec, 1.0);
    const SampledGrid2D t = g.truncated(0.5);
    EXPECT_EQ(t.at(0, 4), complex(0.0));
    EXPECT_EQ(t.at(4, 4), complex(1.0));
    EXPECT_LT(t.discrete_norm(), g.discrete_norm());
}

TEST(Spectral, Deterministic)
{
    const State s = State::create(1.0, 0.25, 1.0);
    const SampledGrid2D a = dft_2d(sample_position(s, feasible_spec(s)));
    const SampledGrid2D b = dft_2d(sample_position(s, feasible_spec(s)));
    EXPECT_EQ(a.values(), b.values());
}
