#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "eprlab/experiments.hpp"
#include "oracles.hpp"

using namespace eprlab;
using namespace eprlab::experiments;

TEST(PowerLawTail, RecoversExactPowerLaw)
{
    const std::vector<double> x = {1.0, 10.0, 100.0, 1000.0};
    std::vector<double> v;
    for (double t : x) v.push_back(3.0 * std::pow(t, -1.0));
    const PowerLawTail t = power_law_tail(x, v);
    EXPECT_NEAR(t.exponent, -1.0, 1e-14);
    EXPECT_NEAR(t.limit, 0.0, 1e-15);
}

TEST(PowerLawTail, UsesOnlyTheLastPoints)
{
    // The first point is off the law; the fit over the last three ignores it.
    const std::vector<double> x = {2.0, 4.0, 8.0, 16.0, 32.0};
    std::vector<double> v = {100.0};
    for (std::size_t i = 1; i < x.size(); ++i) v.push_back(5.0 * std::pow(x[i], -2.5));
    const PowerLawTail t = power_law_tail(x, v);
    EXPECT_NEAR(t.exponent, -2.5, 1e-13);
    EXPECT_NEAR(t.limit, 0.0, 1e-15);
}

TEST(PowerLawTail, Validation)
{
    EXPECT_THROW(power_law_tail({1.0, 2.0}, {1.0, 2.0}), DomainError);
    EXPECT_THROW(power_law_tail({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}), DomainError);
    EXPECT_THROW(power_law_tail({1.0, 2.0, 3.0}, {1.0, 2.0}), DomainError);
}

TEST(PositionLimitStudy, RatiosFollowWindowOverCutoff)
{
    const State s = State::create(1e6, 1e-3, 0.0);
    const LimitStudy st =
        eq6_limit_study(s, quad::Interval(0.0, 1.0), {10.0, 100.0, 1000.0, 10000.0});
    ASSERT_EQ(st.values.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(st.expected[i], 1.0 / (2.0 * st.grid[i]));
    }
    EXPECT_LT(st.max_relative_error(), 0.01);
    EXPECT_NEAR(st.exponent, -1.0, 0.05);
    EXPECT_LT(std::abs(st.extrapolated_limit), 1e-4);
    EXPECT_EQ(st.parameter, "L");
}

TEST(PositionLimitStudy, OffCenterWindowAndOffset)
{
    const State s = State::create(1e7, 1e-2, 3.0);
    const LimitStudy st =
        eq6_limit_study(s, quad::Interval(-2.0, 3.0), {5.0, 50.0, 500.0, 5000.0, 50000.0});
    EXPECT_LT(st.max_relative_error(), 0.01);
    EXPECT_NEAR(st.exponent, -1.0, 0.05);
}

TEST(PositionLimitStudy, Preconditions)
{
    const State narrow = State::create(1e3, 1e-3, 0.0);
    const std::vector<double> grid = {10.0, 100.0, 1000.0, 10000.0};
    EXPECT_THROW(eq6_limit_study(narrow, quad::Interval(0.0, 1.0), grid), PreconditionError);
    const State wide = State::create(1e6, 1e-3, 0.0);
    EXPECT_THROW(eq6_limit_study(wide, quad::Interval(0.0, 20.0), grid), PreconditionError);
    EXPECT_THROW(eq6_limit_study(wide, quad::Interval(0.0, 1.0), {10.0, 100.0}), PreconditionError);
    EXPECT_THROW(eq6_limit_study(wide, quad::Interval(0.0, 1.0), {10.0, 100.0, 50.0, 1000.0}),
                 PreconditionError);
}

TEST(MomentumLimitStudy, RatiosFollowWindowOverCutoff)
{
    const State s = State::create(1.0, 1e-6, 0.0);
    const LimitStudy st =
        eq8_limit_study(s, quad::Interval(0.0, 0.1), {10.0, 100.0, 1000.0, 10000.0});
    EXPECT_LT(st.max_relative_error(), 0.01);
    EXPECT_NEAR(st.exponent, -1.0, 0.05);
    EXPECT_LT(std::abs(st.extrapolated_limit), 1e-4);
    EXPECT_EQ(st.parameter, "p");
}

TEST(MomentumLimitStudy, FlatDirectionPrecondition)
{
    const State s = State::create(1.0, 1e-3, 0.0);
    EXPECT_THROW(eq8_limit_study(s, quad::Interval(0.0, 0.1), {10.0, 100.0, 1000.0, 10000.0}),
                 PreconditionError);
}

TEST(PrintedDensityAudit, DiscrepancyFactor)
{
    for (double sx : {0.5, 1.0, 3.0}) {
        for (double x0 : {0.0, 1.0, 2.0, -4.0}) {
            const Eq13Audit a = eq13_audit(sx, x0);
            EXPECT_NEAR(a.printed_integral, oracle::printed_integral(sx, x0), 1e-6);
            EXPECT_NEAR(a.normalized_integral, 1.0, 1e-8);
            EXPECT_NEAR(a.discrepancy_factor, oracle::printed_integral(sx, x0), 1e-6);
        }
    }
    const Eq13Audit zero = eq13_audit(1.0, 0.0);
    EXPECT_NEAR(zero.printed_integral, oracle::kPrintedIntegralX0Zero, 1e-10);
    const Eq13Audit two = eq13_audit(1.0, 2.0);
    EXPECT_NEAR(two.printed_integral, oracle::kPrintedIntegralX0Two, 1e-10);
    // The printed shape equals the marginal up to the constant factor.
    EXPECT_NEAR(two.max_pointwise_ratio / two.min_pointwise_ratio, 1.0, 1e-5);
}

TEST(ConditionalPrediction, MatchesFrozenValues)
{
    const State s = State::create(1.0, 0.01, 5.0);
    const ConditionalPrediction c = conditional_prediction(s, 0.0, 0.1, 3.0);
    EXPECT_DOUBLE_EQ(c.predicted_center, 5.0);
    EXPECT_NEAR(c.predicted_width, 0.16, 1e-15);
    EXPECT_NEAR(c.measurement_probability / oracle::kMeasurementProb[0], 1.0, 1e-9);
    EXPECT_NEAR(c.capture_probability, oracle::kCaptureK3, 1e-9);
    EXPECT_GE(c.capture_probability, 0.997);
}

TEST(ConditionalPrediction, MeasurementProbabilityVanishes)
{
    const State s = State::create(1.0, 0.01, 5.0);
    double previous = 1.0;
    int i = 0;
    for (double w : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const ConditionalPrediction c = conditional_prediction(s, 0.0, w, 3.0);
        EXPECT_LT(c.measurement_probability, previous);
        EXPECT_NEAR(c.measurement_probability / oracle::kMeasurementProb[i], 1.0, 1e-9);
        EXPECT_GE(c.capture_probability, 0.997);
        previous = c.measurement_probability;
        ++i;
    }
    const ConditionalPrediction point = conditional_prediction(s, 0.0, 0.0, 3.0);
    EXPECT_EQ(point.measurement_probability, 0.0);
    EXPECT_GE(point.capture_probability, 0.997);
}

TEST(ConditionalPrediction, CaptureIsMonotoneInK)
{
    const State s = State::create(2.0, 0.05, -1.0);
    double previous = 0.0;
    for (double k : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0}) {
        const ConditionalPrediction c = conditional_prediction(s, 0.3, 0.02, k);
        EXPECT_GE(c.capture_probability, previous - 1e-12) << "k = " << k;
        previous = c.capture_probability;
    }
}

TEST(ConditionalPrediction, Validation)
{
    const State s = State::create(1.0, 0.01, 0.0);
    EXPECT_THROW(conditional_prediction(s, 0.0, -1.0), DomainError);
    EXPECT_THROW(conditional_prediction(s, 0.0, 0.1, 0.0), DomainError);
}

TEST(Uncertainty, MeasuredProductRespectsFloorOnGrid)
{
    for (double sx : {0.5, 1.0, 5.0}) {
        for (double f : {1e-3, 1e-2, 1e-1}) {
            for (double x0 : {0.0, 1.0, 5.0}) {
                const State s = State::create(sx, f * sx, x0);
                const UncertaintyReport u = measured_uncertainty(s);
                EXPECT_GE(u.product, 0.5 - 1e-9);
                EXPECT_NEAR(u.dx * u.dx, oracle::marginal_variance(sx, f * sx), 1e-10 * u.dx * u.dx);
                EXPECT_NEAR(u.dp * u.dp, oracle::momentum_variance(sx, f * sx, 2.0 * std::numbers::pi),
                            1e-9 * u.dp * u.dp);
                EXPECT_EQ(u.provenance, Provenance::measured_moments);
            }
        }
    }
}

TEST(Uncertainty, CgsBoundScalesWithHbar)
{
    const State s = State::create(1.0, 0.01, 0.0, PlanckConvention::cgs());
    const UncertaintyReport u = measured_uncertainty(s);
    EXPECT_DOUBLE_EQ(u.bound, 0.5 * 6.62607e-27 / (2.0 * std::numbers::pi));
    EXPECT_GE(u.ratio, 1.0 - 1e-9);
}

TEST(Uncertainty, KnowledgeProductCanBeBelowBound)
{
    const State s = State::create(1e3, 1e-3, 0.0);
    const UncertaintyReport k = knowledge_product(s, 1e-2);
    EXPECT_EQ(k.provenance, Provenance::inferred_from_preparation);
    EXPECT_TRUE(k.below_bound());
    EXPECT_NEAR(k.dx, 0.5e-2 + 3e-3, 1e-17);
    EXPECT_THROW(knowledge_product(s, 0.0), DomainError);
}

TEST(Positronium, QuotedNumbers)
{
    const PositroniumReport p = positronium_example(PositroniumInputs{});
    EXPECT_NEAR(p.dx_bound, oracle::kPositroniumDx, 1e-12);
    EXPECT_NEAR(p.dx_bound / 3.75, 1.0, 0.005);
    EXPECT_NEAR(p.advantage / oracle::kPositroniumAdvantage, 1.0, 1e-6);
    EXPECT_EQ(p.quoted_dx_bound, 3.75);
    EXPECT_EQ(p.quoted_advantage, 40.0);
}

TEST(Positronium, LinearInTauAndUnitInvariant)
{
    PositroniumInputs in;
    const PositroniumReport base = positronium_example(in);
    in.tau *= 2.0;
    EXPECT_NEAR(positronium_example(in).dx_bound / base.dx_bound, 2.0, 1e-15);

    // cm -> m: c in m/s, h in J s, resolution in m.
    PositroniumInputs si;
    si.c = 2.9979e8;
    si.h = 6.62607e-34;
    si.resolution = 1e-3;
    const PositroniumReport m = positronium_example(si);
    EXPECT_NEAR(m.dx_bound * 100.0, base.dx_bound, 1e-12);
    EXPECT_NEAR(m.advantage, base.advantage, 1e-9);
    EXPECT_NEAR(m.dp * 1e5, base.dp, 1e-12 * base.dp);
}

TEST(Positronium, Validation)
{
    PositroniumInputs in;
    in.tau = 0.0;
    EXPECT_THROW(positronium_example(in), DomainError);
}
