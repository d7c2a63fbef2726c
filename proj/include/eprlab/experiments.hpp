#pragma once

// Scenario layer: limit sweeps of the vanishing interval probabilities, the
// printed measured-interval density audit, conditional prediction, uncertainty
// products (measured vs inferred from preparation) and the positronium
// counterexample.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eprlab/errors.hpp"
#include "eprlab/quadrature.hpp"
#include "eprlab/states.hpp"

namespace eprlab::experiments {

using quad::Interval;

struct PowerLawTail {
    double exponent;
    double limit;
};

/// Log-log least-squares slope over the last `points` samples, and the limit
/// c of v = c + a x^exponent fitted through the last two samples with the
/// exponent held fixed.
inline PowerLawTail power_law_tail(const std::vector<double>& x, const std::vector<double>& v,
                                   std::size_t points = 3)
{
    if (x.size() != v.size() || x.size() < std::max<std::size_t>(points, 2) || points < 2) {
        throw DomainError("power-law fit needs matching grids with enough points");
    }
    const std::size_t first = x.size() - points;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = first; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(v[i] > 0.0)) {
            throw DomainError("power-law fit needs positive samples");
        }
        mx += std::log(x[i]);
        my += std::log(v[i]);
    }
    mx /= static_cast<double>(points);
    my /= static_cast<double>(points);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = first; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(v[i]) - my);
        sxx += dx * dx;
    }
    const double b = sxy / sxx;

    const std::size_t n = x.size();
    const double t2 = std::pow(x[n - 2], b);
    const double t3 = std::pow(x[n - 1], b);
    double limit = v[n - 1];
    if (t2 != t3) {
        const double a = (v[n - 2] - v[n - 1]) / (t2 - t3);
        limit = v[n - 1] - a * t3;
    }
    return PowerLawTail{b, limit};
}

struct LimitStudy {
    std::string parameter;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> expected;  // (b - a) / (2 cutoff)
    double exponent = 0.0;
    double extrapolated_limit = 0.0;

    double max_relative_error() const
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            worst = std::max(worst, std::abs(values[i] / expected[i] - 1.0));
        }
        return worst;
    }
};

namespace detail {

inline void validate_grid(const std::vector<double>& grid, std::string_view name)
{
    if (grid.size() < 4) {
        throw PreconditionError(std::string(name) + " grid needs at least 4 points");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || !(grid[i] > 0.0)) {
            throw PreconditionError(std::string(name) + " grid values must be positive and finite");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw PreconditionError(std::string(name) + " grid must be strictly increasing");
        }
    }
}

template <class Density>
LimitStudy windowed_sweep(std::string parameter, Density&& density, const Interval& window,
                          const std::vector<double>& grid)
{
    LimitStudy study;
    study.parameter = std::move(parameter);
    study.grid = grid;
    for (double cutoff : grid) {
        study.values.push_back(quad::windowed_ratio(density, window, cutoff));
        study.expected.push_back(window.width() / (2.0 * cutoff));
    }
    const PowerLawTail tail = power_law_tail(study.grid, study.values);
    study.exponent = tail.exponent;
    study.extrapolated_limit = tail.limit;
    return study;
}

}  // namespace detail

/// Position-window probability relative to the cutoff [-L, L] for each L.
/// Requires window inside [-L_min, L_min] and sigma_x >= 100 L_max.
inline LimitStudy eq6_limit_study(const State& state, const Interval& window,
                                  const std::vector<double>& cutoffs)
{
    detail::validate_grid(cutoffs, "L");
    if (!Interval(-cutoffs.front(), cutoffs.front()).contains(window)) {
        throw PreconditionError("window must lie inside [-L_min, L_min]");
    }
    if (state.sigma_x() < 100.0 * cutoffs.back()) {
        std::ostringstream os;
        os << "sigma_x = " << state.sigma_x() << " must be at least 100 L_max = "
           << 100.0 * cutoffs.back();
        throw PreconditionError(os.str());
    }
    return detail::windowed_sweep(
        "L", [&state](double x1) { return marginal_position_density(state, x1); }, window,
        cutoffs);
}

/// Momentum analogue over p1. Requires hbar/epsilon >= 100 p_max so that the
/// regularized momentum marginal is flat across every cutoff.
inline LimitStudy eq8_limit_study(const State& state, const Interval& window,
                                  const std::vector<double>& cutoffs)
{
    detail::validate_grid(cutoffs, "p");
    if (!Interval(-cutoffs.front(), cutoffs.front()).contains(window)) {
        throw PreconditionError("window must lie inside [-p_min, p_min]");
    }
    const double flat_width = state.convention().hbar() / state.epsilon();
    if (flat_width < 100.0 * cutoffs.back()) {
        std::ostringstream os;
        os << "hbar/epsilon = " << flat_width << " must be at least 100 p_max = "
           << 100.0 * cutoffs.back() << "; reduce epsilon";
        throw PreconditionError(os.str());
    }
    return detail::windowed_sweep(
        "p", [&state](double p1) { return marginal_momentum_density(state, p1); }, window,
        cutoffs);
}

struct Eq13Audit {
    double printed_integral;
    double expected_printed_integral;  // sqrt(2) exp(-x0^2 / (8 sx^2))
    double normalized_integral;
    double discrepancy_factor;       // printed_integral / normalized_integral
    double max_pointwise_ratio;      // printed density / marginal, over center +- 5 sd
    double min_pointwise_ratio;
};

inline Eq13Audit eq13_audit(double sigma_x, double x0, double epsilon_fraction = 1e-3)
{
    const State state = State::create(sigma_x, epsilon_fraction * sigma_x, x0);
    quad::Options opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = 1e-13;

    const double center = -0.5 * x0;
    const double printed_peak = paper_eq13_density(center, sigma_x, x0);
    const double printed = quad::integrate_envelope(
                             [&](double x1) { return paper_eq13_density(x1, sigma_x, x0); },
                             quad::Envelope{center, sigma_x, printed_peak}, opts)
                             .value;

    const State::Marginal m = state.position_marginal();
    const double normalized =
        quad::integrate_envelope([&](double x1) { return marginal_position_density(state, x1); },
                                 quad::Envelope{m.mean, m.sd(), std::exp(m.log_peak)}, opts)
            .value;

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int i = -50; i <= 50; ++i) {
        const double x1 = center + 0.1 * i * sigma_x;
        const double r = paper_eq13_density(x1, sigma_x, x0) / marginal_position_density(state, x1);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return Eq13Audit{printed,
                     std::numbers::sqrt2 * std::exp(-x0 * x0 / (8.0 * sigma_x * sigma_x)),
                     normalized,
                     printed / normalized,
                     hi,
                     lo};
}

struct ConditionalPrediction {
    double measured_center;
    double measured_width;
    double predicted_center;  // measured_center + x0
    double predicted_width;   // measured_width + 2 k epsilon
    double k;
    double capture_probability;
    double measurement_probability;
};

/// Measures x1 in [c - w/2, c + w/2] and predicts x2 in the window around
/// c + x0 widened by k epsilon on each side. The capture probability is
/// P(x2 in predicted | x1 in measured); for w = 0 it is the conditional
/// probability at x1 = c.
inline ConditionalPrediction conditional_prediction(const State& state, double center,
                                                    double width, double k = 3.0)
{
    if (!(width >= 0.0) || !std::isfinite(width) || !std::isfinite(center)) {
        throw DomainError("measurement width must be non-negative and finite");
    }
    if (!(k > 0.0)) {
        throw DomainError("k must be positive");
    }
    ConditionalPrediction out{};
    out.measured_center = center;
    out.measured_width = width;
    out.predicted_center = center + state.x0();
    out.predicted_width = width + 2.0 * k * state.epsilon();
    out.k = k;

    const Interval predicted(out.predicted_center - 0.5 * out.predicted_width,
                             out.predicted_center + 0.5 * out.predicted_width);
    const double eps = state.epsilon();

    auto captured = [&](double x1) {
        quad::Options o;
        o.abs_tol = 1e-15 * marginal_position_density(state, x1) + 1e-300;
        o.initial_panels = 2;
        const double ridge = x1 + state.x0();
        o.breakpoints = {ridge - eps, ridge, ridge + eps};
        return quad::integrate_1d([&](double x2) { return position_density(state, x1, x2); },
                                  predicted, o)
            .value;
    };

    if (width == 0.0) {
        out.measurement_probability = 0.0;
        out.capture_probability =
            std::clamp(captured(center) / marginal_position_density(state, center), 0.0, 1.0);
        return out;
    }

    const Interval measured(center - 0.5 * width, center + 0.5 * width);
    quad::Options o;
    o.abs_tol = 0.0;
    o.rel_tol = 1e-12;
    out.measurement_probability =
        quad::integrate_1d([&](double x1) { return marginal_position_density(state, x1); },
                           measured, o)
            .value;
    const double joint = quad::integrate_1d(captured, measured, o).value;
    out.capture_probability = std::clamp(joint / out.measurement_probability, 0.0, 1.0);
    return out;
}

enum class Provenance { measured_moments, inferred_from_preparation };

inline std::string_view to_string(Provenance p)
{
    return p == Provenance::measured_moments ? "measured-moments" : "inferred-from-preparation";
}

struct UncertaintyReport {
    double dx;
    double dp;
    double product;
    double bound;
    double ratio;  // product / bound
    Provenance provenance;
    std::string bound_convention;
    std::string note;

    bool below_bound() const { return product < bound; }
};

/// Standard deviations of x1 and p1 from quadrature moments of the two
/// marginals, against hbar/2.
inline UncertaintyReport measured_uncertainty(const State& state)
{
    const State::Marginal m = state.position_marginal();
    const double w = quad::kDefaultEnvelopeWidths;
    const quad::Moments mx = quad::moments(
        [&](double x1) { return marginal_position_density(state, x1); },
        Interval(m.mean - w * m.sd(), m.mean + w * m.sd()), 1e-13, {m.mean});
    const double p_sd = state.momentum_marginal_sd();
    const quad::Moments mp = quad::moments(
        [&](double p1) { return marginal_momentum_density(state, p1); },
        Interval(-w * p_sd, w * p_sd), 1e-13, {0.0});
    const double dx = std::sqrt(mx.variance);
    const double dp = std::sqrt(mp.variance);
    const double bound = 0.5 * state.convention().hbar();
    return UncertaintyReport{dx,
                             dp,
                             dx * dp,
                             bound,
                             dx * dp / bound,
                             Provenance::measured_moments,
                             "hbar/2 (standard deviations)",
                             "moments of the x1 and p1 marginals of the state"};
}

/// Uncertainties about particle 2 inferred from a width-dx1 measurement of
/// x1 plus knowledge of how the state was prepared:
///   dx2 = dx1/2 + 3 eps,  dp2 = sigma_p sqrt(1 + (eps/sigma_x)^2).
/// No measurement back-action term is added.
inline UncertaintyReport knowledge_product(const State& state, double dx1)
{
    if (!(dx1 > 0.0) || !std::isfinite(dx1)) {
        throw DomainError("measurement width must be positive");
    }
    const double dx = 0.5 * dx1 + 3.0 * state.epsilon();
    const double r = state.epsilon() / state.sigma_x();
    const double dp = sigma_p_of(state) * std::sqrt(1.0 + r * r);
    const double bound = 0.5 * state.convention().hbar();
    return UncertaintyReport{dx,
                             dp,
                             dx * dp,
                             bound,
                             dx * dp / bound,
                             Provenance::inferred_from_preparation,
                             "hbar/2 (standard deviations)",
                             "widths dx1/2 + 3 eps and sigma_p sqrt(1 + (eps/sigma_x)^2) are one "
                             "operationalization of preparation knowledge"};
}

struct PositroniumInputs {
    double tau = 1.25e-10;       // s
    double c = 2.9979e10;        // cm/s
    double h = 6.62607e-27;      // erg s
    double resolution = 0.1;     // cm
};

struct PositroniumReport {
    double dp;          // h / (c tau)
    double dx_bound;    // h / dp = c tau, from dx dp >~ h
    double resolution;
    double advantage;   // dx_bound / resolution
    double quoted_dx_bound = 3.75;
    double quoted_advantage = 40.0;
    UncertaintyReport knowledge;
};

inline PositroniumReport positronium_example(const PositroniumInputs& in)
{
    for (double v : {in.tau, in.c, in.h, in.resolution}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("positronium inputs must be positive and finite");
        }
    }
    const double dp = in.h / (in.c * in.tau);
    const double dx_bound = in.h / dp;
    const double product = in.resolution * dp;
    PositroniumReport out{dp, dx_bound, in.resolution, dx_bound / in.resolution, 3.75, 40.0,
                          UncertaintyReport{in.resolution, dp, product, in.h, product / in.h,
                                            Provenance::inferred_from_preparation,
                                            "h (order-of-magnitude dx dp >~ h)",
                                            "photon momentum spread from the decay lifetime, "
                                            "position from a recoil-electron measurement"}};
    return out;
}

}  // namespace eprlab::experiments
