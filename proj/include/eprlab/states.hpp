#pragma once

// Regularized correlated two-particle Gaussian states.
//
// Position amplitude
//
//   psi(x1, x2) = N exp((x0^2 - 2 x1^2 - 2 x2^2) / (16 sx^2)) g_eps(x1 - x2 + x0)
//
// with g_eps the unit-integral Gaussian of standard deviation eps. As eps -> 0
// the kernel becomes delta(x1 - x2 + x0); as sx -> infinity the envelope
// flattens to the original EPR state.
//
// Internally everything is written in the rotated coordinates
// s = x1 + x2 and u = x1 - x2 + x0, where the exponent separates:
//
//   (x0^2 - 2 x1^2 - 2 x2^2) = -(s^2 + u^2 - 2 u x0).
//
// Momentum amplitudes use the analysis kernel exp(-2 pi i x.p / h) with a
// 1/sqrt(h) factor per axis, so that psi(x) = h^-1 Int phi(p) exp(+2 pi i x.p/h)
// reproduces the superposition form of the EPR state and the transform is
// unitary.

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string_view>

#include "eprlab/errors.hpp"
#include "eprlab/quadrature.hpp"

namespace eprlab {

class PlanckConvention {
public:
    enum class Mode { natural, cgs };

    /// h = 2 pi, so hbar = 1.
    static PlanckConvention natural() { return PlanckConvention(Mode::natural, 2.0 * std::numbers::pi); }
    /// h in erg s.
    static PlanckConvention cgs() { return PlanckConvention(Mode::cgs, 6.62607e-27); }

    Mode mode() const { return mode_; }
    std::string_view name() const { return mode_ == Mode::natural ? "natural" : "cgs"; }
    double h() const { return h_; }
    double hbar() const { return h_ / (2.0 * std::numbers::pi); }

    friend bool operator==(const PlanckConvention&, const PlanckConvention&) = default;

private:
    PlanckConvention(Mode mode, double h) : mode_(mode), h_(h) {}

    Mode mode_;
    double h_;
};

/// Closed-form parameters of the momentum-space amplitude in the
/// coordinates P = p1 + p2 and D = p1 - p2:
///
///   phi = exp(log_peak - P^2/(4 sum_sd^2) - D^2/(4 diff_sd^2)) exp(i phase_per_diff D)
///
/// sum_sd and diff_sd are standard deviations of the density |phi|^2.
struct MomentumDual {
    double log_peak;
    double sum_sd;
    double diff_sd;
    double phase_per_diff;
};

class CorrelatedGaussianState {
public:
    static CorrelatedGaussianState create(double sigma_x, double epsilon, double x0,
                                          PlanckConvention convention = PlanckConvention::natural())
    {
        if (!std::isfinite(sigma_x) || !(sigma_x > 0.0)) {
            throw DomainError("sigma_x must be positive and finite");
        }
        if (!std::isfinite(epsilon) || !(epsilon > 0.0)) {
            throw DomainError("epsilon must be positive and finite");
        }
        if (!(epsilon <= sigma_x)) {
            throw DomainError("epsilon must not exceed sigma_x");
        }
        if (!std::isfinite(x0)) {
            throw DomainError("x0 must be finite");
        }
        return CorrelatedGaussianState(sigma_x, epsilon, x0, convention);
    }

    double sigma_x() const { return sigma_x_; }
    double epsilon() const { return epsilon_; }
    double x0() const { return x0_; }
    const PlanckConvention& convention() const { return convention_; }
    double norm_const() const { return std::exp(log_norm_); }
    double log_norm_const() const { return log_norm_; }

    /// False once the regularization is wider than a tenth of the envelope.
    bool regularization_is_minimal() const { return epsilon_ <= sigma_x_ / 10.0; }

    /// The joint density peaks at (x1, x2) = (-x0/2, x0/2).
    double center_x1() const { return -0.5 * x0_; }
    double center_x2() const { return 0.5 * x0_; }

    double log_amplitude(double x1, double x2) const
    {
        const double s = x1 + x2;
        const double u = (x1 - x2) + x0_;
        const double sx2 = sigma_x_ * sigma_x_;
        return log_norm_ - (s * s + u * u - 2.0 * u * x0_) / (16.0 * sx2) -
               u * u / (2.0 * epsilon_ * epsilon_) - log_kernel_peak();
    }

    MomentumDual momentum_dual() const
    {
        const double h = convention_.h();
        const double pi = std::numbers::pi;
        const double sx2 = sigma_x_ * sigma_x_;
        const double a = 1.0 / (16.0 * sx2) + 1.0 / (2.0 * epsilon_ * epsilon_);
        const double b = x0_ / (8.0 * sx2);
        const double log_peak = log_norm_ - std::log(2.0 * h) + std::log(4.0 * sigma_x_ * std::sqrt(pi)) -
                                log_kernel_peak() + 0.5 * std::log(pi / a) + b * b / (4.0 * a);
        return MomentumDual{log_peak, h / (4.0 * pi * sigma_x_), std::sqrt(a) * h / pi,
                            pi * (x0_ - b / (2.0 * a)) / h};
    }

    /// Gaussian parameters of the x1 marginal: exp(log_peak - q (x1 - mean)^2).
    struct Marginal {
        double log_peak;
        double mean;
        double q;
        double sd() const { return 1.0 / std::sqrt(2.0 * q); }
    };

    Marginal position_marginal() const
    {
        const double sx2 = sigma_x_ * sigma_x_;
        const double e2 = epsilon_ * epsilon_;
        const double kappa = 4.0 * sx2 + e2;
        const double alpha = 1.0 / (4.0 * sx2) + 1.0 / e2;
        const double q = 1.0 / (4.0 * sx2) + 1.0 / kappa;
        const double mean = -x0_ * 4.0 * sx2 / (kappa + 4.0 * sx2);
        const double at_mean = x0_ * x0_ * e2 / (8.0 * sx2 * (8.0 * sx2 + e2));
        const double log_peak = 2.0 * log_norm_ - std::log(2.0 * std::numbers::pi * e2) +
                                0.5 * std::log(std::numbers::pi / alpha) + at_mean;
        return Marginal{log_peak, mean, q};
    }

    /// Integrand is narrow across the line x1 - x2 + x0 = 0.
    quad::RidgeHint position_ridge() const
    {
        return quad::RidgeHint{quad::RidgeDirection::difference, x0_, epsilon_};
    }

    /// Box covering `widths` standard deviations of the x1 and x2 marginals.
    quad::Box position_box(double widths = quad::kDefaultEnvelopeWidths) const
    {
        const double r = widths * position_marginal().sd();
        return quad::Box{quad::Interval(center_x1() - r, center_x1() + r),
                         quad::Interval(center_x2() - r, center_x2() + r)};
    }

    /// Density is narrow across p1 + p2 = 0.
    quad::RidgeHint momentum_ridge() const
    {
        return quad::RidgeHint{quad::RidgeDirection::sum, 0.0, momentum_dual().sum_sd};
    }

    double momentum_marginal_sd() const
    {
        const MomentumDual d = momentum_dual();
        return 0.5 * std::hypot(d.sum_sd, d.diff_sd);
    }

    quad::Box momentum_box(double widths = quad::kDefaultEnvelopeWidths) const
    {
        const double r = widths * momentum_marginal_sd();
        return quad::Box{quad::Interval(-r, r), quad::Interval(-r, r)};
    }

private:
    CorrelatedGaussianState(double sigma_x, double epsilon, double x0, PlanckConvention convention)
        : sigma_x_(sigma_x), epsilon_(epsilon), x0_(x0), convention_(convention)
    {
        log_norm_ = -0.5 * log_unnormalized_norm();
    }

    double log_kernel_peak() const { return std::log(std::sqrt(2.0 * std::numbers::pi) * epsilon_); }

    // log of Int Int |psi/N|^2 dx1 dx2 = log(1/2 Int ds Int du ...), each factor
    // integrated numerically. The u factor is integrated relative to its peak
    // so that large x0 eps / sx^2 cannot overflow.
    double log_unnormalized_norm() const
    {
        const double sx2 = sigma_x_ * sigma_x_;
        const double e2 = epsilon_ * epsilon_;

        quad::Options opts;
        opts.abs_tol = 0.0;
        opts.rel_tol = 1e-13;

        const double s_sd = 2.0 * sigma_x_;
        const double s_integral =
            quad::integrate_envelope([&](double s) { return std::exp(-s * s / (8.0 * sx2)); },
                                     quad::Envelope{0.0, s_sd, 1.0}, opts)
                .value;

        const double a = 1.0 / (8.0 * sx2) + 1.0 / e2;
        const double b = x0_ / (4.0 * sx2);
        const double u_center = b / (2.0 * a);
        const double log_peak = b * b / (4.0 * a);
        const double u_integral =
            quad::integrate_envelope(
                [&](double u) { return std::exp(-(u * u - 2.0 * u * x0_) / (8.0 * sx2) - u * u / e2 - log_peak); },
                quad::Envelope{u_center, 1.0 / std::sqrt(2.0 * a), 1.0}, opts)
                .value;

        return std::log(0.5 * s_integral * u_integral) + log_peak -
               std::log(2.0 * std::numbers::pi * e2);
    }

    double sigma_x_;
    double epsilon_;
    double x0_;
    PlanckConvention convention_;
    double log_norm_ = 0.0;
};

using State = CorrelatedGaussianState;

/// Real-valued for this family; returned as complex for uniformity with the
/// momentum amplitude.
inline std::complex<double> position_amplitude(const State& state, double x1, double x2)
{
    return {std::exp(state.log_amplitude(x1, x2)), 0.0};
}

inline double position_density(const State& state, double x1, double x2)
{
    return std::exp(2.0 * state.log_amplitude(x1, x2));
}

inline std::complex<double> momentum_amplitude(const State& state, double p1, double p2)
{
    const MomentumDual d = state.momentum_dual();
    const double sum = p1 + p2;
    const double diff = p1 - p2;
    const double log_mod = d.log_peak - sum * sum / (4.0 * d.sum_sd * d.sum_sd) -
                           diff * diff / (4.0 * d.diff_sd * d.diff_sd);
    return std::polar(std::exp(log_mod), d.phase_per_diff * diff);
}

inline double momentum_density(const State& state, double p1, double p2)
{
    return std::norm(momentum_amplitude(state, p1, p2));
}

/// Int |psi(x1, x2)|^2 dx2, in closed form.
inline double marginal_position_density(const State& state, double x1)
{
    const State::Marginal m = state.position_marginal();
    const double d = x1 - m.mean;
    return std::exp(m.log_peak - m.q * d * d);
}

/// Int |phi(p1, p2)|^2 dp2, in closed form.
inline double marginal_momentum_density(const State& state, double p1)
{
    const MomentumDual d = state.momentum_dual();
    const double a = d.sum_sd * d.sum_sd;
    const double b = d.diff_sd * d.diff_sd;
    return std::exp(2.0 * d.log_peak - 2.0 * p1 * p1 / (a + b)) *
           std::sqrt(2.0 * std::numbers::pi * a * b / (a + b));
}

/// The x1 probability density exactly as printed alongside the measured-
/// interval argument: (1/(sqrt(pi) sx)) exp(-x0^2/8sx^2) exp(-(2x1+x0)^2/8sx^2).
/// It integrates to sqrt(2) exp(-x0^2/(8 sx^2)), not to one.
inline double paper_eq13_density(double x1, double sigma_x, double x0)
{
    if (!(sigma_x > 0.0)) {
        throw DomainError("sigma_x must be positive");
    }
    const double sx2 = sigma_x * sigma_x;
    const double w = 2.0 * x1 + x0;
    return std::exp(-x0 * x0 / (8.0 * sx2)) * std::exp(-w * w / (8.0 * sx2)) /
           (std::sqrt(std::numbers::pi) * sigma_x);
}

/// h / (4 pi sigma_x).
inline double sigma_p_of(const State& state)
{
    return state.convention().h() / (4.0 * std::numbers::pi * state.sigma_x());
}

}  // namespace eprlab
