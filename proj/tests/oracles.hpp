#pragma once

// Reference values computed independently of the library: closed-form
// Gaussian integrals written out from scratch, and constants frozen from
// 50-digit mpmath runs. Nothing here calls into eprlab.

#include <cmath>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Int Int |psi / N|^2 dx1 dx2 in closed form: the (s, u) factorization gives
/// 1/2 * [2 sx sqrt(2 pi)] * [(1 / (2 pi eps^2)) sqrt(pi/a) exp(b^2 / 4a)]
/// with a = 1/eps^2 + 1/(8 sx^2) and b = x0 / (4 sx^2).
inline double unnormalized_norm(double sx, double eps, double x0)
{
    const double a = 1.0 / (eps * eps) + 1.0 / (8.0 * sx * sx);
    const double b = x0 / (4.0 * sx * sx);
    const double is = 2.0 * sx * std::sqrt(2.0 * pi);
    const double iu = std::sqrt(pi / a) * std::exp(b * b / (4.0 * a)) / (2.0 * pi * eps * eps);
    return 0.5 * is * iu;
}

inline double norm_const(double sx, double eps, double x0)
{
    return 1.0 / std::sqrt(unnormalized_norm(sx, eps, x0));
}

/// Mean and variance of the x1 marginal, from completing the square in x2.
inline double marginal_mean(double sx, double eps, double x0)
{
    const double kappa = 4.0 * sx * sx + eps * eps;
    return -x0 * 4.0 * sx * sx / (kappa + 4.0 * sx * sx);
}

inline double marginal_variance(double sx, double eps)
{
    const double kappa = 4.0 * sx * sx + eps * eps;
    return 1.0 / (2.0 * (1.0 / (4.0 * sx * sx) + 1.0 / kappa));
}

/// Variance of p1 under the unitary transform with h: the density in
/// (P, D) = (p1 + p2, p1 - p2) has Var(P) = (h / (4 pi sx))^2 and
/// Var(D) = A h^2 / pi^2 with A = 1/(16 sx^2) + 1/(2 eps^2).
inline double momentum_variance(double sx, double eps, double h)
{
    const double sp = h / (4.0 * pi * sx);
    const double a = 1.0 / (16.0 * sx * sx) + 1.0 / (2.0 * eps * eps);
    const double var_d = a * h * h / (pi * pi);
    return 0.25 * (sp * sp + var_d);
}

/// E[x1 - x2 + x0]: the envelope pulls the ridge off u = 0 when x0 != 0.
inline double ridge_offset(double sx, double eps, double x0)
{
    return x0 * eps * eps / (8.0 * sx * sx + eps * eps);
}

/// Int of the printed interval density: sqrt(2) exp(-x0^2 / (8 sx^2)).
inline double printed_integral(double sx, double x0)
{
    return std::numbers::sqrt2 * std::exp(-x0 * x0 / (8.0 * sx * sx));
}

// mpmath quad of the printed density over the real line, sigma_x = 1.
inline constexpr double kPrintedIntegralX0Zero = 1.4142135623730951;
inline constexpr double kPrintedIntegralX0Two = 0.8577638849607068;

// h / (4 pi * 1 cm) with h = 6.62607e-27 erg s.
inline constexpr double kSigmaPCgsOneCm = 5.272858968864575e-28;

// c tau with tau = 1.25e-10 s, c = 2.9979e10 cm/s; and c tau / 0.1 cm.
inline constexpr double kPositroniumDx = 3.747375;
inline constexpr double kPositroniumAdvantage = 37.47375;

// Conditional prediction, sigma_x = 1, eps = 0.01, x0 = 5, measured center 0:
// measurement probability of [-w/2, w/2] for w = 0.1, 0.01, 1e-3, 1e-4 and the
// k = 3 capture probability at w = 0.1.
inline constexpr double kMeasurementProb[] = {0.001756859446946012, 1.7530628542023894e-4,
                                             1.7530248923930154e-5, 1.7530245127753339e-6};
inline constexpr double kCaptureK3 = 0.9999996590772697;

}  // namespace oracle
