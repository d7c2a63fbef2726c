#pragma once

// Deterministic adaptive quadrature in one and two dimensions.
//
// The 1D driver is a global-error adaptive bisection scheme over a 10/21-point
// Gauss-Kronrod pair (the QUADPACK QK21 node set and error heuristic). Panels
// are always bisected at their midpoint and the final sum is taken in
// left-to-right panel order, so repeated calls return bit-identical results.
//
// 2D integrals are iterated 1D integrals. Integrands concentrated along a
// diagonal ridge can be integrated in rotated coordinates (see RidgeHint),
// which puts the narrow direction on the outer axis and seeds breakpoints at
// the ridge.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eprlab/errors.hpp"

namespace eprlab::quad {

/// Finite, non-degenerate interval [lo, hi].
class Interval {
public:
    Interval(double lo, double hi) : lo_(lo), hi_(hi)
    {
        if (!std::isfinite(lo) || !std::isfinite(hi)) {
            throw DomainError("interval bounds must be finite");
        }
        if (!(lo < hi)) {
            std::ostringstream os;
            os << "interval requires lo < hi, got [" << lo << ", " << hi << "]";
            throw DomainError(os.str());
        }
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }
    double midpoint() const { return 0.5 * (lo_ + hi_); }
    bool contains(const Interval& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_;
    double hi_;
};

/// Records how an effectively infinite domain was cut down to a finite one.
struct Truncation {
    Interval domain;
    double widths;      // half-width of the domain in envelope standard deviations
    double tail_bound;  // upper bound on the discarded mass, already in error_estimate
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    std::optional<Truncation> truncation;
};

/// Raised when the evaluation budget runs out before the tolerance is met.
/// The best available estimate is attached.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, QuadratureResult best)
        : Error(what), best_(std::move(best)) {}

    const QuadratureResult& best_estimate() const { return best_; }

private:
    QuadratureResult best_;
};

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_evaluations = 1'000'000;
    /// The domain is first split into this many equal panels.
    std::size_t initial_panels = 1;
    /// Extra initial panel boundaries; points outside the open domain are ignored.
    std::vector<double> breakpoints;
};

namespace detail {

// QUADPACK qk21 abscissae (Kronrod), Kronrod weights and the 10-point Gauss
// weights for the odd-indexed abscissae.
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208643474262, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    double magnitude;  // integral of |f| on the panel
};

template <class F>
double checked_eval(F& f, double x)
{
    const double y = static_cast<double>(f(x));
    if (!std::isfinite(y)) {
        std::ostringstream os;
        os.precision(17);
        os << "integrand is not finite at x = " << x;
        throw DomainError(os.str());
    }
    return y;
}

template <class F>
Panel gauss_kronrod_21(F& f, double lo, double hi)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double abs_half = std::abs(half);

    std::array<double, 10> f1{};
    std::array<double, 10> f2{};

    const double fc = checked_eval(f, center);
    double res_gauss = 0.0;
    double res_kronrod = kKronrodWeights[10] * fc;
    double res_abs = std::abs(res_kronrod);

    for (std::size_t j = 0; j < 5; ++j) {
        const std::size_t k = 2 * j + 1;
        const double dx = half * kKronrodNodes[k];
        f1[k] = checked_eval(f, center - dx);
        f2[k] = checked_eval(f, center + dx);
        res_gauss += kGaussWeights[j] * (f1[k] + f2[k]);
        res_kronrod += kKronrodWeights[k] * (f1[k] + f2[k]);
        res_abs += kKronrodWeights[k] * (std::abs(f1[k]) + std::abs(f2[k]));
    }
    for (std::size_t j = 0; j < 5; ++j) {
        const std::size_t k = 2 * j;
        const double dx = half * kKronrodNodes[k];
        f1[k] = checked_eval(f, center - dx);
        f2[k] = checked_eval(f, center + dx);
        res_kronrod += kKronrodWeights[k] * (f1[k] + f2[k]);
        res_abs += kKronrodWeights[k] * (std::abs(f1[k]) + std::abs(f2[k]));
    }

    const double mean = 0.5 * res_kronrod;
    double res_asc = kKronrodWeights[10] * std::abs(fc - mean);
    for (std::size_t k = 0; k < 10; ++k) {
        res_asc += kKronrodWeights[k] * (std::abs(f1[k] - mean) + std::abs(f2[k] - mean));
    }

    const double value = res_kronrod * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    double err = std::abs((res_kronrod - res_gauss) * half);
    if (res_asc != 0.0 && err != 0.0) {
        err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    }
    if (res_abs > uflow / (50.0 * eps)) {
        err = std::max(eps * 50.0 * res_abs, err);
    }
    return Panel{lo, hi, value, err, res_abs};
}

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

inline constexpr std::size_t kEvalsPerPanel = 21;

inline std::vector<double> panel_edges(const Interval& domain, const Options& opts)
{
    const std::size_t n = std::max<std::size_t>(1, opts.initial_panels);
    std::vector<double> edges;
    edges.reserve(n + 1 + opts.breakpoints.size());
    for (std::size_t i = 0; i <= n; ++i) {
        edges.push_back(i == n ? domain.hi()
                               : domain.lo() + domain.width() * static_cast<double>(i) /
                                                   static_cast<double>(n));
    }
    for (double b : opts.breakpoints) {
        if (b > domain.lo() && b < domain.hi()) {
            edges.push_back(b);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

inline QuadratureResult assemble(std::vector<Panel> panels, std::size_t evaluations)
{
    std::sort(panels.begin(), panels.end(),
              [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    CompensatedSum value;
    CompensatedSum error;
    for (const Panel& p : panels) {
        value.add(p.value);
        error.add(p.error);
    }
    return QuadratureResult{value.value(), error.value(), evaluations, std::nullopt};
}

inline void validate_tolerances(double abs_tol, double rel_tol)
{
    if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || !(abs_tol > 0.0 || rel_tol > 0.0)) {
        throw DomainError("quadrature tolerance must be positive");
    }
}

}  // namespace detail

/// Adaptive integral of f over `domain`. Succeeds when the summed panel error
/// estimate is at most max(abs_tol, rel_tol * |value|), or at the roundoff
/// floor 100 eps * integral of |f| when that is larger.
template <class F>
QuadratureResult integrate_1d(F&& f, const Interval& domain, const Options& opts)
{
    using detail::Panel;
    detail::validate_tolerances(opts.abs_tol, opts.rel_tol);

    const std::vector<double> edges = detail::panel_edges(domain, opts);
    std::vector<Panel> panels;
    panels.reserve(edges.size() - 1);
    std::size_t evaluations = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        panels.push_back(detail::gauss_kronrod_21(f, edges[i], edges[i + 1]));
        evaluations += detail::kEvalsPerPanel;
    }

    auto by_error = [&panels](std::size_t a, std::size_t b) {
        if (panels[a].error != panels[b].error) {
            return panels[a].error < panels[b].error;
        }
        return a > b;
    };
    std::vector<std::size_t> heap(panels.size());
    for (std::size_t i = 0; i < heap.size(); ++i) {
        heap[i] = i;
    }
    std::make_heap(heap.begin(), heap.end(), by_error);

    auto totals = [&panels]() {
        detail::CompensatedSum value;
        detail::CompensatedSum error;
        detail::CompensatedSum magnitude;
        for (const Panel& p : panels) {
            value.add(p.value);
            error.add(p.error);
            magnitude.add(p.magnitude);
        }
        return std::tuple{value.value(), error.value(), magnitude.value()};
    };
    // Below 100 eps * int |f| the panel estimates are roundoff and splitting
    // further cannot help.
    auto target = [&opts](double value, double magnitude) {
        constexpr double eps = std::numeric_limits<double>::epsilon();
        return std::max({opts.abs_tol, opts.rel_tol * std::abs(value), 100.0 * eps * magnitude});
    };

    auto [value, error, magnitude] = totals();
    while (error > target(value, magnitude)) {
        if (evaluations + 2 * detail::kEvalsPerPanel > opts.max_evaluations) {
            std::ostringstream os;
            os << "quadrature did not converge within " << opts.max_evaluations
               << " evaluations (error estimate " << error << ")";
            throw ConvergenceError(os.str(), detail::assemble(panels, evaluations));
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const std::size_t worst = heap.back();
        heap.pop_back();
        const Panel p = panels[worst];
        const double mid = 0.5 * (p.lo + p.hi);
        if (!(mid > p.lo && mid < p.hi)) {
            std::ostringstream os;
            os << "quadrature cannot subdivide below floating-point resolution near x = "
               << p.lo << " (error estimate " << error << ")";
            throw ConvergenceError(os.str(), detail::assemble(panels, evaluations));
        }
        panels[worst] = detail::gauss_kronrod_21(f, p.lo, mid);
        panels.push_back(detail::gauss_kronrod_21(f, mid, p.hi));
        evaluations += 2 * detail::kEvalsPerPanel;

        heap.push_back(worst);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(panels.size() - 1);
        std::push_heap(heap.begin(), heap.end(), by_error);

        // The running totals are refreshed from scratch; cheap next to the
        // integrand and free of drift.
        std::tie(value, error, magnitude) = totals();
    }
    return detail::assemble(std::move(panels), evaluations);
}

template <class F>
QuadratureResult integrate_1d(F&& f, const Interval& domain, double tol)
{
    Options opts;
    opts.abs_tol = tol;
    return integrate_1d(std::forward<F>(f), domain, opts);
}

/// Gaussian bound f(x) <= peak * exp(-(x - center)^2 / (2 sd^2)) used to cut an
/// infinite domain down to center +- widths * sd.
struct Envelope {
    double center;
    double sd;
    double peak;
};

inline constexpr double kDefaultEnvelopeWidths = 10.0;

/// Integral over the real line of an integrand dominated by `envelope`. The
/// discarded tails are bounded analytically and added to the error estimate.
template <class F>
QuadratureResult integrate_envelope(F&& f, const Envelope& envelope, const Options& opts,
                                    double widths = kDefaultEnvelopeWidths)
{
    if (!(envelope.sd > 0.0) || !std::isfinite(envelope.sd) || !(widths > 0.0)) {
        throw DomainError("envelope width must be positive and finite");
    }
    const Interval domain(envelope.center - widths * envelope.sd,
                          envelope.center + widths * envelope.sd);
    const double tail = std::abs(envelope.peak) * envelope.sd *
                        std::sqrt(2.0 * std::numbers::pi) *
                        std::erfc(widths / std::numbers::sqrt2);
    QuadratureResult r = integrate_1d(std::forward<F>(f), domain, opts);
    r.error_estimate += tail;
    r.truncation = Truncation{domain, widths, tail};
    return r;
}

struct Moments {
    double mass;
    double mean;
    double variance;
};

/// Mass, mean and variance of a non-negative density on `domain`. `tol` is
/// relative to the mass. The integrals run in the rescaled coordinate
/// t = (x - midpoint) / half-width, so the tolerance does not depend on the
/// units of x.
template <class F>
Moments moments(F&& density, const Interval& domain, double tol = 1e-12,
                const std::vector<double>& breakpoints = {})
{
    const double mid = domain.midpoint();
    const double half = 0.5 * domain.width();
    const Interval unit(-1.0, 1.0);
    auto scaled = [&](double t) { return density(mid + half * t); };

    Options opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = tol;
    opts.initial_panels = 4;
    for (double b : breakpoints) {
        opts.breakpoints.push_back((b - mid) / half);
    }

    const double mass_t = integrate_1d(scaled, unit, opts).value;
    if (!(half * mass_t >= 1e-12)) {
        throw DomainError("density has (near) zero mass on the domain");
    }
    // |t| <= 1, so an absolute error of tol * mass bounds the error of the mean
    // (in t units) by tol.
    opts.abs_tol = tol * mass_t;
    opts.rel_tol = 0.0;
    const double first_t =
        integrate_1d([&](double t) { return t * scaled(t); }, unit, opts).value / mass_t;

    opts.abs_tol = tol * mass_t * 1e-6;
    opts.rel_tol = tol;
    const double second_t =
        integrate_1d([&](double t) { return (t - first_t) * (t - first_t) * scaled(t); }, unit,
                     opts)
            .value /
        mass_t;
    return Moments{half * mass_t, mid + half * first_t, std::max(0.0, half * half * second_t)};
}

/// Ratio of the mass in `window` to the mass in [-cutoff, cutoff].
template <class F>
double windowed_ratio(F&& density, const Interval& window, double cutoff, double rel_tol = 1e-12)
{
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
        throw DomainError("cutoff must be positive and finite");
    }
    const Interval span(-cutoff, cutoff);
    if (!span.contains(window)) {
        std::ostringstream os;
        os << "window [" << window.lo() << ", " << window.hi() << "] is not inside [-" << cutoff
           << ", " << cutoff << "]";
        throw DomainError(os.str());
    }
    Options opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = rel_tol;
    opts.initial_panels = 4;
    const double denominator = integrate_1d(density, span, opts).value;
    if (!(denominator >= 1e-12)) {
        throw DomainError("cutoff integral is (near) zero");
    }
    if (window == span) {
        return 1.0;
    }
    const double numerator = integrate_1d(density, window, opts).value;
    return std::clamp(numerator / denominator, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Two dimensions

struct Box {
    Interval x1;
    Interval x2;
};

enum class RidgeDirection {
    difference,  // integrand concentrated near x1 - x2 + offset = 0
    sum,         // integrand concentrated near x1 + x2 + offset = 0
};

/// Tells integrate_2d that the integrand is narrow (scale `width`) across a
/// diagonal line and smooth along it.
struct RidgeHint {
    RidgeDirection direction;
    double offset;
    double width;
};

struct Options2D {
    double abs_tol = 1e-10;
    std::size_t max_evaluations = 200'000'000;
    std::size_t outer_panels = 16;
    std::size_t inner_panels = 128;
    std::optional<RidgeHint> ridge;
};

namespace detail {

template <class G>
QuadratureResult iterate_2d(G&& inner_integral, const Interval& outer, const Options2D& opts,
                            std::size_t outer_panels, std::vector<double> outer_breaks)
{
    std::size_t evaluations = 0;
    double worst_inner_error = 0.0;
    const double inner_tol = 0.5 * opts.abs_tol / outer.width();

    auto outer_fn = [&](double t) {
        const std::optional<QuadratureResult> r = inner_integral(t, inner_tol);
        if (!r) {
            return 0.0;
        }
        evaluations += r->evaluations;
        worst_inner_error = std::max(worst_inner_error, r->error_estimate);
        if (evaluations > opts.max_evaluations) {
            throw ConvergenceError("2D quadrature exceeded its evaluation budget",
                                   QuadratureResult{});
        }
        return r->value;
    };

    Options o;
    o.abs_tol = 0.5 * opts.abs_tol;
    o.initial_panels = outer_panels;
    o.breakpoints = std::move(outer_breaks);
    o.max_evaluations = opts.max_evaluations;
    QuadratureResult r = integrate_1d(outer_fn, outer, o);
    r.error_estimate += outer.width() * worst_inner_error;
    r.evaluations = evaluations;
    return r;
}

}  // namespace detail

/// Integral of f(x1, x2) over `box`.
///
/// Without a ridge hint the integral is iterated as x1 (outer) over x2
/// (inner). With a hint the box is mapped exactly onto the rotated
/// coordinates u = x1 -+ x2 + offset (outer) and v = x1 +- x2 (inner), with
/// breakpoints at u = 0, +-width, +-3 width and +-10 width.
template <class F>
QuadratureResult integrate_2d(F&& f, const Box& box, const Options2D& opts)
{
    detail::validate_tolerances(opts.abs_tol, 0.0);

    if (!opts.ridge) {
        auto inner = [&](double x1, double tol) -> std::optional<QuadratureResult> {
            Options o;
            o.abs_tol = tol;
            o.initial_panels = opts.inner_panels;
            o.max_evaluations = opts.max_evaluations;
            return integrate_1d([&](double x2) { return f(x1, x2); }, box.x2, o);
        };
        return detail::iterate_2d(inner, box.x1, opts, opts.outer_panels, {});
    }

    const RidgeHint hint = *opts.ridge;
    if (!(hint.width > 0.0) || !std::isfinite(hint.width) || !std::isfinite(hint.offset)) {
        throw DomainError("ridge hint width must be positive and finite");
    }
    const double a1 = box.x1.lo();
    const double b1 = box.x1.hi();
    const double a2 = box.x2.lo();
    const double b2 = box.x2.hi();
    const double c = hint.offset;
    const bool diff = hint.direction == RidgeDirection::difference;

    // diff: u = x1 - x2 + c, v = x1 + x2  ->  x1 = (v + u - c)/2, x2 = (v - u + c)/2
    // sum:  u = x1 + x2 + c, v = x1 - x2  ->  x1 = (u - c + v)/2, x2 = (u - c - v)/2
    const Interval u_range = diff ? Interval(a1 - b2 + c, b1 - a2 + c)
                                  : Interval(a1 + a2 + c, b1 + b2 + c);

    auto inner = [&](double u, double tol) -> std::optional<QuadratureResult> {
        double v_lo = 0.0;
        double v_hi = 0.0;
        if (diff) {
            v_lo = std::max(2.0 * a1 - u + c, 2.0 * a2 + u - c);
            v_hi = std::min(2.0 * b1 - u + c, 2.0 * b2 + u - c);
        } else {
            v_lo = std::max(2.0 * a1 - u + c, u - c - 2.0 * b2);
            v_hi = std::min(2.0 * b1 - u + c, u - c - 2.0 * a2);
        }
        if (!(v_lo < v_hi)) {
            return std::nullopt;
        }
        Options o;
        o.abs_tol = 2.0 * tol;  // Jacobian 1/2 is applied to the result
        o.initial_panels = 8;
        o.max_evaluations = opts.max_evaluations;
        QuadratureResult r = integrate_1d(
            [&](double v) {
                const double x1 = diff ? 0.5 * (v + u - c) : 0.5 * (u - c + v);
                const double x2 = diff ? 0.5 * (v - u + c) : 0.5 * (u - c - v);
                return f(x1, x2);
            },
            Interval(v_lo, v_hi), o);
        r.value *= 0.5;
        r.error_estimate *= 0.5;
        return r;
    };

    std::vector<double> breaks;
    for (double k : {-10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0}) {
        breaks.push_back(k * hint.width);
    }
    return detail::iterate_2d(inner, u_range, opts, 1, std::move(breaks));
}

template <class F>
QuadratureResult integrate_2d(F&& f, const Box& box, double tol,
                              std::optional<RidgeHint> ridge = std::nullopt)
{
    Options2D opts;
    opts.abs_tol = tol;
    opts.ridge = ridge;
    return integrate_2d(std::forward<F>(f), box, opts);
}

}  // namespace eprlab::quad
