#pragma once

// Sampled 2D grids and a discrete Fourier transform with physical measure
// factors, used to cross-check the closed-form momentum amplitudes.
//
// Axis sample j sits at x_j = c + (j - N/2) dx and momentum sample k at
// p_k = (k - N/2) dp with dp = h / (N dx). The forward (analysis) transform is
//
//   phi(p_k) = (dx / sqrt(h)) sum_j psi(x_j) exp(-2 pi i x_j p_k / h)
//
// per axis, and the inverse uses exp(+2 pi i x p / h) with dp / sqrt(h). With
// these factors the discrete pair is exactly unitary:
//   sum |phi|^2 dp1 dp2 == sum |psi|^2 dx1 dx2   (up to rounding).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eprlab/errors.hpp"
#include "eprlab/states.hpp"

namespace eprlab::spectral {

using complex = std::complex<double>;

class ResolutionError : public DomainError {
public:
    using DomainError::DomainError;
};

class MismatchedGrid : public DomainError {
public:
    using DomainError::DomainError;
};

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

struct AxisSpec {
    double center;
    double range;
    std::size_t n;
};

struct GridSpec {
    AxisSpec axis1;
    AxisSpec axis2;
};

struct Axis {
    double center;
    double step;
    std::size_t n;

    double at(std::size_t i) const
    {
        return center + (static_cast<double>(i) - static_cast<double>(n / 2)) * step;
    }
    double range() const { return step * static_cast<double>(n); }
};

enum class Space { position, momentum };

class SampledGrid2D {
public:
    SampledGrid2D(Space space, double h, Axis axis1, Axis axis2, std::vector<complex> values,
                  std::optional<std::pair<Axis, Axis>> conjugate = std::nullopt)
        : space_(space), h_(h), axis1_(axis1), axis2_(axis2), values_(std::move(values)),
          conjugate_(conjugate)
    {
        if (values_.size() != axis1_.n * axis2_.n) {
            throw DomainError("grid value count does not match its axes");
        }
    }

    Space space() const { return space_; }
    double h() const { return h_; }
    const Axis& axis1() const { return axis1_; }
    const Axis& axis2() const { return axis2_; }
    /// For a transformed grid, the axes of the grid it came from.
    const std::optional<std::pair<Axis, Axis>>& conjugate() const { return conjugate_; }

    const std::vector<complex>& values() const { return values_; }
    std::vector<complex>& values() { return values_; }
    const complex& at(std::size_t i1, std::size_t i2) const { return values_[i1 * axis2_.n + i2]; }

    /// Riemann sum of |value|^2 with the cell measure.
    double discrete_norm() const
    {
        double sum = 0.0;
        for (const complex& v : values_) {
            sum += std::norm(v);
        }
        return sum * axis1_.step * axis2_.step;
    }

    /// Copy with every sample outside the central `fraction` of each axis zeroed.
    SampledGrid2D truncated(double fraction) const
    {
        SampledGrid2D out = *this;
        const auto keep = [fraction](const Axis& a, std::size_t i) {
            const double half = 0.5 * fraction * a.range();
            return std::abs(a.at(i) - a.center) <= half;
        };
        for (std::size_t i1 = 0; i1 < axis1_.n; ++i1) {
            for (std::size_t i2 = 0; i2 < axis2_.n; ++i2) {
                if (!keep(axis1_, i1) || !keep(axis2_, i2)) {
                    out.values_[i1 * axis2_.n + i2] = 0.0;
                }
            }
        }
        return out;
    }

private:
    Space space_;
    double h_;
    Axis axis1_;
    Axis axis2_;
    std::vector<complex> values_;
    std::optional<std::pair<Axis, Axis>> conjugate_;
};

namespace detail {

inline Axis make_axis(const AxisSpec& spec)
{
    if (!is_power_of_two(spec.n)) {
        throw ResolutionError("sample count " + std::to_string(spec.n) + " is not a power of two");
    }
    if (!(spec.range > 0.0) || !std::isfinite(spec.range) || !std::isfinite(spec.center)) {
        throw ResolutionError("axis range must be positive and finite");
    }
    return Axis{spec.center, spec.range / static_cast<double>(spec.n), spec.n};
}

inline std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

// Unnormalized in-place 2D DFT; sign is FFTW_FORWARD or FFTW_BACKWARD.
// FFTW_ESTIMATE keeps the plan, and hence the rounding, identical across runs.
inline void fft_in_place(std::vector<complex>& data, std::size_t n1, std::size_t n2, int sign)
{
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_2d(static_cast<int>(n1), static_cast<int>(n2), ptr, ptr, sign,
                                    FFTW_ESTIMATE));
    }
    if (!plan) {
        throw Error("FFTW could not create a plan");
    }
    fftw_execute(plan.get());
}

inline double alternating(std::size_t i) { return (i % 2 == 0) ? 1.0 : -1.0; }

// exp(sign * 2 pi i * c * m / (N dx)) for centered index m, with the argument
// reduced to one turn before scaling.
inline complex center_phase(double c, double m, const Axis& position, double sign)
{
    const double turns = c * m / (static_cast<double>(position.n) * position.step);
    const double frac = turns - std::round(turns);
    return std::polar(1.0, sign * 2.0 * std::numbers::pi * frac);
}

// Per-axis factors of the transform between `position` and its conjugate axis.
// forward: pre_j = (-1)^j, post_k = s (-1)^k exp(-2 pi i c m_k / (N dx)) dx / sqrt(h)
// inverse: pre_k = (-1)^k exp(+2 pi i c m_k / (N dx)), post_j = s (-1)^j dp / sqrt(h)
// where s = (-1)^(N/2) and m_k = k - N/2.
struct AxisFactors {
    std::vector<complex> pre;
    std::vector<complex> post;
};

inline AxisFactors axis_factors(const Axis& position, double h, bool forward)
{
    const std::size_t n = position.n;
    const double s = alternating(n / 2);
    const double dp = h / (static_cast<double>(n) * position.step);
    AxisFactors f{std::vector<complex>(n), std::vector<complex>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double m = static_cast<double>(i) - static_cast<double>(n / 2);
        const complex shift = center_phase(position.center, m, position, forward ? -1.0 : 1.0);
        if (forward) {
            f.pre[i] = alternating(i);
            f.post[i] = s * alternating(i) * shift * (position.step / std::sqrt(h));
        } else {
            f.pre[i] = alternating(i) * shift;
            f.post[i] = s * alternating(i) * (dp / std::sqrt(h));
        }
    }
    return f;
}

inline std::vector<complex> separable_transform(const std::vector<complex>& input,
                                                const Axis& pos1, const Axis& pos2, double h,
                                                bool forward)
{
    const AxisFactors f1 = axis_factors(pos1, h, forward);
    const AxisFactors f2 = axis_factors(pos2, h, forward);
    const std::size_t n1 = pos1.n;
    const std::size_t n2 = pos2.n;
    std::vector<complex> data(input.size());
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            data[i1 * n2 + i2] = input[i1 * n2 + i2] * f1.pre[i1] * f2.pre[i2];
        }
    }
    fft_in_place(data, n1, n2, forward ? FFTW_FORWARD : FFTW_BACKWARD);
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            data[i1 * n2 + i2] *= f1.post[i1] * f2.post[i2];
        }
    }
    return data;
}

inline Axis momentum_axis(const Axis& position, double h)
{
    return Axis{0.0, h / (static_cast<double>(position.n) * position.step), position.n};
}

}  // namespace detail

/// Samples an arbitrary amplitude on the grid described by `spec`.
inline SampledGrid2D sample(const std::function<complex(double, double)>& amplitude,
                            const GridSpec& spec, double h, Space space = Space::position)
{
    const Axis a1 = detail::make_axis(spec.axis1);
    const Axis a2 = detail::make_axis(spec.axis2);
    std::vector<complex> values(a1.n * a2.n);
    for (std::size_t i1 = 0; i1 < a1.n; ++i1) {
        const double x1 = a1.at(i1);
        for (std::size_t i2 = 0; i2 < a2.n; ++i2) {
            values[i1 * a2.n + i2] = amplitude(x1, a2.at(i2));
        }
    }
    return SampledGrid2D(space, h, a1, a2, std::move(values));
}

/// Checks that `spec` resolves the regularized delta (spacing <= eps/4) and
/// contains the envelope tails (range >= 16 sigma_x) on both axes.
inline void validate_position_spec(const State& state, const GridSpec& spec)
{
    for (const AxisSpec* axis : {&spec.axis1, &spec.axis2}) {
        const Axis a = detail::make_axis(*axis);
        if (a.step > state.epsilon() / 4.0) {
            std::ostringstream os;
            os << "resolution: spacing " << a.step << " exceeds epsilon/4 = "
               << state.epsilon() / 4.0;
            throw ResolutionError(os.str());
        }
        if (axis->range < 16.0 * state.sigma_x()) {
            std::ostringstream os;
            os << "range: " << axis->range << " is narrower than 16 sigma_x = "
               << 16.0 * state.sigma_x();
            throw ResolutionError(os.str());
        }
    }
}

inline SampledGrid2D sample_position(const State& state, const GridSpec& spec)
{
    validate_position_spec(state, spec);
    return sample([&state](double x1, double x2) { return position_amplitude(state, x1, x2); },
                  spec, state.convention().h(), Space::position);
}

/// Smallest power-of-two grid, centered on the state, spanning range_factor
/// sigma_x per axis and meeting the spacing constraint.
inline GridSpec feasible_spec(const State& state, double range_factor = 32.0,
                              std::size_t max_n = 4096)
{
    const double range = range_factor * state.sigma_x();
    std::size_t n = 64;
    while (range / static_cast<double>(n) > state.epsilon() / 4.0) {
        n *= 2;
        if (n > max_n) {
            std::ostringstream os;
            os << "resolution: epsilon/sigma_x = " << state.epsilon() / state.sigma_x()
               << " needs more than " << max_n << " samples per axis";
            throw ResolutionError(os.str());
        }
    }
    return GridSpec{AxisSpec{state.center_x1(), range, n}, AxisSpec{state.center_x2(), range, n}};
}

/// Forward transform of a position grid to momentum space.
inline SampledGrid2D dft_2d(const SampledGrid2D& grid)
{
    if (grid.space() != Space::position) {
        throw MismatchedGrid("dft_2d expects a position-space grid");
    }
    std::vector<complex> data =
        detail::separable_transform(grid.values(), grid.axis1(), grid.axis2(), grid.h(), true);
    return SampledGrid2D(Space::momentum, grid.h(), detail::momentum_axis(grid.axis1(), grid.h()),
                         detail::momentum_axis(grid.axis2(), grid.h()), std::move(data),
                         std::pair{grid.axis1(), grid.axis2()});
}

/// Inverse of dft_2d.
inline SampledGrid2D idft_2d(const SampledGrid2D& grid)
{
    if (grid.space() != Space::momentum || !grid.conjugate()) {
        throw MismatchedGrid("idft_2d expects a transformed momentum-space grid");
    }
    const auto& [pos1, pos2] = *grid.conjugate();
    std::vector<complex> data =
        detail::separable_transform(grid.values(), pos1, pos2, grid.h(), false);
    return SampledGrid2D(Space::position, grid.h(), pos1, pos2, std::move(data));
}

/// sqrt(sum |grid - reference|^2 / sum |reference|^2) over all samples.
inline double relative_l2_error(const SampledGrid2D& grid,
                                const std::function<complex(double, double)>& reference)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i1 = 0; i1 < grid.axis1().n; ++i1) {
        const double a = grid.axis1().at(i1);
        for (std::size_t i2 = 0; i2 < grid.axis2().n; ++i2) {
            const complex ref = reference(a, grid.axis2().at(i2));
            num += std::norm(grid.at(i1, i2) - ref);
            den += std::norm(ref);
        }
    }
    return std::sqrt(num / den);
}

inline double relative_l2_error(const SampledGrid2D& a, const SampledGrid2D& b)
{
    if (a.values().size() != b.values().size()) {
        throw MismatchedGrid("grids differ in size");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        num += std::norm(a.values()[i] - b.values()[i]);
        den += std::norm(b.values()[i]);
    }
    return std::sqrt(num / den);
}

struct ParsevalResult {
    double position_norm;
    double momentum_norm;
    double ratio;
    bool passes;  // |ratio - 1| < tolerance
};

inline ParsevalResult parseval_check(const SampledGrid2D& position, const SampledGrid2D& momentum,
                                     double tolerance = 1e-6)
{
    if (position.space() != Space::position || momentum.space() != Space::momentum) {
        throw MismatchedGrid("parseval_check expects (position, momentum) grids");
    }
    auto conjugate_ok = [&](const Axis& x, const Axis& p) {
        return x.n == p.n &&
               std::abs(x.step * p.step * static_cast<double>(x.n) / position.h() - 1.0) < 1e-12;
    };
    if (position.h() != momentum.h() || !conjugate_ok(position.axis1(), momentum.axis1()) ||
        !conjugate_ok(position.axis2(), momentum.axis2())) {
        throw MismatchedGrid("momentum grid is not the transform of the position grid");
    }
    const double xn = position.discrete_norm();
    const double pn = momentum.discrete_norm();
    const double ratio = pn / xn;
    return ParsevalResult{xn, pn, ratio, std::abs(ratio - 1.0) < tolerance};
}

struct PhaseSlope {
    double expected_per_sample;
    double mean_per_sample;
    double max_deviation;  // radians per sample
    std::size_t samples;
};

/// Phase increments of a square momentum grid along the anti-diagonal
/// p2 = -p1, compared with a linear phase of `slope` radians per unit p1.
/// Samples whose modulus is below `floor` times the diagonal maximum are
/// skipped.
inline PhaseSlope phase_slope_along_antidiagonal(const SampledGrid2D& grid, double slope,
                                                 double floor = 1e-6)
{
    if (grid.space() != Space::momentum || grid.axis1().n != grid.axis2().n) {
        throw MismatchedGrid("phase check needs a square momentum grid");
    }
    const std::size_t n = grid.axis1().n;
    auto diag = [&](std::size_t k) { return grid.at(k, n - k); };
    double peak = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        peak = std::max(peak, std::abs(diag(k)));
    }
    const double expected = slope * grid.axis1().step;
    PhaseSlope out{expected, 0.0, 0.0, 0};
    double sum = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const complex a = diag(k);
        const complex b = diag(k + 1);
        if (std::abs(a) < floor * peak || std::abs(b) < floor * peak) {
            continue;
        }
        // Principal-value increment; the expected increment is well below pi.
        const double step = std::arg(b / a);
        double dev = std::remainder(step - expected, 2.0 * std::numbers::pi);
        out.max_deviation = std::max(out.max_deviation, std::abs(dev));
        sum += step;
        ++out.samples;
    }
    out.mean_per_sample = out.samples ? sum / static_cast<double>(out.samples) : 0.0;
    return out;
}

}  // namespace eprlab::spectral
