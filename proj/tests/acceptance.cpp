// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eprlab/cli.hpp"
#include "eprlab/experiments.hpp"
#include "eprlab/logic.hpp"
#include "eprlab/quadrature.hpp"
#include "eprlab/spectral.hpp"
#include "eprlab/states.hpp"
#include "oracles.hpp"

using namespace eprlab;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

const std::vector<double> kSigmas = {0.5, 1.0, 5.0};
const std::vector<double> kFractions = {1e-3, 1e-2, 1e-1};
const std::vector<double> kOffsets = {0.0, 1.0, 5.0};

double position_norm(const State& s)
{
    quad::Options2D o;
    o.abs_tol = 1e-10;
    o.ridge = s.position_ridge();
    return quad::integrate_2d([&s](double a, double b) { return position_density(s, a, b); },
                              s.position_box(), o)
        .value;
}

double momentum_norm(const State& s)
{
    quad::Options2D o;
    o.abs_tol = 1e-10;
    o.ridge = s.momentum_ridge();
    return quad::integrate_2d([&s](double a, double b) { return momentum_density(s, a, b); },
                              s.momentum_box(), o)
        .value;
}

Outcome normalization()
{
    double worst = 0.0;
    for (double sx : kSigmas)
        for (double f : kFractions)
            for (double x0 : kOffsets) {
                worst = std::max(worst, std::abs(position_norm(State::create(sx, f * sx, x0)) - 1.0));
            }
    return {worst <= 1e-8, fmt("27 states, max |norm - 1| = %.3g (tol 1e-8)", worst)};
}

Outcome parseval()
{
    double worst_dft = 0.0;
    double worst_quad = 0.0;
    int count = 0;
    for (double sx : kSigmas)
        for (double f : kFractions) {
            if (f < 0.05) continue;
            for (double x0 : kOffsets) {
                const State s = State::create(sx, f * sx, x0);
                const spectral::SampledGrid2D pos =
                    spectral::sample_position(s, spectral::feasible_spec(s));
                const spectral::ParsevalResult r = spectral::parseval_check(pos, spectral::dft_2d(pos));
                worst_dft = std::max(worst_dft, std::abs(r.momentum_norm - r.position_norm));
                worst_quad = std::max(worst_quad, std::abs(momentum_norm(s) - position_norm(s)));
                ++count;
            }
        }
    return {worst_dft <= 1e-6 && worst_quad <= 1e-6,
            std::to_string(count) + " states; " +
                fmt("max |P - X|: discrete %.3g, quadrature %.3g (tol 1e-6)", worst_dft, worst_quad)};
}

Outcome limit_outcome(const experiments::LimitStudy& st)
{
    const bool ok = st.max_relative_error() <= 0.01 && std::abs(st.exponent + 1.0) <= 0.05 &&
                    std::abs(st.extrapolated_limit) < 1e-4;
    return {ok, fmt("max rel err %.3g (tol 0.01), ", st.max_relative_error()) +
                    fmt("exponent %.6f (tol 0.05), limit %.3g (tol 1e-4)", st.exponent,
                        st.extrapolated_limit)};
}

Outcome position_law()
{
    const State s = State::create(1e6, 1e-3, 0.0);
    return limit_outcome(
        experiments::eq6_limit_study(s, quad::Interval(0.0, 1.0), {10.0, 100.0, 1e3, 1e4}));
}

Outcome momentum_law()
{
    const State s = State::create(1.0, 1e-6, 0.0);
    return limit_outcome(
        experiments::eq8_limit_study(s, quad::Interval(0.0, 0.1), {10.0, 100.0, 1e3, 1e4}));
}

Outcome fourier_dual()
{
    const State s = State::create(1.0, 0.05, 1.0);
    spectral::GridSpec spec = spectral::feasible_spec(s);
    spec.axis1.n = spec.axis2.n = 4096;
    const spectral::SampledGrid2D mom = spectral::dft_2d(spectral::sample_position(s, spec));
    const double err = spectral::relative_l2_error(
        mom, [&s](double p1, double p2) { return momentum_amplitude(s, p1, p2); });
    const spectral::PhaseSlope ph = spectral::phase_slope_along_antidiagonal(
        mom, 2.0 * std::numbers::pi * s.x0() / s.convention().h());
    return {err < 1e-4 && ph.max_deviation <= 1e-3 && ph.samples > 0,
            fmt("N = 4096^2, rel L2 %.3g (tol 1e-4), ", err) +
                fmt("phase slope dev %.3g rad/sample over %.0f samples (tol 1e-3)",
                    ph.max_deviation, static_cast<double>(ph.samples))};
}

Outcome sigma_p()
{
    const double v = sigma_p_of(State::create(1.0, 0.01, 0.0));
    const double cgs = sigma_p_of(State::create(1.0, 0.01, 0.0, PlanckConvention::cgs()));
    return {v == 0.5 && std::abs(cgs / oracle::kSigmaPCgsOneCm - 1.0) < 1e-15,
            fmt("natural %.17g (== 0.5), cgs %.6g", v, cgs)};
}

Outcome printed_density()
{
    double worst_printed = 0.0;
    double worst_norm = 0.0;
    for (double sx : kSigmas)
        for (double x0 : {0.0, 1.0, 2.0, 5.0}) {
            const experiments::Eq13Audit a = experiments::eq13_audit(sx, x0);
            worst_printed =
                std::max(worst_printed, std::abs(a.printed_integral - oracle::printed_integral(sx, x0)));
            worst_norm = std::max(worst_norm, std::abs(a.normalized_integral - 1.0));
        }
    const double frozen = std::max(
        std::abs(experiments::eq13_audit(1.0, 0.0).printed_integral - oracle::kPrintedIntegralX0Zero),
        std::abs(experiments::eq13_audit(1.0, 2.0).printed_integral - oracle::kPrintedIntegralX0Two));
    return {worst_printed <= 1e-6 && worst_norm <= 1e-8 && frozen <= 1e-6,
            fmt("max |printed - sqrt2 exp(-x0^2/8sx^2)| %.3g (tol 1e-6), ", worst_printed) +
                fmt("max |normalized - 1| %.3g (tol 1e-8)", worst_norm)};
}

Outcome heisenberg()
{
    double min_product = INFINITY;
    for (double sx : kSigmas)
        for (double f : kFractions)
            for (double x0 : kOffsets) {
                min_product = std::min(
                    min_product, experiments::measured_uncertainty(State::create(sx, f * sx, x0)).product);
            }
    const experiments::UncertaintyReport k =
        experiments::knowledge_product(State::create(1e3, 1e-3, 0.0), 1e-2);
    return {min_product >= 0.5 - 1e-9 && k.product < 0.5,
            fmt("min measured dx dp %.9g (floor 0.5 - 1e-9), inferred %.3g (< 0.5)", min_product,
                k.product)};
}

Outcome positronium()
{
    const experiments::PositroniumReport p = experiments::positronium_example({});
    std::ostringstream out;
    std::ostringstream err;
    cli::run({"positronium", "--units=cgs"}, out, err);
    const auto j = nlohmann::ordered_json::parse(out.str());
    bool shows_both = false;
    bool shows_quoted = false;
    for (const auto& r : j["results"]) {
        shows_both |= r["name"] == "advantage";
        shows_quoted |= r["name"] == "quoted_advantage" && r["value"] == 40.0;
    }
    const bool ok = std::abs(p.dx_bound / 3.75 - 1.0) <= 0.005 &&
                    std::abs(p.advantage - oracle::kPositroniumAdvantage) <=
                        1e-6 * oracle::kPositroniumAdvantage &&
                    shows_both && shows_quoted;
    return {ok, fmt("dx_bound %.6f cm (quoted 3.75, tol 0.5%%), ", p.dx_bound) +
                    fmt("advantage %.6f (quoted %.0f)", p.advantage, p.quoted_advantage)};
}

Outcome logic_audit()
{
    using namespace logic;
    const TruthTable dm = truth_table(parse_expr("NOT (A AND B) IFF NOT A OR NOT B"));
    const bool de_morgan = dm.rows() == 4 && dm.tautology();
    const bool joint = unsatisfiable({parse_expr("PRNC(P,Q) AND QMTC(P,Q)"),
                                      parse_expr("NOT PRNC(P,Q) OR NOT QMTC(P,Q)")})
                           .holds;
    const bool inference = entails({parse_expr("X OR Y"), parse_expr("NOT X")}, parse_expr("Y")).holds;
    const bool coupling =
        entails({parse_expr("X IFF Y"), parse_expr("NOT X")}, parse_expr("NOT Y")).holds;
    const ArgumentReport audit = audit_epr(OrSemantics::inclusive);
    const bool audited = audit.at("de_morgan_tautology").verdict.holds &&
                         audit.at("joint_unsat").verdict.holds &&
                         audit.at("epr_inference").verdict.holds && audit.at("coupling").verdict.holds;
    return {de_morgan && joint && inference && coupling && audited,
            std::string("de_morgan ") + (de_morgan ? "holds" : "fails") + ", joint_unsat " +
                (joint ? "holds" : "fails") + ", or-inference " + (inference ? "holds" : "fails") +
                ", iff-coupling " + (coupling ? "holds" : "fails") + ", audit " +
                (audited ? "agrees" : "disagrees")};
}

Outcome conditional()
{
    const State s = State::create(1.0, 0.01, 5.0);
    const double capture = experiments::conditional_prediction(s, 0.0, 0.1, 3.0).capture_probability;
    bool monotone = true;
    double previous = INFINITY;
    double last = 0.0;
    for (double w : {1e-1, 1e-2, 1e-3, 1e-4}) {
        last = experiments::conditional_prediction(s, 0.0, w, 3.0).measurement_probability;
        monotone &= last < previous;
        previous = last;
    }
    return {capture >= 0.997 && monotone,
            fmt("capture %.10f (>= 0.997), measurement prob at 1e-4: %.4g, ", capture, last) +
                (monotone ? "strictly decreasing" : "NOT decreasing")};
}

Outcome determinism()
{
    const std::vector<std::vector<std::string>> commands = {
        {"logic", "audit"},
        {"logic", "audit", "--or=exclusive", "--format=csv"},
        {"logic", "table", "NOT (A AND B) IFF NOT A OR NOT B"},
        {"state", "norm"},
        {"state", "norm", "--units=cgs", "--x0=2", "--format=human"},
        {"sweep", "eq6", "--sigma-x=1e6"},
        {"sweep", "eq8", "--format=csv"},
        {"fourier", "check", "--x0=1"},
        {"eq13", "audit", "--x0=2"},
        {"uncertainty"},
        {"knowledge-product", "--sigma-x=1e3", "--dx1=1e-2"},
        {"positronium", "--units=cgs"},
    };
    int identical = 0;
    std::string first_diff;
    for (const auto& args : commands) {
        std::ostringstream a, b, ea, eb;
        const int ca = cli::run(args, a, ea);
        const int cb = cli::run(args, b, eb);
        if (ca == cb && a.str() == b.str() && !a.str().empty()) {
            ++identical;
        } else if (first_diff.empty()) {
            first_diff = args[0];
        }
    }
    const int total = static_cast<int>(commands.size());
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                    " invocations byte-identical" +
                                    (first_diff.empty() ? "" : ", first mismatch: " + first_diff)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"normalization", normalization},
        {"parseval", parseval},
        {"position window law", position_law},
        {"momentum window law", momentum_law},
        {"fourier dual", fourier_dual},
        {"sigma_p relation", sigma_p},
        {"printed density audit", printed_density},
        {"heisenberg floor", heisenberg},
        {"positronium numbers", positronium},
        {"logic audit", logic_audit},
        {"conditional prediction", conditional},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] AC%02zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
