#pragma once

// Command-line front end. run() is the whole program minus main(): it parses
// arguments, performs one computation, emits one report and returns the exit
// code (0 all checks hold, 1 some check fails, 2 usage or validation error).

#include <chrono>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "eprlab/errors.hpp"
#include "eprlab/experiments.hpp"
#include "eprlab/logic.hpp"
#include "eprlab/quadrature.hpp"
#include "eprlab/report.hpp"
#include "eprlab/spectral.hpp"
#include "eprlab/states.hpp"

namespace eprlab::cli {

class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

using report::Report;
using report::json;

// Flags describing the state; epsilon's default depends on the subcommand.
struct StateFlags {
    double sigma_x = 1.0;
    std::optional<double> epsilon;
    double x0 = 0.0;
    std::string units = "natural";
};

struct OutputFlags {
    std::string format = "json";
    std::string out;
    bool timing = false;
};

struct Settings {
    StateFlags state;
    OutputFlags output;
    std::optional<double> tol;
    std::string or_mode = "inclusive";
    std::string expr;
    std::string window;
    std::string grid;
    std::size_t n = 0;
    double dx1 = 1e-2;
    experiments::PositroniumInputs positronium;
};

inline PlanckConvention convention_of(const std::string& units)
{
    return units == "cgs" ? PlanckConvention::cgs() : PlanckConvention::natural();
}

inline double parse_number(std::string_view text, std::string_view what)
{
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double v = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size() ||
        !std::isfinite(v)) {
        throw UsageError(std::string(what) + ": '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

inline std::vector<double> parse_list(std::string_view text, std::string_view what)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        out.push_back(parse_number(text.substr(start, comma - start), what));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline quad::Interval parse_window(const std::string& text)
{
    const std::vector<double> v = parse_list(text, "--window");
    if (v.size() != 2) {
        throw UsageError("--window: expected two numbers a,b, got '" + text + "'");
    }
    if (!(v[0] < v[1])) {
        throw UsageError("--window: need a < b, got '" + text + "'");
    }
    return quad::Interval(v[0], v[1]);
}

inline State make_state(const StateFlags& f, double default_epsilon)
{
    return State::create(f.sigma_x, f.epsilon.value_or(default_epsilon), f.x0,
                         convention_of(f.units));
}

inline json state_config(const State& s)
{
    return json{{"sigma_x", s.sigma_x()},
                {"epsilon", s.epsilon()},
                {"x0", s.x0()},
                {"units", std::string(s.convention().name())},
                {"h", s.convention().h()}};
}

inline std::string unit_of(const PlanckConvention& c, std::string_view natural, std::string_view cgs)
{
    return std::string(c.mode() == PlanckConvention::Mode::cgs ? cgs : natural);
}

// ---------------------------------------------------------------------------
// Subcommands

inline Report logic_audit(const Settings& s)
{
    const logic::OrSemantics sem =
        s.or_mode == "exclusive" ? logic::OrSemantics::exclusive : logic::OrSemantics::inclusive;
    const logic::ArgumentReport audit = logic::audit_epr(sem);
    Report r;
    r.subcommand = "logic audit";
    r.config = json{{"or", std::string(logic::to_string(sem))}};
    json checks = json::array();
    for (const logic::ArgumentCheck& c : audit.checks) {
        r.checks.push_back(report::Check{c.name, report::verdict_of(c.verdict.holds),
                                         std::string(logic::to_string(c.query))});
        checks.push_back(report::to_json(c));
    }
    r.details["checks"] = std::move(checks);
    return r;
}

inline Report logic_table(const Settings& s)
{
    const logic::Expr e = logic::parse_expr(s.expr);
    const logic::TruthTable t = logic::truth_table(e);
    Report r;
    r.subcommand = "logic table";
    r.config = json{{"expr", s.expr}};
    for (std::size_t row = 0; row < t.rows(); ++row) {
        const logic::Assignment a = t.assignment(row);
        std::vector<std::pair<std::string, double>> params;
        for (const std::string& p : t.propositions()) {
            params.emplace_back(p, a.at(p) ? 1.0 : 0.0);
        }
        r.results.push_back(
            report::info("row", t.value(row) ? 1.0 : 0.0, "bool", "enumeration", std::move(params)));
    }
    r.details["rendered"] = logic::render(e);
    r.details["propositions"] = t.propositions();
    r.details["rows"] = t.rows();
    r.details["true_rows"] = t.true_rows();
    r.details["tautology"] = t.tautology();
    r.details["contradiction"] = t.contradiction();
    return r;
}

inline Report state_norm(const Settings& s)
{
    const State st = make_state(s.state, 1e-3);
    const double tol = s.tol.value_or(1e-8);
    Report r;
    r.subcommand = "state norm";
    r.config = state_config(st);
    r.config["tol"] = tol;

    quad::Options2D o;
    o.abs_tol = 0.1 * tol;
    o.ridge = st.position_ridge();
    const quad::QuadratureResult xn = quad::integrate_2d(
        [&st](double a, double b) { return position_density(st, a, b); }, st.position_box(), o);
    o.ridge = st.momentum_ridge();
    const quad::QuadratureResult pn = quad::integrate_2d(
        [&st](double a, double b) { return momentum_density(st, a, b); }, st.momentum_box(), o);

    r.results.push_back(report::info("norm_const", st.norm_const(), "1/length", "separable quadrature"));
    r.results.push_back(
        report::compared("position_norm", xn.value, 1.0, tol, "1", "2d adaptive quadrature"));
    r.results.push_back(
        report::compared("momentum_norm", pn.value, 1.0, tol, "1", "2d adaptive quadrature"));
    r.results.push_back(report::compared("parseval_difference", pn.value - xn.value, 0.0, tol, "1",
                                         "2d adaptive quadrature"));
    r.results.push_back(report::info("sigma_p", sigma_p_of(st),
                                     unit_of(st.convention(), "1/length", "g cm/s"), "closed form"));
    r.checks.push_back(report::Check{
        "regularization_minimal", st.regularization_is_minimal() ? report::Verdict::holds : report::Verdict::info,
        "epsilon <= sigma_x / 10"});
    r.details["position_error_estimate"] = xn.error_estimate;
    r.details["momentum_error_estimate"] = pn.error_estimate;
    return r;
}

inline void add_limit_study(Report& r, const experiments::LimitStudy& study, double rel_tol,
                            const std::string& unit)
{
    for (std::size_t i = 0; i < study.grid.size(); ++i) {
        r.results.push_back(report::compared("ratio", study.values[i], study.expected[i],
                                             rel_tol * study.expected[i], "1", "1d adaptive quadrature",
                                             {{study.parameter, study.grid[i]}}));
    }
    r.results.push_back(report::compared("exponent", study.exponent, -1.0, 0.05, "1",
                                         "log-log fit, last 3 points"));
    r.results.push_back(report::compared("extrapolated_limit", study.extrapolated_limit, 0.0, 1e-4,
                                         "1", "power-law extrapolation"));
    r.details["parameter"] = study.parameter;
    r.details["parameter_unit"] = unit;
    r.details["max_relative_error"] = study.max_relative_error();
}

inline Report sweep_eq6(const Settings& s)
{
    StateFlags f = s.state;
    const quad::Interval window = parse_window(s.window.empty() ? "0,1" : s.window);
    const std::vector<double> grid = parse_list(s.grid.empty() ? "10,100,1000,10000" : s.grid, "--grid");
    const State st = make_state(f, 1e-3);
    const double tol = s.tol.value_or(0.01);
    Report r;
    r.subcommand = "sweep eq6";
    r.config = state_config(st);
    r.config["window"] = {window.lo(), window.hi()};
    r.config["grid"] = grid;
    r.config["tol"] = tol;
    add_limit_study(r, experiments::eq6_limit_study(st, window, grid), tol, "length");
    return r;
}

inline Report sweep_eq8(const Settings& s)
{
    const quad::Interval window = parse_window(s.window.empty() ? "0,0.1" : s.window);
    const std::vector<double> grid = parse_list(s.grid.empty() ? "10,100,1000,10000" : s.grid, "--grid");
    const State st = make_state(s.state, 1e-6);
    const double tol = s.tol.value_or(0.01);
    Report r;
    r.subcommand = "sweep eq8";
    r.config = state_config(st);
    r.config["window"] = {window.lo(), window.hi()};
    r.config["grid"] = grid;
    r.config["tol"] = tol;
    add_limit_study(r, experiments::eq8_limit_study(st, window, grid), tol,
                    unit_of(st.convention(), "1/length", "g cm/s"));
    return r;
}

inline Report fourier_check(const Settings& s)
{
    const State st = make_state(s.state, 0.05);
    const double tol = s.tol.value_or(1e-4);
    spectral::GridSpec spec = spectral::feasible_spec(st);
    if (s.n != 0) {
        spec.axis1.n = s.n;
        spec.axis2.n = s.n;
    }
    Report r;
    r.subcommand = "fourier check";
    r.config = state_config(st);
    r.config["n"] = spec.axis1.n;
    r.config["range"] = spec.axis1.range;
    r.config["tol"] = tol;

    const spectral::SampledGrid2D pos = spectral::sample_position(st, spec);
    const spectral::SampledGrid2D mom = spectral::dft_2d(pos);
    const double l2 = spectral::relative_l2_error(
        mom, [&st](double p1, double p2) { return momentum_amplitude(st, p1, p2); });
    const spectral::ParsevalResult pv = spectral::parseval_check(pos, mom);
    const double h = st.convention().h();
    const spectral::PhaseSlope phase =
        spectral::phase_slope_along_antidiagonal(mom, 2.0 * std::numbers::pi * st.x0() / h);
    const double round_trip = spectral::relative_l2_error(spectral::idft_2d(mom), pos);

    r.results.push_back(report::compared("relative_l2_error", l2, 0.0, tol, "1", "fftw vs closed form"));
    r.results.push_back(report::compared("parseval_ratio", pv.ratio, 1.0, 1e-6, "1", "discrete sums"));
    r.results.push_back(report::info("position_discrete_norm", pv.position_norm, "1", "discrete sum"));
    r.results.push_back(report::info("momentum_discrete_norm", pv.momentum_norm, "1", "discrete sum"));
    r.results.push_back(report::compared("phase_slope_deviation", phase.max_deviation, 0.0, 1e-3,
                                         "rad/sample", "anti-diagonal phase increments"));
    r.results.push_back(report::info("phase_slope_expected", phase.expected_per_sample, "rad/sample",
                                     "2 pi x0 dp / h"));
    r.results.push_back(report::info("phase_slope_mean", phase.mean_per_sample, "rad/sample",
                                     "anti-diagonal phase increments"));
    r.results.push_back(report::compared("inverse_round_trip", round_trip, 0.0, 1e-10, "1",
                                         "fftw forward then inverse"));
    r.details["phase_samples"] = phase.samples;
    return r;
}

inline Report eq13_audit(const Settings& s)
{
    const double sigma_x = s.state.sigma_x;
    const double epsilon = s.state.epsilon.value_or(1e-3 * sigma_x);
    // Validates the parameters the same way every other subcommand does.
    const State st = make_state(StateFlags{sigma_x, epsilon, s.state.x0, s.state.units}, epsilon);
    const double tol = s.tol.value_or(1e-8);
    const experiments::Eq13Audit a = experiments::eq13_audit(sigma_x, st.x0(), epsilon / sigma_x);
    Report r;
    r.subcommand = "eq13 audit";
    r.config = state_config(st);
    r.config["tol"] = tol;
    r.results.push_back(report::compared("printed_integral", a.printed_integral,
                                         a.expected_printed_integral, 1e-6, "1",
                                         "1d adaptive quadrature"));
    r.results.push_back(report::compared("normalized_integral", a.normalized_integral, 1.0, tol, "1",
                                         "1d adaptive quadrature"));
    r.results.push_back(report::info("discrepancy_factor", a.discrepancy_factor, "1",
                                     "printed / normalized"));
    r.results.push_back(report::info("max_pointwise_ratio", a.max_pointwise_ratio, "1",
                                     "printed / marginal over center +- 5 sd"));
    r.results.push_back(report::info("min_pointwise_ratio", a.min_pointwise_ratio, "1",
                                     "printed / marginal over center +- 5 sd"));
    const bool normalized = std::abs(a.printed_integral - 1.0) <= 1e-6;
    r.details["printed_form_normalized"] = normalized;
    r.details["note"] = normalized ? "printed density integrates to one"
                                   : "printed density does not integrate to one; the "
                                     "discrepancy factor is sqrt(2) exp(-x0^2 / (8 sigma_x^2))";
    return r;
}

inline void add_uncertainty(Report& r, const experiments::UncertaintyReport& u, const std::string& prefix,
                            const PlanckConvention& c)
{
    const std::string provenance(experiments::to_string(u.provenance));
    r.results.push_back(report::info(prefix + "dx1", u.dx, unit_of(c, "length", "cm"), provenance));
    r.results.push_back(report::info(prefix + "dp1", u.dp, unit_of(c, "1/length", "g cm/s"), provenance));
    r.results.push_back(report::info(prefix + "product", u.product, unit_of(c, "1", "erg s"), provenance));
    r.results.push_back(report::info(prefix + "bound", u.bound, unit_of(c, "1", "erg s"), u.bound_convention));
    r.results.push_back(report::info(prefix + "ratio", u.ratio, "1", provenance));
}

inline report::Check heisenberg_check(const experiments::UncertaintyReport& u, double tol_hbar,
                                      const PlanckConvention& c)
{
    const double floor = u.bound - tol_hbar * c.hbar();
    return report::Check{"heisenberg_floor", report::verdict_of(u.product >= floor),
                         "measured dx1 dp1 >= hbar/2 - tol hbar"};
}

inline Report uncertainty(const Settings& s)
{
    const State st = make_state(s.state, 1e-3);
    const double tol = s.tol.value_or(1e-9);
    Report r;
    r.subcommand = "uncertainty";
    r.config = state_config(st);
    r.config["tol"] = tol;
    const experiments::UncertaintyReport u = experiments::measured_uncertainty(st);
    add_uncertainty(r, u, "", st.convention());
    r.checks.push_back(heisenberg_check(u, tol, st.convention()));
    r.details["note"] = u.note;
    return r;
}

inline Report knowledge(const Settings& s)
{
    const State st = make_state(s.state, 1e-3);
    const double tol = s.tol.value_or(1e-9);
    Report r;
    r.subcommand = "knowledge-product";
    r.config = state_config(st);
    r.config["dx1"] = s.dx1;
    r.config["tol"] = tol;
    const experiments::UncertaintyReport k = experiments::knowledge_product(st, s.dx1);
    const experiments::UncertaintyReport m = experiments::measured_uncertainty(st);
    add_uncertainty(r, k, "inferred_", st.convention());
    add_uncertainty(r, m, "measured_", st.convention());
    r.checks.push_back(heisenberg_check(m, tol, st.convention()));
    r.checks.push_back(report::Check{"inferred_below_bound",
                                     k.below_bound() ? report::Verdict::holds : report::Verdict::info,
                                     "preparation knowledge is not bound by hbar/2"});
    r.details["inferred_note"] = k.note;
    r.details["measured_note"] = m.note;
    return r;
}

inline Report positronium(const Settings& s)
{
    experiments::PositroniumInputs in = s.positronium;
    in.h = convention_of(s.state.units).h();
    const double tol = s.tol.value_or(1e-6);
    const experiments::PositroniumReport p = experiments::positronium_example(in);
    const experiments::PositroniumInputs defaults;
    const bool quoted_inputs =
        in.tau == defaults.tau && in.c == defaults.c && in.resolution == defaults.resolution;

    Report r;
    r.subcommand = "positronium";
    r.config = json{{"tau", in.tau}, {"c", in.c}, {"h", in.h}, {"resolution", in.resolution},
                    {"units", s.state.units}, {"tol", tol}};
    r.results.push_back(report::info("dp", p.dp, s.state.units == "cgs" ? "g cm/s" : "h/length",
                                     "h / (c tau)"));
    r.results.push_back(report::info("dx_bound", p.dx_bound, "cm", "h / dp = c tau"));
    const double quotient = in.c * in.tau / in.resolution;
    r.results.push_back(report::compared("advantage", p.advantage, quotient, tol * quotient, "1",
                                         "dx_bound / resolution"));
    if (quoted_inputs) {
        r.results.push_back(report::compared("dx_bound_vs_quoted", p.dx_bound, p.quoted_dx_bound,
                                             0.005 * p.quoted_dx_bound, "cm", "quoted 3.75 cm"));
    }
    r.results.push_back(report::info("quoted_advantage", p.quoted_advantage, "1", "quoted, rounded"));
    r.results.push_back(report::info("knowledge_product", p.knowledge.product,
                                     s.state.units == "cgs" ? "erg s" : "h", "resolution x dp"));
    r.results.push_back(report::info("knowledge_ratio", p.knowledge.ratio, "1", "product / h"));
    r.details["bound_convention"] = p.knowledge.bound_convention;
    r.details["note"] = p.knowledge.note;
    return r;
}

// ---------------------------------------------------------------------------
// Parsing

inline std::string synopsis(const CLI::App& app, const std::string& path)
{
    std::string out = "usage: " + path;
    for (const CLI::Option* opt : app.get_options()) {
        const std::string name = opt->get_name();
        if (name == "--help" || name == "--help-all") continue;
        if (opt->get_positional()) {
            out += " <" + name + ">";
        } else if (opt->get_expected_max() == 0) {
            out += " [" + name + "]";
        } else {
            out += " [" + name + "=<value>]";
        }
    }
    if (!app.get_subcommands({}).empty()) {
        out += " <";
        bool first = true;
        for (const CLI::App* sub : app.get_subcommands({})) {
            out += (first ? "" : "|") + sub->get_name();
            first = false;
        }
        out += ">";
    }
    return out;
}

// Deepest subcommand on the command line, with its full path.
inline std::pair<const CLI::App*, std::string> active(const CLI::App& app)
{
    const CLI::App* cur = &app;
    std::string path = app.get_name();
    while (true) {
        const std::vector<const CLI::App*> subs = cur->get_subcommands(
            [](const CLI::App* a) { return a->parsed(); });
        if (subs.empty()) break;
        cur = subs.front();
        path += " " + cur->get_name();
    }
    return {cur, path};
}

struct Command {
    CLI::App* app;
    std::function<Report(const Settings&)> handler;
};

inline void add_state_flags(CLI::App* sub, Settings& s, std::string_view epsilon_default)
{
    sub->add_option("--sigma-x", s.state.sigma_x, "envelope width sigma_x (default 1)");
    sub->add_option("--epsilon", s.state.epsilon,
                    "delta regularization width (default " + std::string(epsilon_default) + ")");
    sub->add_option("--x0", s.state.x0, "separation x0 (default 0)");
    sub->add_option("--units", s.state.units, "natural | cgs")
        ->check(CLI::IsMember({"natural", "cgs"}));
}

inline void add_common_flags(CLI::App* sub, Settings& s, std::string_view tol_default = {})
{
    if (!tol_default.empty()) {
        sub->add_option("--tol", s.tol, "tolerance (default " + std::string(tol_default) + ")")
            ->check(CLI::PositiveNumber);
    }
    sub->add_option("--format", s.output.format, "json | csv | human")
        ->check(CLI::IsMember({"json", "csv", "human"}));
    sub->add_option("--out", s.output.out, "write the report to this file instead of stdout");
    sub->add_flag("--timing", s.output.timing, "record wall-clock duration in the report");
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    using namespace detail;
    Settings s;
    CLI::App app("Numerical and logical checks on the EPR correlated-pair argument", "eprlab");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "full help for every subcommand");

    std::vector<Command> commands;

    CLI::App* logic = app.add_subcommand("logic", "propositional audit of the argument");
    logic->require_subcommand(1);
    CLI::App* audit = logic->add_subcommand("audit", "exhaustive checks of the EPR inference");
    audit->add_option("--or", s.or_mode, "reading of the disjunction: inclusive | exclusive")
        ->check(CLI::IsMember({"inclusive", "exclusive"}));
    add_common_flags(audit, s);
    commands.push_back({audit, logic_audit});
    CLI::App* table = logic->add_subcommand("table", "truth table of an expression");
    table->add_option("expr", s.expr, "expression, e.g. 'NOT (A AND B) IFF NOT A OR NOT B'")
        ->required();
    add_common_flags(table, s);
    commands.push_back({table, logic_table});

    CLI::App* state = app.add_subcommand("state", "properties of the regularized state");
    state->require_subcommand(1);
    CLI::App* norm = state->add_subcommand("norm", "position and momentum norms by quadrature");
    add_state_flags(norm, s, "1e-3");
    add_common_flags(norm, s, "1e-8");
    commands.push_back({norm, state_norm});

    CLI::App* sweep = app.add_subcommand("sweep", "vanishing windowed probabilities");
    sweep->require_subcommand(1);
    CLI::App* eq6 = sweep->add_subcommand("eq6", "position window over cutoffs [-L, L]");
    add_state_flags(eq6, s, "1e-3");
    eq6->add_option("--window", s.window, "a,b (default 0,1)");
    eq6->add_option("--grid", s.grid, "cutoffs L, increasing (default 10,100,1000,10000)");
    add_common_flags(eq6, s, "0.01 relative");
    commands.push_back({eq6, sweep_eq6});
    CLI::App* eq8 = sweep->add_subcommand("eq8", "momentum window over cutoffs [-p, p]");
    add_state_flags(eq8, s, "1e-6");
    eq8->add_option("--window", s.window, "p_a,p_b (default 0,0.1)");
    eq8->add_option("--grid", s.grid, "cutoffs p, increasing (default 10,100,1000,10000)");
    add_common_flags(eq8, s, "0.01 relative");
    commands.push_back({eq8, sweep_eq8});

    CLI::App* fourier = app.add_subcommand("fourier", "discrete transform cross-checks");
    fourier->require_subcommand(1);
    CLI::App* fcheck = fourier->add_subcommand("check", "FFT of the sampled state vs closed form");
    add_state_flags(fcheck, s, "0.05");
    fcheck->add_option("--n", s.n, "samples per axis, a power of two (default: smallest feasible)");
    add_common_flags(fcheck, s, "1e-4");
    commands.push_back({fcheck, fourier_check});

    CLI::App* eq13 = app.add_subcommand("eq13", "printed interval density");
    eq13->require_subcommand(1);
    CLI::App* eq13a = eq13->add_subcommand("audit", "integral of the printed density vs the marginal");
    add_state_flags(eq13a, s, "1e-3 sigma_x");
    add_common_flags(eq13a, s, "1e-8");
    commands.push_back({eq13a, detail::eq13_audit});

    CLI::App* unc = app.add_subcommand("uncertainty", "measured dx1 dp1 against hbar/2");
    add_state_flags(unc, s, "1e-3");
    add_common_flags(unc, s, "1e-9 hbar");
    commands.push_back({unc, uncertainty});

    CLI::App* kp = app.add_subcommand("knowledge-product", "inferred vs measured uncertainty products");
    add_state_flags(kp, s, "1e-3");
    kp->add_option("--dx1", s.dx1, "width of the x1 measurement (default 0.01)");
    add_common_flags(kp, s, "1e-9 hbar");
    commands.push_back({kp, knowledge});

    CLI::App* pos = app.add_subcommand("positronium", "photon-pair uncertainty example");
    pos->add_option("--tau", s.positronium.tau, "lifetime in s (default 1.25e-10)");
    pos->add_option("--c", s.positronium.c, "speed of light in cm/s (default 2.9979e10)");
    pos->add_option("--resolution", s.positronium.resolution, "position resolution in cm (default 0.1)");
    pos->add_option("--units", s.state.units, "natural | cgs")
        ->check(CLI::IsMember({"natural", "cgs"}));
    add_common_flags(pos, s, "1e-6");
    commands.push_back({pos, positronium});

    auto usage_error = [&](const std::string& reason) {
        const auto [where, path] = active(app);
        err << "error: " << reason << '\n' << synopsis(*where, path) << '\n';
        return 2;
    };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto [where, path] = active(app);
        out << where->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return usage_error(e.what());
    }

    const auto started = std::chrono::steady_clock::now();
    Report rep;
    try {
        const auto [where, path] = active(app);
        const Command* cmd = nullptr;
        for (const Command& c : commands) {
            if (c.app == where) cmd = &c;
        }
        if (cmd == nullptr) {
            return usage_error("incomplete command");
        }
        rep = cmd->handler(s);
    } catch (const logic::ParseError& e) {
        return usage_error(std::string("expression: ") + e.what());
    } catch (const Error& e) {
        return usage_error(e.what());
    }

    rep.config["format"] = s.output.format;
    rep.config["out"] = s.output.out.empty() ? "-" : s.output.out;
    if (s.output.timing) {
        rep.duration_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    const std::string bytes = report::emit(rep, *report::parse_format(s.output.format));
    if (s.output.out.empty()) {
        out << bytes;
    } else {
        try {
            report::write_atomic(s.output.out, bytes);
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return 2;
        }
    }
    return rep.any_fails() ? 1 : 0;
}

}  // namespace eprlab::cli
