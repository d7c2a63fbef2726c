#pragma once

// Run reports and their JSON / CSV / fixed-width serializations. Output is a
// pure function of the report contents, so identical runs give identical bytes.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eprlab/errors.hpp"
#include "eprlab/logic.hpp"

namespace eprlab::report {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1";

enum class Verdict { holds, fails, info };

inline std::string_view to_string(Verdict v)
{
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::info: return "info";
    }
    return "";
}

inline Verdict verdict_of(bool ok) { return ok ? Verdict::holds : Verdict::fails; }

/// One named number. A quantity with a tolerance is a check: its verdict
/// compares |value - expected| against the tolerance.
struct Quantity {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    double value = 0.0;
    std::string unit;
    std::string provenance;
    std::optional<double> expected;
    std::optional<double> tolerance;
    Verdict verdict = Verdict::info;
};

inline Quantity info(std::string name, double value, std::string unit, std::string provenance,
                     std::vector<std::pair<std::string, double>> params = {})
{
    return Quantity{std::move(name), std::move(params), value, std::move(unit),
                    std::move(provenance), std::nullopt, std::nullopt, Verdict::info};
}

/// |value - expected| <= tolerance.
inline Quantity compared(std::string name, double value, double expected, double tolerance,
                         std::string unit, std::string provenance,
                         std::vector<std::pair<std::string, double>> params = {})
{
    const bool ok = std::abs(value - expected) <= tolerance;
    return Quantity{std::move(name), std::move(params), value,     std::move(unit),
                    std::move(provenance), expected, tolerance, verdict_of(ok)};
}

/// Boolean check without a numeric value.
struct Check {
    std::string name;
    Verdict verdict;
    std::string detail;
};

struct Report {
    std::string subcommand;
    json config = json::object();
    std::vector<Quantity> results;
    std::vector<Check> checks;
    json details = json::object();
    std::optional<double> duration_s;

    bool any_fails() const
    {
        return std::any_of(results.begin(), results.end(),
                           [](const Quantity& q) { return q.verdict == Verdict::fails; }) ||
               std::any_of(checks.begin(), checks.end(),
                           [](const Check& c) { return c.verdict == Verdict::fails; });
    }
};

enum class Format { json, csv, human };

inline std::optional<Format> parse_format(std::string_view s)
{
    if (s == "json") return Format::json;
    if (s == "csv") return Format::csv;
    if (s == "human") return Format::human;
    return std::nullopt;
}

/// Shortest decimal that round-trips.
inline std::string number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace detail {

// JSON has no inf/nan; such values become null.
inline json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Quantity& q)
{
    json j;
    j["name"] = q.name;
    if (!q.params.empty()) {
        json p = json::object();
        for (const auto& [k, v] : q.params) {
            p[k] = number_json(v);
        }
        j["params"] = std::move(p);
    }
    j["value"] = number_json(q.value);
    j["unit"] = q.unit;
    j["provenance"] = q.provenance;
    j["expected"] = q.expected ? number_json(*q.expected) : json(nullptr);
    j["tolerance"] = q.tolerance ? number_json(*q.tolerance) : json(nullptr);
    j["verdict"] = to_string(q.verdict);
    return j;
}

inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string emit_json(const Report& r)
{
    json j;
    j["schema_version"] = kSchemaVersion;
    j["subcommand"] = r.subcommand;
    j["config"] = r.config;
    json results = json::array();
    for (const Quantity& q : r.results) {
        results.push_back(to_json(q));
    }
    j["results"] = std::move(results);
    json checks = json::array();
    for (const Check& c : r.checks) {
        checks.push_back(json{{"name", c.name}, {"verdict", to_string(c.verdict)}, {"detail", c.detail}});
    }
    j["checks"] = std::move(checks);
    j["all_pass"] = !r.any_fails();
    if (!r.details.empty()) {
        j["details"] = r.details;
    }
    j["duration_s"] = r.duration_s ? json(*r.duration_s) : json(nullptr);
    return j.dump(2) + "\n";
}

// Columns: name, every parameter name in order of first appearance, value,
// tolerance, verdict. Checks without a value leave value and tolerance empty.
inline std::string emit_csv(const Report& r)
{
    std::vector<std::string> columns;
    for (const Quantity& q : r.results) {
        for (const auto& [k, v] : q.params) {
            if (std::find(columns.begin(), columns.end(), k) == columns.end()) {
                columns.push_back(k);
            }
        }
    }
    std::ostringstream os;
    os << "name";
    for (const std::string& c : columns) {
        os << ',' << csv_field(c);
    }
    os << ",value,tolerance,verdict\n";
    for (const Quantity& q : r.results) {
        os << csv_field(q.name);
        for (const std::string& c : columns) {
            os << ',';
            for (const auto& [k, v] : q.params) {
                if (k == c) {
                    os << number(v);
                    break;
                }
            }
        }
        os << ',' << number(q.value) << ',' << (q.tolerance ? number(*q.tolerance) : "") << ','
           << to_string(q.verdict) << '\n';
    }
    for (const Check& c : r.checks) {
        os << csv_field(c.name);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            os << ',';
        }
        os << ",,," << to_string(c.verdict) << '\n';
    }
    return os.str();
}

inline std::string pad(std::string s, std::size_t width)
{
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

inline std::string emit_human(const Report& r)
{
    std::ostringstream os;
    os << r.subcommand << " (schema " << kSchemaVersion << ")\n";
    for (const auto& [k, v] : r.config.items()) {
        os << "  " << pad(k, 14) << ' ' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
    if (!r.results.empty()) {
        os << '\n'
           << pad("name", 34) << ' ' << pad("value", 24) << ' ' << pad("expected", 24) << ' '
           << pad("tolerance", 24) << ' ' << pad("unit", 10) << " verdict\n";
        for (const Quantity& q : r.results) {
            std::string label = q.name;
            for (const auto& [k, v] : q.params) {
                label += ' ' + k + '=' + number(v);
            }
            os << pad(label, 34) << ' ' << pad(number(q.value), 24) << ' '
               << pad(q.expected ? number(*q.expected) : "-", 24) << ' '
               << pad(q.tolerance ? number(*q.tolerance) : "-", 24) << ' ' << pad(q.unit, 10)
               << ' ' << to_string(q.verdict) << '\n';
        }
    }
    if (!r.checks.empty()) {
        os << '\n';
        for (const Check& c : r.checks) {
            os << pad(c.name, 34) << ' ' << pad(std::string(to_string(c.verdict)), 6) << ' '
               << c.detail << '\n';
        }
    }
    os << '\n' << (r.any_fails() ? "FAIL" : "PASS") << '\n';
    return os.str();
}

}  // namespace detail

inline std::string emit(const Report& r, Format format)
{
    switch (format) {
        case Format::json: return detail::emit_json(r);
        case Format::csv: return detail::emit_csv(r);
        case Format::human: return detail::emit_human(r);
    }
    return {};
}

/// Writes next to the target and renames over it, so readers never see a
/// partial file.
inline void write_atomic(const std::filesystem::path& path, std::string_view bytes)
{
    std::filesystem::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write output file " + path.string());
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error("failed writing output file " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move output into place at " + path.string());
    }
}

inline json to_json(const logic::Assignment& a)
{
    json j = json::object();
    for (const auto& [k, v] : a) {
        j[k] = v;
    }
    return j;
}

inline json to_json(const logic::ArgumentCheck& c)
{
    json premises = json::array();
    for (const logic::Expr& p : c.premises) {
        premises.push_back(logic::render(p));
    }
    json j;
    j["name"] = c.name;
    j["description"] = c.description;
    j["query"] = logic::to_string(c.query);
    j["premises"] = std::move(premises);
    j["target"] = c.target ? json(logic::render(*c.target)) : json(nullptr);
    j["holds"] = c.verdict.holds;
    j["witness"] = c.verdict.witness ? to_json(*c.verdict.witness) : json(nullptr);
    return j;
}

}  // namespace eprlab::report
