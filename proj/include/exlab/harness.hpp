/*
 * Copyright (C) 2026 The exlab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "exlab/calabi_density.hpp"
#include "exlab/constant_energy_maps.hpp"
#include "exlab/error.hpp"
#include "exlab/harmonic_algebra.hpp"
#include "exlab/minimal_graphs.hpp"
#include "exlab/tolerances.hpp"
#include "exlab/verification.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

/// Scenario loading, suite dispatch and report assembly for the command-line front end.
namespace exlab::harness
{

using json = nlohmann::json;

inline const std::vector<std::string>& suites()
{
    static const std::vector<std::string> s{"families", "calabi", "harmonic", "maps"};
    return s;
}

inline const std::vector<std::string>& verbs(const std::string& suite)
{
    static const std::map<std::string, std::vector<std::string>> v{
        {"families", {"verify", "sample", "period", "winding"}},
        {"calabi", {"residual", "branches", "extract"}},
        {"harmonic", {"identities", "spectrum", "dims"}},
        {"maps", {"kernel", "construct", "verify", "export"}},
    };
    const auto it = v.find(suite);
    if (it == v.end()) {
        fail(ErrorKind::UsageError, "unknown suite '" + suite + "'");
    }
    return it->second;
}

struct Scenario {
    std::string suite;
    std::string verb;
    json params = json::object();
    std::optional<verify::GridSpec> grid;
    Tolerances tolerances{};
    json tolerance_overrides = json::object();
    std::uint64_t seed       = 42;
    std::string format       = "json";
    std::string out_dir;
};

inline Tolerances apply_overrides(const json& o)
{
    Tolerances t{};
    const std::map<std::string, double*> slots{{"algebraic", &t.algebraic},
                                               {"quadrature", &t.quadrature},
                                               {"integral", &t.integral},
                                               {"singular", &t.singular},
                                               {"angle", &t.angle},
                                               {"domain_margin", &t.domain_margin},
                                               {"reconstruct", &t.reconstruct},
                                               {"float_factorization", &t.float_factorization}};
    for (const auto& [k, v] : o.items()) {
        const auto it = slots.find(k);
        if (it == slots.end()) {
            fail(ErrorKind::UsageError, "unknown tolerance '" + k + "'");
        }
        if (!v.is_number() || !(v.get<double>() > 0.0)) {
            fail(ErrorKind::UsageError, "tolerance '" + k + "' must be a positive number");
        }
        *it->second = v.get<double>();
    }
    return t;
}

inline verify::GridSpec parse_grid(const json& g)
{
    verify::GridSpec s;
    try {
        s.x_min = g.at("x_min").get<double>();
        s.x_max = g.at("x_max").get<double>();
        s.y_min = g.at("y_min").get<double>();
        s.y_max = g.at("y_max").get<double>();
        s.nx    = g.at("nx").get<int>();
        s.ny    = g.at("ny").get<int>();
    }
    catch (const json::exception& e) {
        fail(ErrorKind::UsageError, std::string("grid: ") + e.what());
    }
    verify::validate(s);
    return s;
}

inline json grid_to_json(const verify::GridSpec& g)
{
    return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
            {"y_max", g.y_max}, {"nx", g.nx},       {"ny", g.ny}};
}

/// Builds a scenario from a parsed config; the command-line suite and verb win
/// over the document, and a mismatch is a usage error.
inline Scenario parse_scenario(const json& doc, const std::string& suite, const std::string& verb)
{
    if (!doc.is_object()) {
        fail(ErrorKind::UsageError, "config must be a JSON object");
    }
    Scenario s;
    s.suite = suite;
    s.verb  = verb;
    if (doc.contains("suite") && doc.at("suite") != suite) {
        fail(ErrorKind::UsageError, "config suite '" + doc.at("suite").dump() + "' does not match '" + suite + "'");
    }
    if (doc.contains("verb") && doc.at("verb") != verb) {
        fail(ErrorKind::UsageError, "config verb '" + doc.at("verb").dump() + "' does not match '" + verb + "'");
    }
    const auto& vs = verbs(suite);
    if (std::find(vs.begin(), vs.end(), verb) == vs.end()) {
        fail(ErrorKind::UsageError, "unknown verb '" + verb + "' for suite '" + suite + "'");
    }
    if (doc.contains("params")) {
        if (!doc.at("params").is_object()) {
            fail(ErrorKind::UsageError, "params must be an object");
        }
        s.params = doc.at("params");
    }
    if (doc.contains("grid")) {
        s.grid = parse_grid(doc.at("grid"));
    }
    if (doc.contains("tolerances")) {
        s.tolerance_overrides = doc.at("tolerances");
        s.tolerances          = apply_overrides(s.tolerance_overrides);
    }
    if (doc.contains("seed")) {
        const json& seed = doc.at("seed");
        if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
            fail(ErrorKind::UsageError, "seed must be a non-negative integer");
        }
        s.seed = doc.at("seed").get<std::uint64_t>();
    }
    return s;
}

inline json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::UsageError, "cannot open config '" + path + "'");
    }
    try {
        return json::parse(in);
    }
    catch (const json::exception& e) {
        fail(ErrorKind::UsageError, "config '" + path + "' is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    bool passed = false;
    std::optional<double> max_residual;
    std::optional<bool> exact;
    std::string witness;
    json data = json::object();
};

struct Report {
    Scenario scenario;
    std::vector<Check> checks;
    std::vector<std::string> files;
    double runtime_seconds = 0.0;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
};

inline json check_to_json(const Check& c)
{
    json j{{"name", c.name}, {"status", c.passed ? "pass" : "fail"}};
    if (c.max_residual) {
        j["max_residual"] = *c.max_residual;
    }
    if (c.exact) {
        j["exact"] = *c.exact;
    }
    if (!c.witness.empty()) {
        j["witness"] = c.witness;
    }
    if (!c.data.empty()) {
        j["data"] = c.data;
    }
    return j;
}

/// Deterministic part of a report: identical for identical scenario and seed.
inline json report_body(const Report& r)
{
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back(check_to_json(c));
    }
    json scenario{{"suite", r.scenario.suite}, {"verb", r.scenario.verb}, {"params", r.scenario.params},
                  {"tolerances", r.scenario.tolerance_overrides}};
    if (r.scenario.grid) {
        scenario["grid"] = grid_to_json(*r.scenario.grid);
    }
    return {{"scenario", scenario}, {"seed", r.scenario.seed}, {"checks", checks},
            {"files", r.files},     {"status", r.passed() ? "pass" : "fail"}};
}

inline json report_json(const Report& r)
{
    return {{"body", report_body(r)}, {"runtime_seconds", r.runtime_seconds}};
}

/// Threshold check on a nonnegative residual.
inline Check residual_check(const std::string& name, const verify::Worst& w, double tol)
{
    Check c;
    c.name         = name;
    c.max_residual = w.value;
    c.passed       = w.value <= tol;
    c.witness      = w.where;
    c.data["tolerance"] = tol;
    return c;
}

inline Check value_check(const std::string& name, double residual, double tol, const std::string& witness = {})
{
    Check c;
    c.name         = name;
    c.max_residual = std::abs(residual);
    c.passed       = std::isfinite(residual) && std::abs(residual) <= tol;
    c.witness      = witness;
    c.data["tolerance"] = tol;
    return c;
}

inline Check exact_check(const std::string& name, bool ok, const std::string& witness = {})
{
    Check c;
    c.name    = name;
    c.exact   = true;
    c.passed  = ok;
    c.witness = ok ? std::string() : witness;
    return c;
}

inline Check error_check(const std::string& name, const Error& e)
{
    Check c;
    c.name    = name;
    c.passed  = false;
    c.witness = e.what();
    return c;
}

// ---------------------------------------------------------------------------
// Parameter access
// ---------------------------------------------------------------------------

template <class T>
T param(const json& p, const std::string& key, const T& fallback)
{
    if (!p.contains(key)) {
        return fallback;
    }
    try {
        return p.at(key).get<T>();
    }
    catch (const json::exception& e) {
        fail(ErrorKind::UsageError, "parameter '" + key + "': " + e.what());
    }
}

inline minimal::DensityFamily parse_family(const json& p)
{
    if (!p.contains("family") || !p.at("family").is_object()) {
        fail(ErrorKind::UsageError, "params.family must be an object with a 'type'");
    }
    const json& f         = p.at("family");
    const std::string type = param<std::string>(f, "type", "");
    minimal::DensityFamily fam;
    if (type == "ConstantPlane") {
        fam = minimal::ConstantPlane{param<double>(f, "c", 2.0)};
    }
    else if (type == "ScherkFifth") {
        fam = minimal::ScherkFifth{};
    }
    else if (type == "HeliCatenoid") {
        fam = minimal::HeliCatenoid{param<double>(f, "phi", minimal::pi / 4)};
    }
    else if (type == "DoublyPeriodic") {
        fam = minimal::DoublyPeriodic{param<double>(f, "a", 1.0), param<double>(f, "c", 1.0)};
    }
    else {
        fail(ErrorKind::UsageError, "unknown family type '" + type + "'");
    }
    try {
        minimal::validate(fam);
    }
    catch (const Error& e) {
        fail(ErrorKind::UsageError, e.what());
    }
    return fam;
}

inline std::vector<std::array<double, 2>> parse_pairs(const json& p)
{
    std::vector<std::array<double, 2>> out;
    if (p.contains("pairs")) {
        for (const auto& e : p.at("pairs")) {
            if (!e.is_array() || e.size() != 2) {
                fail(ErrorKind::UsageError, "pairs must be [a, c] arrays");
            }
            out.push_back({e[0].get<double>(), e[1].get<double>()});
        }
    }
    else {
        out.push_back({param<double>(p, "a", 1.0), param<double>(p, "c", 1.0)});
    }
    for (const auto& [a, c] : out) {
        if (!minimal::doubly_periodic_admissible(a, c)) {
            fail(ErrorKind::UsageError, "(a, c) = (" + std::to_string(a) + ", " + std::to_string(c) +
                                            ") violates |a - c| < 1 < a + c");
        }
    }
    return out;
}

inline const verify::GridSpec& require_grid(const Scenario& s)
{
    if (!s.grid) {
        fail(ErrorKind::UsageError, "this verb needs a grid");
    }
    return *s.grid;
}

inline std::string pair_label(double a, double c)
{
    std::ostringstream o;
    o << "(" << a << "," << c << ")";
    return o.str();
}

inline void write_text(const std::string& dir, const std::string& name, const std::string& text, Report& r)
{
    if (dir.empty()) {
        return;
    }
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path);
    if (!out) {
        fail(ErrorKind::UsageError, "cannot write '" + path.string() + "'");
    }
    out << text;
    r.files.push_back(name);
}

// ---------------------------------------------------------------------------
// families
// ---------------------------------------------------------------------------

inline void families_verify(const Scenario& s, Report& r)
{
    const auto fam = parse_family(s.params);
    const auto& g  = require_grid(s);
    const auto& t  = s.tolerances;
    if (std::holds_alternative<minimal::ScherkFifth>(fam)) {
        const auto psis = param<std::vector<double>>(s.params, "psi", {0.0});
        for (double psi : psis) {
            const auto res = verify::scherk_grid_check(psi, g);
            std::ostringstream tag;
            tag << "psi=" << psi;
            r.checks.push_back(residual_check("minimal_residual " + tag.str(), res.minimal_residual, t.algebraic));
            r.checks.push_back(residual_check("density_identity " + tag.str(), res.density_residual, t.algebraic));
            r.checks.push_back(residual_check("slope_angle " + tag.str(), res.angle_residual, t.algebraic));
        }
        // Reconstruction from the slope-angle system against the closed form.
        const double psi = psis.front();
        const auto th0   = minimal::scherk_closed_form(g.x_min, g.y_min, psi);
        minimal::ReconstructOptions o;
        o.theta0         = th0.theta;
        const auto field = verify::reconstruct_on_grid(fam, g, o, true);
        verify::Worst w;
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const double exact = minimal::scherk_closed_form(g.x(i), g.y(j), psi).u - th0.u;
                w.update(field.u[std::size_t(j) * g.nx + i] - exact, g.x(i), g.y(j));
            }
        }
        r.checks.push_back(residual_check("reconstruction_vs_closed_form", w, t.reconstruct));
        return;
    }
    if (const auto* cp = std::get_if<minimal::ConstantPlane>(&fam)) {
        const double psi = param<double>(s.params, "psi", 0.0);
        const double k   = std::sqrt(cp->c * cp->c - 1.0);
        minimal::ReconstructOptions o;
        o.theta0         = psi;
        const auto field = verify::reconstruct_on_grid(fam, g, o, true);
        verify::Worst plane, density;
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i), y = g.y(j);
                const double exact = k * (std::cos(psi) * (x - g.x_min) + std::sin(psi) * (y - g.y_min));
                plane.update(field.u[std::size_t(j) * g.nx + i] - exact, x, y);
                const double F = minimal::density_value(fam, x, y);
                density.update(1.0 + k * k - F * F, x, y);
            }
        }
        r.checks.push_back(residual_check("reconstruction_vs_plane", plane, t.reconstruct));
        r.checks.push_back(residual_check("density_identity", density, t.algebraic));
        return;
    }
    const auto res = verify::family_grid_check(fam, g);
    r.checks.push_back(residual_check("c_roundtrip", res.c_roundtrip, t.algebraic));
    r.checks.push_back(residual_check("compatibility_residual", res.compatibility, t.algebraic));
    r.checks.push_back(residual_check("unit_circle", res.unit_circle, t.angle));
    r.checks.push_back(residual_check("branch_consistency", res.branch_consistency, t.algebraic));
    r.checks.push_back(residual_check("minimal_residual", res.minimal_residual, t.algebraic));
    r.checks.push_back(residual_check("density_identity", res.density_identity, t.algebraic));

    const auto fi = verify::first_integral_check(fam, g);
    auto spread   = value_check("first_integral_spread", *std::max_element(fi.spread.begin(), fi.spread.end()),
                                t.integral);
    spread.data["a"] = {fi.mean.a1, fi.mean.a2, fi.mean.a3};
    r.checks.push_back(spread);
    r.checks.push_back(residual_check("c_system_residual", fi.c_system, t.algebraic));

    if (param<bool>(s.params, "certificate", false)) {
        const auto cert = verify::two_graph_certificate(fam, g);
        r.checks.push_back(residual_check("two_graph_density", cert.density_residual, t.reconstruct));
        r.checks.push_back(residual_check("two_graph_path_independence", cert.path_independence, t.reconstruct));
        Check ne;
        ne.name   = "two_graph_inequivalent";
        ne.passed = cert.difference_variation > 1e-3 && cert.sum_variation > 1e-3;
        ne.data   = {{"difference_variation", cert.difference_variation}, {"sum_variation", cert.sum_variation}};
        r.checks.push_back(ne);
    }
}

/// Scalar field sampled on the grid, or NaN outside the family's domain.
inline double sample_field(const minimal::DensityFamily& fam, const std::string& field, double x, double y)
{
    if (!minimal::in_domain(fam, x, y)) {
        return std::nan("");
    }
    if (field == "F") {
        return minimal::density_value(fam, x, y);
    }
    if (field == "C") {
        return minimal::c_field(fam, x, y);
    }
    const Jet mu = minimal::mu_jet(fam, x, y);
    if (field == "mu") {
        return mu.value;
    }
    const auto d = minimal::compatibility_data(mu);
    if (field == "P") {
        return d.P;
    }
    if (field == "Delta") {
        return d.Delta;
    }
    const auto sols = minimal::two_theta_solutions(mu);
    if (field == "cos2theta_plus") {
        return sols[0].cos2;
    }
    if (field == "cos2theta_minus") {
        return sols[1].cos2;
    }
    if (field == "sin2theta_plus") {
        return sols[0].sin2;
    }
    if (field == "sin2theta_minus") {
        return sols[1].sin2;
    }
    if (field == "minimal_residual_plus" || field == "minimal_residual_minus") {
        const auto& sv = sols[field == "minimal_residual_plus" ? 0 : 1];
        return minimal::minimal_residual(minimal::u_jet_from_theta(mu, 0.5 * std::atan2(sv.sin2, sv.cos2)));
    }
    fail(ErrorKind::UsageError, "unknown field '" + field + "'");
}

inline std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
}

inline void families_sample(const Scenario& s, Report& r)
{
    const auto fam          = parse_family(s.params);
    const auto& g           = require_grid(s);
    const std::string field = param<std::string>(s.params, "field", "F");
    sample_field(fam, field, g.x(0), g.y(0)); // rejects unknown names before sweeping
    std::ostringstream csv;
    json rows = json::array();
    csv << "x,y,value\n";
    int inside = 0, finite = 0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            double v       = std::nan("");
            try {
                v = sample_field(fam, field, x, y);
            }
            catch (const Error&) {
                v = std::nan("");
            }
            if (minimal::in_domain(fam, x, y)) {
                ++inside;
                finite += std::isfinite(v) ? 1 : 0;
            }
            csv << format_double(x) << "," << format_double(y) << "," << format_double(v) << "\n";
            rows.push_back({x, y, std::isfinite(v) ? json(v) : json(nullptr)});
        }
    }
    const std::string stem = minimal::family_name(fam) + "_" + field;
    if (s.format == "csv") {
        write_text(s.out_dir, stem + ".csv", csv.str(), r);
    }
    else {
        write_text(s.out_dir, stem + ".json", json{{"columns", {"x", "y", "value"}}, {"rows", rows}}.dump(1), r);
    }
    Check c;
    c.name   = "finite_in_domain";
    c.passed = inside == finite;
    c.data   = {{"in_domain", inside}, {"finite", finite}, {"field", field}};
    r.checks.push_back(c);
}

inline void families_period(const Scenario& s, Report& r)
{
    const double tol = s.tolerances.quadrature;
    for (const auto& [a, c] : parse_pairs(s.params)) {
        const auto label = pair_label(a, c);
        try {
            const auto p = verify::period_check(a, c, tol);
            Check nz;
            nz.name   = "period_nonzero " + label;
            nz.passed = std::abs(p.base.value) > 1e-3;
            nz.data   = {{"lambda", p.base.value}, {"error_bound", p.base.error_bound}};
            r.checks.push_back(nz);
            r.checks.push_back(value_check("period_refinement " + label, p.refined - p.base.value, 10 * tol));
            r.checks.push_back(value_check("period_seed_flip " + label, p.flipped + p.base.value, 10 * tol));
            r.checks.push_back(value_check("period_homotopy " + label, p.homotopic - p.base.value, 10 * tol));
        }
        catch (const Error& e) {
            r.checks.push_back(error_check("period " + label, e));
        }
    }
}

inline void families_winding(const Scenario& s, Report& r)
{
    const double R  = param<double>(s.params, "R", 8.0);
    const int n     = param<int>(s.params, "samples", 4000);
    for (const auto& [a, c] : parse_pairs(s.params)) {
        const auto label = pair_label(a, c);
        try {
            const auto w = verify::winding_check(a, c, R, n);
            auto g       = value_check("winding_gamma " + label, w.gamma_change - 2.0 * minimal::pi, 1e-3);
            g.data["theta_change"] = w.gamma_change;
            r.checks.push_back(g);
            auto sg = value_check("winding_sigma " + label, w.sigma_change, 1e-6);
            sg.data["theta_change"] = w.sigma_change;
            r.checks.push_back(sg);
        }
        catch (const Error& e) {
            r.checks.push_back(error_check("winding " + label, e));
        }
    }
}

// ---------------------------------------------------------------------------
// calabi
// ---------------------------------------------------------------------------

inline void calabi_residual(const Scenario& s, Report& r)
{
    std::mt19937_64 rng(s.seed);
    const int n   = param<int>(s.params, "samples", 1000);
    const auto ed = verify::ellipse_density_check(n, rng);
    r.checks.push_back(residual_check("density_on_ellipse", ed.density, 1e-10));
    r.checks.push_back(residual_check("ellipse_identity", ed.ellipse, 1e-12));

    std::uniform_real_distribution<double> u(-2.0, 2.0);
    bool linear_zero = true, odd = true;
    std::string where;
    int tried = 0;
    while (tried < n) {
        const double p = u(rng), q = u(rng);
        if (!calabi::in_elliptic_range(p, q) || !(calabi::radicand(p, q) > 1e-6)) {
            continue;
        }
        ++tried;
        Jet z;
        z.order = 2;
        z.dx = p, z.dy = q;
        if (calabi::el_residual(z) != 0.0) {
            linear_zero = false;
            where       = "(p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")";
        }
        z.dxx = 0.1 * u(rng), z.dxy = 0.1 * u(rng), z.dyy = 0.1 * u(rng);
        Jet m = z;
        m.dx = -p, m.dy = -q, m.dxx = -z.dxx, m.dxy = -z.dxy, m.dyy = -z.dyy;
        if (calabi::el_residual(m) != -calabi::el_residual(z)) {
            odd = false;
        }
        const auto a = calabi::psi_components({p, q});
        const auto b = calabi::psi_components({-p, -q});
        odd          = odd && a[0] == -b[0] && a[1] == -b[1];
    }
    r.checks.push_back(exact_check("el_residual_linear_zero", linear_zero, where));
    r.checks.push_back(exact_check("psi_odd_under_sign_flip", odd));
}

inline void calabi_branches(const Scenario& s, Report& r)
{
    std::mt19937_64 rng(s.seed);
    const int n   = param<int>(s.params, "samples", 10000);
    const auto bb = verify::branch_bound_check(n, rng);
    Check c;
    c.name   = "at_most_two_candidates";
    c.passed = bb.max_candidates <= 2;
    c.data   = {{"max", bb.max_candidates}, {"histogram", bb.histogram}, {"samples", bb.samples}};
    r.checks.push_back(c);
    r.checks.push_back(residual_check("affine_extraction_held_out", bb.held_out, 1e-9));
    r.checks.push_back(residual_check("candidate_roots", bb.candidate_residual, s.tolerances.algebraic));
}

inline Jet parse_phi_jet(const json& p)
{
    Jet j;
    j.order = 3;
    const json f = p.contains("phi") ? p.at("phi") : json::object();
    j.value = param<double>(f, "value", minimal::pi / 8);
    j.dx    = param<double>(f, "dx", 0.1);
    j.dy    = param<double>(f, "dy", 0.0);
    j.dxx   = param<double>(f, "dxx", 0.0);
    j.dxy   = param<double>(f, "dxy", 0.0);
    j.dyy   = param<double>(f, "dyy", 0.04);
    j.dxxx  = param<double>(f, "dxxx", 0.0);
    j.dxxy  = param<double>(f, "dxxy", 0.0);
    j.dxyy  = param<double>(f, "dxyy", 0.0);
    j.dyyy  = param<double>(f, "dyyy", 0.0);
    if (!(j.value > 0.0 && j.value < minimal::pi / 4)) {
        fail(ErrorKind::UsageError, "phi.value must lie in (0, pi/4)");
    }
    return j;
}

inline void calabi_extract(const Scenario& s, Report& r)
{
    const Jet phi = parse_phi_jet(s.params);
    const auto d  = calabi::compatibility_extract(phi);
    Check ex;
    ex.name   = "extract";
    ex.passed = true;
    ex.data   = {{"A", {d.A1, d.A2, d.A3}},
                 {"omega1", d.omega1},
                 {"omega2", d.omega2},
                 {"omega3", d.omega3}};
    r.checks.push_back(ex);

    const auto g = calabi::theta_gradient_calabi(phi, minimal::pi / 6);
    const auto w = calabi::omega_at(d, minimal::pi / 6);
    r.checks.push_back(value_check("affine_extraction_held_out", std::hypot(2 * g[0] - w[0], 2 * g[1] - w[1]), 1e-9));

    try {
        const auto cand = calabi::two_theta_candidates(d.A1, d.A2, d.A3, phi.value);
        Check c;
        c.name   = "candidates";
        c.passed = cand.size() <= 2;
        c.data   = {{"theta", cand}};
        r.checks.push_back(c);
        Check third;
        third.name   = "third_order_residual";
        third.passed = true; // recorded, not asserted: vanishing would single out a special phi
        json rows    = json::array();
        for (int b : {1, -1}) {
            try {
                const auto t = calabi::third_order_residual(phi, b);
                rows.push_back({{"branch", b}, {"theta", t.theta}, {"residual", t.residual}});
            }
            catch (const Error& e) {
                rows.push_back({{"branch", b}, {"error", e.what()}});
            }
        }
        third.data["branches"] = rows;
        r.checks.push_back(third);
    }
    catch (const Error& e) {
        r.checks.push_back(error_check("candidates", e));
    }
    r.checks.push_back(residual_check("constant_phi_A_zero", verify::constant_phi_check(20), 1e-12));
}

// ---------------------------------------------------------------------------
// harmonic
// ---------------------------------------------------------------------------

inline void harmonic_identities(const Scenario& s, Report& r)
{
    const auto ns    = param<std::vector<int>>(s.params, "n", {3, 4, 5});
    const int d_max  = param<int>(s.params, "d_max", 4);
    const int trials = param<int>(s.params, "trials", 50);
    for (int n : ns) {
        if (n < 3) {
            fail(ErrorKind::UsageError, "n must be at least 3");
        }
        for (int d = 0; d <= d_max; ++d) {
            const std::string name = "identities n=" + std::to_string(n) + " d=" + std::to_string(d);
            try {
                const auto rep = harmonic::identity_suite(n, d, {trials, s.seed, 0, false});
                auto c         = exact_check(name, true);
                c.data["trials"] = trials;
                r.checks.push_back(c);
            }
            catch (const Error& e) {
                r.checks.push_back(exact_check(name, false, e.what()));
            }
        }
    }
    // The suite must reject a corrupted normalization constant.
    bool caught = false;
    try {
        harmonic::identity_suite(ns.front(), std::min(2, d_max), {std::min(trials, 5), s.seed, 1, false});
    }
    catch (const Error& e) {
        caught = e.kind() == ErrorKind::IdentityFailure;
    }
    r.checks.push_back(exact_check("mutation_detected", caught, "perturbed normalization passed"));
}

inline void harmonic_spectrum(const Scenario& s, Report& r)
{
    const auto ns        = param<std::vector<int>>(s.params, "n", {3, 4, 5});
    const int lambda_max = param<int>(s.params, "lambda_max", 40);
    const Rational K     = parse_rational(param<std::string>(s.params, "K", "1"));
    if (!(K > 0)) {
        fail(ErrorKind::UsageError, "K must be positive");
    }
    for (int n : ns) {
        int admissible = 0;
        std::string bad;
        for (int lam = 0; lam <= lambda_max; ++lam) {
            const harmonic::SpectralParams p{n, K, Rational(lam)};
            const auto m   = harmonic::admissible_lambda(p);
            const int span = m ? *m + 2 : lambda_max + 2;
            const auto seq = harmonic::a_sequence(p, span);
            const auto sum = harmonic::summarize(seq);
            bool ok        = false;
            if (m) {
                ++admissible;
                ok = !sum.first_negative && sum.first_zero == *m + 1;
                for (int k = *m + 1; k < static_cast<int>(seq.size()); ++k) {
                    ok = ok && seq[k] == 0;
                }
            }
            else {
                ok = sum.first_negative.has_value() && !sum.first_zero;
            }
            if (!ok && bad.empty()) {
                bad = "lambda=" + std::to_string(lam);
            }
        }
        auto c = exact_check("dichotomy n=" + std::to_string(n), bad.empty(), bad);
        c.data = {{"admissible_count", admissible}, {"lambda_max", lambda_max}};
        r.checks.push_back(c);
    }
}

inline void harmonic_dims(const Scenario& s, Report& r)
{
    const int N_max = param<int>(s.params, "n_ambient_max", 5);
    const int m_max = param<int>(s.params, "m_max", 6);
    std::string bad;
    json table = json::array();
    for (int N = 3; N <= N_max; ++N) {
        for (int m = 0; m <= m_max; ++m) {
            const auto f = harmonic::dim_harmonics(N, m);
            const auto b = harmonic::dim_harmonics_by_rank(N, m);
            table.push_back({N, m, f.get_str()});
            if (f != b && bad.empty()) {
                bad = "(" + std::to_string(N) + ", " + std::to_string(m) + ")";
            }
        }
    }
    auto c          = exact_check("dimension_formula_vs_rank", bad.empty(), bad);
    c.data["table"] = table;
    r.checks.push_back(c);
}

// ---------------------------------------------------------------------------
// maps
// ---------------------------------------------------------------------------

inline std::pair<int, int> parse_nm(const json& p)
{
    const int N = param<int>(p, "n_ambient", 4);
    const int m = param<int>(p, "m", 2);
    if (N < 4 || m < 1) {
        fail(ErrorKind::UsageError, "maps need n_ambient >= 4 and m >= 1");
    }
    return {N, m};
}

inline json gram_to_json(const maps::GramMatrix& g)
{
    json rows = json::array();
    for (const auto& row : g) {
        json jr = json::array();
        for (const auto& v : row) {
            jr.push_back(to_string(v));
        }
        rows.push_back(jr);
    }
    return rows;
}

inline json poly_terms_json(const QPoly& p)
{
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) {
        terms.push_back({{"exponents", e}, {"coefficient", to_string(c)}});
    }
    return terms;
}

inline json map_to_json(const maps::SphericalHarmonicMap& m)
{
    json comps = json::array();
    if (m.exact) {
        for (const auto& c : m.exact_components) {
            comps.push_back({{"scale_squared", to_string(c.scale_squared)}, {"terms", poly_terms_json(c.poly)}});
        }
    }
    else {
        for (const auto& c : m.float_components) {
            json terms = json::array();
            for (const auto& [e, v] : c.terms()) {
                terms.push_back({{"exponents", e}, {"coefficient", format_double(v)}});
            }
            comps.push_back({{"scale_squared", "1/1"}, {"terms", terms}});
        }
    }
    return {{"n", m.n}, {"m", m.m}, {"lambda", m.lambda()}, {"exact", m.exact}, {"components", comps}};
}

inline void maps_kernel(const Scenario& s, Report& r)
{
    const auto [N, m] = parse_nm(s.params);
    const auto b      = maps::basis_Hm(N, m);
    const auto sol    = maps::solve_h_equals_Rm(b);
    const auto nu     = maps::nonuniqueness_report(N, m);
    auto c            = exact_check("kernel_certificate", maps::verify_kernel(sol.kernel, b));
    const std::size_t sym = b.size() * (b.size() + 1) / 2;
    c.data = {{"basis_dimension", b.size()},  {"kernel_dimension", sol.kernel.dimension},
              {"rank", sol.kernel.rank},       {"sym_dimension", sym},
              {"so_dimension", nu.so_dimension}, {"margin", nu.margin},
              {"nonunique", nu.nonunique},     {"c", to_string(sol.c)}};
    r.checks.push_back(c);
    r.checks.push_back(exact_check("rank_plus_kernel", sol.kernel.rank + sol.kernel.dimension == sym));
    r.checks.push_back(exact_check("h_G0_equals_Rm", maps::h_of_G(sol.G0, b) == radius_power<Rational>(N, m)));
}

inline maps::SphericalHarmonicMap build_map(const Scenario& s, const maps::HarmonicBasis& b,
                                            const maps::AffineSolution& sol, Report* r)
{
    const bool perturbed = param<bool>(s.params, "perturbed", false);
    const std::string fz = param<std::string>(s.params, "factorization", "exact");
    if (fz != "exact" && fz != "float") {
        fail(ErrorKind::UsageError, "factorization must be 'exact' or 'float'");
    }
    const auto mode = fz == "exact" ? maps::Factorization::ExactLdl : maps::Factorization::FloatSpectral;
    if (!perturbed || sol.kernel.dimension == 0) {
        return maps::construct_map(sol.G0, b, mode, s.tolerances.float_factorization);
    }
    const auto p = maps::perturb_in_kernel(sol, sol.kernel.basis.front());
    if (r != nullptr) {
        auto c = exact_check("perturbed_psd_certificate", p.psd_certified && p.differs_from_G0);
        c.data = {{"t", to_string(p.t)}, {"t_max_estimate", p.t_max}};
        r->checks.push_back(c);
    }
    return maps::construct_map(p.G, b, mode, s.tolerances.float_factorization);
}

inline void maps_construct(const Scenario& s, Report& r)
{
    const auto [N, m] = parse_nm(s.params);
    const auto b      = maps::basis_Hm(N, m);
    const auto sol    = maps::solve_h_equals_Rm(b);
    const auto map    = build_map(s, b, sol, &r);
    const auto v      = maps::verify_map(map, s.tolerances.float_factorization);
    auto c            = map.exact ? exact_check("sum_of_squares", v.sum_of_squares_ok)
                                  : value_check("sum_of_squares", v.max_deviation, s.tolerances.float_factorization);
    c.data["components"] = map.size();
    r.checks.push_back(c);
    r.checks.push_back(map.exact ? exact_check("components_harmonic", v.components_harmonic)
                                 : value_check("components_harmonic", v.components_harmonic ? 0.0 : 1.0, 0.0));
}

inline void maps_verify(const Scenario& s, Report& r)
{
    const auto [N, m] = parse_nm(s.params);
    const auto b      = maps::basis_Hm(N, m);
    const auto sol    = maps::solve_h_equals_Rm(b);
    const auto map    = build_map(s, b, sol, nullptr);
    const int points  = param<int>(s.params, "points", 100);
    std::mt19937_64 rng(s.seed);
    verify::Worst dev;
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < points; ++k) {
        const auto x   = maps::random_sphere_point(N, rng);
        const double e = maps::energy_density(map, x);
        dev.update(e - map.lambda(), "sample " + std::to_string(k));
        lo = std::min(lo, e), hi = std::max(hi, e);
    }
    auto c = residual_check("energy_density", dev, 1e-9);
    c.data = {{"lambda", map.lambda()}, {"spread", hi - lo}, {"points", points}};
    r.checks.push_back(c);
}

inline void maps_export(const Scenario& s, Report& r)
{
    const auto [N, m] = parse_nm(s.params);
    const auto b      = maps::basis_Hm(N, m);
    const auto sol    = maps::solve_h_equals_Rm(b);
    const auto map    = build_map(s, b, sol, nullptr);
    const auto v      = maps::verify_map(map, s.tolerances.float_factorization);
    const std::string name = "map_n" + std::to_string(N) + "_m" + std::to_string(m) + ".json";
    write_text(s.out_dir, name, map_to_json(map).dump(1) + "\n", r);
    auto c = exact_check("exported_map_valid", v.sum_of_squares_ok && v.components_harmonic);
    c.data = {{"components", map.size()}, {"exact", map.exact}};
    r.checks.push_back(c);
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Runs one scenario. Usage errors propagate; failures inside a suite become failed checks.
inline Report run(const Scenario& s)
{
    Report r;
    r.scenario = s;
    const auto t0 = std::chrono::steady_clock::now();
    using Fn      = void (*)(const Scenario&, Report&);
    static const std::map<std::string, Fn> table{
        {"families/verify", families_verify},     {"families/sample", families_sample},
        {"families/period", families_period},     {"families/winding", families_winding},
        {"calabi/residual", calabi_residual},     {"calabi/branches", calabi_branches},
        {"calabi/extract", calabi_extract},       {"harmonic/identities", harmonic_identities},
        {"harmonic/spectrum", harmonic_spectrum}, {"harmonic/dims", harmonic_dims},
        {"maps/kernel", maps_kernel},             {"maps/construct", maps_construct},
        {"maps/verify", maps_verify},             {"maps/export", maps_export},
    };
    const auto it = table.find(s.suite + "/" + s.verb);
    if (it == table.end()) {
        fail(ErrorKind::UsageError, "unknown command '" + s.suite + " " + s.verb + "'");
    }
    try {
        it->second(s, r);
    }
    catch (const Error& e) {
        if (e.kind() == ErrorKind::UsageError) {
            throw;
        }
        r.checks.push_back(error_check(s.suite + "_" + s.verb, e));
    }
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace exlab::harness
