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
#include "exlab/harness.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace exlab;

namespace
{

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> run;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const std::vector<std::array<double, 2>> dp_pairs{{1.0, 1.0}, {0.8, 0.5}, {1.5, 0.2}};

std::string pair_tag(const std::array<double, 2>& p)
{
    std::ostringstream o;
    o << "(" << p[0] << "," << p[1] << ")";
    return o.str();
}

Outcome scherk_family()
{
    const auto t0 = Clock::now();
    const verify::GridSpec g{0.5, 3.0, 0.0, 2.0 * minimal::pi, 50, 50};
    double worst_min = 0.0, worst_density = 0.0;
    for (double psi : {0.0, 0.4, 1.1, 2.3, 3.0}) {
        const auto r  = verify::scherk_grid_check(psi, g);
        worst_min     = std::max(worst_min, r.minimal_residual.value);
        worst_density = std::max(worst_density, r.density_residual.value);
    }
    const double dt = seconds_since(t0);
    return {worst_min < 1e-9 && worst_density <= 1e-10 && dt < 5.0,
            "minimal " + sci(worst_min) + ", density " + sci(worst_density) + ", " + sci(dt) + " s"};
}

Outcome first_integrals()
{
    const auto t0 = Clock::now();
    struct Case {
        minimal::DensityFamily fam;
        verify::GridSpec grid;
        std::array<double, 3> expected;
    };
    const double phi = minimal::pi / 6;
    const std::vector<Case> cases{
        {minimal::HeliCatenoid{phi}, {1.0, 2.0, 0.2, 1.2, 20, 20}, {0.0, 0.0, 8.0 * std::cos(2.0 * phi)}},
        {minimal::DoublyPeriodic{1.0, 1.0}, {1.4, 3.0, -1.0, 1.0, 20, 20}, {0.0, 1.0, 0.0}},
        {minimal::DoublyPeriodic{0.8, 0.5}, {1.4, 3.0, -1.0, 1.0, 20, 20}, {0.0, 1.0, 0.8 * 0.8 - 0.5 * 0.5}},
    };
    double spread = 0.0, mean_err = 0.0, csys = 0.0;
    for (const auto& c : cases) {
        const auto r = verify::first_integral_check(c.fam, c.grid);
        spread       = std::max({spread, r.spread[0], r.spread[1], r.spread[2]});
        mean_err     = std::max({mean_err, std::abs(r.mean.a1 - c.expected[0]), std::abs(r.mean.a2 - c.expected[1]),
                                 std::abs(r.mean.a3 - c.expected[2])});
        csys         = std::max(csys, r.c_system.value);
    }
    const double dt = seconds_since(t0);
    return {spread < 1e-9 && mean_err < 1e-9 && csys < 1e-10 && dt < 2.0,
            "spread " + sci(spread) + ", value error " + sci(mean_err) + ", c-system " + sci(csys) + ", " +
                sci(dt) + " s"};
}

Outcome winding()
{
    bool ok = true;
    std::string detail;
    for (const auto& p : dp_pairs) {
        try {
            const auto w = verify::winding_check(p[0], p[1], 8.0);
            const double eg = std::abs(w.gamma_change - 2.0 * minimal::pi);
            const double es = std::abs(w.sigma_change);
            ok              = ok && eg < 1e-3 && es < 1e-6;
            detail += pair_tag(p) + " gamma " + sci(eg) + " sigma " + sci(es) + "; ";
        }
        catch (const Error& e) {
            ok = false;
            detail += pair_tag(p) + " " + e.what() + "; ";
        }
    }
    return {ok, detail};
}

Outcome period()
{
    bool ok = true;
    std::string detail;
    for (const auto& p : dp_pairs) {
        try {
            const auto r     = verify::period_check(p[0], p[1]);
            const double ref = std::abs(r.refined - r.base.value);
            const double flp = std::abs(r.flipped + r.base.value);
            ok               = ok && std::abs(r.base.value) > 1e-3 && ref < 1e-7 && flp < 1e-7;
            detail += pair_tag(p) + " lambda " + sci(r.base.value) + " refine " + sci(ref) + "; ";
        }
        catch (const Error& e) {
            ok = false;
            detail += pair_tag(p) + " " + e.what() + "; ";
        }
    }
    return {ok, detail};
}

Outcome two_graphs()
{
    struct Case {
        minimal::DensityFamily fam;
        verify::GridSpec grid;
    };
    const std::vector<Case> cases{
        {minimal::HeliCatenoid{minimal::pi / 4}, {1.0, 2.0, 0.2, 1.2, 6, 6}},
        {minimal::DoublyPeriodic{1.0, 1.0}, {0.5, 1.5, -1.0, 1.0, 6, 6}},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const auto cert = verify::two_graph_certificate(c.fam, c.grid);
        ok = ok && cert.density_residual.value < 1e-8 && cert.difference_variation > 1e-3 &&
             cert.sum_variation > 1e-3;
        detail += minimal::family_name(c.fam) + " density " + sci(cert.density_residual.value) + " var(u+ - u-) " +
                  sci(cert.difference_variation) + " var(u+ + u-) " + sci(cert.sum_variation) + "; ";
    }
    return {ok, detail};
}

Outcome calabi_density()
{
    std::mt19937_64 rng(42);
    const auto ed = verify::ellipse_density_check(1000, rng);
    bool linear   = true;
    for (double p : {0.9, 1.0, 1.2}) {
        for (double q : {0.5, 0.9, 1.1}) {
            if (!calabi::in_elliptic_range(p, q)) {
                continue;
            }
            Jet z;
            z.order = 2;
            z.dx = p, z.dy = q;
            linear = linear && calabi::el_residual(z) == 0.0;
        }
    }
    const double A = verify::constant_phi_check(50).value;
    return {ed.density.value <= 1e-10 && linear && A <= 1e-12,
            "density " + sci(ed.density.value) + ", linear residual " + (linear ? "0" : "nonzero") +
                ", constant phi A " + sci(A)};
}

Outcome branch_bound()
{
    std::mt19937_64 rng(42);
    const auto r = verify::branch_bound_check(10000, rng);
    return {r.max_candidates <= 2 && r.held_out.value < 1e-9,
            "max candidates " + std::to_string(r.max_candidates) + ", held-out " + sci(r.held_out.value)};
}

Outcome identities()
{
    const auto t0 = Clock::now();
    std::string detail;
    bool ok = true;
    for (int n : {3, 4, 5}) {
        for (int d = 0; d <= 4; ++d) {
            try {
                harmonic::identity_suite(n, d, {50, 42, 0, false});
            }
            catch (const Error& e) {
                ok = false;
                detail += e.what() + std::string("; ");
            }
        }
    }
    bool mutant_caught = false;
    try {
        harmonic::identity_suite(3, 2, {50, 42, 1, false});
    }
    catch (const Error& e) {
        mutant_caught = e.kind() == ErrorKind::IdentityFailure;
    }
    const double dt = seconds_since(t0);
    return {ok && mutant_caught && dt < 60.0,
            detail + "mutation " + (mutant_caught ? "caught" : "missed") + ", " + sci(dt) + " s"};
}

Outcome spectral()
{
    for (int n : {3, 4, 5}) {
        for (int lam = 0; lam <= 40; ++lam) {
            const harmonic::SpectralParams p{n, Rational(1), Rational(lam)};
            const auto m   = harmonic::admissible_lambda(p);
            const auto seq = harmonic::a_sequence(p, 60);
            const auto s   = harmonic::summarize(seq);
            bool ok;
            if (m) {
                ok = !s.first_negative && s.first_zero == *m + 1;
                for (std::size_t k = *m + 1; k < seq.size(); ++k) {
                    ok = ok && seq[k] == 0;
                }
            }
            else {
                ok = s.first_negative.has_value() && !s.first_zero;
            }
            if (!ok) {
                return {false, "n=" + std::to_string(n) + " lambda=" + std::to_string(lam)};
            }
        }
    }
    return {true, "n in {3,4,5}, lambda <= 40"};
}

Outcome maps_construction()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(42);
    std::string detail;

    const auto b1   = maps::basis_Hm(4, 1);
    const auto s1   = maps::solve_h_equals_Rm(b1);
    const auto id   = maps::construct_map(s1.G0, b1);
    double dev1     = 0.0;
    bool monomials  = id.size() == 4;
    for (const auto& c : id.exact_components) {
        monomials = monomials && c.poly.terms().size() == 1;
    }
    for (int k = 0; k < 100; ++k) {
        dev1 = std::max(dev1, std::abs(maps::energy_density(id, maps::random_sphere_point(4, rng)) - 3.0));
    }

    const auto b2  = maps::basis_Hm(4, 2);
    const auto s2  = maps::solve_h_equals_Rm(b2);
    const auto map = maps::construct_map(s2.G0, b2);
    const auto v   = maps::verify_map(map);
    double dev2    = 0.0;
    for (int k = 0; k < 100; ++k) {
        dev2 = std::max(dev2, std::abs(maps::energy_density(map, maps::random_sphere_point(4, rng)) - 8.0));
    }
    const bool cert = maps::verify_kernel(s2.kernel, b2);
    const auto nu   = maps::nonuniqueness_report(4, 2);
    const double dt = seconds_since(t0);
    const bool ok   = monomials && dev1 < 1e-9 && map.exact && v.sum_of_squares_ok && v.components_harmonic &&
                    dev2 < 1e-9 && s2.kernel.dimension >= 10 && cert && nu.margin >= 4 && nu.so_dimension == 6 &&
                    dt < 120.0;
    detail = "(4,1) energy dev " + sci(dev1) + "; (4,2) exact " + (v.sum_of_squares_ok ? "yes" : "no") +
             ", energy dev " + sci(dev2) + ", kernel " + std::to_string(s2.kernel.dimension) + ", margin " +
             std::to_string(nu.margin) + ", " + sci(dt) + " s";
    return {ok, detail};
}

Outcome dimensions()
{
    for (int N = 3; N <= 5; ++N) {
        for (int m = 0; m <= 6; ++m) {
            if (harmonic::dim_harmonics(N, m) != harmonic::dim_harmonics_by_rank(N, m)) {
                return {false, "mismatch at (" + std::to_string(N) + "," + std::to_string(m) + ")"};
            }
        }
    }
    return {true, "3 <= n_ambient <= 5, m <= 6"};
}

Outcome determinism()
{
    const std::vector<harness::json> docs{
        {{"suite", "families"}, {"verb", "verify"}, {"params", {{"family", {{"type", "ScherkFifth"}}}}},
         {"grid", {{"x_min", 0.5}, {"x_max", 3.0}, {"y_min", 0.0}, {"y_max", 6.0}, {"nx", 10}, {"ny", 10}}}},
        {{"suite", "calabi"}, {"verb", "branches"}, {"params", {{"samples", 500}}}},
        {{"suite", "harmonic"}, {"verb", "identities"}, {"params", {{"n", {3}}, {"d_max", 2}, {"trials", 10}}}},
        {{"suite", "maps"}, {"verb", "verify"}, {"params", {{"n_ambient", 4}, {"m", 2}, {"points", 50}}}},
    };
    for (const auto& d : docs) {
        auto s       = harness::parse_scenario(d, d.at("suite"), d.at("verb"));
        s.seed       = 1234;
        const auto a = harness::report_body(harness::run(s)).dump();
        const auto b = harness::report_body(harness::run(s)).dump();
        if (a != b) {
            return {false, "bodies differ for " + d.at("suite").get<std::string>()};
        }
    }
    return {true, "4 scenarios, bodies byte-identical"};
}

} // namespace

int main(int argc, char** argv)
{
    // --expect-fail a,b,... lists criteria known to be unattainable; the exit status is
    // zero only when exactly those fail.
    std::set<int> expected;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--expect-fail") {
            std::stringstream ss(argv[i + 1]);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                expected.insert(std::stoi(tok));
            }
        }
    }

    const std::vector<Criterion> criteria{
        {1, "Scherk family closed form", scherk_family},
        {2, "first integrals", first_integrals},
        {3, "winding of the lifted angle", winding},
        {4, "nonzero period", period},
        {5, "two-graph certificate", two_graphs},
        {6, "prescribed density on the ellipse", calabi_density},
        {7, "at most two branches", branch_bound},
        {8, "harmonic identity suite", identities},
        {9, "spectral dichotomy", spectral},
        {10, "constant energy maps", maps_construction},
        {11, "dimension formula", dimensions},
        {12, "determinism", determinism},
    };

    std::set<int> failed;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        }
        catch (const std::exception& e) {
            o = {false, e.what()};
        }
        if (!o.passed) {
            failed.insert(c.id);
        }
        std::cout << (o.passed ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << "  [" << o.detail
                  << "]" << std::endl;
    }
    std::cout << (12 - failed.size()) << "/12 criteria pass" << std::endl;
    return failed == expected ? 0 : 1;
}
