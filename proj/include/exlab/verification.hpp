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
#include "exlab/error.hpp"
#include "exlab/jet.hpp"
#include "exlab/minimal_graphs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

/// Grid sweeps and oracle comparisons shared by the command-line harness and the
/// acceptance checks. Each routine returns maxima together with where they occur.
namespace exlab::verify
{

struct GridSpec {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;
    int nx       = 2;
    int ny       = 2;

    double x(int i) const { return x_min + (x_max - x_min) * i / (nx - 1); }
    double y(int j) const { return y_min + (y_max - y_min) * j / (ny - 1); }
};

inline void validate(const GridSpec& g)
{
    if (g.nx < 2 || g.ny < 2) {
        fail(ErrorKind::UsageError, "grid counts must be at least 2");
    }
    if (!(g.x_max > g.x_min) || !(g.y_max > g.y_min)) {
        fail(ErrorKind::UsageError, "grid bounds must be increasing");
    }
}

/// Running maximum of |value| with the location of the worst sample.
struct Worst {
    double value = 0.0;
    std::string where;

    void update(double v, const std::string& at)
    {
        const double a = std::isfinite(v) ? std::abs(v) : std::numeric_limits<double>::infinity();
        if (a > value || (where.empty() && a >= value)) {
            value = a;
            where = at;
        }
    }
    void update(double v, double x, double y)
    {
        update(v, "(" + std::to_string(x) + ", " + std::to_string(y) + ")");
    }
};

// ---------------------------------------------------------------------------
// Minimal graphs
// ---------------------------------------------------------------------------

struct ScherkGridResult {
    Worst minimal_residual;
    Worst density_residual; // 1 + |grad u|^2 - coth^2 x
    Worst angle_residual;   // grad u direction against the closed-form angle
};

inline ScherkGridResult scherk_grid_check(double psi, const GridSpec& g)
{
    validate(g);
    ScherkGridResult r;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            const Jet u    = make_jet([&](const auto& X, const auto& Y) { return minimal::scherk_u(X, Y, psi); }, x, y);
            const double F = minimal::density_value(minimal::ScherkFifth{}, x, y);
            r.minimal_residual.update(minimal::minimal_residual(u), x, y);
            r.density_residual.update(1.0 + u.dx * u.dx + u.dy * u.dy - F * F, x, y);
            const double th = minimal::scherk_closed_form(x, y, psi).theta;
            const double s  = std::sinh(x);
            r.angle_residual.update(std::hypot(u.dx - std::cos(th) / s, u.dy - std::sin(th) / s), x, y);
        }
    }
    return r;
}

struct FirstIntegralResult {
    minimal::FirstIntegrals mean;
    std::array<double, 3> spread{};
    Worst c_system;
};

inline FirstIntegralResult first_integral_check(const minimal::DensityFamily& fam, const GridSpec& g)
{
    validate(g);
    FirstIntegralResult r;
    std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300}, sum{};
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            const Jet C    = minimal::c_jet(fam, x, y);
            const auto fi  = minimal::first_integrals(C);
            const std::array<double, 3> v{fi.a1, fi.a2, fi.a3};
            for (int k = 0; k < 3; ++k) {
                lo[k] = std::min(lo[k], v[k]);
                hi[k] = std::max(hi[k], v[k]);
                sum[k] += v[k];
            }
            for (double res : minimal::c_system_residual(C)) {
                r.c_system.update(res, x, y);
            }
        }
    }
    const double count = double(g.nx) * g.ny;
    r.mean             = {sum[0] / count, sum[1] / count, sum[2] / count};
    for (int k = 0; k < 3; ++k) {
        r.spread[k] = hi[k] - lo[k];
    }
    return r;
}

struct FamilyGridResult {
    Worst compatibility; // coefficient relation at both roots
    Worst unit_circle;
    Worst branch_consistency;
    Worst minimal_residual;
    Worst density_identity; // 1 + |grad u|^2 - F^2
    Worst c_roundtrip;      // C from F against the closed form
};

/// Pointwise checks of the two roots of the compatibility relation over a grid.
inline FamilyGridResult family_grid_check(const minimal::DensityFamily& fam, const GridSpec& g)
{
    validate(g);
    FamilyGridResult r;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            const Jet mu   = minimal::mu_jet(fam, x, y);
            const double F = minimal::density_value(fam, x, y);
            const auto mc  = minimal::mu_C_from_F(F);
            const double C = minimal::c_field(fam, x, y);
            r.c_roundtrip.update((mc.C - C) / std::max(1.0, std::abs(C)), x, y);
            const auto d    = minimal::compatibility_data(mu);
            const auto sols = minimal::two_theta_solutions(mu);
            for (int b = 0; b < 2; ++b) {
                r.compatibility.update(minimal::compatibility_residual(d, sols[b]), x, y);
                r.unit_circle.update(sols[b].cos2 * sols[b].cos2 + sols[b].sin2 * sols[b].sin2 - 1.0, x, y);
                const auto bc = minimal::branch_consistency_residual(mu, b == 0 ? 1 : -1);
                r.branch_consistency.update(std::hypot(bc[0], bc[1]), x, y);
                const double theta = 0.5 * std::atan2(sols[b].sin2, sols[b].cos2);
                const Jet u        = minimal::u_jet_from_theta(mu, theta);
                r.minimal_residual.update(minimal::minimal_residual(u), x, y);
                r.density_identity.update(1.0 + u.dx * u.dx + u.dy * u.dy - F * F, x, y);
            }
        }
    }
    return r;
}

struct WindingResult {
    double gamma_change = 0.0;
    double sigma_change = 0.0;
};

inline WindingResult winding_check(double a, double c, double R, int samples = 4000)
{
    WindingResult w;
    w.gamma_change = minimal::lift_theta_along(minimal::gamma_loop(a, c, R, samples), a, c, 1).total_change();
    w.sigma_change = minimal::lift_theta_along(minimal::sigma_loop(a, c, samples), a, c, 1).total_change();
    return w;
}

struct PeriodCheck {
    minimal::PeriodResult base;
    double refined   = 0.0; // doubled lift grid and halved tolerance
    double flipped   = 0.0; // opposite seed sign
    double homotopic = 0.0; // section moved to x0 = 0.1
};

inline PeriodCheck period_check(double a, double c, double tol = default_tolerances.quadrature)
{
    PeriodCheck p;
    minimal::PeriodOptions o;
    o.tolerance = tol;
    p.base      = minimal::period_sigma(a, c, 1, o);
    p.flipped   = minimal::period_sigma(a, c, -1, o).value;
    auto fine   = o;
    fine.lift_samples *= 2;
    fine.tolerance *= 0.5;
    p.refined = minimal::period_sigma(a, c, 1, fine).value;
    auto moved = o;
    moved.x0    = 0.1;
    p.homotopic = minimal::period_sigma(a, c, 1, moved).value;
    return p;
}

/// u on every node of a grid, integrated along staircase paths from the lower-left
/// corner. row_first walks along y = y_min first, then up each column.
struct GridField {
    std::vector<double> u;     // index j * nx + i
    std::vector<double> theta;
};

inline GridField reconstruct_on_grid(const minimal::DensityFamily& fam, const GridSpec& g,
                                     minimal::ReconstructOptions opts, bool row_first)
{
    GridField f;
    f.u.assign(std::size_t(g.nx) * g.ny, 0.0);
    f.theta.assign(f.u.size(), 0.0);
    std::vector<std::array<double, 2>> spine;
    const int spine_n = row_first ? g.nx : g.ny;
    for (int k = 0; k < spine_n; ++k) {
        spine.push_back(row_first ? std::array<double, 2>{g.x(k), g.y_min} : std::array<double, 2>{g.x_min, g.y(k)});
    }
    const auto s = minimal::reconstruct_u_path(spine, fam, opts);
    for (int k = 0; k < spine_n; ++k) {
        std::vector<std::array<double, 2>> rib;
        const int rib_n = row_first ? g.ny : g.nx;
        for (int l = 0; l < rib_n; ++l) {
            rib.push_back(row_first ? std::array<double, 2>{g.x(k), g.y(l)} : std::array<double, 2>{g.x(l), g.y(k)});
        }
        auto ro        = opts;
        ro.theta_start = s.theta[k];
        const auto r   = minimal::reconstruct_u_path(rib, fam, ro);
        for (int l = 0; l < rib_n; ++l) {
            const std::size_t idx = row_first ? std::size_t(l) * g.nx + k : std::size_t(k) * g.nx + l;
            f.u[idx]              = s.u[k] + r.u[l];
            f.theta[idx]          = r.theta[l];
        }
    }
    return f;
}

/// u(end) - u(start) along a straight segment, continuing a known slope angle.
inline double segment_increment(const minimal::DensityFamily& fam, double x0, double y0, double x1, double y1,
                                double theta_start, minimal::ReconstructOptions opts)
{
    opts.theta_start = theta_start;
    return minimal::reconstruct_u(std::vector<std::array<double, 2>>{{x0, y0}, {x1, y1}}, fam, opts).back();
}

struct TwoGraphCertificate {
    Worst density_residual;   // |sqrt(1 + |grad u|^2) - F| with grad u by Richardson differences of u
    Worst minimal_residual;   // analytic jets along each root
    Worst branch_consistency; // root gradient against the slope-angle system
    Worst path_independence;  // row-first against column-first staircases
    double difference_variation = 0.0; // max - min of u+ - u-
    double sum_variation        = 0.0; // max - min of u+ + u-
};

inline TwoGraphCertificate two_graph_certificate(const minimal::DensityFamily& fam, const GridSpec& g,
                                                 double fd_step = 2e-2)
{
    validate(g);
    TwoGraphCertificate cert;
    std::array<GridField, 2> fields;
    for (int b = 0; b < 2; ++b) {
        minimal::ReconstructOptions o;
        o.branch    = b == 0 ? 1 : -1;
        fields[b]   = reconstruct_on_grid(fam, g, o, true);
        const auto alt = reconstruct_on_grid(fam, g, o, false);
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t idx = std::size_t(j) * g.nx + i;
                const double x = g.x(i), y = g.y(j);
                cert.path_independence.update(fields[b].u[idx] - alt.u[idx], x, y);
                const double th = fields[b].theta[idx];
                const Jet mu    = minimal::mu_jet(fam, x, y);
                cert.minimal_residual.update(minimal::minimal_residual(minimal::u_jet_from_theta(mu, th)), x, y);
                const auto bc = minimal::branch_consistency_residual(mu, o.branch);
                cert.branch_consistency.update(std::hypot(bc[0], bc[1]), x, y);

                auto central = [&](double h, double dx, double dy) {
                    const double up = segment_increment(fam, x, y, x + h * dx, y + h * dy, th, o);
                    const double dn = segment_increment(fam, x, y, x - h * dx, y - h * dy, th, o);
                    return (up - dn) / (2.0 * h);
                };
                // Two Richardson levels on steps h, h/2, h/4.
                auto richardson = [&](double dx, double dy) {
                    const double d1 = central(fd_step, dx, dy);
                    const double d2 = central(0.5 * fd_step, dx, dy);
                    const double d4 = central(0.25 * fd_step, dx, dy);
                    const double r1 = (4.0 * d2 - d1) / 3.0;
                    const double r2 = (4.0 * d4 - d2) / 3.0;
                    return (16.0 * r2 - r1) / 15.0;
                };
                const double ux = richardson(1.0, 0.0);
                const double uy = richardson(0.0, 1.0);
                cert.density_residual.update(std::sqrt(1.0 + ux * ux + uy * uy) - minimal::density_value(fam, x, y),
                                             x, y);
            }
        }
    }
    double dmin = 1e300, dmax = -1e300, smin = 1e300, smax = -1e300;
    for (std::size_t k = 0; k < fields[0].u.size(); ++k) {
        const double d = fields[0].u[k] - fields[1].u[k];
        const double s = fields[0].u[k] + fields[1].u[k];
        dmin = std::min(dmin, d), dmax = std::max(dmax, d);
        smin = std::min(smin, s), smax = std::max(smax, s);
    }
    cert.difference_variation = dmax - dmin;
    cert.sum_variation        = smax - smin;
    return cert;
}

// ---------------------------------------------------------------------------
// Calabi density
// ---------------------------------------------------------------------------

struct EllipseDensityResult {
    Worst density;  // L(p, q) - 1/sin 2 phi
    Worst ellipse;  // p^2 - 2 cos 2 phi p q + q^2 - 1
    int samples = 0;
};

/// Random (phi, theta) in the elliptic range |theta| < phi.
inline EllipseDensityResult ellipse_density_check(int samples, std::mt19937_64& rng)
{
    EllipseDensityResult r;
    std::uniform_real_distribution<double> uphi(0.02, calabi::pi / 4 - 0.02);
    std::uniform_real_distribution<double> ut(-0.98, 0.98);
    for (int k = 0; k < samples; ++k) {
        const double phi   = uphi(rng);
        const double theta = ut(rng) * phi;
        const auto g       = calabi::ellipse_param(phi, theta);
        const std::string at = "(phi=" + std::to_string(phi) + ", theta=" + std::to_string(theta) + ")";
        r.density.update(calabi::lagrangian_L(g) - 1.0 / std::sin(2.0 * phi), at);
        r.ellipse.update(g.p * g.p - 2.0 * std::cos(2.0 * phi) * g.p * g.q + g.q * g.q - 1.0, at);
        ++r.samples;
    }
    return r;
}

/// Random third-order phi jet with phi in (0.05, pi/4 - 0.05).
inline Jet random_phi_jet(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> uv(0.05, calabi::pi / 4 - 0.05);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Jet j;
    j.order = 3;
    j.value = uv(rng);
    j.dx = ud(rng), j.dy = ud(rng);
    j.dxx = ud(rng), j.dxy = ud(rng), j.dyy = ud(rng);
    j.dxxx = ud(rng), j.dxxy = ud(rng), j.dxyy = ud(rng), j.dyyy = ud(rng);
    return j;
}

struct BranchBoundResult {
    std::size_t max_candidates = 0;
    std::array<int, 3> histogram{}; // jets with 0, 1, 2 candidates
    Worst held_out;                 // affine extraction at 2 theta = pi/3
    Worst candidate_residual;       // obstruction at each returned root
    int samples = 0;
};

inline BranchBoundResult branch_bound_check(int samples, std::mt19937_64& rng)
{
    BranchBoundResult r;
    for (int k = 0; k < samples; ++k) {
        const Jet phi = random_phi_jet(rng);
        const auto d  = calabi::compatibility_extract(phi);
        const auto g  = calabi::theta_gradient_calabi(phi, calabi::pi / 6);
        const auto w  = calabi::omega_at(d, calabi::pi / 6);
        const std::string at = "jet " + std::to_string(k);
        r.held_out.update(std::hypot(2.0 * g[0] - w[0], 2.0 * g[1] - w[1]), at);
        const auto c = calabi::two_theta_candidates(d.A1, d.A2, d.A3, phi.value);
        r.max_candidates = std::max(r.max_candidates, c.size());
        ++r.histogram[std::min<std::size_t>(c.size(), 2)];
        const double scale = std::max({1.0, std::abs(d.A1), std::abs(d.A2), std::abs(d.A3)});
        for (double t : c) {
            r.candidate_residual.update(calabi::obstruction_at(d, t) / scale, at);
        }
        ++r.samples;
    }
    return r;
}

/// A_i for constant phi over a set of values.
inline Worst constant_phi_check(int samples)
{
    Worst w;
    for (int k = 0; k < samples; ++k) {
        const double v = 0.05 + (calabi::pi / 4 - 0.1) * k / std::max(1, samples - 1);
        Jet j;
        j.order      = 3;
        j.value      = v;
        const auto d = calabi::compatibility_extract(j);
        w.update(std::max({std::abs(d.A1), std::abs(d.A2), std::abs(d.A3)}), "phi=" + std::to_string(v));
    }
    return w;
}

} // namespace exlab::verify
