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

#include "exlab/dual.hpp"
#include "exlab/error.hpp"
#include "exlab/jet.hpp"
#include "exlab/quadrature.hpp"
#include "exlab/tolerances.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

/// Pairs of minimal graphs sharing an area density: the four density families,
/// the slope-angle system, its compatibility data, first integrals, and the
/// doubly periodic surface's angle lifts and periods.
namespace exlab::minimal
{

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Density families
// ---------------------------------------------------------------------------

struct ConstantPlane {
    double c = 2.0;
};
struct ScherkFifth {
};
struct HeliCatenoid {
    double phi = pi / 4;
};
struct DoublyPeriodic {
    double a = 1.0;
    double c = 1.0;
};

using DensityFamily = std::variant<ConstantPlane, ScherkFifth, HeliCatenoid, DoublyPeriodic>;

inline std::string family_name(const DensityFamily& fam)
{
    struct Namer {
        std::string operator()(const ConstantPlane&) const { return "ConstantPlane"; }
        std::string operator()(const ScherkFifth&) const { return "ScherkFifth"; }
        std::string operator()(const HeliCatenoid&) const { return "HeliCatenoid"; }
        std::string operator()(const DoublyPeriodic&) const { return "DoublyPeriodic"; }
    };
    return std::visit(Namer{}, fam);
}

inline bool doubly_periodic_admissible(double a, double c)
{
    return std::abs(a - c) < 1.0 && a + c > 1.0;
}

inline void validate(const DensityFamily& fam)
{
    if (const auto* p = std::get_if<ConstantPlane>(&fam)) {
        if (!(p->c > 1.0)) {
            fail(ErrorKind::ParamViolation, "ConstantPlane requires c > 1");
        }
    }
    else if (const auto* h = std::get_if<HeliCatenoid>(&fam)) {
        if (!(h->phi > 0.0 && h->phi < pi / 2)) {
            fail(ErrorKind::ParamViolation, "HeliCatenoid requires 0 < phi < pi/2");
        }
    }
    else if (const auto* d = std::get_if<DoublyPeriodic>(&fam)) {
        if (!doubly_periodic_admissible(d->a, d->c)) {
            fail(ErrorKind::ParamViolation, "DoublyPeriodic requires |a - c| < 1 < a + c (got a=" +
                                                std::to_string(d->a) + ", c=" + std::to_string(d->c) + ")");
        }
    }
}

/// C = cosh(2 mu) for each family, written once for doubles and nested duals.
template <class S>
S c_field(const DensityFamily& fam, const S& x, const S& y)
{
    using std::cos, std::cosh;
    if (const auto* p = std::get_if<ConstantPlane>(&fam)) {
        return S((p->c * p->c + 1.0) / (p->c * p->c - 1.0));
    }
    if (std::holds_alternative<ScherkFifth>(fam)) {
        return cosh(2.0 * x);
    }
    if (const auto* h = std::get_if<HeliCatenoid>(&fam)) {
        return 2.0 * (x * x + y * y) + std::cos(2.0 * h->phi);
    }
    const auto& d = std::get<DoublyPeriodic>(fam);
    return d.a * cosh(x) + d.c * cos(y);
}

template <class S>
S mu_field(const DensityFamily& fam, const S& x, const S& y)
{
    using std::acosh;
    if (const auto* p = std::get_if<ConstantPlane>(&fam)) {
        return S(std::atanh(1.0 / p->c));
    }
    if (std::holds_alternative<ScherkFifth>(fam)) {
        return x;
    }
    return 0.5 * acosh(c_field(fam, x, y));
}

/// Distance-like margin of (x, y) inside the family's domain; positive means inside.
inline double domain_margin(const DensityFamily& fam, double x, double y)
{
    if (std::holds_alternative<ConstantPlane>(fam)) {
        return 1.0;
    }
    if (std::holds_alternative<ScherkFifth>(fam)) {
        return x;
    }
    if (const auto* h = std::get_if<HeliCatenoid>(&fam)) {
        const double s = std::sin(h->phi);
        return x * x + y * y - s * s;
    }
    return c_field(fam, x, y) - 1.0;
}

inline bool in_domain(const DensityFamily& fam, double x, double y,
                      double margin = default_tolerances.domain_margin)
{
    return domain_margin(fam, x, y) > margin;
}

inline void require_domain(const DensityFamily& fam, double x, double y, double margin)
{
    validate(fam);
    if (!in_domain(fam, x, y, margin)) {
        fail(ErrorKind::DomainViolation, family_name(fam) + " evaluated outside its domain at (" +
                                             std::to_string(x) + ", " + std::to_string(y) + ")");
    }
}

/// Area density F(x, y) >= 1 of the family.
inline double density_value(const DensityFamily& fam, double x, double y,
                            double margin = default_tolerances.domain_margin)
{
    require_domain(fam, x, y, margin);
    if (const auto* p = std::get_if<ConstantPlane>(&fam)) {
        return p->c;
    }
    if (std::holds_alternative<ScherkFifth>(fam)) {
        return 1.0 / std::tanh(x);
    }
    if (const auto* h = std::get_if<HeliCatenoid>(&fam)) {
        const double r2 = x * x + y * y;
        const double s  = std::sin(h->phi);
        const double c  = std::cos(h->phi);
        return std::sqrt((r2 + c * c) / (r2 - s * s));
    }
    const auto& d    = std::get<DoublyPeriodic>(fam);
    const double sum = d.a * std::cosh(x) + d.c * std::cos(y);
    return std::sqrt((sum + 1.0) / (sum - 1.0));
}

struct MuC {
    double mu = 0.0;
    double C  = 0.0;
};

/// F = coth(mu), C = cosh(2 mu).
inline MuC mu_C_from_F(double F)
{
    if (!(F > 1.0)) {
        fail(ErrorKind::DomainViolation, "area density must exceed 1, got " + std::to_string(F));
    }
    const double F2 = F * F;
    return {std::atanh(1.0 / F), (F2 + 1.0) / (F2 - 1.0)};
}

inline Jet mu_jet(const DensityFamily& fam, double x, double y,
                  double margin = default_tolerances.domain_margin)
{
    require_domain(fam, x, y, margin);
    return make_jet([&](const auto& X, const auto& Y) { return mu_field(fam, X, Y); }, x, y);
}

inline Jet c_jet(const DensityFamily& fam, double x, double y, double margin = default_tolerances.domain_margin)
{
    require_domain(fam, x, y, margin);
    return make_jet([&](const auto& X, const auto& Y) { return c_field(fam, X, Y); }, x, y);
}

// ---------------------------------------------------------------------------
// Slope-angle system
// ---------------------------------------------------------------------------

struct ThetaGradient {
    double theta_x = 0.0;
    double theta_y = 0.0;
};

/// Gradient of the slope angle theta forced by the minimal surface equation and
/// closedness of du, for u_x = cos(theta)/sinh(mu), u_y = sin(theta)/sinh(mu).
template <class S>
std::array<S, 2> theta_gradient_generic(const S& mu, const S& mu_x, const S& mu_y, const S& theta)
{
    using std::cos, std::cosh, std::sin, std::sinh;
    const S sh2 = sinh(2.0 * mu);
    const S ch2 = cosh(2.0 * mu);
    const S s2  = sin(2.0 * theta);
    const S c2  = cos(2.0 * theta);
    return {(s2 * mu_x - (ch2 + c2) * mu_y) / sh2, (-s2 * mu_y + (ch2 - c2) * mu_x) / sh2};
}

inline ThetaGradient theta_gradient(const Jet& mu, double theta, double tau_sing = default_tolerances.singular)
{
    if (mu.order < 1) {
        fail(ErrorKind::DegreeViolation, "theta_gradient needs a first-order mu jet");
    }
    if (std::abs(std::sinh(2.0 * mu.value)) < tau_sing) {
        fail(ErrorKind::Singularity, "sinh(2 mu) vanishes");
    }
    const auto g = theta_gradient_generic(mu.value, mu.dx, mu.dy, theta);
    return {g[0], g[1]};
}

struct CompatibilityData {
    double coef_cos = 0.0;
    double coef_sin = 0.0;
    double rhs      = 0.0;
    double P        = 0.0;
    double Delta    = 0.0;
};

/// Coefficients of coef_cos*cos(2t) + coef_sin*sin(2t) = rhs, its discriminant P and Delta.
inline CompatibilityData compatibility_data(const Jet& mu)
{
    if (mu.order < 2) {
        fail(ErrorKind::DegreeViolation, "compatibility_data needs a second-order mu jet");
    }
    CompatibilityData d;
    d.coef_cos = mu.dxx - mu.dyy;
    d.coef_sin = 2.0 * mu.dxy;
    d.rhs      = (mu.dxx + mu.dyy) * std::cosh(2.0 * mu.value);
    d.Delta    = d.coef_cos * d.coef_cos + d.coef_sin * d.coef_sin;
    d.P        = d.Delta - d.rhs * d.rhs;
    return d;
}

/// (cos 2theta, sin 2theta).
struct DoubleAngle {
    double cos2 = 1.0;
    double sin2 = 0.0;
};

template <class S>
std::array<S, 2> two_theta_branch_generic(const S& mu, const S& mxx, const S& mxy, const S& myy, int branch)
{
    using std::cosh, std::sqrt;
    const S cc    = mxx - myy;
    const S cs    = 2.0 * mxy;
    const S rhs   = (mxx + myy) * cosh(2.0 * mu);
    const S delta = cc * cc + cs * cs;
    const S root  = sqrt(delta - rhs * rhs);
    const double sgn = branch >= 0 ? 1.0 : -1.0;
    return {(cc * rhs - sgn * cs * root) / delta, (cs * rhs + sgn * cc * root) / delta};
}

/// Both solutions of the compatibility relation; element 0 is branch +1.
inline std::array<DoubleAngle, 2> two_theta_solutions(const Jet& mu, double tau = default_tolerances.algebraic)
{
    const auto d = compatibility_data(mu);
    if (d.Delta <= tau) {
        fail(ErrorKind::DegenerateDelta, "Delta = " + std::to_string(d.Delta));
    }
    if (d.P < 0.0) {
        fail(ErrorKind::NoRealSolution, "P = " + std::to_string(d.P));
    }
    std::array<DoubleAngle, 2> out;
    for (int k = 0; k < 2; ++k) {
        const auto v = two_theta_branch_generic(mu.value, mu.dxx, mu.dxy, mu.dyy, k == 0 ? 1 : -1);
        out[k]       = {v[0], v[1]};
    }
    return out;
}

/// Residual of the compatibility relation at a given double angle.
inline double compatibility_residual(const CompatibilityData& d, const DoubleAngle& t)
{
    return d.coef_cos * t.cos2 + d.coef_sin * t.sin2 - d.rhs;
}

/// Mismatch between the gradient of a branch angle field (differentiated through the
/// third-order mu jet) and the gradient demanded by the slope-angle system.
/// Both components vanish exactly when the branch yields a genuine minimal graph.
inline std::array<double, 2> branch_consistency_residual(const Jet& mu, int branch)
{
    if (mu.order < 3) {
        fail(ErrorKind::DegreeViolation, "branch consistency needs a third-order mu jet");
    }
    const auto v  = two_theta_branch_generic(value_dual(mu), dxx_dual(mu), dxy_dual(mu), dyy_dual(mu), branch);
    const Dual1 t2 = atan2(v[1], v[0]);
    const double theta = 0.5 * t2.value;
    const auto g       = theta_gradient(mu, theta);
    return {0.5 * t2.grad[0] - g.theta_x, 0.5 * t2.grad[1] - g.theta_y};
}

// ---------------------------------------------------------------------------
// C-system and first integrals
// ---------------------------------------------------------------------------

inline std::array<double, 4> c_system_residual(const Jet& C, double tau_sing = default_tolerances.singular)
{
    if (C.order < 3) {
        fail(ErrorKind::DegreeViolation, "c_system_residual needs a third-order jet");
    }
    if (std::abs(C.value) <= tau_sing) {
        fail(ErrorKind::Singularity, "C vanishes");
    }
    const double c = C.value;
    return {C.dxxx - (C.dx * C.dxx - C.dx * C.dyy + C.dy * C.dxy) / c, C.dxxy - (C.dx * C.dxy) / c,
            C.dxyy - (C.dy * C.dxy) / c, C.dyyy - (C.dy * C.dyy - C.dy * C.dxx + C.dx * C.dxy) / c};
}

struct FirstIntegrals {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

inline FirstIntegrals first_integrals(const Jet& C, double tau_sing = default_tolerances.singular)
{
    if (C.order < 2) {
        fail(ErrorKind::DegreeViolation, "first_integrals needs a second-order jet");
    }
    if (std::abs(C.value) <= tau_sing) {
        fail(ErrorKind::Singularity, "C vanishes");
    }
    return {C.dxy / C.value, (C.dxx - C.dyy) / C.value,
            C.value * (C.dxx + C.dyy) - C.dx * C.dx - C.dy * C.dy};
}

// ---------------------------------------------------------------------------
// Scherk's fifth surface
// ---------------------------------------------------------------------------

template <class S>
S scherk_u(const S& x, const S& y, double psi)
{
    using std::asinh, std::cos, std::sinh;
    return asinh(cos(y + psi) / sinh(x));
}

struct ScherkSample {
    double u     = 0.0;
    double theta = 0.0;
};

/// Closed-form half Scherk surface sinh(x) sinh(u) = cos(y + psi) and its slope angle.
/// theta is the argument of grad(u) * sinh(x), in (-pi, pi].
inline ScherkSample scherk_closed_form(double x, double y, double psi)
{
    if (!(x > 0.0)) {
        fail(ErrorKind::DomainViolation, "Scherk closed form requires x > 0");
    }
    const double s = y + psi;
    return {std::asinh(std::cos(s) / std::sinh(x)),
            std::atan2(-std::sinh(x) * std::sin(s), -std::cosh(x) * std::cos(s))};
}

// ---------------------------------------------------------------------------
// Doubly periodic family on the surface z^2 = a cosh x + c cos y - 1
// ---------------------------------------------------------------------------

struct SurfacePoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double fold_height_squared(double a, double c, double x, double y)
{
    return a * std::cosh(x) + c * std::cos(y) - 1.0;
}

/// Point of the upper (sheet = +1) or lower (sheet = -1) sheet above (x, y).
inline SurfacePoint sheet_point(double a, double c, double x, double y, int sheet = 1)
{
    const double z2 = fold_height_squared(a, c, x, y);
    if (z2 < 0.0) {
        fail(ErrorKind::DomainViolation, "(x, y) lies inside an excluded oval");
    }
    return {x, y, (sheet >= 0 ? 1.0 : -1.0) * std::sqrt(z2)};
}

struct AbeqFields {
    double A = 0.0;
    double B = 0.0;
    double E = 0.0;
    double Q = 0.0;
};

inline AbeqFields abeq_fields(double a, double c, double x, double y)
{
    if (!doubly_periodic_admissible(a, c)) {
        fail(ErrorKind::ParamViolation, "require |a - c| < 1 < a + c");
    }
    const double chx = std::cosh(x);
    const double cy  = std::cos(y);
    AbeqFields f;
    f.A = c * c + 2.0 * a * c * chx * cy + a * a - 1.0;
    f.B = 2.0 * a * c * std::sinh(x) * std::sin(y);
    f.E = a * (a * a - c * c - 1.0) * chx + c * (a * a - c * c + 1.0) * cy;
    const double amc = a - c;
    const double apc = a + c;
    f.Q = std::sqrt((1.0 - amc * amc) * (apc * apc - 1.0) * (a * chx + c * cy + 1.0));
    return f;
}

/// (cos 2theta, sin 2theta) at a point of the surface.
inline DoubleAngle surface_double_angle(double a, double c, const SurfacePoint& p)
{
    const auto f    = abeq_fields(a, c, p.x, p.y);
    const double n2 = f.A * f.A + f.B * f.B;
    if (n2 <= default_tolerances.singular) {
        fail(ErrorKind::Singularity, "A^2 + B^2 vanishes");
    }
    const double qz = f.Q * p.z;
    return {(f.A * f.E - f.B * qz) / n2, (f.B * f.E + f.A * qz) / n2};
}

/// Seed representative of a double angle in [0, 2 pi); the fold value pi stays off the cut.
inline double seed_double_angle(const DoubleAngle& t)
{
    const double raw = std::atan2(t.sin2, t.cos2);
    return raw < 0.0 ? raw + 2.0 * pi : raw;
}

/// Representative of `angle` modulo 2 pi nearest to `previous`; refuses jumps of pi/2 or more.
inline double unwrap_near(double previous, double angle, double max_step = pi / 2)
{
    const double k    = std::round((previous - angle) / (2.0 * pi));
    const double lift = angle + 2.0 * pi * k;
    if (std::abs(lift - previous) >= max_step) {
        fail(ErrorKind::LiftAmbiguity, "double-angle step " + std::to_string(lift - previous) + " >= pi/2");
    }
    return lift;
}

struct LiftedAngle {
    std::vector<SurfacePoint> path;
    std::vector<double> theta;
    int branch_sign = 1;

    double total_change() const
    {
        return theta.empty() ? 0.0 : theta.back() - theta.front();
    }
};

/// Continuous lift of theta along a sampled path on the surface. seed_sign = -1
/// starts from theta + pi, i.e. the opposite choice of (cos theta, sin theta).
inline LiftedAngle lift_theta_along(const std::vector<SurfacePoint>& path, double a, double c, int seed_sign,
                                    double tau_surface = 1e-9)
{
    if (!doubly_periodic_admissible(a, c)) {
        fail(ErrorKind::ParamViolation, "require |a - c| < 1 < a + c");
    }
    LiftedAngle out;
    out.path        = path;
    out.branch_sign = seed_sign >= 0 ? 1 : -1;
    out.theta.reserve(path.size());
    double prev2 = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto& p = path[i];
        if (std::abs(p.z * p.z - fold_height_squared(a, c, p.x, p.y)) > tau_surface) {
            fail(ErrorKind::DomainViolation, "path sample " + std::to_string(i) + " is not on the surface");
        }
        const auto t = surface_double_angle(a, c, p);
        prev2        = i == 0 ? seed_double_angle(t) : unwrap_near(prev2, std::atan2(t.sin2, t.cos2));
        out.theta.push_back(0.5 * prev2 + (out.branch_sign < 0 ? pi : 0.0));
    }
    return out;
}

/// Components of the one-form (cos theta dx + sin theta dy) * sqrt(2) / z. On the upper
/// sheet z = sqrt(a cosh x + c cos y - 1); using the signed height keeps the form smooth
/// across the fold.
inline std::array<double, 2> zeta_form(const SurfacePoint& p, double theta, double a, double c,
                                       double tau_sing = default_tolerances.singular)
{
    const double h = fold_height_squared(a, c, p.x, p.y);
    if (h <= tau_sing || std::abs(p.z) <= tau_sing) {
        fail(ErrorKind::FoldSingularity, "zeta evaluated on the fold z = 0");
    }
    const double scale = std::sqrt(2.0) / p.z;
    return {std::cos(theta) * scale, std::sin(theta) * scale};
}

/// Closed loop on the surface cut by the plane x = x0, sampled at n + 1 points
/// (the last equals the first). Parametrized by t with y = y* cos t.
inline double section_half_width(double a, double c, double x0)
{
    const double arg = (1.0 - a * std::cosh(x0)) / c;
    if (!(arg > -1.0 && arg < 1.0)) {
        fail(ErrorKind::DomainViolation, "the plane x = x0 does not cut a closed loop");
    }
    return std::acos(arg);
}

inline SurfacePoint section_point(double a, double c, double x0, double ystar, double t)
{
    const double y  = ystar * std::cos(t);
    const double z2 = std::max(0.0, fold_height_squared(a, c, x0, y));
    const double st = std::sin(t);
    return {x0, y, (st >= 0.0 ? 1.0 : -1.0) * std::sqrt(z2)};
}

inline std::vector<SurfacePoint> sigma_loop(double a, double c, int n, double x0 = 0.0)
{
    const double ystar = section_half_width(a, c, x0);
    std::vector<SurfacePoint> out;
    out.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double t = 2.0 * pi * k / n;
        auto p         = section_point(a, c, x0, ystar, t);
        if (k == n) {
            p = out.front();
        }
        out.push_back(p);
    }
    return out;
}

/// Counterclockwise boundary of |x| <= R, 0 <= y <= 2 pi on the upper sheet.
inline std::vector<SurfacePoint> gamma_loop(double a, double c, double R, int per_edge)
{
    const std::array<std::array<double, 2>, 5> corners{{{-R, 0.0}, {R, 0.0}, {R, 2 * pi}, {-R, 2 * pi}, {-R, 0.0}}};
    std::vector<SurfacePoint> out;
    for (int e = 0; e < 4; ++e) {
        for (int k = 0; k < per_edge; ++k) {
            const double s = static_cast<double>(k) / per_edge;
            const double x = corners[e][0] + s * (corners[e + 1][0] - corners[e][0]);
            const double y = corners[e][1] + s * (corners[e + 1][1] - corners[e][1]);
            out.push_back(sheet_point(a, c, x, y, 1));
        }
    }
    out.push_back(out.front());
    return out;
}

struct PeriodOptions {
    double tolerance = default_tolerances.quadrature;
    int lift_samples = 4096;
    double x0        = 0.0; // section plane; any x0 with a closed section is homotopic
};

struct PeriodResult {
    double value       = 0.0;
    double error_bound = 0.0;
    int evaluations    = 0;
};

/// Period of zeta over the loop cut by x = x0 (by default the loop sigma at x = 0).
inline PeriodResult period_sigma(double a, double c, int seed_sign = 1, const PeriodOptions& opts = {})
{
    if (!doubly_periodic_admissible(a, c)) {
        fail(ErrorKind::ParamViolation, "require |a - c| < 1 < a + c");
    }
    const double ystar = section_half_width(a, c, opts.x0);
    const int n        = opts.lift_samples;

    // Coarse lift of 2 theta over the parameter circle; arbitrary t snaps to the nearest branch.
    std::vector<double> grid2(n + 1);
    {
        double prev = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double t   = 2.0 * pi * k / n;
            const auto d = surface_double_angle(a, c, section_point(a, c, opts.x0, ystar, t));
            prev         = k == 0 ? seed_double_angle(d) : unwrap_near(prev, std::atan2(d.sin2, d.cos2));
            grid2[k]         = prev;
        }
    }
    const double offset = seed_sign >= 0 ? 0.0 : pi;
    auto theta_at       = [&](double t) {
        const double u  = t / (2.0 * pi) * n;
        const int k     = std::clamp(static_cast<int>(std::floor(u)), 0, n - 1);
        const double w  = u - k;
        const double gi = (1.0 - w) * grid2[k] + w * grid2[k + 1];
        const auto d    = surface_double_angle(a, c, section_point(a, c, opts.x0, ystar, t));
        return 0.5 * unwrap_near(gi, std::atan2(d.sin2, d.cos2)) + offset;
    };

    // Along the section dx = 0, and sin(t)/z is smooth through the fold:
    // sin^2 t / z^2 = (2 c2 / (c sin(y* c2))) * (s2 / sin(y* s2)), s2 = sin^2(t/2), c2 = cos^2(t/2).
    auto ratio = [&](double v) {
        return std::abs(v) < 1e-12 ? 1.0 / ystar : v / std::sin(ystar * v);
    };
    auto integrand = [&](double t) {
        const double s2    = std::sin(0.5 * t) * std::sin(0.5 * t);
        const double c2    = std::cos(0.5 * t) * std::cos(0.5 * t);
        const double sin_z = std::sqrt((2.0 / c) * ratio(c2) * ratio(s2));
        return -std::sqrt(2.0) * ystar * std::sin(theta_at(t)) * sin_z;
    };
    const std::function<double(double)> fn = integrand;
    PeriodResult r;
    constexpr int panels = 8;
    for (int k = 0; k < panels; ++k) {
        const auto q = adaptive_simpson(fn, 2.0 * pi * k / panels, 2.0 * pi * (k + 1) / panels,
                                        opts.tolerance / panels);
        r.value += q.value;
        r.error_bound += q.error_bound;
        r.evaluations += q.evaluations;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Minimal surface residual and reconstruction
// ---------------------------------------------------------------------------

/// Expanded minimal surface operator divided by (1 + |grad u|^2)^(3/2).
inline double minimal_residual(const Jet& u)
{
    const double p = u.dx;
    const double q = u.dy;
    const double w = 1.0 + p * p + q * q;
    return ((1.0 + q * q) * u.dxx - 2.0 * p * q * u.dxy + (1.0 + p * p) * u.dyy) / (w * std::sqrt(w));
}

/// Second-order jet (value left at 0) of a graph with slope angle theta over density mu,
/// with theta's gradient taken from the slope-angle system.
inline Jet u_jet_from_theta(const Jet& mu, double theta)
{
    const auto g    = theta_gradient(mu, theta);
    const Dual1 th  = Dual1(theta, {g.theta_x, g.theta_y});
    const Dual1 m   = value_dual(mu);
    const Dual1 ux  = cos(th) / sinh(m);
    const Dual1 uy  = sin(th) / sinh(m);
    Jet u;
    u.order = 2;
    u.dx    = ux.value;
    u.dy    = uy.value;
    u.dxx   = ux.grad[0];
    u.dxy   = ux.grad[1];
    u.dyy   = uy.grad[1];
    return u;
}

struct ReconstructOptions {
    int branch         = 1;   // which root of the compatibility relation (non-degenerate families)
    int sign           = 1;   // +1 keeps theta, -1 uses theta + pi (u -> -u)
    double theta0      = 0.0; // initial slope angle for the degenerate families
    std::optional<double> theta_start; // continue from a known slope angle at the path start
    double step        = 5e-3;
    double margin      = default_tolerances.domain_margin;
};

inline bool is_degenerate(const DensityFamily& fam)
{
    return std::holds_alternative<ConstantPlane>(fam) || std::holds_alternative<ScherkFifth>(fam);
}

struct ReconstructedPath {
    std::vector<double> u;     // value at each path vertex, u[0] = 0
    std::vector<double> theta; // slope angle at each path vertex
};

/// Integrates du = (cos theta dx + sin theta dy) / sinh(mu) along a polyline.
/// Non-degenerate families take theta from the chosen compatibility root, lifted
/// continuously; the two degenerate families integrate the slope-angle system from theta0.
inline ReconstructedPath reconstruct_u_path(const std::vector<std::array<double, 2>>& path,
                                            const DensityFamily& fam, const ReconstructOptions& opts = {})
{
    validate(fam);
    ReconstructedPath out;
    if (path.empty()) {
        return out;
    }
    const double flip  = opts.sign >= 0 ? 0.0 : pi;
    const bool degen   = is_degenerate(fam);
    auto branch_theta2 = [&](double x, double y) {
        const auto sols = two_theta_solutions(mu_jet(fam, x, y, opts.margin));
        const auto& s   = sols[opts.branch >= 0 ? 0 : 1];
        return std::atan2(s.sin2, s.cos2);
    };
    auto slope = [&](double x, double y, double theta) {
        const double sm = std::sinh(mu_field(fam, x, y));
        return std::array<double, 2>{std::cos(theta) / sm, std::sin(theta) / sm};
    };

    if (!in_domain(fam, path[0][0], path[0][1], opts.margin)) {
        fail(ErrorKind::DomainViolation, "path starts outside the domain");
    }
    double u      = 0.0;
    double theta  = opts.theta_start.value_or(opts.theta0);
    double theta2 = 2.0 * theta;
    if (!degen) {
        theta2 = branch_theta2(path[0][0], path[0][1]);
        if (opts.theta_start) {
            theta2 = unwrap_near(2.0 * (*opts.theta_start - flip), theta2);
        }
        theta = 0.5 * theta2 + flip;
    }
    out.u.push_back(0.0);
    out.theta.push_back(theta);

    for (std::size_t seg = 1; seg < path.size(); ++seg) {
        const double x0 = path[seg - 1][0], y0 = path[seg - 1][1];
        const double dx = path[seg][0] - x0, dy = path[seg][1] - y0;
        const double len = std::hypot(dx, dy);
        const int sub    = std::max(1, static_cast<int>(std::ceil(len / opts.step)));
        const double h   = 1.0 / sub;
        for (int k = 0; k < sub; ++k) {
            const double s0 = k * h;
            if (degen) {
                // RK4 on (theta, u) in the segment parameter s.
                auto rhs = [&](double s, double th) {
                    const double x = x0 + s * dx, y = y0 + s * dy;
                    const auto g   = theta_gradient(mu_jet(fam, x, y, opts.margin), th);
                    const auto sl  = slope(x, y, th);
                    return std::array<double, 2>{g.theta_x * dx + g.theta_y * dy, sl[0] * dx + sl[1] * dy};
                };
                const auto k1 = rhs(s0, theta);
                const auto k2 = rhs(s0 + 0.5 * h, theta + 0.5 * h * k1[0]);
                const auto k3 = rhs(s0 + 0.5 * h, theta + 0.5 * h * k2[0]);
                const auto k4 = rhs(s0 + h, theta + h * k3[0]);
                theta += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
                u += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            }
            else {
                // Simpson on the sub-step with theta lifted through midpoint and endpoint.
                auto integrand = [&](double s, double th) {
                    const auto sl = slope(x0 + s * dx, y0 + s * dy, th);
                    return sl[0] * dx + sl[1] * dy;
                };
                const double fa = integrand(s0, theta);
                const double m2 = unwrap_near(theta2, branch_theta2(x0 + (s0 + 0.5 * h) * dx, y0 + (s0 + 0.5 * h) * dy));
                const double e2 = unwrap_near(m2, branch_theta2(x0 + (s0 + h) * dx, y0 + (s0 + h) * dy));
                const double fm = integrand(s0 + 0.5 * h, 0.5 * m2 + flip);
                theta2          = e2;
                theta           = 0.5 * e2 + flip;
                const double fb = integrand(s0 + h, theta);
                u += h / 6.0 * (fa + 4.0 * fm + fb);
            }
        }
        out.u.push_back(u);
        out.theta.push_back(theta);
    }
    return out;
}

/// u along the path vertices, u[0] = 0.
inline std::vector<double> reconstruct_u(const std::vector<std::array<double, 2>>& path, const DensityFamily& fam,
                                         const ReconstructOptions& opts = {})
{
    return reconstruct_u_path(path, fam, opts).u;
}

} // namespace exlab::minimal
