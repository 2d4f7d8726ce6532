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
#include "exlab/tolerances.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

/// Calabi's band Lagrangian L(p, q) = 2pq / sqrt((2pq)^2 - (p^2 + q^2 - 1)^2), its
/// prescribed-density parametrization, and the compatibility coefficients of the
/// slope-angle equation, all obtained by nested forward differentiation.
namespace exlab::calabi
{

inline constexpr double pi = std::numbers::pi;

struct GradientPair {
    double p = 0.0;
    double q = 0.0;
};

/// (2pq)^2 - (p^2 + q^2 - 1)^2, in factored form.
template <class S>
S radicand(const S& p, const S& q)
{
    const S d = p - q;
    const S s = p + q;
    return (1.0 - d * d) * (s * s - 1.0);
}

inline bool in_elliptic_range(double p, double q)
{
    return p * p + q * q > 1.0 && std::abs(p * p - q * q) < 1.0;
}

/// L without the elliptic-range check; requires a positive radicand.
inline double lagrangian_value(double p, double q, double tau_sing = default_tolerances.singular)
{
    const double r = radicand(p, q);
    if (!(r > tau_sing)) {
        fail(ErrorKind::Singularity, "radicand (2pq)^2 - (p^2+q^2-1)^2 is not positive");
    }
    return 2.0 * p * q / std::sqrt(r);
}

inline double lagrangian_L(const GradientPair& g, double tau_sing = default_tolerances.singular)
{
    if (!in_elliptic_range(g.p, g.q)) {
        fail(ErrorKind::DomainViolation, "gradient outside the elliptic range");
    }
    return lagrangian_value(g.p, g.q, tau_sing);
}

struct BandMetric {
    double f            = 0.0;
    double area_density = 0.0;
};

/// Metric |a dx + b dy|^2 = a^2 + b^2 + 2 f a b making dx, dy, dF unit covectors.
inline BandMetric band_metric(const Jet& F, double tau_sing = default_tolerances.singular)
{
    if (F.order < 1) {
        fail(ErrorKind::DegreeViolation, "band_metric needs a first-order jet");
    }
    const double prod = F.dx * F.dy;
    if (std::abs(prod) <= tau_sing) {
        fail(ErrorKind::Singularity, "F_x F_y vanishes");
    }
    BandMetric m;
    m.f = (1.0 - F.dx * F.dx - F.dy * F.dy) / (2.0 * prod);
    if (!(std::abs(m.f) < 1.0)) {
        fail(ErrorKind::NotPositiveDefinite, "|f| >= 1");
    }
    m.area_density = std::abs(lagrangian_value(F.dx, F.dy, tau_sing));
    return m;
}

template <class S>
std::array<S, 2> ellipse_generic(const S& phi, const S& theta)
{
    using std::cos, std::sin;
    const S s2 = sin(2.0 * phi);
    return {cos(theta - phi) / s2, cos(theta + phi) / s2};
}

/// Gradient on the ellipse p^2 - 2 cos(2 phi) p q + q^2 = 1 at angle theta.
inline GradientPair ellipse_param(double phi, double theta)
{
    if (!(phi > 0.0 && phi < pi / 4)) {
        fail(ErrorKind::RangeViolation, "phi must lie in (0, pi/4)");
    }
    if (!(std::abs(theta) < pi / 2 - phi)) {
        fail(ErrorKind::RangeViolation, "|theta| must be below pi/2 - phi");
    }
    const auto pq = ellipse_generic(phi, theta);
    return {pq[0], pq[1]};
}

/// Coefficients (psi_x, psi_y) of the one-form whose closedness is the Euler-Lagrange equation.
template <class S>
std::array<S, 2> psi_generic(const S& p, const S& q)
{
    using std::sqrt;
    const S r   = radicand(p, q);
    const S den = r * sqrt(r);
    const S p2 = p * p, q2 = q * q;
    const S p4 = p2 * p2, q4 = q2 * q2;
    return {(p4 - q4 - 2.0 * p2 + 1.0) * p / den, -((q4 - p4 - 2.0 * q2 + 1.0) * q) / den};
}

inline std::array<double, 2> psi_components(const GradientPair& g, double tau_sing = default_tolerances.singular)
{
    if (!(radicand(g.p, g.q) > tau_sing)) {
        fail(ErrorKind::Singularity, "psi evaluated on the boundary conic");
    }
    return psi_generic(g.p, g.q);
}

/// dx^dy coefficient of d(psi) along a graph with the given second-order jet.
inline double el_residual(const Jet& z, double tau_sing = default_tolerances.singular)
{
    if (z.order < 2) {
        fail(ErrorKind::DegreeViolation, "el_residual needs a second-order jet");
    }
    if (!in_elliptic_range(z.dx, z.dy)) {
        fail(ErrorKind::DomainViolation, "gradient outside the elliptic range");
    }
    if (!(radicand(z.dx, z.dy) > tau_sing)) {
        fail(ErrorKind::Singularity, "psi evaluated on the boundary conic");
    }
    const Dual1 p(z.dx, {z.dxx, z.dxy});
    const Dual1 q(z.dy, {z.dxy, z.dyy});
    const auto psi = psi_generic(p, q);
    return psi[1].grad[0] - psi[0].grad[1];
}

// ---------------------------------------------------------------------------
// Slope-angle system and its compatibility coefficients
// ---------------------------------------------------------------------------

/// (theta_x, theta_y) making both z_x dx + z_y dy and psi closed, for (z_x, z_y) on
/// the ellipse at angle theta. Works for doubles and nested duals.
template <class S>
std::array<S, 2> theta_gradient_generic(const S& phi, const S& phi_x, const S& phi_y, const S& theta,
                                        double tau_sing = default_tolerances.singular)
{
    using D = Dual<S, 2>;
    const auto pq = ellipse_generic(D(phi, {S(1.0), S(0.0)}), D(theta, {S(0.0), S(1.0)}));
    const S p = pq[0].value, p_phi = pq[0].grad[0], p_th = pq[0].grad[1];
    const S q = pq[1].value, q_phi = pq[1].grad[0], q_th = pq[1].grad[1];

    const auto psi = psi_generic(D(p, {S(1.0), S(0.0)}), D(q, {S(0.0), S(1.0)}));
    const S Xp = psi[0].grad[0], Xq = psi[0].grad[1];
    const S Yp = psi[1].grad[0], Yq = psi[1].grad[1];

    // Row 1: p_y - q_x = 0.  Row 2: d/dx psi_y - d/dy psi_x = 0.
    const S a11 = -q_th;
    const S a12 = p_th;
    const S b1  = q_phi * phi_x - p_phi * phi_y;
    const S a21 = Yp * p_th + Yq * q_th;
    const S a22 = -(Xp * p_th + Xq * q_th);
    const S b2  = -(Yp * p_phi + Yq * q_phi) * phi_x + (Xp * p_phi + Xq * q_phi) * phi_y;
    const S det = a11 * a22 - a12 * a21;
    if (!(std::abs(primal(det)) > tau_sing)) {
        fail(ErrorKind::SingularSystem, "slope-angle system is singular");
    }
    return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det};
}

inline void require_phi(const Jet& phi, int order)
{
    if (phi.order < order) {
        fail(ErrorKind::DegreeViolation, "phi jet of order " + std::to_string(order) + " required");
    }
    if (!(phi.value > 0.0 && phi.value < pi / 4)) {
        fail(ErrorKind::RangeViolation, "phi must lie in (0, pi/4)");
    }
}

inline std::array<double, 2> theta_gradient_calabi(const Jet& phi, double theta,
                                                   double tau_sing = default_tolerances.singular)
{
    require_phi(phi, 1);
    return theta_gradient_generic(phi.value, phi.dx, phi.dy, theta, tau_sing);
}

struct CompatibilityData {
    std::array<double, 2> omega1{};
    std::array<double, 2> omega2{};
    std::array<double, 2> omega3{};
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
};

/// Probe angles theta with 2 theta in {-pi/2, 0, pi/2}; all lie in the elliptic range.
inline constexpr std::array<double, 3> probe_angles{-pi / 4, 0.0, pi / 4};

/// Obstruction A1 cos 2t + A2 sin 2t + A3 = d/dx(2 theta_y) - d/dy(2 theta_x) at angle t,
/// with theta's gradient substituted from the slope-angle system. The arguments
/// carry the spatial jet of phi up to second order.
template <class S>
S obstruction_generic(const S& phi, const S& phi_x, const S& phi_y, const S& phi_xx, const S& phi_xy,
                      const S& phi_yy, double t)
{
    using D      = Dual<S, 2>;
    const auto g = theta_gradient_generic(phi, phi_x, phi_y, S(t));
    const D th(S(t), {g[0], g[1]});
    const auto gd = theta_gradient_generic(D(phi, {phi_x, phi_y}), D(phi_x, {phi_xx, phi_xy}),
                                           D(phi_y, {phi_xy, phi_yy}), th);
    return 2.0 * (gd[1].grad[0] - gd[0].grad[1]);
}

template <class S>
std::array<S, 3> obstruction_coefficients(const S& phi, const S& phi_x, const S& phi_y, const S& phi_xx,
                                          const S& phi_xy, const S& phi_yy)
{
    const S fm = obstruction_generic(phi, phi_x, phi_y, phi_xx, phi_xy, phi_yy, probe_angles[0]);
    const S f0 = obstruction_generic(phi, phi_x, phi_y, phi_xx, phi_xy, phi_yy, probe_angles[1]);
    const S fp = obstruction_generic(phi, phi_x, phi_y, phi_xx, phi_xy, phi_yy, probe_angles[2]);
    const S a3 = 0.5 * (fp + fm);
    return {f0 - a3, 0.5 * (fp - fm), a3};
}

inline CompatibilityData compatibility_extract(const Jet& phi)
{
    require_phi(phi, 2);
    CompatibilityData d;
    std::array<std::array<double, 2>, 3> g;
    for (int k = 0; k < 3; ++k) {
        const auto v = theta_gradient_calabi(phi, probe_angles[k]);
        g[k]         = {2.0 * v[0], 2.0 * v[1]};
    }
    for (int i = 0; i < 2; ++i) {
        d.omega3[i] = 0.5 * (g[2][i] + g[0][i]);
        d.omega2[i] = 0.5 * (g[2][i] - g[0][i]);
        d.omega1[i] = g[1][i] - d.omega3[i];
    }
    const auto A = obstruction_coefficients(phi.value, phi.dx, phi.dy, phi.dxx, phi.dxy, phi.dyy);
    d.A1         = A[0];
    d.A2         = A[1];
    d.A3         = A[2];
    return d;
}

/// cos 2t omega1 + sin 2t omega2 + omega3.
inline std::array<double, 2> omega_at(const CompatibilityData& d, double theta)
{
    const double c = std::cos(2.0 * theta);
    const double s = std::sin(2.0 * theta);
    return {c * d.omega1[0] + s * d.omega2[0] + d.omega3[0], c * d.omega1[1] + s * d.omega2[1] + d.omega3[1]};
}

inline double obstruction_at(const CompatibilityData& d, double theta)
{
    return d.A1 * std::cos(2.0 * theta) + d.A2 * std::sin(2.0 * theta) + d.A3;
}

/// Representative of theta modulo pi in (-pi/2, pi/2].
inline double reduce_half_turn(double theta)
{
    double t = std::remainder(theta, pi);
    if (t <= -pi / 2) {
        t += pi;
    }
    return t;
}

/// Roots theta of A1 cos 2t + A2 sin 2t + A3 = 0 with |theta| < pi/2 - phi, ascending.
inline std::vector<double> two_theta_candidates(double A1, double A2, double A3, double phi,
                                                double tau_zero = default_tolerances.singular)
{
    if (std::abs(A1) <= tau_zero && std::abs(A2) <= tau_zero && std::abs(A3) <= tau_zero) {
        fail(ErrorKind::DegenerateAllZero, "A1 = A2 = A3 = 0");
    }
    std::vector<double> out;
    const double rho = std::hypot(A1, A2);
    if (rho == 0.0 || std::abs(A3) > rho) {
        return out;
    }
    const double base  = std::atan2(A2, A1);
    const double delta = std::acos(std::clamp(-A3 / rho, -1.0, 1.0));
    for (double sgn : {1.0, -1.0}) {
        const double t = reduce_half_turn(0.5 * (base + sgn * delta));
        if (std::abs(t) < pi / 2 - phi &&
            std::none_of(out.begin(), out.end(), [&](double u) { return std::abs(u - t) < 1e-15; })) {
            out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<double> two_theta_candidates(const Jet& phi)
{
    const auto d = compatibility_extract(phi);
    return two_theta_candidates(d.A1, d.A2, d.A3, phi.value);
}

struct ThirdOrderResidual {
    double theta = 0.0;
    std::array<double, 2> residual{};
};

/// d(2 theta) of the root branch (sign +1 or -1 in front of the arccos) minus the
/// slope-angle system at that root. Vanishes iff the branch solves the system.
inline ThirdOrderResidual third_order_residual(const Jet& phi, int branch,
                                               double tau_collision = default_tolerances.algebraic)
{
    require_phi(phi, 3);
    const auto A = obstruction_coefficients(value_dual(phi), dx_dual(phi), dy_dual(phi), dxx_dual(phi),
                                            dxy_dual(phi), dyy_dual(phi));
    if (std::abs(A[0].value) <= default_tolerances.singular && std::abs(A[1].value) <= default_tolerances.singular &&
        std::abs(A[2].value) <= default_tolerances.singular) {
        fail(ErrorKind::DegenerateAllZero, "A1 = A2 = A3 = 0");
    }
    const Dual1 rho = sqrt(A[0] * A[0] + A[1] * A[1]);
    if (std::abs(A[2].value) > rho.value) {
        fail(ErrorKind::NoRealSolution, "|A3| exceeds the amplitude of A1, A2");
    }
    if (rho.value - std::abs(A[2].value) <= tau_collision * std::max(1.0, rho.value)) {
        fail(ErrorKind::BranchCollision, "the two roots merge");
    }
    const double sgn   = branch >= 0 ? 1.0 : -1.0;
    const Dual1 two_th = atan2(A[1], A[0]) + sgn * acos(-A[2] / rho);
    ThirdOrderResidual r;
    r.theta      = reduce_half_turn(0.5 * two_th.value);
    const auto g = theta_gradient_calabi(phi, r.theta);
    r.residual   = {two_th.grad[0] - 2.0 * g[0], two_th.grad[1] - 2.0 * g[1]};
    return r;
}

} // namespace exlab::calabi
