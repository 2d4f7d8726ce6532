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
#include "exlab/calabi_density.hpp"
#include "exlab/verification.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace exlab;
using namespace exlab::calabi;

namespace
{

/// phi = pi/8 + x/10 + y^2/50 around the origin.
Jet fixture_phi()
{
    Jet j;
    j.order = 3;
    j.value = pi / 8;
    j.dx    = 0.1;
    j.dyy   = 0.04;
    return j;
}

/// Jet of a quadratic-or-lower phi field shifted to (x, y).
Jet shifted(const Jet& j, double x, double y)
{
    Jet s  = j;
    s.value = j.value + j.dx * x + j.dy * y + 0.5 * (j.dxx * x * x + 2 * j.dxy * x * y + j.dyy * y * y);
    s.dx    = j.dx + j.dxx * x + j.dxy * y;
    s.dy    = j.dy + j.dxy * x + j.dyy * y;
    return s;
}

/// First-order transport of theta from the origin.
double theta_near(const Jet& phi, double theta, double x, double y)
{
    const auto g = theta_gradient_calabi(phi, theta);
    return theta + g[0] * x + g[1] * y;
}

int brute_force_roots(const CompatibilityData& d, double phi)
{
    const int n    = 200000;
    const double a = -(pi / 2 - phi), b = pi / 2 - phi;
    int count      = 0;
    double prev    = obstruction_at(d, a + 1e-9);
    for (int k = 1; k <= n; ++k) {
        const double t = a + (b - a) * k / n;
        const double v = obstruction_at(d, k == n ? t - 1e-9 : t);
        if ((v > 0) != (prev > 0)) {
            ++count;
        }
        prev = v;
    }
    return count;
}

} // namespace

TEST(Lagrangian, ReferenceValues)
{
    EXPECT_NEAR(lagrangian_L({1.0, 1.0}), 2.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(lagrangian_L({0.8, 1.1}), lagrangian_L({1.1, 0.8}), 1e-15);
    EXPECT_NEAR(lagrangian_L({-0.8, -1.1}), lagrangian_L({0.8, 1.1}), 1e-15);
}

TEST(Lagrangian, RangeErrors)
{
    try {
        lagrangian_L({0.2, 0.3});
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DomainViolation);
    }
    try {
        lagrangian_L({1.0, 1e-13});
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_TRUE(e.kind() == ErrorKind::Singularity || e.kind() == ErrorKind::DomainViolation);
    }
}

TEST(Lagrangian, ConstantOnEllipses)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.02, pi / 4 - 0.02);
    for (int k = 0; k < 200; ++k) {
        const double phi = u(rng);
        const double th  = (2.0 * u(rng) / (pi / 4) - 1.0) * 0.98 * phi;
        EXPECT_NEAR(lagrangian_L(ellipse_param(phi, th)), 1.0 / std::sin(2 * phi), 1e-10);
    }
}

TEST(BandMetric, ReferenceValues)
{
    Jet F;
    F.order = 1;
    F.dx = F.dy = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(band_metric(F).f, 0.0, 1e-15);
    F.dx = F.dy = 1.0;
    const auto m = band_metric(F);
    EXPECT_NEAR(m.f, -0.5, 1e-15);
    EXPECT_NEAR(m.area_density, 2.0 / std::sqrt(3.0), 1e-15);
    F.dx = 2.0, F.dy = 0.1;
    EXPECT_THROW(band_metric(F), Error);
    F.dy = 0.0;
    EXPECT_THROW(band_metric(F), Error);
}

TEST(Ellipse, ReferencePoints)
{
    const double phi = 0.5;
    const auto a     = ellipse_param(phi, 0.0);
    EXPECT_NEAR(a.p, 1.0 / (2 * std::sin(phi)), 1e-15);
    EXPECT_NEAR(a.q, 1.0 / (2 * std::sin(phi)), 1e-15);
    const auto b = ellipse_param(phi, phi);
    EXPECT_NEAR(b.p, 1.0 / std::sin(2 * phi), 1e-15);
    EXPECT_NEAR(b.q, std::cos(2 * phi) / std::sin(2 * phi), 1e-15);
    const double edge = pi / 2 - phi;
    const auto e      = ellipse_param(phi, edge - 1e-9);
    EXPECT_NEAR(e.p, 1.0, 1e-8);
    EXPECT_NEAR(e.q, 0.0, 1e-8);
    const auto f = ellipse_param(phi, -edge + 1e-9);
    EXPECT_NEAR(f.p, 0.0, 1e-8);
    EXPECT_NEAR(f.q, 1.0, 1e-8);
    EXPECT_THROW(ellipse_param(phi, edge + 1e-3), Error);
    EXPECT_THROW(ellipse_param(pi / 4, 0.0), Error);
}

TEST(Psi, ReferenceValues)
{
    const auto s   = psi_components({1.0, 1.0});
    const double d = std::pow(3.0, 1.5);
    EXPECT_NEAR(s[0], -1.0 / d, 1e-15);
    EXPECT_NEAR(s[1], 1.0 / d, 1e-15);
    const auto t = psi_components({0.9, 0.9});
    EXPECT_NEAR(t[0], -t[1], 1e-15);
}

TEST(Psi, OddUnderJointSignFlip)
{
    for (auto [p, q] : std::vector<std::pair<double, double>>{{0.9, 0.6}, {1.1, 0.5}}) {
        const auto a = psi_components({p, q});
        const auto b = psi_components({-p, -q});
        EXPECT_EQ(a[0], -b[0]);
        EXPECT_EQ(a[1], -b[1]);
    }
}

// Oracle: psi = (-L_q, L_p) / 2 with L differentiated by central differences.
TEST(Psi, IsTheRotatedGradientOfL)
{
    const double h = 1e-6;
    for (auto [p, q] : std::vector<std::pair<double, double>>{{0.9, 0.6}, {1.1, 0.5}, {0.8, 0.9}}) {
        const double Lp = (lagrangian_value(p + h, q) - lagrangian_value(p - h, q)) / (2 * h);
        const double Lq = (lagrangian_value(p, q + h) - lagrangian_value(p, q - h)) / (2 * h);
        const auto s    = psi_components({p, q});
        EXPECT_NEAR(s[0], -0.5 * Lq, 1e-8);
        EXPECT_NEAR(s[1], 0.5 * Lp, 1e-8);
    }
}

TEST(ElResidual, LinearIsZeroAndOdd)
{
    Jet z;
    z.order = 2;
    z.dx = 1.0, z.dy = 0.7;
    EXPECT_EQ(el_residual(z), 0.0);
    z.dxx = 0.1, z.dxy = -0.05, z.dyy = 0.2;
    Jet m = z;
    m.dx = -z.dx, m.dy = -z.dy, m.dxx = -z.dxx, m.dxy = -z.dxy, m.dyy = -z.dyy;
    EXPECT_NEAR(el_residual(m), -el_residual(z), 1e-15);
}

// Oracle: Euler-Lagrange expression (L_p)_x + (L_q)_y by nested finite differences.
TEST(ElResidual, FiniteDifferenceOracle)
{
    const double alpha = 1.0, beta = 0.7;
    for (double eps : {1e-3, 1e-2, 5e-2}) {
        auto grad = [&](double x, double y) { return std::array<double, 2>{alpha + 2 * eps * x, beta - 2 * eps * y}; };
        auto Lp   = [&](double x, double y) {
            const auto g = grad(x, y);
            const double h = 1e-5;
            return (lagrangian_value(g[0] + h, g[1]) - lagrangian_value(g[0] - h, g[1])) / (2 * h);
        };
        auto Lq = [&](double x, double y) {
            const auto g = grad(x, y);
            const double h = 1e-5;
            return (lagrangian_value(g[0], g[1] + h) - lagrangian_value(g[0], g[1] - h)) / (2 * h);
        };
        const double k  = 1e-3;
        const double el = 0.5 * ((Lp(k, 0) - Lp(-k, 0)) / (2 * k) + (Lq(0, k) - Lq(0, -k)) / (2 * k));
        Jet z;
        z.order = 2;
        z.dx = alpha, z.dy = beta, z.dxx = 2 * eps, z.dyy = -2 * eps;
        const double r = el_residual(z);
        EXPECT_NEAR(r, el, 1e-5 * std::max(1.0, std::abs(el)));
        EXPECT_LT(std::abs(r), 50 * eps);
    }
}

TEST(ThetaGradient, ConstantPhiAdmitsConstantTheta)
{
    Jet phi;
    phi.order    = 1;
    phi.value    = 0.3;
    const auto g = theta_gradient_calabi(phi, 0.1);
    EXPECT_EQ(g[0], 0.0);
    EXPECT_EQ(g[1], 0.0);
}

// Oracle: with theta transported to first order, both one-forms are closed to
// the accuracy of a central-difference stencil.
TEST(ThetaGradient, ClosednessOracle)
{
    const Jet phi = fixture_phi();
    const double h = 1e-5;
    for (double t : {-0.5, 0.0, 0.3, 0.9}) {
        auto pq_at = [&](double x, double y) {
            const Jet s = shifted(phi, x, y);
            return ellipse_param(s.value, theta_near(phi, t, x, y));
        };
        auto psi_at = [&](double x, double y) { return psi_components(pq_at(x, y)); };
        const double curl1 = (pq_at(0, h).p - pq_at(0, -h).p) / (2 * h) - (pq_at(h, 0).q - pq_at(-h, 0).q) / (2 * h);
        const double curl2 =
            (psi_at(h, 0)[1] - psi_at(-h, 0)[1]) / (2 * h) - (psi_at(0, h)[0] - psi_at(0, -h)[0]) / (2 * h);
        EXPECT_NEAR(curl1, 0.0, 1e-7) << "t=" << t;
        EXPECT_NEAR(curl2, 0.0, 1e-7) << "t=" << t;
    }
}

TEST(Compatibility, ConstantPhiVanishes)
{
    EXPECT_LE(verify::constant_phi_check(20).value, 1e-12);
}

TEST(Compatibility, RegressionFixture)
{
    const auto d = compatibility_extract(fixture_phi());
    EXPECT_NEAR(d.A1, 0.96, 1e-9);
    EXPECT_NEAR(d.A2, 0.08, 1e-9);
    EXPECT_NEAR(d.A3, -0.509116882454, 1e-9);
    const auto c = two_theta_candidates(d.A1, d.A2, d.A3, pi / 8);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0], -0.465412274898, 1e-9);
    EXPECT_NEAR(c[1], 0.548553506787, 1e-9);
}

TEST(Compatibility, AffineInDoubleAngle)
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        const Jet phi = verify::random_phi_jet(rng);
        const auto d  = compatibility_extract(phi);
        for (double t : {-0.6, 0.1, 0.5}) {
            if (std::abs(t) >= pi / 2 - phi.value) {
                continue;
            }
            const auto g = theta_gradient_calabi(phi, t);
            const auto w = omega_at(d, t);
            EXPECT_NEAR(2 * g[0], w[0], 1e-8);
            EXPECT_NEAR(2 * g[1], w[1], 1e-8);
        }
    }
}

// Oracle: circulation of 2 grad(theta) around a small square divided by its area.
TEST(Compatibility, GreenTheoremOracle)
{
    const Jet phi = fixture_phi();
    const auto d  = compatibility_extract(phi);
    const double h = 2e-3;
    for (double t : {-0.4, 0.0, 0.35}) {
        auto form = [&](double x, double y) {
            const Jet s = shifted(phi, x, y);
            return theta_gradient_calabi(s, theta_near(phi, t, x, y));
        };
        const std::function<double(double)> bottom = [&](double s) { return form(s, -h)[0]; };
        const std::function<double(double)> right  = [&](double s) { return form(h, s)[1]; };
        const std::function<double(double)> top    = [&](double s) { return form(s, h)[0]; };
        const std::function<double(double)> left   = [&](double s) { return form(-h, s)[1]; };
        const double circ = adaptive_simpson(bottom, -h, h, 1e-14).value + adaptive_simpson(right, -h, h, 1e-14).value -
                            adaptive_simpson(top, -h, h, 1e-14).value - adaptive_simpson(left, -h, h, 1e-14).value;
        const double phi_curl = 2.0 * circ / (4 * h * h);
        EXPECT_NEAR(phi_curl, obstruction_at(d, t), 1e-4) << "t=" << t;
    }
}

TEST(Candidates, ReferenceCases)
{
    const auto c = two_theta_candidates(1.0, 0.0, 0.0, 0.3);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0], -pi / 4, 1e-15);
    EXPECT_NEAR(c[1], pi / 4, 1e-15);
    EXPECT_TRUE(two_theta_candidates(1.0, 0.5, 2.0, 0.3).empty());
    const auto one = two_theta_candidates(0.0, 1.0, 0.0, 0.7);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_NEAR(one[0], 0.0, 1e-15);
    try {
        two_theta_candidates(0.0, 0.0, 0.0, 0.3);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateAllZero);
    }
}

// Oracle: sign changes of the obstruction on a fine angle scan.
TEST(Candidates, BruteForceCount)
{
    std::mt19937_64 rng(5);
    int compared = 0;
    for (int k = 0; k < 200; ++k) {
        const Jet phi = verify::random_phi_jet(rng);
        const auto d  = compatibility_extract(phi);
        const double rho = std::hypot(d.A1, d.A2);
        if (std::abs(rho - std::abs(d.A3)) < 1e-3 * rho) {
            continue; // near-tangent roots are not resolved by a scan
        }
        const auto c = two_theta_candidates(d.A1, d.A2, d.A3, phi.value);
        bool near_edge = false;
        for (double t : c) {
            near_edge = near_edge || pi / 2 - phi.value - std::abs(t) < 1e-4;
        }
        if (near_edge) {
            continue;
        }
        EXPECT_EQ(static_cast<int>(c.size()), brute_force_roots(d, phi.value)) << "jet " << k;
        EXPECT_LE(c.size(), 2u);
        ++compared;
    }
    EXPECT_GT(compared, 150);
}

TEST(ThirdOrder, FixtureResiduals)
{
    const auto p = third_order_residual(fixture_phi(), 1);
    EXPECT_NEAR(p.theta, 0.548553506787, 1e-9);
    EXPECT_NEAR(p.residual[0], 0.401064, 1e-5);
    EXPECT_NEAR(p.residual[1], 1.02405, 1e-5);
    const auto m = third_order_residual(fixture_phi(), -1);
    EXPECT_NEAR(m.residual[0], 1.3479, 1e-4);
    EXPECT_NEAR(m.residual[1], 1.09044, 1e-5);
}

TEST(ThirdOrder, StableUnderPerturbation)
{
    Jet phi         = fixture_phi();
    const auto base = third_order_residual(phi, 1);
    phi.dxy += 1e-6;
    phi.dxxx += 1e-6;
    const auto pert = third_order_residual(phi, 1);
    EXPECT_LT(std::abs(pert.residual[0] - base.residual[0]), 1e-4);
    EXPECT_LT(std::abs(pert.residual[1] - base.residual[1]), 1e-4);
}

TEST(ThirdOrder, Guards)
{
    Jet flat;
    flat.order = 3;
    flat.value = 0.4;
    try {
        third_order_residual(flat, 1);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateAllZero);
    }
    Jet low   = fixture_phi();
    low.order = 2;
    EXPECT_THROW(third_order_residual(low, 1), Error);
}
