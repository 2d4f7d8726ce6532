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

#include "exlab/error.hpp"
#include "exlab/exact_linalg.hpp"
#include "exlab/harmonic_algebra.hpp"
#include "exlab/poly.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

/// Harmonic maps S^n -> S^(r-1) of constant energy density from positive
/// semidefinite solutions G of h(G) = sum g^ab h_a h_b = R^m.
namespace exlab::maps
{

using harmonic::HarmonicElement;

using GramMatrix = Matrix<Rational>;

struct HarmonicBasis {
    int n_ambient = 0;
    int m         = 0;
    std::vector<HarmonicElement> elements;
    std::vector<Rational> norms2; // <h_a, h_a>
    std::size_t size() const { return elements.size(); }
};

/// Pairwise orthogonal basis of H_m(R^N): harmonic parts of the monomials,
/// reduced by exact Gram-Schmidt in the invariant inner product.
inline HarmonicBasis basis_Hm(int n_ambient, int m)
{
    if (n_ambient < 3) {
        fail(ErrorKind::ParamViolation, "ambient dimension must be at least 3");
    }
    HarmonicBasis b{n_ambient, m, {}, {}};
    const std::size_t target = harmonic::dim_harmonics(n_ambient, m).get_ui();
    for (const auto& e : monomials(n_ambient, m)) {
        if (b.size() == target) {
            break;
        }
        HarmonicElement v = harmonic::harmonic_decompose(QPoly::monomial(e), m).h;
        for (std::size_t k = 0; k < b.size(); ++k) {
            const Rational c = harmonic::inner(v, b.elements[k]) / b.norms2[k];
            if (c != 0) {
                v.poly -= c * b.elements[k].poly;
            }
        }
        if (v.poly.is_zero()) {
            continue;
        }
        b.norms2.push_back(harmonic::inner(v, v));
        b.elements.push_back(std::move(v));
    }
    if (b.size() != target) {
        fail(ErrorKind::IdentityFailure, "monomial projections do not span H_m");
    }
    return b;
}

inline GramMatrix zero_gram(std::size_t d)
{
    return GramMatrix(d, std::vector<Rational>(d, Rational(0)));
}

inline GramMatrix identity_gram(std::size_t d)
{
    auto g = zero_gram(d);
    for (std::size_t i = 0; i < d; ++i) {
        g[i][i] = 1;
    }
    return g;
}

/// diag(1 / <h_a, h_a>): the identity matrix in orthonormal coordinates.
inline GramMatrix invariant_gram(const HarmonicBasis& b)
{
    auto g = zero_gram(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        g[i][i] = 1 / b.norms2[i];
    }
    return g;
}

/// h(G) = sum g^ab h_a h_b.
inline QPoly h_of_G(const GramMatrix& g, const HarmonicBasis& b)
{
    if (g.size() != b.size()) {
        fail(ErrorKind::DimensionMismatch, "Gram matrix and basis sizes differ");
    }
    QPoly out(b.n_ambient);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i].size() != b.size()) {
            fail(ErrorKind::DimensionMismatch, "Gram matrix is not square");
        }
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g[i][j] != 0) {
                out += g[i][j] * (b.elements[i].poly * b.elements[j].poly);
            }
        }
    }
    return out;
}

struct KernelCertificate {
    std::vector<GramMatrix> basis;
    std::size_t dimension = 0;
    std::size_t rank      = 0; // rank of G -> h(G) on symmetric matrices
};

struct AffineSolution {
    GramMatrix G0;
    Rational c;                 // h(invariant_gram) = c R^m
    KernelCertificate kernel;
};

/// G0 = c^-1 diag(1/<h_a,h_a>) solves h(G0) = R^m; the kernel of G -> h(G) is
/// computed exactly over symmetric matrices.
inline AffineSolution solve_h_equals_Rm(const HarmonicBasis& b)
{
    const int N        = b.n_ambient;
    const int m        = b.m;
    const std::size_t D = b.size();
    const QPoly Rm     = radius_power<Rational>(N, m);
    const QPoly inv    = h_of_G(invariant_gram(b), b);

    AffineSolution sol;
    const Exponents lead = Rm.terms().rbegin()->first;
    sol.c                = inv.coefficient(lead) / Rm.coefficient(lead);
    if (!(sol.c * Rm == inv)) {
        fail(ErrorKind::IdentityFailure, "invariant Gram matrix does not map to a multiple of R^m");
    }
    sol.G0 = invariant_gram(b);
    for (auto& row : sol.G0) {
        for (auto& v : row) {
            v /= sol.c;
        }
    }

    const auto rows = monomials(N, 2 * m);
    std::map<Exponents, std::size_t, GradedLex> row_of;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        row_of[rows[i]] = i;
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < D; ++i) {
        for (std::size_t j = i; j < D; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    Matrix<Rational> a(rows.size(), std::vector<Rational>(pairs.size(), Rational(0)));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        const QPoly prod  = (i == j ? Rational(1) : Rational(2)) * (b.elements[i].poly * b.elements[j].poly);
        for (const auto& [e, c] : prod.terms()) {
            a[row_of.at(e)][k] = c;
        }
    }
    const auto ns     = null_space(a, pairs.size());
    sol.kernel.rank   = pairs.size() - ns.size();
    sol.kernel.dimension = ns.size();
    for (const auto& v : ns) {
        auto g = zero_gram(D);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto [i, j] = pairs[k];
            g[i][j] = g[j][i] = v[k];
        }
        sol.kernel.basis.push_back(std::move(g));
    }
    return sol;
}

inline AffineSolution solve_h_equals_Rm(int n_ambient, int m)
{
    return solve_h_equals_Rm(basis_Hm(n_ambient, m));
}

/// Exact check that every kernel element maps to zero.
inline bool verify_kernel(const KernelCertificate& k, const HarmonicBasis& b)
{
    for (const auto& g : k.basis) {
        if (!h_of_G(g, b).is_zero()) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Maps
// ---------------------------------------------------------------------------

/// F_a = sqrt(scale_squared) * poly; scale_squared is 1 whenever the square root is rational.
struct ExactComponent {
    Rational scale_squared{1};
    QPoly poly;
};

struct SphericalHarmonicMap {
    int n     = 0; // domain sphere S^n in R^(n+1)
    int m     = 0;
    bool exact = true;
    std::vector<ExactComponent> exact_components;
    std::vector<Poly<double>> float_components;

    std::size_t size() const { return exact ? exact_components.size() : float_components.size(); }
    int lambda() const { return m * (m + n - 1); }
};

enum class Factorization { ExactLdl, FloatSpectral };

inline Eigen::MatrixXd to_eigen(const GramMatrix& g)
{
    Eigen::MatrixXd out(g.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            out(i, j) = g[i][j].get_d();
        }
    }
    return out;
}

/// Components F = S h with S^T S = G. The exact route uses G = L D L^T; a negative
/// direction is reported with its witness vector.
inline SphericalHarmonicMap construct_map(const GramMatrix& g, const HarmonicBasis& b,
                                          Factorization mode = Factorization::ExactLdl, double tol = 1e-10)
{
    if (g.size() != b.size()) {
        fail(ErrorKind::DimensionMismatch, "Gram matrix and basis sizes differ");
    }
    const int N = b.n_ambient;
    SphericalHarmonicMap map{N - 1, b.m, true, {}, {}};
    if (!(h_of_G(g, b) == radius_power<Rational>(N, b.m))) {
        fail(ErrorKind::IdentityFailure, "h(G) differs from R^m");
    }
    const auto ldl = ldl_psd(g);
    if (!ldl.psd) {
        std::string w;
        for (const auto& v : *ldl.witness) {
            w += (w.empty() ? "" : ", ") + to_string(v);
        }
        fail(ErrorKind::NotPSD, "G is indefinite; witness (" + w + ") has value " +
                                    to_string(quadratic_form(g, *ldl.witness)));
    }
    const std::size_t D = b.size();
    if (mode == Factorization::ExactLdl) {
        for (std::size_t a = 0; a < D; ++a) {
            if (ldl.D[a] == 0) {
                continue;
            }
            QPoly p(N);
            for (std::size_t j = a; j < D; ++j) {
                if (ldl.L[j][a] != 0) {
                    p += ldl.L[j][a] * b.elements[j].poly;
                }
            }
            ExactComponent c{ldl.D[a], p};
            if (is_perfect_square(c.scale_squared)) {
                c.poly *= exact_sqrt(c.scale_squared);
                c.scale_squared = 1;
            }
            map.exact_components.push_back(std::move(c));
        }
        return map;
    }

    map.exact = false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(g));
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
    std::vector<Poly<double>> hd;
    for (const auto& e : b.elements) {
        hd.push_back(e.poly.convert<double>([](const Rational& q) { return q.get_d(); }));
    }
    for (Eigen::Index a = 0; a < vals.size(); ++a) {
        if (vals(a) <= tol * scale) {
            continue;
        }
        Poly<double> p(N);
        const double s = std::sqrt(vals(a));
        for (std::size_t j = 0; j < D; ++j) {
            p += (s * vecs(j, a)) * hd[j];
        }
        map.float_components.push_back(std::move(p));
    }
    return map;
}

struct MapVerification {
    bool exact               = true;
    bool sum_of_squares_ok   = false;
    bool components_harmonic = false;
    double max_deviation     = 0.0; // largest coefficient of sum F^2 - R^m
};

/// sum F_a^2 = R^m and harmonicity of each component: exact on the rational path,
/// to `tol` in coefficients on the floating path.
inline MapVerification verify_map(const SphericalHarmonicMap& map, double tol = 1e-10)
{
    MapVerification v;
    v.exact    = map.exact;
    const int N = map.n + 1;
    if (map.exact) {
        QPoly sum(N);
        bool harm = true;
        for (const auto& c : map.exact_components) {
            sum += c.scale_squared * (c.poly * c.poly);
            harm = harm && harmonic::is_harmonic(c.poly) && c.poly.is_homogeneous_of(map.m);
        }
        const QPoly diff        = sum - radius_power<Rational>(N, map.m);
        v.sum_of_squares_ok     = diff.is_zero();
        v.max_deviation         = max_abs_coefficient(diff);
        v.components_harmonic   = harm;
        return v;
    }
    Poly<double> sum(N);
    double lap = 0.0;
    for (const auto& c : map.float_components) {
        sum += c * c;
        lap = std::max(lap, max_abs_coefficient(c.analyst_laplacian()));
    }
    const auto diff       = sum - radius_power<double>(N, map.m);
    v.max_deviation       = max_abs_coefficient(diff);
    v.sum_of_squares_ok   = v.max_deviation < tol;
    v.components_harmonic = lap < tol;
    return v;
}

/// sum_a (|grad F_a|^2 - m^2 F_a^2) at a unit vector x.
inline double energy_density(const SphericalHarmonicMap& map, const std::vector<double>& x)
{
    const int N = map.n + 1;
    if (static_cast<int>(x.size()) != N) {
        fail(ErrorKind::DimensionMismatch, "point has the wrong dimension");
    }
    double r2 = 0.0;
    for (double v : x) {
        r2 += v * v;
    }
    if (std::abs(std::sqrt(r2) - 1.0) > 1e-12) {
        fail(ErrorKind::NotOnSphere, "point is not on the unit sphere");
    }
    auto term = [&](const Poly<double>& p, double w) {
        double g2 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double d = p.derivative(i).evaluate(x);
            g2 += d * d;
        }
        const double f = p.evaluate(x);
        return w * (g2 - double(map.m) * map.m * f * f);
    };
    double e = 0.0;
    if (map.exact) {
        for (const auto& c : map.exact_components) {
            e += term(c.poly.convert<double>([](const Rational& q) { return q.get_d(); }), c.scale_squared.get_d());
        }
    }
    else {
        for (const auto& c : map.float_components) {
            e += term(c, 1.0);
        }
    }
    return e;
}

/// Uniformly distributed unit vector.
inline std::vector<double> random_sphere_point(int N, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> x(N);
    double r2 = 0.0;
    for (auto& v : x) {
        v = nd(rng);
        r2 += v * v;
    }
    const double r = std::sqrt(r2);
    for (auto& v : x) {
        v /= r;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Second solution by a PSD line search in G0 + span(kernel)
// ---------------------------------------------------------------------------

inline double min_eigenvalue(const GramMatrix& g)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(g), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

inline GramMatrix add_scaled(const GramMatrix& a, const Rational& t, const GramMatrix& k)
{
    GramMatrix out = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            out[i][j] += t * k[i][j];
        }
    }
    return out;
}

struct PerturbedSolution {
    GramMatrix G;
    Rational t;
    double t_max = 0.0; // floating estimate of where G0 + t k leaves the PSD cone
    bool psd_certified = false;
    bool differs_from_G0 = false;
};

/// Moves from G0 along a kernel direction to half the distance of the PSD
/// boundary (bisection on the smallest eigenvalue), rationalized and then
/// certified exactly. G0 is rotation invariant, so any other PSD solution gives a
/// map inequivalent to the G0 map.
inline PerturbedSolution perturb_in_kernel(const AffineSolution& sol, const GramMatrix& direction)
{
    PerturbedSolution out;
    auto lam = [&](double t) { return min_eigenvalue(add_scaled(sol.G0, Rational(t), direction)); };
    double hi = 1.0;
    int guard = 0;
    while (lam(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 60) {
            fail(ErrorKind::DomainViolation, "kernel direction never leaves the PSD cone");
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lam(mid) > 0.0 ? lo : hi) = mid;
    }
    out.t_max = lo;
    // Round t_max / 2 to a short dyadic rational.
    out.t = Rational(std::ldexp(std::round(std::ldexp(0.5 * lo, 20)), -20));
    out.t.canonicalize();
    out.G               = add_scaled(sol.G0, out.t, direction);
    out.psd_certified   = ldl_psd(out.G).psd;
    out.differs_from_G0 = out.G != sol.G0;
    return out;
}

struct NonuniquenessReport {
    int n_ambient               = 0;
    int m                       = 0;
    std::size_t basis_dimension = 0;
    std::size_t kernel_dimension = 0;
    std::size_t so_dimension    = 0;
    long margin                 = 0;
    bool nonunique              = false;
};

inline NonuniquenessReport nonuniqueness_report(int n_ambient, int m)
{
    const auto b   = basis_Hm(n_ambient, m);
    const auto sol = solve_h_equals_Rm(b);
    NonuniquenessReport r;
    r.n_ambient        = n_ambient;
    r.m                = m;
    r.basis_dimension  = b.size();
    r.kernel_dimension = sol.kernel.dimension;
    r.so_dimension     = static_cast<std::size_t>(n_ambient * (n_ambient - 1) / 2);
    r.margin           = static_cast<long>(r.kernel_dimension) - static_cast<long>(r.so_dimension);
    r.nonunique        = r.margin > 0;
    return r;
}

} // namespace exlab::maps
