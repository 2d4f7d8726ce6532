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
#include "exlab/poly.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

/// Exact calculus of harmonic homogeneous polynomials on R^n: the harmonic
/// projection, the degree-raising and -lowering pairings, the invariant inner
/// product, and the spectral coefficients of constant-energy maps.
namespace exlab::harmonic
{

/// Geometer's Laplacian: minus the sum of pure second partials.
inline QPoly laplacian(const QPoly& p)
{
    return -p.analyst_laplacian();
}

inline QPoly analyst_laplacian_power(QPoly p, int k)
{
    for (int j = 0; j < k; ++j) {
        p = p.analyst_laplacian();
    }
    return p;
}

inline bool is_harmonic(const QPoly& p)
{
    return p.analyst_laplacian().is_zero();
}

inline void require_homogeneous(const QPoly& p, int d)
{
    if (d < 0 || !p.is_homogeneous_of(d)) {
        fail(ErrorKind::NotHomogeneous, "polynomial is not homogeneous of degree " + std::to_string(d));
    }
}

struct HarmonicElement {
    QPoly poly;
    int degree = 0;
};

inline HarmonicElement make_harmonic(const QPoly& p, int d)
{
    require_homogeneous(p, d);
    if (!is_harmonic(p)) {
        fail(ErrorKind::NotHarmonic, "polynomial is not harmonic");
    }
    return {p, d};
}

struct Decomposition {
    HarmonicElement h;
    QPoly r;
};

/// p = h + R r with h harmonic, via h = sum_j c_j R^j (sum d^2)^j p.
inline Decomposition harmonic_decompose(const QPoly& p, int d)
{
    require_homogeneous(p, d);
    const int n = p.nvars();
    QPoly h     = p;
    QPoly r(n);
    QPoly lap      = p;
    QPoly rpow     = QPoly::constant(n, Rational(1)); // R^(j-1)
    const QPoly R  = radius_power<Rational>(n, 1);
    Rational coeff = 1;
    for (int j = 1; 2 * j <= d; ++j) {
        lap = lap.analyst_laplacian();
        coeff /= Rational(-2 * j * (n + 2 * d - 2 - 2 * j));
        r -= coeff * (rpow * lap);
        rpow = rpow * R;
        h += coeff * (rpow * lap);
    }
    if (!(h + R * r == p) || !is_harmonic(h)) {
        fail(ErrorKind::IdentityFailure, "harmonic projection failed its own check");
    }
    return {{h, d}, r};
}

/// Linear form sum xi_i x^i as its coefficient vector.
inline std::vector<Rational> linear_coefficients(const HarmonicElement& xi)
{
    if (xi.degree != 1) {
        fail(ErrorKind::DegreeViolation, "expected a linear form");
    }
    const int n = xi.poly.nvars();
    std::vector<Rational> out(n);
    for (int i = 0; i < n; ++i) {
        Exponents e(n, 0);
        e[i]   = 1;
        out[i] = xi.poly.coefficient(e);
    }
    return out;
}

inline HarmonicElement linear_form(const std::vector<Rational>& coeffs)
{
    const int n = static_cast<int>(coeffs.size());
    QPoly p(n);
    for (int i = 0; i < n; ++i) {
        p += QPoly::variable(n, i, coeffs[i]);
    }
    return {p, 1};
}

/// f . xi: directional derivative of f along xi.
inline HarmonicElement dot(const HarmonicElement& f, const HarmonicElement& xi)
{
    const auto c = linear_coefficients(xi);
    QPoly out(f.poly.nvars());
    for (int i = 0; i < static_cast<int>(c.size()); ++i) {
        if (c[i] != 0) {
            out += c[i] * f.poly.derivative(i);
        }
    }
    return {out, f.degree > 0 ? f.degree - 1 : 0};
}

/// f v xi = (n + 2d - 2) times the harmonic part of xi f. `offset` perturbs the
/// normalization constant and exists only for mutation testing.
inline HarmonicElement vee(const HarmonicElement& f, const HarmonicElement& xi, int offset = 0)
{
    if (xi.degree != 1) {
        fail(ErrorKind::DegreeViolation, "vee expects a linear second argument");
    }
    const int n   = f.poly.nvars();
    const auto dc = harmonic_decompose(xi.poly * f.poly, f.degree + 1);
    return {Rational(n + 2 * f.degree - 2 + offset) * dc.h.poly, f.degree + 1};
}

/// (alpha ^ beta).f = alpha (f . beta) - beta (f . alpha).
inline HarmonicElement so_action(const HarmonicElement& alpha, const HarmonicElement& beta, const HarmonicElement& f)
{
    return {alpha.poly * dot(f, beta).poly - beta.poly * dot(f, alpha).poly, f.degree};
}

/// <f, g> = (sum d^2)^d (f g) / (2^d d!).
inline Rational inner(const HarmonicElement& f, const HarmonicElement& g)
{
    if (f.degree != g.degree) {
        fail(ErrorKind::DegreeMismatch, "inner product of different degrees");
    }
    const QPoly c = analyst_laplacian_power(f.poly * g.poly, f.degree);
    Rational scale = 1;
    for (int j = 1; j <= f.degree; ++j) {
        scale *= 2 * j;
    }
    return c.coefficient(Exponents(f.poly.nvars(), 0)) / scale;
}

/// {f, g}: the linear form with coefficients <f, g . x^i>.
inline HarmonicElement brace(const HarmonicElement& f, const HarmonicElement& g)
{
    if (g.degree != f.degree + 1) {
        fail(ErrorKind::DegreeMismatch, "brace expects degrees d and d + 1");
    }
    const int n = f.poly.nvars();
    std::vector<Rational> c(n);
    for (int i = 0; i < n; ++i) {
        c[i] = inner(f, HarmonicElement{g.poly.derivative(i), f.degree});
    }
    return linear_form(c);
}

// ---------------------------------------------------------------------------
// Seeded random elements and the identity suite
// ---------------------------------------------------------------------------

inline Rational random_rational(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    Rational q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

inline HarmonicElement random_harmonic(int n, int d, std::mt19937_64& rng)
{
    QPoly p(n);
    for (const auto& e : monomials(n, d)) {
        p.add_term(e, random_rational(rng));
    }
    return harmonic_decompose(p, d).h;
}

inline HarmonicElement random_linear(int n, std::mt19937_64& rng)
{
    std::vector<Rational> c(n);
    for (auto& v : c) {
        v = random_rational(rng);
    }
    return linear_form(c);
}

struct IdentityCheck {
    std::string name;
    int trials = 0;
};

struct IdentityReport {
    int n            = 0;
    int d            = 0;
    std::uint64_t seed = 0;
    std::vector<IdentityCheck> checks;
};

struct IdentityOptions {
    int trials         = 50;
    std::uint64_t seed = 42;
    int vee_offset     = 0; // nonzero corrupts the vee normalization
    bool zero_alpha    = false;
};

inline const std::vector<std::string>& identity_names()
{
    static const std::vector<std::string> names{"vee_dot_commutator", "dot_vee_commutator", "vee_dot_norm",
                                                "vee_dot_adjoint"};
    return names;
}

/// Verifies the four pairing identities exactly on seeded random inputs; throws
/// IdentityFailure naming the first identity that breaks.
inline IdentityReport identity_suite(int n, int d, const IdentityOptions& opts = {})
{
    if (n < 3) {
        fail(ErrorKind::ParamViolation, "identity suite requires n >= 3");
    }
    IdentityReport rep{n, d, opts.seed, {}};
    for (const auto& name : identity_names()) {
        rep.checks.push_back({name, 0});
    }
    std::mt19937_64 rng(opts.seed);
    const int off = opts.vee_offset;
    for (int t = 0; t < opts.trials; ++t) {
        const auto f     = random_harmonic(n, d, rng);
        const auto g     = random_harmonic(n, d + 1, rng);
        const auto alpha = opts.zero_alpha ? linear_form(std::vector<Rational>(n)) : random_linear(n, rng);
        const auto beta  = random_linear(n, rng);
        const auto rot   = so_action(alpha, beta, f);
        auto witness     = [&](int k) {
            fail(ErrorKind::IdentityFailure, identity_names()[k] + " fails at trial " + std::to_string(t) +
                                                 " (n=" + std::to_string(n) + ", d=" + std::to_string(d) +
                                                 ", seed=" + std::to_string(opts.seed) + ")");
        };

        const QPoly lhs1 = dot(vee(f, alpha, off), beta).poly - dot(vee(f, beta, off), alpha).poly;
        if (!(lhs1 == Rational(n + 2 * d) * rot.poly)) {
            witness(0);
        }
        ++rep.checks[0].trials;

        QPoly lhs2(n);
        if (d > 0) {
            lhs2 = vee(dot(f, alpha), beta, off).poly - vee(dot(f, beta), alpha, off).poly;
        }
        if (!(lhs2 == Rational(-(n + 2 * d - 4)) * rot.poly)) {
            witness(1);
        }
        ++rep.checks[1].trials;

        Rational norm2 = 0;
        for (const auto& c : linear_coefficients(alpha)) {
            norm2 += c * c;
        }
        QPoly lhs3 = dot(vee(f, alpha, off), alpha).poly;
        if (d > 0) {
            lhs3 -= vee(dot(f, alpha), alpha, off).poly;
        }
        if (!(lhs3 == Rational(n + 2 * d - 2) * norm2 * f.poly)) {
            witness(2);
        }
        ++rep.checks[2].trials;

        if (inner(vee(f, alpha, off), g) != Rational(n + 2 * d - 2) * inner(f, dot(g, alpha))) {
            witness(3);
        }
        ++rep.checks[3].trials;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Spectral combinatorics
// ---------------------------------------------------------------------------

struct SpectralParams {
    int n = 3;
    Rational K{1};
    Rational lambda{0};
};

inline void require_spectral(const SpectralParams& p)
{
    if (p.n < 3) {
        fail(ErrorKind::ParamViolation, "n must be at least 3");
    }
}

/// b_m(lambda) = (lambda - m (n + m - 1) K) / ((n + 2m)(n + 2m - 2)).
inline Rational b_coeff(const SpectralParams& p, int m)
{
    require_spectral(p);
    Rational out = (p.lambda - Rational(m * (p.n + m - 1)) * p.K) / Rational((p.n + 2 * m) * (p.n + 2 * m - 2));
    out.canonicalize();
    return out;
}

/// A_0 = 1, A_{m+1} = b_m (m + n - 2)(n + 2m)/(m + 1) A_m.
inline std::vector<Rational> a_sequence(const SpectralParams& p, int m_max)
{
    require_spectral(p);
    if (!(p.K > 0)) {
        fail(ErrorKind::ParamViolation, "K must be positive");
    }
    std::vector<Rational> a{Rational(1)};
    for (int m = 0; m < m_max; ++m) {
        Rational step((m + p.n - 2) * (p.n + 2 * m), m + 1);
        step.canonicalize();
        Rational next = b_coeff(p, m) * step * a.back();
        next.canonicalize();
        a.push_back(next);
    }
    return a;
}

/// m with lambda = m (n + m - 1) K, if any.
inline std::optional<int> admissible_lambda(const SpectralParams& p)
{
    require_spectral(p);
    if (!(p.K > 0)) {
        fail(ErrorKind::ParamViolation, "K must be positive");
    }
    for (int m = 0;; ++m) {
        const Rational v = Rational(m * (p.n + m - 1)) * p.K;
        if (v == p.lambda) {
            return m;
        }
        if (v > p.lambda) {
            return std::nullopt;
        }
    }
}

struct SequenceSummary {
    std::optional<int> first_zero;
    std::optional<int> first_negative;
};

inline SequenceSummary summarize(const std::vector<Rational>& a)
{
    SequenceSummary s;
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
        if (!s.first_zero && a[i] == 0) {
            s.first_zero = i;
        }
        if (!s.first_negative && a[i] < 0) {
            s.first_negative = i;
        }
    }
    return s;
}

/// Two candidate constants for the norm of the second derivative tensor divided
/// by lambda b_1: the recursion gives (n-1)(n+2)/2, the alternative is n(n+4)/3.
struct SecondTensorFactors {
    Rational recursion;
    Rational alternative;
};

inline SecondTensorFactors second_tensor_factors(int n)
{
    SecondTensorFactors f{Rational((n - 1) * (n + 2), 2), Rational(n * (n + 4), 3)};
    f.recursion.canonicalize();
    f.alternative.canonicalize();
    return f;
}

/// Dimension of degree-m harmonic polynomials on R^N:
/// (N + 2m - 2)(N + m - 3)! / (m! (N - 2)!).
inline Integer dim_harmonics(int n_ambient, int m)
{
    if (n_ambient < 3) {
        fail(ErrorKind::ParamViolation, "ambient dimension must be at least 3");
    }
    if (m < 0) {
        return 0;
    }
    Integer num = n_ambient + 2 * m - 2, f1, f2, f3;
    mpz_fac_ui(f1.get_mpz_t(), n_ambient + m - 3);
    mpz_fac_ui(f2.get_mpz_t(), m);
    mpz_fac_ui(f3.get_mpz_t(), n_ambient - 2);
    return num * f1 / (f2 * f3);
}

/// Kernel dimension of the Laplacian from degree m to degree m - 2, by exact rank.
inline Integer dim_harmonics_by_rank(int n_ambient, int m)
{
    const auto src = monomials(n_ambient, m);
    if (m < 2) {
        return static_cast<long>(src.size());
    }
    const auto dst = monomials(n_ambient, m - 2);
    std::map<Exponents, std::size_t, GradedLex> row_of;
    for (std::size_t i = 0; i < dst.size(); ++i) {
        row_of[dst[i]] = i;
    }
    Matrix<Rational> a(dst.size(), std::vector<Rational>(src.size(), Rational(0)));
    for (std::size_t j = 0; j < src.size(); ++j) {
        const auto lap = QPoly::monomial(src[j]).analyst_laplacian();
        for (const auto& [e, c] : lap.terms()) {
            a[row_of.at(e)][j] = c;
        }
    }
    return static_cast<long>(src.size() - rank(a));
}

} // namespace exlab::harmonic
