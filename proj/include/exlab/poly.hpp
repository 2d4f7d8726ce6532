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

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

/// Sparse multivariate polynomials over an arbitrary coefficient field, with
/// exact rationals (GMP) as the main instantiation.
namespace exlab
{

using Rational = mpq_class;
using Integer  = mpz_class;

/// "num/den" with den > 0 always written.
inline std::string to_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_rational(const std::string& text)
{
    Rational q;
    if (q.set_str(text, 10) != 0) {
        fail(ErrorKind::UsageError, "not a rational number: " + text);
    }
    q.canonicalize();
    if (q.get_den() == 0) {
        fail(ErrorKind::UsageError, "zero denominator: " + text);
    }
    return q;
}

inline double to_double(const Rational& q)
{
    return q.get_d();
}
inline double to_double(double v)
{
    return v;
}

inline bool is_perfect_square(const Rational& q)
{
    return q >= 0 && mpz_perfect_square_p(q.get_num_mpz_t()) != 0 && mpz_perfect_square_p(q.get_den_mpz_t()) != 0;
}

inline Rational exact_sqrt(const Rational& q)
{
    if (!is_perfect_square(q)) {
        fail(ErrorKind::DomainViolation, "not a rational square: " + to_string(q));
    }
    Integer num, den;
    mpz_sqrt(num.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(den.get_mpz_t(), q.get_den_mpz_t());
    return Rational(num, den);
}

using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e)
{
    int d = 0;
    for (int v : e) {
        d += v;
    }
    return d;
}

/// Graded lexicographic order: lower degree first, then x1 > x2 > ... within a degree.
struct GradedLex {
    bool operator()(const Exponents& a, const Exponents& b) const
    {
        const int da = total_degree(a), db = total_degree(b);
        if (da != db) {
            return da < db;
        }
        return a > b;
    }
};

/// All exponent vectors of total degree d in n variables, in graded-lex order.
inline std::vector<Exponents> monomials(int n, int d)
{
    std::vector<Exponents> out;
    Exponents e(n, 0);
    auto rec = [&](auto&& self, int i, int left) -> void {
        if (i == n - 1) {
            e[i] = left;
            out.push_back(e);
            return;
        }
        for (int k = left; k >= 0; --k) {
            e[i] = k;
            self(self, i + 1, left - k);
        }
    };
    if (n > 0 && d >= 0) {
        rec(rec, 0, d);
    }
    return out;
}

template <class C>
class Poly
{
public:
    using Terms = std::map<Exponents, C, GradedLex>;

    Poly() = default;
    explicit Poly(int nvars) : nvars_(nvars) {}

    static Poly constant(int nvars, const C& c)
    {
        Poly p(nvars);
        p.add_term(Exponents(nvars, 0), c);
        return p;
    }

    static Poly variable(int nvars, int i, const C& c = C(1))
    {
        Exponents e(nvars, 0);
        e.at(i) = 1;
        Poly p(nvars);
        p.add_term(e, c);
        return p;
    }

    static Poly monomial(const Exponents& e, const C& c = C(1))
    {
        Poly p(static_cast<int>(e.size()));
        p.add_term(e, c);
        return p;
    }

    int nvars() const { return nvars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    C coefficient(const Exponents& e) const
    {
        const auto it = terms_.find(e);
        return it == terms_.end() ? C(0) : it->second;
    }

    void add_term(const Exponents& e, const C& c)
    {
        if (static_cast<int>(e.size()) != nvars_) {
            fail(ErrorKind::DimensionMismatch, "exponent length differs from variable count");
        }
        if (c == C(0)) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == C(0)) {
                terms_.erase(it);
            }
        }
    }

    /// Degree if every term has the same total degree; the zero polynomial is
    /// homogeneous of every degree and reports none.
    std::optional<int> homogeneous_degree() const
    {
        std::optional<int> d;
        for (const auto& [e, c] : terms_) {
            const int k = total_degree(e);
            if (d && *d != k) {
                return std::nullopt;
            }
            d = k;
        }
        return d;
    }

    bool is_homogeneous_of(int d) const
    {
        for (const auto& [e, c] : terms_) {
            if (total_degree(e) != d) {
                return false;
            }
        }
        return true;
    }

    Poly derivative(int i) const
    {
        Poly out(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) {
                continue;
            }
            Exponents f = e;
            f[i] -= 1;
            out.add_term(f, c * C(e[i]));
        }
        return out;
    }

    /// Sum of pure second partials.
    Poly analyst_laplacian() const
    {
        Poly out(nvars_);
        for (const auto& [e, c] : terms_) {
            for (int i = 0; i < nvars_; ++i) {
                if (e[i] < 2) {
                    continue;
                }
                Exponents f = e;
                f[i] -= 2;
                out.add_term(f, c * C(e[i] * (e[i] - 1)));
            }
        }
        return out;
    }

    template <class V>
    V evaluate(const std::vector<V>& x) const
    {
        if (static_cast<int>(x.size()) != nvars_) {
            fail(ErrorKind::DimensionMismatch, "evaluation point has the wrong dimension");
        }
        V sum = V(0);
        for (const auto& [e, c] : terms_) {
            V t;
            if constexpr (std::is_same_v<V, C>) {
                t = c;
            }
            else {
                t = V(to_double(c));
            }
            for (int i = 0; i < nvars_; ++i) {
                for (int k = 0; k < e[i]; ++k) {
                    t *= x[i];
                }
            }
            sum += t;
        }
        return sum;
    }

    template <class D, class Fn>
    Poly<D> convert(Fn&& fn) const
    {
        Poly<D> out(nvars_);
        for (const auto& [e, c] : terms_) {
            out.add_term(e, fn(c));
        }
        return out;
    }

    Poly& operator+=(const Poly& o)
    {
        check_same(o);
        for (const auto& [e, c] : o.terms_) {
            add_term(e, c);
        }
        return *this;
    }
    Poly& operator-=(const Poly& o)
    {
        check_same(o);
        for (const auto& [e, c] : o.terms_) {
            add_term(e, -c);
        }
        return *this;
    }
    Poly& operator*=(const C& s)
    {
        if (s == C(0)) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) {
            c *= s;
        }
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const C& s) { return a *= s; }
    friend Poly operator*(const C& s, Poly a) { return a *= s; }
    friend Poly operator-(Poly a)
    {
        for (auto& [e, c] : a.terms_) {
            c = -c;
        }
        return a;
    }

    friend Poly operator*(const Poly& a, const Poly& b)
    {
        a.check_same(b);
        Poly out(a.nvars_);
        Exponents e(a.nvars_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                for (int i = 0; i < a.nvars_; ++i) {
                    e[i] = ea[i] + eb[i];
                }
                out.add_term(e, ca * cb);
            }
        }
        return out;
    }

    friend bool operator==(const Poly& a, const Poly& b)
    {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

private:
    void check_same(const Poly& o) const
    {
        if (o.nvars_ != nvars_) {
            fail(ErrorKind::DimensionMismatch, "polynomials in different variable counts");
        }
    }

    int nvars_ = 0;
    Terms terms_;
};

using QPoly = Poly<Rational>;

/// R^k with R = sum of squares of the n variables.
template <class C>
Poly<C> radius_power(int n, int k)
{
    Poly<C> r(n);
    for (int i = 0; i < n; ++i) {
        Exponents e(n, 0);
        e[i] = 2;
        r.add_term(e, C(1));
    }
    Poly<C> out = Poly<C>::constant(n, C(1));
    for (int j = 0; j < k; ++j) {
        out = out * r;
    }
    return out;
}

/// Largest absolute coefficient.
template <class C>
double max_abs_coefficient(const Poly<C>& p)
{
    double m = 0.0;
    for (const auto& [e, c] : p.terms()) {
        const double v = std::abs(to_double(c));
        m              = v > m ? v : m;
    }
    return m;
}

} // namespace exlab
