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

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace exlab
{

/// Forward-mode dual number carrying a gradient with N slots.
/// T may itself be a Dual, which yields higher derivatives by nesting.
template <class T, std::size_t N = 2>
struct Dual {
    T value{};
    std::array<T, N> grad{};

    constexpr Dual() = default;
    constexpr Dual(double v)
        : value(v)
    {
        grad.fill(T(0.0));
    }
    constexpr Dual(const T& v, const std::array<T, N>& g)
        : value(v)
        , grad(g)
    {
    }
    template <class U = T, std::enable_if_t<!std::is_same_v<U, double>, int> = 0>
    constexpr Dual(const T& v)
        : value(v)
    {
        grad.fill(T(0.0));
    }
};

template <class S>
struct is_dual : std::false_type {
};
template <class T, std::size_t N>
struct is_dual<Dual<T, N>> : std::true_type {
};
template <class S>
inline constexpr bool is_dual_v = is_dual<S>::value;

/// Innermost double of a (possibly nested) dual.
template <class S>
constexpr double primal(const S& s)
{
    if constexpr (is_dual_v<S>) {
        return primal(s.value);
    }
    else {
        return s;
    }
}

/// Independent variable number `slot` of a nested dual type, seeded at every level.
template <class S>
S variable(double v, std::size_t slot)
{
    if constexpr (is_dual_v<S>) {
        using Inner = decltype(S{}.value);
        S out(variable<Inner>(v, slot));
        out.grad.fill(Inner(0.0));
        out.grad[slot] = Inner(1.0);
        return out;
    }
    else {
        return v;
    }
}

/// Applies a scalar function with known first derivative at the primal level.
template <class T, std::size_t N, class Fn, class DFn>
Dual<T, N> chain(const Dual<T, N>& a, Fn&& f, DFn&& df)
{
    Dual<T, N> out;
    out.value  = f(a.value);
    const T dv = df(a.value);
    for (std::size_t i = 0; i < N; ++i) {
        out.grad[i] = dv * a.grad[i];
    }
    return out;
}

template <class T, std::size_t N>
Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> out;
    out.value = a.value + b.value;
    for (std::size_t i = 0; i < N; ++i) {
        out.grad[i] = a.grad[i] + b.grad[i];
    }
    return out;
}

template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> out;
    out.value = a.value - b.value;
    for (std::size_t i = 0; i < N; ++i) {
        out.grad[i] = a.grad[i] - b.grad[i];
    }
    return out;
}

template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a)
{
    Dual<T, N> out;
    out.value = -a.value;
    for (std::size_t i = 0; i < N; ++i) {
        out.grad[i] = -a.grad[i];
    }
    return out;
}

template <class T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> out;
    out.value = a.value * b.value;
    for (std::size_t i = 0; i < N; ++i) {
        out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
    }
    return out;
}

template <class T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b)
{
    Dual<T, N> out;
    out.value    = a.value / b.value;
    const T inv2 = T(1.0) / (b.value * b.value);
    for (std::size_t i = 0; i < N; ++i) {
        out.grad[i] = (a.grad[i] * b.value - a.value * b.grad[i]) * inv2;
    }
    return out;
}

// Mixed arithmetic with plain doubles.
template <class T, std::size_t N>
Dual<T, N> operator+(const Dual<T, N>& a, double b)
{
    Dual<T, N> out = a;
    out.value      = out.value + b;
    return out;
}
template <class T, std::size_t N>
Dual<T, N> operator+(double a, const Dual<T, N>& b)
{
    return b + a;
}
template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a, double b)
{
    return a + (-b);
}
template <class T, std::size_t N>
Dual<T, N> operator-(double a, const Dual<T, N>& b)
{
    return (-b) + a;
}
template <class T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, double b)
{
    Dual<T, N> out;
    out.value = a.value * b;
    for (std::size_t i = 0; i < N; ++i) {
        out.grad[i] = a.grad[i] * b;
    }
    return out;
}
template <class T, std::size_t N>
Dual<T, N> operator*(double a, const Dual<T, N>& b)
{
    return b * a;
}
template <class T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, double b)
{
    return a * (1.0 / b);
}
template <class T, std::size_t N>
Dual<T, N> operator/(double a, const Dual<T, N>& b)
{
    return Dual<T, N>(a) / b;
}

template <class T, std::size_t N>
Dual<T, N>& operator+=(Dual<T, N>& a, const Dual<T, N>& b)
{
    return a = a + b;
}
template <class T, std::size_t N>
Dual<T, N>& operator-=(Dual<T, N>& a, const Dual<T, N>& b)
{
    return a = a - b;
}
template <class T, std::size_t N>
Dual<T, N>& operator*=(Dual<T, N>& a, const Dual<T, N>& b)
{
    return a = a * b;
}

// Elementary functions. Unqualified calls inside the lambdas dispatch either to
// <cmath> or, for nested duals, back into these overloads.
template <class T, std::size_t N>
Dual<T, N> sin(const Dual<T, N>& a)
{
    using std::cos, std::sin;
    return chain(a, [](const T& v) { return sin(v); }, [](const T& v) { return cos(v); });
}
template <class T, std::size_t N>
Dual<T, N> cos(const Dual<T, N>& a)
{
    using std::cos, std::sin;
    return chain(a, [](const T& v) { return cos(v); }, [](const T& v) { return -sin(v); });
}
template <class T, std::size_t N>
Dual<T, N> tan(const Dual<T, N>& a)
{
    using std::cos, std::tan;
    return chain(
        a, [](const T& v) { return tan(v); },
        [](const T& v) {
            T c = cos(v);
            return T(1.0) / (c * c);
        });
}
template <class T, std::size_t N>
Dual<T, N> exp(const Dual<T, N>& a)
{
    using std::exp;
    return chain(a, [](const T& v) { return exp(v); }, [](const T& v) { return exp(v); });
}
template <class T, std::size_t N>
Dual<T, N> log(const Dual<T, N>& a)
{
    using std::log;
    return chain(a, [](const T& v) { return log(v); }, [](const T& v) { return T(1.0) / v; });
}
template <class T, std::size_t N>
Dual<T, N> sqrt(const Dual<T, N>& a)
{
    using std::sqrt;
    return chain(a, [](const T& v) { return sqrt(v); }, [](const T& v) { return T(0.5) / sqrt(v); });
}
template <class T, std::size_t N>
Dual<T, N> sinh(const Dual<T, N>& a)
{
    using std::cosh, std::sinh;
    return chain(a, [](const T& v) { return sinh(v); }, [](const T& v) { return cosh(v); });
}
template <class T, std::size_t N>
Dual<T, N> cosh(const Dual<T, N>& a)
{
    using std::cosh, std::sinh;
    return chain(a, [](const T& v) { return cosh(v); }, [](const T& v) { return sinh(v); });
}
template <class T, std::size_t N>
Dual<T, N> tanh(const Dual<T, N>& a)
{
    using std::cosh, std::tanh;
    return chain(
        a, [](const T& v) { return tanh(v); },
        [](const T& v) {
            T c = cosh(v);
            return T(1.0) / (c * c);
        });
}
template <class T, std::size_t N>
Dual<T, N> asinh(const Dual<T, N>& a)
{
    using std::asinh, std::sqrt;
    return chain(
        a, [](const T& v) { return asinh(v); }, [](const T& v) { return T(1.0) / sqrt(v * v + 1.0); });
}
template <class T, std::size_t N>
Dual<T, N> acosh(const Dual<T, N>& a)
{
    using std::acosh, std::sqrt;
    return chain(
        a, [](const T& v) { return acosh(v); }, [](const T& v) { return T(1.0) / sqrt(v * v - 1.0); });
}
template <class T, std::size_t N>
Dual<T, N> atan(const Dual<T, N>& a)
{
    using std::atan;
    return chain(a, [](const T& v) { return atan(v); }, [](const T& v) { return T(1.0) / (v * v + 1.0); });
}
template <class T, std::size_t N>
Dual<T, N> acos(const Dual<T, N>& a)
{
    using std::acos, std::sqrt;
    return chain(
        a, [](const T& v) { return acos(v); }, [](const T& v) { return T(-1.0) / sqrt(1.0 - v * v); });
}

template <class T, std::size_t N>
Dual<T, N> atan2(const Dual<T, N>& y, const Dual<T, N>& x)
{
    using std::atan2;
    Dual<T, N> out;
    out.value    = atan2(y.value, x.value);
    const T inv2 = T(1.0) / (x.value * x.value + y.value * y.value);
    for (std::size_t i = 0; i < N; ++i) {
        out.grad[i] = (x.value * y.grad[i] - y.value * x.grad[i]) * inv2;
    }
    return out;
}

} // namespace exlab
