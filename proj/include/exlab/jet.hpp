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

#include <cmath>

namespace exlab
{

/// Value and partial derivatives up to third order of a scalar field at a point.
/// Entries beyond `order` are zero and must not be read.
struct Jet {
    double value = 0.0;
    double dx = 0.0, dy = 0.0;
    double dxx = 0.0, dxy = 0.0, dyy = 0.0;
    double dxxx = 0.0, dxxy = 0.0, dxyy = 0.0, dyyy = 0.0;
    int order = 0;

    bool finite() const
    {
        const double first[]  = {value};
        const double second[] = {dx, dy};
        const double third[]  = {dxx, dxy, dyy};
        const double fourth[] = {dxxx, dxxy, dxyy, dyyy};
        auto ok = [](const auto& arr) {
            for (double v : arr) {
                if (!std::isfinite(v)) {
                    return false;
                }
            }
            return true;
        };
        return ok(first) && (order < 1 || ok(second)) && (order < 2 || ok(third)) && (order < 3 || ok(fourth));
    }
};

using Dual1 = Dual<double, 2>;
using Dual2 = Dual<Dual1, 2>;
using Dual3 = Dual<Dual2, 2>;

/// Exact partials of `f(x, y)` (a generic callable over nested duals) up to third order.
template <class Fn>
Jet make_jet(Fn&& f, double x, double y)
{
    const Dual3 v = f(variable<Dual3>(x, 0), variable<Dual3>(y, 1));
    Jet j;
    j.order = 3;
    j.value = primal(v);
    j.dx    = primal(v.grad[0]);
    j.dy    = primal(v.grad[1]);
    j.dxx   = primal(v.grad[0].grad[0]);
    j.dxy   = primal(v.grad[0].grad[1]);
    j.dyy   = primal(v.grad[1].grad[1]);
    j.dxxx  = v.grad[0].grad[0].grad[0];
    j.dxxy  = v.grad[0].grad[0].grad[1];
    j.dxyy  = v.grad[0].grad[1].grad[1];
    j.dyyy  = v.grad[1].grad[1].grad[1];
    return j;
}

/// Lifts the value and first partials of a jet into a first-order dual in (x, y).
inline Dual1 value_dual(const Jet& j)
{
    return Dual1(j.value, {j.dx, j.dy});
}
inline Dual1 dx_dual(const Jet& j)
{
    return Dual1(j.dx, {j.dxx, j.dxy});
}
inline Dual1 dy_dual(const Jet& j)
{
    return Dual1(j.dy, {j.dxy, j.dyy});
}
inline Dual1 dxx_dual(const Jet& j)
{
    return Dual1(j.dxx, {j.dxxx, j.dxxy});
}
inline Dual1 dxy_dual(const Jet& j)
{
    return Dual1(j.dxy, {j.dxxy, j.dxyy});
}
inline Dual1 dyy_dual(const Jet& j)
{
    return Dual1(j.dyy, {j.dxyy, j.dyyy});
}

/// Applies a univariate function g (given g, g', g'', g''' at the jet value) to a jet.
inline Jet compose(const Jet& f, double g0, double g1, double g2, double g3)
{
    Jet h;
    h.order = f.order;
    h.value = g0;
    if (f.order >= 1) {
        h.dx = g1 * f.dx;
        h.dy = g1 * f.dy;
    }
    if (f.order >= 2) {
        h.dxx = g2 * f.dx * f.dx + g1 * f.dxx;
        h.dxy = g2 * f.dx * f.dy + g1 * f.dxy;
        h.dyy = g2 * f.dy * f.dy + g1 * f.dyy;
    }
    if (f.order >= 3) {
        h.dxxx = g3 * f.dx * f.dx * f.dx + 3.0 * g2 * f.dx * f.dxx + g1 * f.dxxx;
        h.dxxy = g3 * f.dx * f.dx * f.dy + g2 * (2.0 * f.dx * f.dxy + f.dy * f.dxx) + g1 * f.dxxy;
        h.dxyy = g3 * f.dx * f.dy * f.dy + g2 * (2.0 * f.dy * f.dxy + f.dx * f.dyy) + g1 * f.dxyy;
        h.dyyy = g3 * f.dy * f.dy * f.dy + 3.0 * g2 * f.dy * f.dyy + g1 * f.dyyy;
    }
    return h;
}

} // namespace exlab
