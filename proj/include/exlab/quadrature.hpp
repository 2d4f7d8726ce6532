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

#include <cmath>
#include <functional>
#include <string>

namespace exlab
{

struct QuadratureResult {
    double value       = 0.0;
    double error_bound = 0.0;
    int evaluations    = 0;
};

namespace detail
{

struct SimpsonState {
    const std::function<double(double)>* f;
    int evaluations = 0;
    int max_depth;
    bool depth_hit = false;
};

inline double simpson_recurse(SimpsonState& st, double a, double b, double fa, double fm, double fb, double whole,
                              double tol, int depth, double& err)
{
    const double m   = 0.5 * (a + b);
    const double lm  = 0.5 * (a + m);
    const double rm  = 0.5 * (m + b);
    const double flm = (*st.f)(lm);
    const double frm = (*st.f)(rm);
    st.evaluations += 2;
    const double left  = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        err += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    if (depth >= st.max_depth) {
        st.depth_hit = true;
        err += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, err) +
           simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, err);
}

} // namespace detail

/// Adaptive Simpson quadrature with interval bisection and Richardson correction.
/// Throws QuadratureFailure when the recursion depth limit is reached before `tol` is met.
inline QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                                         int max_depth = 40)
{
    detail::SimpsonState st{&f, 0, max_depth};
    const double fa    = f(a);
    const double fb    = f(b);
    const double fm    = f(0.5 * (a + b));
    st.evaluations     = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double err         = 0.0;
    const double v     = detail::simpson_recurse(st, a, b, fa, fm, fb, whole, tol, 0, err);
    if (st.depth_hit || !std::isfinite(v)) {
        fail(ErrorKind::QuadratureFailure,
             "adaptive Simpson did not reach tolerance " + std::to_string(tol) + " on [" + std::to_string(a) +
                 ", " + std::to_string(b) + "]");
    }
    return {v, err, st.evaluations};
}

} // namespace exlab
