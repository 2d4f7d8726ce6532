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

#include <cstddef>
#include <optional>
#include <vector>

/// Exact linear algebra over a field: reduced row echelon form, null spaces, and
/// symmetric LDL^T with an indefiniteness witness. Pivots are taken in column
/// order (first nonzero row), so results are reproducible.
namespace exlab
{

template <class T>
using Matrix = std::vector<std::vector<T>>;

template <class T>
struct RowEchelon {
    Matrix<T> reduced;
    std::vector<std::size_t> pivot_columns;
    std::size_t rank() const { return pivot_columns.size(); }
};

template <class T>
RowEchelon<T> rref(Matrix<T> a)
{
    RowEchelon<T> out;
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::size_t r          = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == T(0)) {
            ++piv;
        }
        if (piv == rows) {
            continue;
        }
        std::swap(a[piv], a[r]);
        const T inv = T(1) / a[r][c];
        for (std::size_t k = c; k < cols; ++k) {
            a[r][k] *= inv;
        }
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == T(0)) {
                continue;
            }
            const T f = a[i][c];
            for (std::size_t k = c; k < cols; ++k) {
                a[i][k] -= f * a[r][k];
            }
        }
        out.pivot_columns.push_back(c);
        ++r;
    }
    out.reduced = std::move(a);
    return out;
}

template <class T>
std::size_t rank(const Matrix<T>& a)
{
    return rref(a).rank();
}

/// Basis of {v : a v = 0}, one vector per free column.
template <class T>
std::vector<std::vector<T>> null_space(const Matrix<T>& a, std::size_t cols)
{
    const auto e = rref(a);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : e.pivot_columns) {
        is_pivot[c] = true;
    }
    std::vector<std::vector<T>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) {
            continue;
        }
        std::vector<T> v(cols, T(0));
        v[f] = T(1);
        for (std::size_t i = 0; i < e.pivot_columns.size(); ++i) {
            v[e.pivot_columns[i]] = -e.reduced[i][f];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

template <class T>
std::vector<T> mat_vec(const Matrix<T>& a, const std::vector<T>& v)
{
    std::vector<T> out(a.size(), T(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            out[i] += a[i][j] * v[j];
        }
    }
    return out;
}

template <class T>
T quadratic_form(const Matrix<T>& a, const std::vector<T>& v)
{
    const auto av = mat_vec(a, v);
    T s           = T(0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += v[i] * av[i];
    }
    return s;
}

/// G = L D L^T with L unit lower triangular. On failure `witness` satisfies w^T G w < 0.
template <class T>
struct LdlResult {
    Matrix<T> L;
    std::vector<T> D;
    bool psd = false;
    std::optional<std::vector<T>> witness;
};

template <class T>
LdlResult<T> ldl_psd(const Matrix<T>& g)
{
    const std::size_t n = g.size();
    for (const auto& row : g) {
        if (row.size() != n) {
            fail(ErrorKind::DimensionMismatch, "Gram matrix is not square");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (g[i][j] != g[j][i]) {
                fail(ErrorKind::DimensionMismatch, "Gram matrix is not symmetric");
            }
        }
    }
    LdlResult<T> out;
    out.L.assign(n, std::vector<T>(n, T(0)));
    out.D.assign(n, T(0));
    for (std::size_t i = 0; i < n; ++i) {
        out.L[i][i] = T(1);
    }
    Matrix<T> s = g; // trailing Schur complement lives in s[k..][k..]

    // v solving L^T v = u, with u supported on the trailing block.
    auto lift = [&](std::vector<T> u) {
        for (std::size_t ii = n; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < n; ++j) {
                u[ii] -= out.L[j][ii] * u[j];
            }
        }
        return u;
    };

    for (std::size_t k = 0; k < n; ++k) {
        const T d = s[k][k];
        if (d < T(0)) {
            std::vector<T> u(n, T(0));
            u[k]        = T(1);
            out.witness = lift(u);
            return out;
        }
        if (d == T(0)) {
            for (std::size_t j = k + 1; j < n; ++j) {
                if (s[j][k] == T(0)) {
                    continue;
                }
                // [[0, b], [b, c]] is indefinite: (t, 1) gives 2 t b + c = -1.
                const T b = s[j][k];
                std::vector<T> u(n, T(0));
                u[k]        = -(s[j][j] + T(1)) / (T(2) * b);
                u[j]        = T(1);
                out.witness = lift(u);
                return out;
            }
            continue;
        }
        out.D[k] = d;
        for (std::size_t i = k + 1; i < n; ++i) {
            out.L[i][k] = s[i][k] / d;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                s[i][j] -= out.L[i][k] * s[k][j];
            }
        }
    }
    out.psd = true;
    return out;
}

} // namespace exlab
