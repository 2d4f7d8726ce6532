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

namespace exlab
{

/// Central tolerance defaults. Scenario configs may override any field.
struct Tolerances {
    double algebraic  = 1e-9;  // residuals evaluated on analytic jets
    double quadrature = 1e-8;  // adaptive Simpson target
    double integral   = 1e-7;  // spread of first integrals
    double singular   = 1e-12; // guard for divisions
    double angle      = 1e-9;  // unit-circle / lift consistency
    double domain_margin = 1e-6;
    double reconstruct = 1e-8;
    double float_factorization = 1e-10;
};

inline constexpr Tolerances default_tolerances{};

} // namespace exlab
