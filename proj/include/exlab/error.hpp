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

#include <stdexcept>
#include <string>
#include <string_view>

namespace exlab
{

enum class ErrorKind {
    DomainViolation,
    ParamViolation,
    Singularity,
    DegenerateDelta,
    NoRealSolution,
    LiftAmbiguity,
    FoldSingularity,
    QuadratureFailure,
    NotPositiveDefinite,
    RangeViolation,
    SingularSystem,
    DegenerateAllZero,
    BranchCollision,
    NotHomogeneous,
    NotHarmonic,
    DegreeViolation,
    DegreeMismatch,
    IdentityFailure,
    DimensionMismatch,
    NotPSD,
    NotOnSphere,
    UsageError,
};

constexpr std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::ParamViolation: return "ParamViolation";
    case ErrorKind::Singularity: return "Singularity";
    case ErrorKind::DegenerateDelta: return "DegenerateDelta";
    case ErrorKind::NoRealSolution: return "NoRealSolution";
    case ErrorKind::LiftAmbiguity: return "LiftAmbiguity";
    case ErrorKind::FoldSingularity: return "FoldSingularity";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::RangeViolation: return "RangeViolation";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::DegenerateAllZero: return "DegenerateAllZero";
    case ErrorKind::BranchCollision: return "BranchCollision";
    case ErrorKind::NotHomogeneous: return "NotHomogeneous";
    case ErrorKind::NotHarmonic: return "NotHarmonic";
    case ErrorKind::DegreeViolation: return "DegreeViolation";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::IdentityFailure: return "IdentityFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotOnSphere: return "NotOnSphere";
    case ErrorKind::UsageError: return "UsageError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , m_kind(kind)
    {
    }

    ErrorKind kind() const noexcept
    {
        return m_kind;
    }

private:
    ErrorKind m_kind;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace exlab
