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
#include "exlab/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace exlab;
using namespace exlab::harness;

namespace
{

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    }
    catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::UsageError;
}

std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("exlab_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Scenario, SuiteAndVerbMustMatchCommandLine)
{
    const json doc = {{"suite", "maps"}, {"verb", "kernel"}, {"params", {{"n_ambient", 4}, {"m", 2}}}};
    EXPECT_NO_THROW(parse_scenario(doc, "maps", "kernel"));
    EXPECT_EQ(kind_of([&] { parse_scenario(doc, "maps", "verify"); }), ErrorKind::UsageError);
    EXPECT_EQ(kind_of([&] { parse_scenario(doc, "calabi", "kernel"); }), ErrorKind::UsageError);
}

TEST(Scenario, UnknownSuiteAndVerbAreUsageErrors)
{
    EXPECT_EQ(kind_of([] { parse_scenario(json::object(), "nope", "kernel"); }), ErrorKind::UsageError);
    EXPECT_EQ(kind_of([] { parse_scenario(json::object(), "maps", "nope"); }), ErrorKind::UsageError);
    EXPECT_EQ(kind_of([] { parse_scenario(json::array(), "maps", "kernel"); }), ErrorKind::UsageError);
}

TEST(Scenario, SeedDefaultsAndValidation)
{
    EXPECT_EQ(parse_scenario(json::object(), "harmonic", "dims").seed, 42u);
    EXPECT_EQ(parse_scenario({{"seed", 7}}, "harmonic", "dims").seed, 7u);
    EXPECT_EQ(kind_of([] { parse_scenario({{"seed", -1}}, "harmonic", "dims"); }), ErrorKind::UsageError);
    EXPECT_EQ(kind_of([] { parse_scenario({{"seed", "x"}}, "harmonic", "dims"); }), ErrorKind::UsageError);
}

TEST(Scenario, ToleranceOverrides)
{
    const auto s = parse_scenario({{"tolerances", {{"algebraic", 1e-6}}}}, "harmonic", "dims");
    EXPECT_DOUBLE_EQ(s.tolerances.algebraic, 1e-6);
    EXPECT_DOUBLE_EQ(s.tolerances.quadrature, default_tolerances.quadrature);
    EXPECT_EQ(kind_of([] { apply_overrides({{"bogus", 1e-3}}); }), ErrorKind::UsageError);
    EXPECT_EQ(kind_of([] { apply_overrides({{"algebraic", 0.0}}); }), ErrorKind::UsageError);
    EXPECT_EQ(kind_of([] { apply_overrides({{"algebraic", "big"}}); }), ErrorKind::UsageError);
}

TEST(Scenario, GridValidation)
{
    const json good = {{"x_min", 0.0}, {"x_max", 1.0}, {"y_min", 0.0}, {"y_max", 1.0}, {"nx", 3}, {"ny", 4}};
    const auto g    = parse_grid(good);
    EXPECT_EQ(g.nx, 3);
    EXPECT_EQ(grid_to_json(g), good);
    json missing = good;
    missing.erase("ny");
    EXPECT_EQ(kind_of([&] { parse_grid(missing); }), ErrorKind::UsageError);
}

TEST(Run, InadmissiblePairIsUsageError)
{
    const auto s = parse_scenario({{"params", {{"pairs", {{1.5, 0.2}}}}}},
                                  "families", "period");
    EXPECT_EQ(kind_of([&] { run(s); }), ErrorKind::UsageError);
}

TEST(Run, ReportBodyShape)
{
    const auto r    = run(parse_scenario({{"params", {{"n_ambient_max", 4}, {"m_max", 3}}}}, "harmonic", "dims"));
    const json body = report_body(r);
    EXPECT_EQ(body.at("scenario").at("suite"), "harmonic");
    EXPECT_EQ(body.at("scenario").at("verb"), "dims");
    EXPECT_EQ(body.at("seed"), 42);
    EXPECT_TRUE(body.at("checks").is_array());
    EXPECT_FALSE(body.contains("runtime_seconds"));
    EXPECT_TRUE(report_json(r).contains("runtime_seconds"));
    EXPECT_EQ(body.at("status"), r.passed() ? "pass" : "fail");
}

TEST(Run, RepeatedRunsHaveIdenticalBodies)
{
    const json doc = {{"params", {{"n", {3}}, {"d_max", 3}, {"trials", 10}}}};
    const auto s   = parse_scenario(doc, "harmonic", "identities");
    EXPECT_EQ(report_body(run(s)).dump(), report_body(run(s)).dump());
}

TEST(Output, SampleCsvLayout)
{
    const auto dir = scratch("csv");
    json doc       = {{"params", {{"family", {{"type", "HeliCatenoid"}, {"phi", 0.6}}}, {"field", "F"}}},
                      {"grid", {{"x_min", -1.0}, {"x_max", 1.0}, {"y_min", -1.0}, {"y_max", 1.0}, {"nx", 3}, {"ny", 2}}}};
    auto s         = parse_scenario(doc, "families", "sample");
    s.format       = "csv";
    s.out_dir      = dir.string();
    const auto r   = run(s);
    ASSERT_EQ(r.files.size(), 1u);
    const std::string text = slurp(dir / r.files[0]);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,y,value");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 6);
    std::filesystem::remove_all(dir);
}

TEST(Output, MapExportFile)
{
    const auto dir = scratch("export");
    auto s         = parse_scenario({{"params", {{"n_ambient", 4}, {"m", 2}}}}, "maps", "export");
    s.out_dir      = dir.string();
    const auto r   = run(s);
    EXPECT_TRUE(r.passed());
    ASSERT_EQ(r.files.size(), 1u);
    EXPECT_EQ(r.files[0], "map_n4_m2.json");
    const json m = json::parse(slurp(dir / r.files[0]));
    EXPECT_TRUE(m.is_object());
    std::filesystem::remove_all(dir);
}

TEST(Output, NoOutDirWritesNothing)
{
    const auto r = run(parse_scenario({{"params", {{"n_ambient", 4}, {"m", 2}}}}, "maps", "export"));
    EXPECT_TRUE(r.files.empty());
}
