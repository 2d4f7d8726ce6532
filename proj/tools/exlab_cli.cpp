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

#include "CLI11.hpp"

#include <iostream>

namespace h = exlab::harness;

int main(int argc, char** argv)
{
    CLI::App app{"exlab: verification suites for prescribed-density extremals"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string format = "json";

    std::string suite;
    std::string verb;
    for (const auto& s : h::suites()) {
        auto* sc = app.add_subcommand(s, s + " suite");
        sc->require_subcommand(1);
        for (const auto& v : h::verbs(s)) {
            auto* vc = sc->add_subcommand(v);
            vc->add_option("--config", config, "scenario JSON file");
            vc->add_option("--out", out_dir, "directory for the report and data tables");
            vc->add_option("--seed", seed, "override the scenario seed");
            vc->add_option("--format", format, "data table format")->check(CLI::IsMember({"csv", "json"}));
            vc->callback([&suite, &verb, s, v] {
                suite = s;
                verb  = v;
            });
        }
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const auto doc = config.empty() ? h::json::object() : h::load_json_file(config);
        auto scenario  = h::parse_scenario(doc, suite, verb);
        if (seed) {
            scenario.seed = *seed;
        }
        scenario.format  = format;
        scenario.out_dir = out_dir;

        const auto report = h::run(scenario);
        const auto text   = h::report_json(report).dump(2) + "\n";
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            std::ofstream(std::filesystem::path(out_dir) / "report.json") << text;
        }
        std::cout << text;
        for (const auto& c : report.checks) {
            std::cerr << (c.passed ? "pass  " : "FAIL  ") << c.name;
            if (!c.witness.empty()) {
                std::cerr << "  [" << c.witness << "]";
            }
            std::cerr << "\n";
        }
        return report.passed() ? 0 : 1;
    }
    catch (const exlab::Error& e) {
        std::cerr << "exlab: " << e.what() << "\n";
        return e.kind() == exlab::ErrorKind::UsageError ? 2 : 1;
    }
    catch (const std::exception& e) {
        std::cerr << "exlab: " << e.what() << "\n";
        return 2;
    }
}
