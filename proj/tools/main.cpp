// Copyright 2026 The terranav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "terranav/error.hpp"
#include "terranav/parallel.hpp"
#include "terranav_cli/commands.hpp"

namespace {

using terranav::Error;
using terranav::ErrorCode;
namespace cli = terranav::cli;

int fail(const std::string& command, const std::string& code, const std::string& message, int status) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["command"] = command;
  j["message"] = message;
  std::cerr << j.dump() << std::endl;
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"terranav: uncertainty-aware off-road navigation experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::string stack = "all";
  int trials = 10;
  std::string out_dir = "out";
  int threads = 0;
  app.add_option("--config", config_path, "Scenario config (TOML, or JSON by extension)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--stack", stack, "Stack to run")->check(CLI::IsMember({"proposed", "baseline1", "baseline2", "all"}));
  app.add_option("--trials", trials, "Number of trials (obstacle layouts)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  auto* genmap = app.add_subcommand("genmap", "Generate the scenario terrain map file");
  auto* train = app.add_subcommand("train", "Collect driving data and fit per-terrain GP models");
  auto* run = app.add_subcommand("run", "Run closed-loop trials and write logs and the report");
  auto* report = app.add_subcommand("report", "Print the results table of a finished run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("", "usage", e.what(), 2);
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (threads > 0) terranav::set_thread_count(threads);
    cli::ScenarioConfig cfg = config_path.empty() ? cli::default_scenario() : cli::load_scenario(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed;
    const cli::fs::path out(out_dir);

    if (genmap->parsed()) {
      const auto path = cli::cmd_genmap(cfg, out);
      std::cout << "wrote " << path.string() << "\n";
    } else if (train->parsed()) {
      const cli::TrainSummary s = cli::cmd_train(cfg, out);
      for (const auto& [c, n] : s.samples) {
        const auto& l = s.final_lml.at(c);
        std::cout << terranav::terrain_name(c) << ": samples=" << n << " log_likelihood=[" << l[0] << ", " << l[1]
                  << ", " << l[2] << "]\n";
      }
      for (const auto& f : s.files) std::cout << "wrote " << f.string() << "\n";
    } else if (run->parsed()) {
      cli::RunOptions opts;
      opts.trials = trials;
      if (stack != "all") opts.stacks = {*terranav::stack_from_name(stack)};
      const cli::ExperimentReport r = cli::cmd_run(cfg, opts, out);
      std::cout << cli::format_table(r);
      std::cout << "wrote " << (out / "report.json").string() << "\n";
    } else if (report->parsed()) {
      std::cout << cli::cmd_report(out);
    }
  } catch (const Error& e) {
    return fail(command, std::string(terranav::to_string(e.code())), e.what(), 1);
  } catch (const std::exception& e) {
    return fail(command, "internal", e.what(), 1);
  }
  return 0;
}
