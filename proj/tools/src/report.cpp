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

#include "terranav_cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "terranav/error.hpp"

namespace terranav::cli {

using ojson = nlohmann::ordered_json;

TrialRow make_row(const TrialLog& log, int trial) {
  return {log.stack,       trial,           log.seed, log.outcome, log.reason, log.path_length, log.duration,
          log.failure_position, log.failure_terrain};
}

LatencySummary summarize_latency(std::vector<double> samples) {
  LatencySummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  auto rank = [&](double q) {
    const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::clamp<std::size_t>(r, 1, samples.size()) - 1];
  };
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  s.max = samples.back();
  return s;
}

std::map<Stack, StackSummary> summarize(const std::vector<TrialRow>& rows) {
  std::map<Stack, StackSummary> out;
  std::map<Stack, double> length_sum;
  for (const TrialRow& r : rows) {
    StackSummary& s = out[r.stack];
    ++s.trials;
    ++s.outcomes[r.outcome];
    if (r.outcome == Outcome::kSuccess) {
      ++s.successes;
      length_sum[r.stack] += r.path_length;
    } else if (r.failure_terrain == TerrainClass::kMud) {
      ++s.mud_failures;
    }
  }
  for (auto& [stack, s] : out)
    if (s.successes > 0) s.mean_path_length = length_sum[stack] / s.successes;
  return out;
}

namespace {

ojson latency_json(const LatencySummary& l) {
  return {{"count", l.count}, {"p50_ms", l.p50}, {"p95_ms", l.p95}, {"max_ms", l.max}};
}

LatencySummary latency_from(const nlohmann::json& j) {
  return {j.at("count").get<std::size_t>(), j.at("p50_ms").get<double>(), j.at("p95_ms").get<double>(),
          j.at("max_ms").get<double>()};
}

Stack parse_stack(const std::string& s) {
  auto v = stack_from_name(s);
  if (!v) throw Error(ErrorCode::kConfig, "report: unknown stack '" + s + "'");
  return *v;
}

}  // namespace

nlohmann::ordered_json report_to_json(const ExperimentReport& report) {
  ojson j;
  j["format"] = "terranav.report";
  j["version"] = 1;
  j["seed"] = report.seed;
  ojson rows = ojson::array();
  for (const TrialRow& r : report.rows) {
    ojson row;
    row["stack"] = stack_name(r.stack);
    row["trial"] = r.trial;
    row["seed"] = r.seed;
    row["outcome"] = outcome_name(r.outcome);
    row["reason"] = r.reason;
    row["path_length"] = r.path_length;
    row["duration"] = r.duration;
    row["failure_position"] =
        r.failure_position ? ojson::array({r.failure_position->x(), r.failure_position->y()}) : ojson();
    row["failure_terrain"] = r.failure_terrain ? ojson(std::string(terrain_name(*r.failure_terrain))) : ojson();
    rows.push_back(std::move(row));
  }
  j["trials"] = std::move(rows);
  ojson summary = ojson::object();
  for (const auto& [stack, s] : report.summary) {
    ojson e;
    e["trials"] = s.trials;
    e["successes"] = s.successes;
    e["mean_path_length"] = s.mean_path_length ? ojson(*s.mean_path_length) : ojson();
    ojson outcomes = ojson::object();
    for (Outcome o : {Outcome::kSuccess, Outcome::kCollision, Outcome::kRollover, Outcome::kTimeout}) {
      auto it = s.outcomes.find(o);
      outcomes[std::string(outcome_name(o))] = it == s.outcomes.end() ? 0 : it->second;
    }
    e["outcomes"] = std::move(outcomes);
    e["mud_failures"] = s.mud_failures;
    summary[std::string(stack_name(stack))] = std::move(e);
  }
  j["summary"] = std::move(summary);
  ojson timing = ojson::object();
  for (const auto& [stack, l] : report.plan_latency) {
    timing[std::string(stack_name(stack))]["plan"] = latency_json(l);
  }
  for (const auto& [stack, l] : report.track_latency) {
    timing[std::string(stack_name(stack))]["track"] = latency_json(l);
  }
  j["timing"] = std::move(timing);
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "terranav.report") throw Error(ErrorCode::kConfig, "not a terranav report");
    ExperimentReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& row : j.at("trials")) {
      TrialRow t;
      t.stack = parse_stack(row.at("stack").get<std::string>());
      t.trial = row.at("trial").get<int>();
      t.seed = row.at("seed").get<std::uint64_t>();
      auto o = outcome_from_name(row.at("outcome").get<std::string>());
      if (!o) throw Error(ErrorCode::kConfig, "report: unknown outcome");
      t.outcome = *o;
      t.reason = row.at("reason").get<std::string>();
      t.path_length = row.at("path_length").get<double>();
      t.duration = row.at("duration").get<double>();
      if (!row.at("failure_position").is_null())
        t.failure_position = Vec2(row["failure_position"][0].get<double>(), row["failure_position"][1].get<double>());
      if (!row.at("failure_terrain").is_null())
        t.failure_terrain = terrain_from_name(row["failure_terrain"].get<std::string>());
      r.rows.push_back(std::move(t));
    }
    r.summary = summarize(r.rows);
    if (j.contains("timing")) {
      for (auto it = j["timing"].begin(); it != j["timing"].end(); ++it) {
        const Stack s = parse_stack(it.key());
        if (it->contains("plan")) r.plan_latency[s] = latency_from((*it)["plan"]);
        if (it->contains("track")) r.track_latency[s] = latency_from((*it)["track"]);
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("report JSON: ") + e.what());
  }
}

std::string format_table(const ExperimentReport& report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %8s %10s %18s %10s %10s %10s %12s\n", "stack", "trials", "successes",
                "mean_len_m(succ)", "collision", "rollover", "timeout", "mud_failures");
  os << line;
  for (const auto& [stack, s] : report.summary) {
    auto count = [&](Outcome o) {
      auto it = s.outcomes.find(o);
      return it == s.outcomes.end() ? 0 : it->second;
    };
    std::string len = s.mean_path_length ? std::to_string(*s.mean_path_length) : "-";
    if (s.mean_path_length) {
      std::snprintf(line, sizeof line, "%.2f", *s.mean_path_length);
      len = line;
    }
    std::snprintf(line, sizeof line, "%-10s %8d %10d %18s %10d %10d %10d %12d\n",
                  std::string(stack_name(stack)).c_str(), s.trials, s.successes, len.c_str(),
                  count(Outcome::kCollision), count(Outcome::kRollover), count(Outcome::kTimeout), s.mud_failures);
    os << line;
  }
  if (!report.plan_latency.empty() || !report.track_latency.empty()) {
    os << "\nlatency (ms)      p50        p95        max      count\n";
    for (const auto& [stack, l] : report.plan_latency) {
      std::snprintf(line, sizeof line, "%-9s plan  %9.2f  %9.2f  %9.2f  %8zu\n", std::string(stack_name(stack)).c_str(),
                    l.p50, l.p95, l.max, l.count);
      os << line;
    }
    for (const auto& [stack, l] : report.track_latency) {
      std::snprintf(line, sizeof line, "%-9s track %9.2f  %9.2f  %9.2f  %8zu\n", std::string(stack_name(stack)).c_str(),
                    l.p50, l.p95, l.max, l.count);
      os << line;
    }
  }
  return os.str();
}

}  // namespace terranav::cli
