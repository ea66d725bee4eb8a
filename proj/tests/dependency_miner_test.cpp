#include <doctest.h>

#include <random>

#include "confokit/dependency_miner.hpp"
#include "confokit/errors.hpp"
#include "support.hpp"

using namespace confokit;
using namespace testsupport;

namespace {

AnalysisSession session_of(const std::string& id, const std::vector<std::string>& goals) {
  AnalysisSession session;
  session.session_id = id;
  for (const std::string& goal : goals) {
    TaskDescriptor step{goal, "derive", "process conformance", {"control-flow"}, "log", "single"};
    session.steps.push_back(step);
  }
  return session;
}

}  // namespace

TEST_CASE("session encoding keeps verbatim order and names activities by notion") {
  std::vector<AnalysisSession> sessions;
  AnalysisSession s;
  s.session_id = "s1";
  s.steps.push_back({"describe", "derive", "process conformance", {"control-flow"}, "log", "single"});
  s.steps.push_back({"present", "present", "guideline violations", {"control-flow"}, "trace", "single"});
  sessions.push_back(s);

  EventLog by_goal_target = build_session_log(sessions, ActivityNotion::goal_and_target);
  CHECK(activity_sequence(by_goal_target.traces[0]) ==
        std::vector<std::string>{"describe@log", "present@trace"});

  EventLog by_goal = build_session_log(sessions, ActivityNotion::goal);
  CHECK(activity_sequence(by_goal.traces[0]) == std::vector<std::string>{"describe", "present"});

  // Repeated goals are not deduplicated.
  EventLog repeated = build_session_log({session_of("r", {"describe", "describe"})}, ActivityNotion::goal);
  CHECK(activity_sequence(repeated.traces[0]) == std::vector<std::string>{"describe", "describe"});

  EventLog single = build_session_log({session_of("one", {"explore"})}, ActivityNotion::goal);
  CHECK(single.traces[0].events.size() == 1);

  CHECK_THROWS_AS(build_session_log({}, ActivityNotion::goal), argument_error);
  AnalysisSession invalid;
  invalid.session_id = "bad";
  invalid.steps.push_back({"nope", "derive", "process conformance", {"control-flow"}, "log", "single"});
  CHECK_THROWS_AS(build_session_log({invalid}, ActivityNotion::goal), validation_error);
}

TEST_CASE("the unfiltered graph counts adjacent pairs, starts and ends") {
  std::vector<AnalysisSession> sessions = {session_of("x", {"describe", "present", "explain"}),
                                           session_of("y", {"describe", "present"})};
  DfgModel model = discover_dfg(build_session_log(sessions, ActivityNotion::goal), 0.0);
  CHECK(model.edges.at({"describe", "present"}) == 2);
  CHECK(model.edges.at({"present", "explain"}) == 1);
  CHECK(model.start_counts.at("describe") == 2);
  CHECK(model.end_counts.at("present") == 1);
  CHECK(model.end_counts.at("explain") == 1);
  CHECK(model.nodes.at("describe") == 2);
}

TEST_CASE("threshold one keeps only the most frequent edge class plus repairs") {
  std::vector<AnalysisSession> sessions = {session_of("x", {"describe", "present", "explain"}),
                                           session_of("y", {"describe", "present"})};
  EventLog log = build_session_log(sessions, ActivityNotion::goal);
  DfgModel full = build_dfg(log);
  auto survivors = prefilter_edges(full, 1.0);
  REQUIRE(survivors.size() == 1);
  CHECK(survivors.count({"describe", "present"}) == 1);
  // The repair reinstates present -> explain so explain stays connected.
  DfgModel filtered = apply_path_filter(full, 1.0);
  CHECK(filtered.edges.count({"present", "explain"}) == 1);
}

TEST_CASE("flow conservation holds at threshold zero") {
  std::mt19937_64 rng(89);
  for (int round = 0; round < 220; ++round) {
    std::vector<AnalysisSession> sessions = random_sessions(rng);
    EventLog log = build_session_log(sessions, rand_int(rng, 0, 1) == 0
                                                   ? ActivityNotion::goal
                                                   : ActivityNotion::goal_and_target);
    DfgModel model = discover_dfg(log, 0.0);

    std::int64_t starts = 0, ends = 0;
    for (const auto& [node, count] : model.start_counts) starts += count;
    for (const auto& [node, count] : model.end_counts) ends += count;
    CHECK(starts == static_cast<std::int64_t>(sessions.size()));
    CHECK(ends == static_cast<std::int64_t>(sessions.size()));

    for (const auto& [node, frequency] : model.nodes) {
      std::int64_t incoming = 0, outgoing = 0;
      for (const auto& [edge, count] : model.edges) {
        if (edge.second == node) incoming += count;
        if (edge.first == node) outgoing += count;
      }
      std::int64_t start = model.start_counts.count(node) ? model.start_counts.at(node) : 0;
      std::int64_t end = model.end_counts.count(node) ? model.end_counts.at(node) : 0;
      CHECK(frequency == incoming + start);
      CHECK(frequency == outgoing + end);
    }
  }
}

TEST_CASE("pre-repair edge sets shrink monotonically with the threshold") {
  std::mt19937_64 rng(97);
  for (int round = 0; round < 100; ++round) {
    EventLog log = build_session_log(random_sessions(rng), ActivityNotion::goal);
    DfgModel full = build_dfg(log);
    if (full.edges.empty()) continue;
    auto previous = prefilter_edges(full, 0.0);
    CHECK(previous.size() == full.edges.size());
    for (double threshold : {0.25, 0.5, 0.75, 1.0}) {
      auto current = prefilter_edges(full, threshold);
      CHECK(std::includes(previous.begin(), previous.end(), current.begin(), current.end()));
      previous = current;
    }
  }
}

TEST_CASE("every node stays connected after filtering at any threshold") {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 60; ++round) {
    EventLog log = build_session_log(random_sessions(rng), ActivityNotion::goal);
    double threshold = static_cast<double>(rand_int(rng, 0, 100)) / 100.0;
    DfgModel filtered = discover_dfg(log, threshold);

    // Forward closure from starts and backward closure from ends.
    std::set<std::string> from_start, to_end;
    for (const auto& [n, c] : filtered.start_counts) from_start.insert(n);
    for (const auto& [n, c] : filtered.end_counts) to_end.insert(n);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [edge, c] : filtered.edges) {
        if (from_start.count(edge.first) && from_start.insert(edge.second).second) changed = true;
        if (to_end.count(edge.second) && to_end.insert(edge.first).second) changed = true;
      }
    }
    for (const auto& [node, freq] : filtered.nodes) {
      CHECK(from_start.count(node) == 1);
      CHECK(to_end.count(node) == 1);
    }
  }
}

TEST_CASE("dot output is deterministic and matches the two-node example") {
  std::vector<AnalysisSession> sessions = {session_of("x", {"describe", "present"}),
                                           session_of("y", {"describe", "present"})};
  DfgModel model = discover_dfg(build_session_log(sessions, ActivityNotion::goal), 0.0);
  std::string dot = dfg_to_dot(model);
  CHECK(dot == dfg_to_dot(model));
  CHECK(dot.find("\"describe\" -> \"present\" [label=\"2\"]") != std::string::npos);
  CHECK(dot.find("\"describe\" [shape=box, label=\"describe (2)\"]") != std::string::npos);

  DfgModel no_edges;
  no_edges.nodes["solo"] = 1;
  no_edges.start_counts["solo"] = 1;
  no_edges.end_counts["solo"] = 1;
  std::string solo = dfg_to_dot(no_edges);
  CHECK(solo.find("\"solo\"") != std::string::npos);
}

TEST_CASE("a full-scale dataset in the exchange format reproduces its aggregate counts") {
  // Catalog with a known means marginal over 102 entries.
  std::string catalog_csv =
      "goal,means,characteristic,constraint_type,target,cardinality,count,source\n"
      "explore,identify,guideline violations,control-flow,trace,multiple,21,a\n"
      "present,present,guideline violations,control-flow,trace,single,20,b\n"
      "describe,compare,process conformance,control-flow,log,multiple,18,c\n"
      "describe,derive,process conformance,control-flow,log,single,17,d\n"
      "explore,summarize,guideline violations,control-flow,log,single,13,e\n"
      "explain,discover,reasons for guideline violations,control-flow,trace,multiple,6,f\n"
      "present,annotate,guideline violations,control-flow,trace,single,4,g\n"
      "explore,explore,guideline violations,control-flow,event,multiple,1,h\n"
      "describe,unknown,process conformance,control-flow,log,single,2,i\n";
  Marginals marginals = catalog_stats(load_catalog_csv(catalog_csv));
  const auto& means = marginals.at(Dimension::means);
  CHECK(means.at("identify") == 21);
  CHECK(means.at("present") == 20);
  CHECK(means.at("compare") == 18);
  CHECK(means.at("derive") == 17);
  CHECK(means.at("summarize") == 13);
  CHECK(means.at("discover") == 6);
  CHECK(means.at("annotate") == 4);
  CHECK(means.at("explore") == 1);
  CHECK(means.at("unknown") == 2);
  std::int64_t total = 0;
  for (const auto& [value, count] : means) total += count;
  CHECK(total == 102);

  // 33 sessions with known start/end tallies.
  auto goal_row = [](const std::string& id, int index, const std::string& goal) {
    return id + "," + std::to_string(index) + "," + goal +
           ",derive,process conformance,control-flow,log,single\n";
  };
  std::string sessions_csv =
      "session_id,step_index,goal,means,characteristic,constraint_type,target,cardinality\n";
  int session = 0;
  for (int i = 0; i < 9; ++i) {
    std::string id = "s" + std::to_string(session++);
    sessions_csv += goal_row(id, 1, "describe") + goal_row(id, 2, "explain");
  }
  for (int i = 0; i < 5; ++i) {
    std::string id = "s" + std::to_string(session++);
    sessions_csv += goal_row(id, 1, "describe") + goal_row(id, 2, "explain") + goal_row(id, 3, "present");
  }
  for (int i = 0; i < 3; ++i) {
    std::string id = "s" + std::to_string(session++);
    sessions_csv += goal_row(id, 1, "describe") + goal_row(id, 2, "present");
  }
  for (int i = 0; i < 9; ++i) {
    std::string id = "s" + std::to_string(session++);
    sessions_csv += goal_row(id, 1, "explore") + goal_row(id, 2, "describe");
  }
  for (int i = 0; i < 2; ++i) {
    std::string id = "s" + std::to_string(session++);
    sessions_csv += goal_row(id, 1, "confirm") + goal_row(id, 2, "describe");
  }
  for (int i = 0; i < 5; ++i) {
    std::string id = "s" + std::to_string(session++);
    sessions_csv += goal_row(id, 1, "present") + goal_row(id, 2, "describe");
  }
  auto sessions = load_sessions_csv(sessions_csv);
  REQUIRE(sessions.size() == 33);
  DfgModel model = discover_dfg(build_session_log(sessions, ActivityNotion::goal), 0.0);
  CHECK(model.start_counts.at("describe") == 17);
  CHECK(model.start_counts.at("explore") == 9);
  CHECK(model.end_counts.at("explain") == 9);
  CHECK(model.nodes.at("explain") == 14);
}

TEST_CASE("the bundled sessions fixture mines the expected start activities") {
  auto sessions = load_sessions_file(fixture("sessions.csv"));
  DfgModel model = discover_dfg(build_session_log(sessions, ActivityNotion::goal), 0.0);
  CHECK(model.start_counts.at("describe") == 3);
  CHECK(model.start_counts.at("explore") == 1);
  CHECK(model.end_counts.at("explain") == 2);
}
