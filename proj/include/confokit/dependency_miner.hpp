#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "confokit/event_log.hpp"
#include "confokit/taxonomy.hpp"

namespace confokit {

enum class ActivityNotion { goal, goal_and_target };

// One derived trace per session; the step index becomes the timestamp.
// Activity names are the goal, or "goal@target" under goal_and_target.
EventLog build_session_log(const std::vector<AnalysisSession>& sessions, ActivityNotion notion);

// Frequency-annotated directly-follows graph.
struct DfgModel {
  std::map<std::string, std::int64_t> nodes;                        // activity -> occurrences
  std::map<std::pair<std::string, std::string>, std::int64_t> edges;  // (from,to) -> frequency
  std::map<std::string, std::int64_t> start_counts;
  std::map<std::string, std::int64_t> end_counts;
};

// Unfiltered graph from adjacent event pairs.
DfgModel build_dfg(const EventLog& log);

// Edge set surviving the threshold quantile, before connectivity repair.
// Exposed so the filter's monotonicity can be observed directly.
std::set<std::pair<std::string, std::string>> prefilter_edges(const DfgModel& model, double threshold);

// Drops edges below the threshold quantile of edge frequencies, then re-adds
// removed edges greedily by descending frequency until every node is again
// connected from a start and to an end.
DfgModel apply_path_filter(const DfgModel& model, double threshold);

DfgModel discover_dfg(const EventLog& session_log, double path_threshold);

// Nodes labeled "name (freq)", edges labeled with frequency, synthetic
// start/end nodes carrying the start/end counts. Byte-deterministic.
std::string dfg_to_dot(const DfgModel& model);

}  // namespace confokit
