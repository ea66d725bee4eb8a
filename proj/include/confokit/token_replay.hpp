#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "confokit/event_log.hpp"
#include "confokit/process_model.hpp"

namespace confokit {

struct MissingTokenDetail {
  std::string place;                 // empty when the event's label is unknown to the net
  std::string attributed_activity;   // transition producing into the place (label, or id when silent)
  std::size_t trace_position = 0;
};

// Token accounting of one replay. Conservation: remaining == produced +
// missing - consumed (silent firings move tokens without counting, so the
// identity is exact for token-preserving silent transitions).
struct ReplayResult {
  std::int64_t produced = 0;
  std::int64_t consumed = 0;
  std::int64_t missing = 0;
  std::int64_t remaining = 0;
  std::vector<MissingTokenDetail> missing_detail;
  std::vector<std::pair<std::string, std::int64_t>> remaining_detail;  // (place, count), sorted
  bool reached_final = false;  // end marking equaled the final marking exactly
};

// Produces the initial marking, fires each event's transition (enabling it
// through silent transitions or injected missing tokens when necessary),
// then consumes the final marking and counts leftovers.
ReplayResult replay_trace(const PetriNet& net, const Trace& trace);

// (1 - m/c)/2 + (1 - r/p)/2; requires positive produced and consumed counts.
double replay_fitness(const ReplayResult& result);

struct LogReplay {
  std::map<std::string, ReplayResult> per_trace;
  ReplayResult totals;     // summed counters, no detail
  double log_fitness = 0;  // computed from the summed counters
};

LogReplay replay_log(const PetriNet& net, const EventLog& log);

}  // namespace confokit
