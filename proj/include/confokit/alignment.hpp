#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "confokit/event_log.hpp"
#include "confokit/process_model.hpp"

namespace confokit {

struct CostFunction {
  double log_move = 1.0;
  double visible_model_move = 1.0;
  double silent_model_move = 0.0;
  double synchronous = 0.0;
};

struct Move {
  enum class Kind { synchronous, model, log };
  Kind kind = Kind::synchronous;
  std::string activity;    // trace label (sync/log) or transition label (visible model)
  std::string transition;  // fired transition id (sync/model)
  bool silent_transition = false;
  double cost = 0.0;

  friend bool operator==(const Move&, const Move&) = default;
};

struct Alignment {
  std::vector<Move> moves;
  double cost = 0.0;
  bool optimal = true;
};

// Minimum-cost alignment by best-first search over (marking, trace position)
// states. Ties between equal-cost alignments are broken by the lexicographic
// move signature: synchronous < model < log, then transition/activity id.
Alignment align_trace(const PetriNet& net, const Trace& trace, const CostFunction& cost = {},
                      std::size_t state_budget = 1'000'000);

// Log-move cost for every trace event plus the cheapest model-only run from
// initial to final marking.
double worst_case_cost(const PetriNet& net, const Trace& trace, const CostFunction& cost = {});

// 1 - cost/worst. cost == 0 yields 1 even when worst == 0.
double alignment_fitness(const Alignment& alignment, double worst);

struct LogAlignment {
  std::vector<std::pair<Variant, Alignment>> per_variant;
  double log_fitness = 0.0;  // variant-frequency weighted mean
};

LogAlignment align_log(const PetriNet& net, const EventLog& log, const CostFunction& cost = {});

// Exhaustive uniform-cost reference search: no heuristic, no pruning beyond
// visited-state dominance, same tie-breaking as align_trace. Kept independent
// of the align_trace implementation so it can serve as its oracle.
Alignment oracle_align(const PetriNet& net, const Trace& trace, const CostFunction& cost = {},
                       std::size_t state_bound = 100'000);

}  // namespace confokit
