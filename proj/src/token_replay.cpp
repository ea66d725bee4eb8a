#include "confokit/token_replay.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "confokit/errors.hpp"

namespace confokit {

namespace {

using DenseMarking = std::vector<std::int64_t>;

bool transition_enabled(const PetriNet& net, const DenseMarking& marking, int transition) {
  for (int place : net.inputs_of(transition))
    if (marking[static_cast<std::size_t>(place)] < 1) return false;
  return true;
}

// Shortest silent firing sequence after which `goal` holds, found by
// breadth-first search over silent-only firings. Depth is bounded by the
// squared number of silent transitions.
template <typename Predicate>
std::vector<int> silent_path_until(const PetriNet& net, const DenseMarking& marking,
                                   const std::vector<int>& silent_transitions, Predicate goal) {
  if (silent_transitions.empty()) return {};
  std::size_t max_depth = silent_transitions.size() * silent_transitions.size();
  std::set<DenseMarking> seen{marking};
  struct Node {
    DenseMarking marking;
    std::vector<int> path;
  };
  std::deque<Node> queue{{marking, {}}};
  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    if (node.path.size() >= max_depth) continue;
    for (int t : silent_transitions) {
      if (!transition_enabled(net, node.marking, t)) continue;
      DenseMarking next = node.marking;
      for (int place : net.inputs_of(t)) --next[static_cast<std::size_t>(place)];
      for (int place : net.outputs_of(t)) ++next[static_cast<std::size_t>(place)];
      if (!seen.insert(next).second) continue;
      std::vector<int> path = node.path;
      path.push_back(t);
      if (goal(next)) return path;
      queue.push_back({std::move(next), std::move(path)});
    }
  }
  return {};
}

}  // namespace

ReplayResult replay_trace(const PetriNet& net, const Trace& trace) {
  // Each replayed label must map to exactly one visible transition.
  std::map<std::string, int> transition_for_label;
  for (const Event& event : trace.events) {
    if (transition_for_label.count(event.activity)) continue;
    std::vector<int> candidates = net.transitions_with_label(event.activity);
    if (candidates.size() > 1)
      throw model_error("label '" + event.activity + "' is ambiguous: several visible transitions carry it");
    transition_for_label[event.activity] = candidates.empty() ? -1 : candidates[0];
  }

  std::vector<int> silent_transitions;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (net.is_silent(static_cast<int>(t))) silent_transitions.push_back(static_cast<int>(t));

  ReplayResult result;
  DenseMarking marking(net.place_count(), 0);

  for (const auto& [place, count] : net.initial_marking().tokens) {
    marking[static_cast<std::size_t>(net.place_index(place))] += count;
    result.produced += count;
  }

  auto fire_silently = [&](const std::vector<int>& path) {
    for (int t : path) {
      for (int place : net.inputs_of(t)) --marking[static_cast<std::size_t>(place)];
      for (int place : net.outputs_of(t)) ++marking[static_cast<std::size_t>(place)];
    }
  };

  auto inject_missing = [&](int place, std::size_t position) {
    ++marking[static_cast<std::size_t>(place)];
    ++result.missing;
    const std::vector<int>& producers = net.producers_into(place);
    if (producers.empty()) {
      result.missing_detail.push_back(
          {net.places()[static_cast<std::size_t>(place)], std::string{}, position});
    } else {
      for (int producer : producers)
        result.missing_detail.push_back(
            {net.places()[static_cast<std::size_t>(place)], net.display_name(producer), position});
    }
  };

  for (std::size_t position = 0; position < trace.events.size(); ++position) {
    int transition = transition_for_label[trace.events[position].activity];
    if (transition < 0) {
      // Label unknown to the net: skipped, reported, no counter impact.
      result.missing_detail.push_back({std::string{}, trace.events[position].activity, position});
      continue;
    }
    if (!transition_enabled(net, marking, transition))
      fire_silently(silent_path_until(net, marking, silent_transitions,
                                      [&](const DenseMarking& m) {
                                        return transition_enabled(net, m, transition);
                                      }));
    if (!transition_enabled(net, marking, transition)) {
      for (int place : net.inputs_of(transition))
        while (marking[static_cast<std::size_t>(place)] < 1) inject_missing(place, position);
    }
    for (int place : net.inputs_of(transition)) {
      --marking[static_cast<std::size_t>(place)];
      ++result.consumed;
    }
    for (int place : net.outputs_of(transition)) {
      ++marking[static_cast<std::size_t>(place)];
      ++result.produced;
    }
  }

  // Consume the final marking, reaching it through silent firings when
  // possible and injecting what is still absent.
  std::vector<std::pair<int, std::int64_t>> final_counts;
  for (const auto& [place_id, count] : net.final_marking().tokens)
    final_counts.emplace_back(net.place_index(place_id), count);
  auto covers_final = [&](const DenseMarking& m) {
    for (const auto& [place, count] : final_counts)
      if (m[static_cast<std::size_t>(place)] < count) return false;
    return true;
  };
  if (!covers_final(marking))
    fire_silently(silent_path_until(net, marking, silent_transitions, covers_final));

  bool final_clean = true;
  for (const auto& [place_id, count] : net.final_marking().tokens) {
    int place = net.place_index(place_id);
    for (std::int64_t k = 0; k < count; ++k) {
      if (marking[static_cast<std::size_t>(place)] < 1) {
        inject_missing(place, trace.events.size());
        final_clean = false;
      }
      --marking[static_cast<std::size_t>(place)];
      ++result.consumed;
    }
  }

  for (std::size_t place = 0; place < marking.size(); ++place) {
    if (marking[place] > 0) {
      result.remaining += marking[place];
      result.remaining_detail.emplace_back(net.places()[place], marking[place]);
    }
  }
  result.reached_final = final_clean && result.remaining == 0;
  return result;
}

double replay_fitness(const ReplayResult& result) {
  if (result.consumed <= 0 || result.produced <= 0)
    throw argument_error("replay fitness needs positive produced and consumed counts");
  double m_over_c = static_cast<double>(result.missing) / static_cast<double>(result.consumed);
  double r_over_p = static_cast<double>(result.remaining) / static_cast<double>(result.produced);
  return 0.5 * (1.0 - m_over_c) + 0.5 * (1.0 - r_over_p);
}

LogReplay replay_log(const PetriNet& net, const EventLog& log) {
  if (log.traces.empty()) throw argument_error("cannot replay an empty log");
  LogReplay out;
  for (const Trace& trace : log.traces) {
    ReplayResult result = replay_trace(net, trace);
    out.totals.produced += result.produced;
    out.totals.consumed += result.consumed;
    out.totals.missing += result.missing;
    out.totals.remaining += result.remaining;
    out.per_trace.emplace(trace.case_id, std::move(result));
  }
  out.log_fitness = replay_fitness(out.totals);
  return out;
}

}  // namespace confokit
