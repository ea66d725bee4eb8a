#include "confokit/dependency_miner.hpp"

#include <algorithm>
#include <deque>

#include "confokit/errors.hpp"

namespace confokit {

EventLog build_session_log(const std::vector<AnalysisSession>& sessions, ActivityNotion notion) {
  if (sessions.empty()) throw argument_error("no sessions to encode");
  EventLog log;
  for (const AnalysisSession& session : sessions) {
    if (session.steps.empty())
      throw validation_error("session " + session.session_id + " has no steps");
    Trace trace;
    trace.case_id = session.session_id;
    for (std::size_t i = 0; i < session.steps.size(); ++i) {
      const TaskDescriptor& step = session.steps[i];
      auto violations = validate_descriptor(step);
      if (!violations.empty())
        throw validation_error("session " + session.session_id + " step " + std::to_string(i) + ": " +
                               violations.front());
      Event event;
      event.case_id = session.session_id;
      event.activity =
          notion == ActivityNotion::goal ? step.goal : step.goal + "@" + step.data_target;
      event.timestamp = Timestamp{static_cast<std::int64_t>(i)};
      trace.events.push_back(std::move(event));
    }
    log.traces.push_back(std::move(trace));
  }
  return log;
}

DfgModel build_dfg(const EventLog& log) {
  if (log.traces.empty()) throw argument_error("cannot discover a graph from an empty log");
  DfgModel model;
  for (const Trace& trace : log.traces) {
    const auto sequence = activity_sequence(trace);
    for (const std::string& activity : sequence) ++model.nodes[activity];
    ++model.start_counts[sequence.front()];
    ++model.end_counts[sequence.back()];
    for (std::size_t i = 0; i + 1 < sequence.size(); ++i) ++model.edges[{sequence[i], sequence[i + 1]}];
  }
  return model;
}

namespace {

using Edge = std::pair<std::string, std::string>;

// Cutoff is the frequency at quantile index floor(q * (m - 1)) of the
// ascending frequency list: q = 0 keeps everything, q = 1 keeps only the
// most frequent edge class.
std::int64_t cutoff_frequency(const DfgModel& model, double threshold) {
  std::vector<std::int64_t> frequencies;
  frequencies.reserve(model.edges.size());
  for (const auto& [edge, freq] : model.edges) frequencies.push_back(freq);
  std::sort(frequencies.begin(), frequencies.end());
  std::size_t index = static_cast<std::size_t>(threshold * static_cast<double>(frequencies.size() - 1));
  index = std::min(index, frequencies.size() - 1);
  return frequencies[index];
}

std::set<std::string> closure(const std::map<std::string, std::int64_t>& seeds,
                              const std::map<std::string, std::vector<std::string>>& next) {
  std::set<std::string> reached;
  std::deque<std::string> queue;
  for (const auto& [node, count] : seeds) {
    reached.insert(node);
    queue.push_back(node);
  }
  while (!queue.empty()) {
    std::string node = std::move(queue.front());
    queue.pop_front();
    auto it = next.find(node);
    if (it == next.end()) continue;
    for (const std::string& successor : it->second)
      if (reached.insert(successor).second) queue.push_back(successor);
  }
  return reached;
}

struct Connectivity {
  std::set<std::string> from_start;
  std::set<std::string> to_end;
  bool complete = false;
};

// Every node must be reachable from a start node and co-reach an end node
// through the retained edges.
Connectivity connectivity(const DfgModel& model, const std::set<Edge>& retained) {
  std::map<std::string, std::vector<std::string>> forward, backward;
  for (const Edge& edge : retained) {
    forward[edge.first].push_back(edge.second);
    backward[edge.second].push_back(edge.first);
  }
  Connectivity out;
  out.from_start = closure(model.start_counts, forward);
  out.to_end = closure(model.end_counts, backward);
  out.complete = true;
  for (const auto& [node, freq] : model.nodes)
    if (!out.from_start.count(node) || !out.to_end.count(node)) {
      out.complete = false;
      break;
    }
  return out;
}

}  // namespace

std::set<Edge> prefilter_edges(const DfgModel& model, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) throw argument_error("path threshold must lie in [0,1]");
  if (model.edges.empty()) return {};
  std::int64_t cutoff = cutoff_frequency(model, threshold);
  std::set<Edge> retained;
  for (const auto& [edge, freq] : model.edges)
    if (freq >= cutoff) retained.insert(edge);
  return retained;
}

DfgModel apply_path_filter(const DfgModel& model, double threshold) {
  std::set<Edge> retained = prefilter_edges(model, threshold);

  // Removed edges, most frequent first, ties by name.
  std::vector<Edge> removed;
  for (const auto& [edge, freq] : model.edges)
    if (!retained.count(edge)) removed.push_back(edge);
  std::sort(removed.begin(), removed.end(), [&](const Edge& a, const Edge& b) {
    std::int64_t fa = model.edges.at(a), fb = model.edges.at(b);
    if (fa != fb) return fa > fb;
    return a < b;
  });

  // The unfiltered graph is connected by construction, so a repairing edge
  // always exists while any node is disconnected: pick the most frequent
  // removed edge that extends either closure.
  while (!removed.empty()) {
    Connectivity state = connectivity(model, retained);
    if (state.complete) break;
    std::size_t pick = removed.size();
    for (std::size_t i = 0; i < removed.size(); ++i) {
      const auto& [u, v] = removed[i];
      if ((state.from_start.count(u) && !state.from_start.count(v)) ||
          (state.to_end.count(v) && !state.to_end.count(u))) {
        pick = i;
        break;
      }
    }
    if (pick == removed.size()) pick = 0;  // defensive; cannot occur on a buildable DFG
    retained.insert(removed[pick]);
    removed.erase(removed.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  DfgModel out;
  out.nodes = model.nodes;
  out.start_counts = model.start_counts;
  out.end_counts = model.end_counts;
  for (const Edge& edge : retained) out.edges[edge] = model.edges.at(edge);
  return out;
}

DfgModel discover_dfg(const EventLog& session_log, double path_threshold) {
  return apply_path_filter(build_dfg(session_log), path_threshold);
}

std::string dfg_to_dot(const DfgModel& model) {
  std::string out = "digraph dfg {\n  rankdir=LR;\n";
  out += "  __start [shape=circle, label=\"start\"];\n";
  out += "  __end [shape=doublecircle, label=\"end\"];\n";
  for (const auto& [node, freq] : model.nodes)
    out += "  \"" + node + "\" [shape=box, label=\"" + node + " (" + std::to_string(freq) + ")\"];\n";
  for (const auto& [node, count] : model.start_counts)
    out += "  __start -> \"" + node + "\" [label=\"" + std::to_string(count) + "\"];\n";
  for (const auto& [edge, freq] : model.edges)
    out += "  \"" + edge.first + "\" -> \"" + edge.second + "\" [label=\"" + std::to_string(freq) +
           "\"];\n";
  for (const auto& [node, count] : model.end_counts)
    out += "  \"" + node + "\" -> __end [label=\"" + std::to_string(count) + "\"];\n";
  out += "}\n";
  return out;
}

}  // namespace confokit
