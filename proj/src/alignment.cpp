#include "confokit/alignment.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "confokit/errors.hpp"

namespace confokit {

namespace {

using DenseMarking = std::vector<std::int64_t>;

void validate_costs(const CostFunction& cost) {
  if (cost.log_move < 0 || cost.visible_model_move < 0 || cost.silent_model_move < 0 ||
      cost.synchronous < 0)
    throw argument_error("move costs must be non-negative");
  double visible = std::min(cost.log_move, cost.visible_model_move);
  if (cost.synchronous > visible || cost.silent_model_move > visible)
    throw argument_error("synchronous and silent costs must not exceed visible move costs");
}

bool transition_enabled(const PetriNet& net, const DenseMarking& marking, int transition) {
  for (int place : net.inputs_of(transition))
    if (marking[static_cast<std::size_t>(place)] < 1) return false;
  return true;
}

DenseMarking fired(const PetriNet& net, const DenseMarking& marking, int transition) {
  DenseMarking next = marking;
  for (int place : net.inputs_of(transition)) --next[static_cast<std::size_t>(place)];
  for (int place : net.outputs_of(transition)) ++next[static_cast<std::size_t>(place)];
  return next;
}

// Move-signature elements: rank (sync < model < log) then an interned key,
// so encoded words compare exactly like the documented tie-break order.
using Signature = std::vector<std::uint32_t>;

class KeyInterner {
 public:
  KeyInterner(const PetriNet& net, const Trace& trace) {
    std::set<std::string> keys;
    for (const auto& t : net.transitions()) keys.insert(t.id);
    for (const auto& e : trace.events) keys.insert(e.activity);
    for (const auto& k : keys) index_.emplace(k, static_cast<std::uint32_t>(index_.size()));
  }
  std::uint32_t encode(int rank, const std::string& key) const {
    return (static_cast<std::uint32_t>(rank) << 24) | index_.at(key);
  }

 private:
  std::map<std::string, std::uint32_t> index_;
};

struct SearchNode {
  DenseMarking marking;
  std::size_t position = 0;
  double g = 0;
  double f = 0;
  Signature signature;
  int parent = -1;
  Move move;
};

// (cost, signature) lexicographic; smaller means better.
bool better(double g_a, const Signature& sig_a, double g_b, const Signature& sig_b) {
  if (g_a != g_b) return g_a < g_b;
  return sig_a < sig_b;
}

Alignment reconstruct(const std::vector<SearchNode>& arena, int goal) {
  Alignment alignment;
  alignment.cost = arena[static_cast<std::size_t>(goal)].g;
  for (int at = goal; arena[static_cast<std::size_t>(at)].parent >= 0;
       at = arena[static_cast<std::size_t>(at)].parent)
    alignment.moves.push_back(arena[static_cast<std::size_t>(at)].move);
  std::reverse(alignment.moves.begin(), alignment.moves.end());
  return alignment;
}

struct StateKey {
  DenseMarking marking;
  std::size_t position;
  auto operator<=>(const StateKey&) const = default;
};

Move make_sync(const PetriNet& net, int t, const std::string& activity, double cost) {
  return Move{Move::Kind::synchronous, activity, net.transitions()[static_cast<std::size_t>(t)].id, false,
              cost};
}

Move make_model(const PetriNet& net, int t, const CostFunction& cf) {
  const TransitionDef& def = net.transitions()[static_cast<std::size_t>(t)];
  bool silent = !def.label.has_value();
  return Move{Move::Kind::model, def.label.value_or(std::string{}), def.id, silent,
              silent ? cf.silent_model_move : cf.visible_model_move};
}

Move make_log(const std::string& activity, double cost) {
  return Move{Move::Kind::log, activity, std::string{}, false, cost};
}

}  // namespace

Alignment align_trace(const PetriNet& net, const Trace& trace, const CostFunction& cf,
                      std::size_t state_budget) {
  validate_costs(cf);
  KeyInterner keys(net, trace);
  const std::size_t n = trace.events.size();
  const DenseMarking final_marking = net.dense(net.final_marking());

  // Admissible, consistent lower bound: each remaining event is consumed by a
  // synchronous move at best (when its label exists in the net) or a log move.
  std::vector<bool> label_known(n, false);
  for (std::size_t i = 0; i < n; ++i)
    label_known[i] = !net.transitions_with_label(trace.events[i].activity).empty();
  std::vector<double> h_suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;)
    h_suffix[i] = h_suffix[i + 1] +
                  (label_known[i] ? std::min(cf.synchronous, cf.log_move) : cf.log_move);

  std::vector<SearchNode> arena;
  arena.push_back({net.dense(net.initial_marking()), 0, 0.0, h_suffix[0], {}, -1, {}});

  auto queue_cmp = [&arena](int a, int b) {
    const SearchNode& na = arena[static_cast<std::size_t>(a)];
    const SearchNode& nb = arena[static_cast<std::size_t>(b)];
    if (na.f != nb.f) return na.f > nb.f;
    return nb.signature < na.signature;
  };
  std::priority_queue<int, std::vector<int>, decltype(queue_cmp)> open(queue_cmp);
  open.push(0);

  std::map<StateKey, std::pair<double, Signature>> best;
  best.emplace(StateKey{arena[0].marking, 0}, std::make_pair(0.0, Signature{}));

  std::size_t settled = 0;
  while (!open.empty()) {
    int current = open.top();
    open.pop();
    const SearchNode node = arena[static_cast<std::size_t>(current)];

    auto seen = best.find(StateKey{node.marking, node.position});
    if (seen != best.end() && better(seen->second.first, seen->second.second, node.g, node.signature))
      continue;  // superseded entry

    if (node.position == n && node.marking == final_marking) return reconstruct(arena, current);

    if (++settled > state_budget)
      throw resource_error("alignment state budget exceeded", state_budget);

    auto offer = [&](DenseMarking marking, std::size_t position, double g, Move move, int rank,
                     const std::string& key) {
      Signature signature = node.signature;
      signature.push_back(keys.encode(rank, key));
      StateKey state{marking, position};
      auto it = best.find(state);
      if (it != best.end() && !better(g, signature, it->second.first, it->second.second)) return;
      double f = g + h_suffix[position];
      if (it == best.end())
        best.emplace(std::move(state), std::make_pair(g, signature));
      else
        it->second = std::make_pair(g, signature);
      arena.push_back({std::move(marking), position, g, f, std::move(signature), current, std::move(move)});
      open.push(static_cast<int>(arena.size() - 1));
    };

    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      int transition = static_cast<int>(t);
      if (!transition_enabled(net, node.marking, transition)) continue;
      const TransitionDef& def = net.transitions()[t];
      if (def.label && node.position < n && *def.label == trace.events[node.position].activity) {
        offer(fired(net, node.marking, transition), node.position + 1, node.g + cf.synchronous,
              make_sync(net, transition, *def.label, cf.synchronous), 0, def.id);
      }
      Move model = make_model(net, transition, cf);
      offer(fired(net, node.marking, transition), node.position, node.g + model.cost, model, 1, def.id);
    }
    if (node.position < n) {
      const std::string& activity = trace.events[node.position].activity;
      offer(node.marking, node.position + 1, node.g + cf.log_move, make_log(activity, cf.log_move), 2,
            activity);
    }
  }
  throw model_error("final marking is unreachable; no alignment exists");
}

double worst_case_cost(const PetriNet& net, const Trace& trace, const CostFunction& cf) {
  validate_costs(cf);
  double log_part = cf.log_move * static_cast<double>(trace.events.size());

  // Cheapest model-only run, uniform-cost search over markings.
  const DenseMarking final_marking = net.dense(net.final_marking());
  std::map<DenseMarking, double> dist;
  using Entry = std::pair<double, DenseMarking>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  DenseMarking initial = net.dense(net.initial_marking());
  dist[initial] = 0.0;
  open.emplace(0.0, std::move(initial));
  std::size_t expansions = 0;
  while (!open.empty()) {
    auto [g, marking] = open.top();
    open.pop();
    auto it = dist.find(marking);
    if (it != dist.end() && it->second < g) continue;
    if (marking == final_marking) return log_part + g;
    if (++expansions > 1'000'000)
      throw resource_error("model-run search state budget exceeded", 1'000'000);
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      int transition = static_cast<int>(t);
      if (!transition_enabled(net, marking, transition)) continue;
      double cost = net.is_silent(transition) ? cf.silent_model_move : cf.visible_model_move;
      DenseMarking next = fired(net, marking, transition);
      auto found = dist.find(next);
      if (found != dist.end() && found->second <= g + cost) continue;
      dist[next] = g + cost;
      open.emplace(g + cost, std::move(next));
    }
  }
  throw model_error("final marking is unreachable; no model run exists");
}

double alignment_fitness(const Alignment& alignment, double worst) {
  if (alignment.cost == 0) return 1.0;
  if (worst <= 0) throw argument_error("worst-case cost must be positive for a non-free alignment");
  if (alignment.cost > worst) throw argument_error("alignment cost exceeds the worst-case cost");
  return 1.0 - alignment.cost / worst;
}

LogAlignment align_log(const PetriNet& net, const EventLog& log, const CostFunction& cf) {
  if (log.traces.empty()) throw argument_error("cannot align an empty log");
  LogAlignment out;
  double weighted = 0;
  std::size_t total = 0;
  for (const Variant& variant : variants(log)) {
    Trace representative;
    representative.case_id = variant.member_cases.front();
    for (const std::string& activity : variant.sequence)
      representative.events.push_back(Event{representative.case_id, activity, {}, {}});
    Alignment alignment = align_trace(net, representative, cf);
    double worst = worst_case_cost(net, representative, cf);
    weighted += static_cast<double>(variant.frequency) * alignment_fitness(alignment, worst);
    total += variant.frequency;
    out.per_variant.emplace_back(variant, std::move(alignment));
  }
  out.log_fitness = weighted / static_cast<double>(total);
  return out;
}

Alignment oracle_align(const PetriNet& net, const Trace& trace, const CostFunction& cf,
                       std::size_t state_bound) {
  validate_costs(cf);
  KeyInterner keys(net, trace);
  const std::size_t n = trace.events.size();
  const DenseMarking final_marking = net.dense(net.final_marking());

  std::vector<SearchNode> arena;
  arena.push_back({net.dense(net.initial_marking()), 0, 0.0, 0.0, {}, -1, {}});

  auto cmp = [&arena](int a, int b) {
    const SearchNode& na = arena[static_cast<std::size_t>(a)];
    const SearchNode& nb = arena[static_cast<std::size_t>(b)];
    if (na.g != nb.g) return na.g > nb.g;
    return nb.signature < na.signature;
  };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> open(cmp);
  open.push(0);
  std::map<StateKey, std::pair<double, Signature>> seen;
  seen.emplace(StateKey{arena[0].marking, 0}, std::make_pair(0.0, Signature{}));

  std::size_t visited = 0;
  while (!open.empty()) {
    int current = open.top();
    open.pop();
    const SearchNode node = arena[static_cast<std::size_t>(current)];
    auto found = seen.find(StateKey{node.marking, node.position});
    if (found != seen.end() && better(found->second.first, found->second.second, node.g, node.signature))
      continue;
    if (node.position == n && node.marking == final_marking) return reconstruct(arena, current);
    if (++visited > state_bound) throw resource_error("oracle state bound exceeded", state_bound);

    auto offer = [&](DenseMarking marking, std::size_t position, double g, Move move, int rank,
                     const std::string& key) {
      Signature signature = node.signature;
      signature.push_back(keys.encode(rank, key));
      StateKey state{marking, position};
      auto it = seen.find(state);
      if (it != seen.end() && !better(g, signature, it->second.first, it->second.second)) return;
      if (it == seen.end())
        seen.emplace(std::move(state), std::make_pair(g, signature));
      else
        it->second = std::make_pair(g, signature);
      arena.push_back({std::move(marking), position, g, g, std::move(signature), current, std::move(move)});
      open.push(static_cast<int>(arena.size() - 1));
    };

    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      int transition = static_cast<int>(t);
      if (!transition_enabled(net, node.marking, transition)) continue;
      const TransitionDef& def = net.transitions()[t];
      if (def.label && node.position < n && *def.label == trace.events[node.position].activity)
        offer(fired(net, node.marking, transition), node.position + 1, node.g + cf.synchronous,
              make_sync(net, transition, *def.label, cf.synchronous), 0, def.id);
      Move model = make_model(net, transition, cf);
      offer(fired(net, node.marking, transition), node.position, node.g + model.cost, model, 1, def.id);
    }
    if (node.position < n) {
      const std::string& activity = trace.events[node.position].activity;
      offer(node.marking, node.position + 1, node.g + cf.log_move, make_log(activity, cf.log_move), 2,
            activity);
    }
  }
  throw model_error("final marking is unreachable; no alignment exists");
}

}  // namespace confokit
