#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "confokit/alignment.hpp"
#include "confokit/event_log.hpp"
#include "confokit/process_model.hpp"
#include "confokit/taxonomy.hpp"

namespace testsupport {

using namespace confokit;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CONFOKIT_FIXTURE_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline EventLog sample_log() { return parse_csv_file(fixture("sample_log.csv"), CsvMapping{}); }
inline PetriNet sample_net() { return parse_model_file(fixture("sample_net.json")); }

inline Trace make_trace(const std::string& case_id, const std::vector<std::string>& activities) {
  Trace trace;
  trace.case_id = case_id;
  for (std::size_t i = 0; i < activities.size(); ++i)
    trace.events.push_back(Event{case_id, activities[i], Timestamp{static_cast<std::int64_t>(i) * 60'000}, {}});
  return trace;
}

inline EventLog make_log(const std::vector<Trace>& traces) {
  EventLog log;
  log.traces = traces;
  return log;
}

// Engine output reduced modulo the standard library's distribution
// implementations, so sequences are identical across platforms.
inline std::int64_t rand_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <typename T>
inline const T& rand_choice(std::mt19937_64& rng, const std::vector<T>& values) {
  return values[static_cast<std::size_t>(rand_int(rng, 0, static_cast<std::int64_t>(values.size()) - 1))];
}

// --- random workflow nets -------------------------------------------------
//
// Built by composing sequence / exclusive-choice / parallel blocks between
// two places, exactly the shapes the engines are meant for. Parallel blocks
// use visible split/join transitions; silent transitions only appear as
// 1-in/1-out skips and loop-backs, so they preserve token counts.

struct RandomNetOptions {
  std::size_t max_transitions = 8;
  bool allow_loops = false;
  bool allow_silent_skips = true;
};

struct NetBuilder {
  std::vector<std::string> places;
  std::vector<TransitionDef> transitions;
  std::vector<std::pair<std::string, std::string>> arcs;
  int place_counter = 0;
  int silent_counter = 0;

  std::string new_place() {
    std::string id = "q" + std::to_string(place_counter++);
    places.push_back(id);
    return id;
  }
  std::string add_visible() {
    std::string label(1, static_cast<char>('a' + transitions.size()));
    transitions.push_back(TransitionDef{label, label});
    return label;
  }
  std::string add_silent() {
    std::string id = "tau" + std::to_string(silent_counter++);
    transitions.push_back(TransitionDef{id, std::nullopt});
    return id;
  }
  void arc(const std::string& from, const std::string& to) { arcs.emplace_back(from, to); }
  std::size_t remaining(const RandomNetOptions& opt) const {
    return opt.max_transitions > transitions.size() ? opt.max_transitions - transitions.size() : 0;
  }
};

// Grows a block between `in` and `out` spending at most `budget` transitions
// (and at least one). Loop-backs are charged to the block's own budget.
inline void grow_block(NetBuilder& b, std::mt19937_64& rng, const RandomNetOptions& opt,
                       const std::string& in, const std::string& out, std::size_t budget, int depth) {
  bool want_loop = opt.allow_loops && depth > 0 && budget >= 2 && rand_int(rng, 0, 5) == 0;
  if (want_loop) --budget;

  int kind = 0;  // leaf
  if (depth < 4 && budget >= 2) {
    std::int64_t roll = rand_int(rng, 0, 9);
    if (roll < 2) kind = 0;
    else if (roll < 6) kind = 1;                 // sequence
    else if (roll < 8 || budget < 4) kind = 2;   // exclusive choice
    else kind = 3;                               // parallel
  }
  switch (kind) {
    case 0: {
      std::string t = b.add_visible();
      b.arc(in, t);
      b.arc(t, out);
      break;
    }
    case 1: {
      std::string mid = b.new_place();
      std::size_t first = static_cast<std::size_t>(rand_int(rng, 1, static_cast<std::int64_t>(budget) - 1));
      grow_block(b, rng, opt, in, mid, first, depth + 1);
      grow_block(b, rng, opt, mid, out, budget - first, depth + 1);
      break;
    }
    case 2: {
      if (opt.allow_silent_skips && rand_int(rng, 0, 2) == 0) {
        grow_block(b, rng, opt, in, out, budget - 1, depth + 1);
        std::string tau = b.add_silent();
        b.arc(in, tau);
        b.arc(tau, out);
      } else {
        std::size_t first =
            static_cast<std::size_t>(rand_int(rng, 1, static_cast<std::int64_t>(budget) - 1));
        grow_block(b, rng, opt, in, out, first, depth + 1);
        grow_block(b, rng, opt, in, out, budget - first, depth + 1);
      }
      break;
    }
    case 3: {
      std::string split = b.add_visible();
      std::string left_in = b.new_place(), right_in = b.new_place();
      std::string left_out = b.new_place(), right_out = b.new_place();
      b.arc(in, split);
      b.arc(split, left_in);
      b.arc(split, right_in);
      std::size_t inner = budget - 2;
      std::size_t first = static_cast<std::size_t>(rand_int(rng, 1, static_cast<std::int64_t>(inner) - 1));
      grow_block(b, rng, opt, left_in, left_out, first, depth + 1);
      grow_block(b, rng, opt, right_in, right_out, inner - first, depth + 1);
      std::string join = b.add_visible();
      b.arc(left_out, join);
      b.arc(right_out, join);
      b.arc(join, out);
      break;
    }
  }
  if (want_loop) {
    std::string tau = b.add_silent();
    b.arc(out, tau);
    b.arc(tau, in);
  }
}

inline PetriNet random_net(std::mt19937_64& rng, const RandomNetOptions& opt = {}) {
  NetBuilder b;
  std::string source = b.new_place();
  std::string sink = b.new_place();
  std::size_t budget =
      static_cast<std::size_t>(rand_int(rng, 2, static_cast<std::int64_t>(opt.max_transitions)));
  grow_block(b, rng, opt, source, sink, budget, 0);
  Marking initial, final_marking;
  initial.tokens[source] = 1;
  final_marking.tokens[sink] = 1;
  return PetriNet(b.places, b.transitions, b.arcs, initial, final_marking);
}

// Random complete run of the net (visible projection).
inline std::vector<std::string> random_model_run(const PetriNet& net, std::mt19937_64& rng,
                                                 std::size_t step_cap = 200) {
  std::vector<std::string> labels;
  Marking marking = net.initial_marking();
  for (std::size_t step = 0; step < step_cap; ++step) {
    if (marking == net.final_marking()) return labels;
    auto enabled_set = enabled(net, marking);
    if (enabled_set.empty()) break;
    std::vector<std::string> choices(enabled_set.begin(), enabled_set.end());
    const std::string& transition = rand_choice(rng, choices);
    int index = net.transition_index(transition);
    if (!net.is_silent(index)) labels.push_back(*net.transitions()[static_cast<std::size_t>(index)].label);
    marking = fire(net, marking, transition);
  }
  return labels;  // cap hit on a looping walk; still a valid prefix
}

inline std::vector<std::string> net_alphabet(const PetriNet& net) {
  std::vector<std::string> alphabet;
  for (const TransitionDef& t : net.transitions())
    if (t.label) alphabet.push_back(*t.label);
  return alphabet;
}

// 0-3 random edits: insert, delete, replace, or adjacent swap.
inline std::vector<std::string> perturb(std::mt19937_64& rng, std::vector<std::string> run,
                                        const std::vector<std::string>& alphabet, bool allow_foreign) {
  std::vector<std::string> pool = alphabet;
  if (allow_foreign) pool.push_back("zz");
  std::int64_t edits = rand_int(rng, 1, 3);
  for (std::int64_t e = 0; e < edits; ++e) {
    std::int64_t op = rand_int(rng, 0, 3);
    if (run.empty()) op = 0;
    if (op == 0 && !pool.empty()) {
      std::size_t at = static_cast<std::size_t>(rand_int(rng, 0, static_cast<std::int64_t>(run.size())));
      run.insert(run.begin() + static_cast<std::ptrdiff_t>(at), rand_choice(rng, pool));
    } else if (op == 1) {
      std::size_t at = static_cast<std::size_t>(rand_int(rng, 0, static_cast<std::int64_t>(run.size()) - 1));
      run.erase(run.begin() + static_cast<std::ptrdiff_t>(at));
    } else if (op == 2 && !pool.empty()) {
      std::size_t at = static_cast<std::size_t>(rand_int(rng, 0, static_cast<std::int64_t>(run.size()) - 1));
      run[at] = rand_choice(rng, pool);
    } else if (run.size() >= 2) {
      std::size_t at = static_cast<std::size_t>(rand_int(rng, 0, static_cast<std::int64_t>(run.size()) - 2));
      std::swap(run[at], run[at + 1]);
    }
  }
  if (run.size() > 10) run.resize(10);
  return run;
}

// Random (net, trace) instance: half in-language runs, half perturbed.
struct RandomInstance {
  PetriNet net;
  Trace trace;
};

inline RandomInstance random_instance(std::mt19937_64& rng, const RandomNetOptions& opt,
                                      bool allow_foreign_labels) {
  PetriNet net = random_net(rng, opt);
  std::vector<std::string> run = random_model_run(net, rng);
  if (rand_int(rng, 0, 1) == 1) run = perturb(rng, run, net_alphabet(net), allow_foreign_labels);
  if (run.size() > 10) run.resize(10);
  return RandomInstance{std::move(net), make_trace("c0", run)};
}

// --- random taxonomy data -------------------------------------------------

inline TaskDescriptor random_descriptor(std::mt19937_64& rng) {
  auto pick = [&rng](const std::set<std::string>& vocabulary) {
    std::vector<std::string> values(vocabulary.begin(), vocabulary.end());
    return rand_choice(rng, values);
  };
  TaskDescriptor d;
  d.goal = pick(goal_vocabulary());
  d.means = pick(means_vocabulary());
  d.data_characteristic = pick(characteristic_vocabulary());
  std::vector<std::string> perspectives(constraint_vocabulary().begin(), constraint_vocabulary().end());
  std::int64_t subset_size = rand_int(rng, 1, static_cast<std::int64_t>(perspectives.size()));
  for (std::int64_t i = 0; i < subset_size; ++i) {
    const std::string& p = perspectives[static_cast<std::size_t>(
        rand_int(rng, 0, static_cast<std::int64_t>(perspectives.size()) - 1))];
    if (std::find(d.constraint_type.begin(), d.constraint_type.end(), p) == d.constraint_type.end())
      d.constraint_type.push_back(p);
  }
  d.data_target = pick(target_vocabulary());
  d.cardinality = pick(cardinality_vocabulary());
  return d;
}

inline TaskCatalog random_catalog(std::mt19937_64& rng) {
  TaskCatalog catalog;
  std::int64_t entries = rand_int(rng, 1, 20);
  for (std::int64_t i = 0; i < entries; ++i)
    catalog.entries.push_back(CatalogEntry{random_descriptor(rng), rand_int(rng, 1, 9), "generated"});
  return catalog;
}

inline std::vector<AnalysisSession> random_sessions(std::mt19937_64& rng) {
  std::vector<AnalysisSession> sessions;
  std::int64_t count = rand_int(rng, 1, 10);
  for (std::int64_t s = 0; s < count; ++s) {
    AnalysisSession session;
    session.session_id = "s" + std::to_string(s);
    std::int64_t steps = rand_int(rng, 1, 6);
    for (std::int64_t i = 0; i < steps; ++i) session.steps.push_back(random_descriptor(rng));
    sessions.push_back(std::move(session));
  }
  return sessions;
}

}  // namespace testsupport
